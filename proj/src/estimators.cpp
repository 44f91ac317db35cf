#include "bmse/estimators.hpp"

#include <string>

namespace bmse {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kBM: return "bm";
    case Method::kOBM: return "obm";
    case Method::kGeneralizedOBM: return "gobm";
    case Method::kFlatTopBM: return "ft-bm";
    case Method::kFlatTopOBM: return "ft-obm";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "bm") return Method::kBM;
  if (name == "obm") return Method::kOBM;
  if (name == "gobm") return Method::kGeneralizedOBM;
  if (name == "ft-bm") return Method::kFlatTopBM;
  if (name == "ft-obm") return Method::kFlatTopOBM;
  throw Error(ErrorCode::kInvalidArgument, "unknown estimator '" + std::string(name) + "'");
}

bool is_flat_top(Method method) {
  return method == Method::kFlatTopBM || method == Method::kFlatTopOBM;
}

namespace kernel {

PrefixSums::PrefixSums(const Eigen::MatrixXd& data)
    : n_(data.rows()), p_(data.cols()), sums_(static_cast<std::size_t>((n_ + 1) * p_), 0.0L) {
  const Eigen::VectorXd mean = data.colwise().mean().transpose();
  for (Eigen::Index i = 0; i < p_; ++i) {
    long double acc = 0.0L;
    for (Eigen::Index t = 0; t < n_; ++t) {
      acc += static_cast<long double>(data(t, i)) - static_cast<long double>(mean(i));
      sums_[static_cast<std::size_t>((t + 1) * p_ + i)] = acc;
    }
  }
}

namespace {
constexpr Eigen::Index kBlock = 4096;
}

Eigen::MatrixXd overlapping_outer_sum(const PrefixSums& prefix, Eigen::Index k) {
  const Eigen::Index p = prefix.p();
  const Eigen::Index count = prefix.n() - k + 1;
  const Eigen::Index blocks = (count + kBlock - 1) / kBlock;
  const Eigen::Index tri = p * (p + 1) / 2;
  std::vector<long double> partial(static_cast<std::size_t>(blocks * tri), 0.0L);

#pragma omp parallel for schedule(static) if (blocks > 1)
  for (Eigen::Index blk = 0; blk < blocks; ++blk) {
    long double* acc = partial.data() + blk * tri;
    std::vector<long double> s(static_cast<std::size_t>(p));
    const Eigen::Index first = blk * kBlock;
    const Eigen::Index last = std::min(count, first + kBlock);
    for (Eigen::Index l = first; l < last; ++l) {
      const long double* lo = prefix.row(l);
      const long double* hi = prefix.row(l + k);
      for (Eigen::Index i = 0; i < p; ++i) s[i] = hi[i] - lo[i];
      Eigen::Index idx = 0;
      for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i; j < p; ++j) acc[idx++] += s[i] * s[j];
      }
    }
  }

  std::vector<long double> total(static_cast<std::size_t>(tri), 0.0L);
  for (Eigen::Index blk = 0; blk < blocks; ++blk) {
    for (Eigen::Index idx = 0; idx < tri; ++idx) total[idx] += partial[blk * tri + idx];
  }
  Eigen::MatrixXd out(p, p);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i; j < p; ++j) {
      out(i, j) = out(j, i) = static_cast<double>(total[idx++]);
    }
  }
  return out;
}

}  // namespace kernel

namespace {

void check_obm_b(const ChainMatrix& chain, std::int64_t b) {
  if (b < 1 || b > chain.n() - 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "batch size " + std::to_string(b) + " out of range [1, n-1] for n = " +
                    std::to_string(chain.n()));
  }
}

void check_bm_b(const ChainMatrix& chain, std::int64_t b) {
  if (b < 1) throw Error(ErrorCode::kInvalidArgument, "batch size must be >= 1");
  if (chain.n() / b < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "batch size " + std::to_string(b) + " too large: fewer than 2 batches for n = " +
                    std::to_string(chain.n()));
  }
}

void check_even(std::int64_t b) {
  if (b < 2 || b % 2 != 0) throw Error(ErrorCode::kInvalidArgument, "flat-top requires even b");
}

void symmetrize(Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = m(j, i) = v;
    }
  }
}

}  // namespace

CovEstimate bm(const ChainMatrix& chain, std::int64_t b) {
  check_bm_b(chain, b);
  const Eigen::Index p = chain.p();
  const Eigen::Index a = chain.n() / b;
  const auto& y = chain.data();

  Eigen::MatrixXd means(a, p);
  for (Eigen::Index l = 0; l < a; ++l) {
    means.row(l) = y.middleRows(l * b, b).colwise().sum() / static_cast<double>(b);
  }
  const Eigen::RowVectorXd grand = means.colwise().mean();
  const Eigen::MatrixXd centered = means.rowwise() - grand;
  Eigen::MatrixXd sigma = centered.transpose() * centered;
  sigma *= static_cast<double>(b) / static_cast<double>(a - 1);
  symmetrize(sigma);
  return {std::move(sigma), Method::kBM, WindowKind::kBartlett, b, chain.n()};
}

CovEstimate obm(const ChainMatrix& chain, std::int64_t b) {
  check_obm_b(chain, b);
  const kernel::PrefixSums prefix(chain.data());
  Eigen::MatrixXd sigma = kernel::overlapping_outer_sum(prefix, b);
  sigma /= static_cast<double>(chain.n()) * static_cast<double>(b);
  return {std::move(sigma), Method::kOBM, WindowKind::kBartlett, b, chain.n()};
}

CovEstimate generalized_obm(const ChainMatrix& chain, const LagWindow& window) {
  check_obm_b(chain, window.b());
  const kernel::PrefixSums prefix(chain.data());
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(chain.p(), chain.p());
  for (const std::int64_t k : window.delta2_support()) {
    sigma += window.delta2(k) * kernel::overlapping_outer_sum(prefix, k);
  }
  sigma /= static_cast<double>(chain.n());
  return {std::move(sigma), Method::kGeneralizedOBM, window.kind(), window.b(), chain.n()};
}

CovEstimate flat_top_bm(const ChainMatrix& chain, std::int64_t b) {
  check_even(b);
  check_bm_b(chain, b);
  Eigen::MatrixXd sigma = 2.0 * bm(chain, b).sigma - bm(chain, b / 2).sigma;
  return {std::move(sigma), Method::kFlatTopBM, WindowKind::kFlatTop, b, chain.n()};
}

CovEstimate flat_top_obm(const ChainMatrix& chain, std::int64_t b) {
  check_even(b);
  check_obm_b(chain, b);
  const kernel::PrefixSums prefix(chain.data());
  const double n = static_cast<double>(chain.n());
  const double bd = static_cast<double>(b);
  const Eigen::MatrixXd full = kernel::overlapping_outer_sum(prefix, b) / (n * bd);
  const Eigen::MatrixXd half = kernel::overlapping_outer_sum(prefix, b / 2) / (n * (bd / 2.0));
  Eigen::MatrixXd sigma = 2.0 * full - half;
  return {std::move(sigma), Method::kFlatTopOBM, WindowKind::kFlatTop, b, chain.n()};
}

CovEstimate estimate(const ChainMatrix& chain, Method method, std::int64_t b,
                     std::optional<WindowKind> window) {
  switch (method) {
    case Method::kBM: return bm(chain, b);
    case Method::kOBM: return obm(chain, b);
    case Method::kGeneralizedOBM:
      return generalized_obm(chain, LagWindow(window.value_or(WindowKind::kBartlett), b));
    case Method::kFlatTopBM: return flat_top_bm(chain, b);
    case Method::kFlatTopOBM: return flat_top_obm(chain, b);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown estimator");
}

}  // namespace bmse
