#include "bmse/reference.hpp"

namespace bmse::reference {

namespace {

Eigen::RowVectorXd window_mean(const Eigen::MatrixXd& y, Eigen::Index start, Eigen::Index len) {
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(y.cols());
  for (Eigen::Index t = start; t < start + len; ++t) acc += y.row(t);
  return acc / static_cast<double>(len);
}

// sum over l = 0..n-k of (Ybar_l(k) - Ybar)(Ybar_l(k) - Ybar)^T
Eigen::MatrixXd overlapping_sum(const Eigen::MatrixXd& y, const Eigen::RowVectorXd& grand,
                                Eigen::Index k) {
  const Eigen::Index p = y.cols();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index l = 0; l + k <= y.rows(); ++l) {
    const Eigen::RowVectorXd d = window_mean(y, l, k) - grand;
    acc += d.transpose() * d;
  }
  return acc;
}

}  // namespace

Eigen::MatrixXd bm_naive(const ChainMatrix& chain, std::int64_t b) {
  const auto& y = chain.data();
  const Eigen::Index a = chain.n() / b;
  const Eigen::RowVectorXd grand = window_mean(y, 0, a * b);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(chain.p(), chain.p());
  for (Eigen::Index l = 0; l < a; ++l) {
    const Eigen::RowVectorXd d = window_mean(y, l * b, b) - grand;
    acc += d.transpose() * d;
  }
  return acc * (static_cast<double>(b) / static_cast<double>(a - 1));
}

Eigen::MatrixXd obm_naive(const ChainMatrix& chain, std::int64_t b) {
  const auto& y = chain.data();
  const Eigen::RowVectorXd grand = window_mean(y, 0, chain.n());
  return overlapping_sum(y, grand, b) * (static_cast<double>(b) / static_cast<double>(chain.n()));
}

Eigen::MatrixXd generalized_obm_naive(const ChainMatrix& chain, const LagWindow& window) {
  const auto& y = chain.data();
  const Eigen::RowVectorXd grand = window_mean(y, 0, chain.n());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(chain.p(), chain.p());
  for (std::int64_t k = 1; k <= window.b(); ++k) {
    const double weight = static_cast<double>(k) * static_cast<double>(k) * window.delta2(k);
    acc += weight * overlapping_sum(y, grand, k);
  }
  return acc / static_cast<double>(chain.n());
}

}  // namespace bmse::reference
