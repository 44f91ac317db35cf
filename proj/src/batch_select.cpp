#include "bmse/batch_select.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <string>

namespace bmse {

std::string_view to_string(PilotMethod method) {
  return method == PilotMethod::kArFit ? "ar" : "np";
}

std::string_view to_string(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::kArFit: return "ar";
    case SelectionMethod::kNonparametric: return "np";
    case SelectionMethod::kLagBased: return "lag";
  }
  return "unknown";
}

SelectionMethod parse_selection_method(std::string_view name) {
  if (name == "ar") return SelectionMethod::kArFit;
  if (name == "np") return SelectionMethod::kNonparametric;
  if (name == "lag") return SelectionMethod::kLagBased;
  throw Error(ErrorCode::kInvalidArgument, "unknown batch size method '" + std::string(name) + "'");
}

int default_max_order(std::int64_t n) {
  const int by_log = static_cast<int>(std::floor(10.0 * std::log10(static_cast<double>(n))));
  const auto cap = static_cast<int>((n - 1) / 2);
  return std::max(1, std::min(by_log, cap));
}

namespace {

double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

bool clears_margin(const std::vector<double>& phi) {
  return sum_of(phi) < 1.0 - kStationarityMargin;
}

}  // namespace

ArFit fit_ar(const Eigen::Ref<const Eigen::VectorXd>& series, int max_order) {
  const auto n = static_cast<std::int64_t>(series.size());
  if (n < 10) throw Error(ErrorCode::kInvalidArgument, "AR fit needs n >= 10");
  if (max_order <= 0) max_order = default_max_order(n);
  if (2 * static_cast<std::int64_t>(max_order) >= n) {
    throw Error(ErrorCode::kInvalidArgument, "max_order must be < n/2");
  }

  const Eigen::VectorXd centered = series.array() - series.mean();
  std::vector<double> g(static_cast<std::size_t>(max_order) + 1);
  for (int k = 0; k <= max_order; ++k) g[k] = centered_autocovariance(centered, k);
  return fit_ar_from_autocov(g, n, max_order);
}

ArFit fit_ar_from_autocov(const std::vector<double>& g, std::int64_t n, int max_order) {
  if (max_order < 1 || g.size() < static_cast<std::size_t>(max_order) + 1) {
    throw Error(ErrorCode::kInvalidArgument, "need autocovariances at lags 0..max_order");
  }
  if (!(g[0] > 0.0)) throw Error(ErrorCode::kDegenerate, "constant series: gamma(0) = 0");

  ArFit best;
  bool have_best = false;
  bool any_solved = false;
  std::vector<double> phi;
  double err = g[0];
  for (int m = 1; m <= max_order; ++m) {
    // Levinson-Durbin step from order m-1 to m.
    double acc = g[m];
    for (int j = 1; j < m; ++j) acc -= phi[j - 1] * g[m - j];
    const double kappa = acc / err;
    if (!std::isfinite(kappa) || std::abs(kappa) >= 1.0) break;
    std::vector<double> next(static_cast<std::size_t>(m));
    for (int j = 1; j < m; ++j) next[j - 1] = phi[j - 1] - kappa * phi[m - j - 1];
    next[m - 1] = kappa;
    phi = std::move(next);
    err *= 1.0 - kappa * kappa;

    double s2 = g[0];
    for (int i = 1; i <= m; ++i) s2 -= phi[i - 1] * g[i];
    if (!(s2 > 0.0)) break;
    any_solved = true;
    if (!clears_margin(phi)) continue;

    const double aic = static_cast<double>(n) * std::log(s2) + 2.0 * m;
    if (!have_best || aic < best.aic) {
      best.m = m;
      best.phi = phi;
      best.sigma2_e = s2;
      best.gamma_hat.assign(g.begin(), g.begin() + m + 1);
      best.n = n;
      best.aic = aic;
      have_best = true;
    }
  }
  if (!any_solved) throw Error(ErrorCode::kSingular, "Yule-Walker system singular at every order");
  if (!have_best) {
    throw Error(ErrorCode::kNonStationary, "every fitted AR order violates the stationarity margin");
  }
  return best;
}

std::vector<double> ar_model_autocovariance(const std::vector<double>& phi, double sigma2_e,
                                            std::int64_t max_lag) {
  const auto m = static_cast<Eigen::Index>(phi.size());
  // gamma(0) - sum phi_i gamma(i) = sigma2_e; gamma(k) - sum phi_i gamma(|k-i|) = 0.
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m + 1, m + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  rhs(0) = sigma2_e;
  for (Eigen::Index k = 0; k <= m; ++k) {
    for (Eigen::Index i = 1; i <= m; ++i) a(k, std::abs(k - i)) -= phi[i - 1];
  }
  const Eigen::VectorXd head = a.fullPivLu().solve(rhs);
  std::vector<double> g(static_cast<std::size_t>(std::max<std::int64_t>(max_lag, m)) + 1);
  for (Eigen::Index k = 0; k <= m; ++k) g[k] = head(k);
  for (std::size_t k = m + 1; k < g.size(); ++k) {
    double v = 0.0;
    for (Eigen::Index i = 1; i <= m; ++i) v += phi[i - 1] * g[k - i];
    g[k] = v;
  }
  g.resize(static_cast<std::size_t>(max_lag) + 1);
  return g;
}

ArFit ar_model(std::vector<double> phi, double sigma2_e) {
  const auto m = static_cast<Eigen::Index>(phi.size());
  if (m > 0) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) companion(0, i) = phi[i];
    for (Eigen::Index i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    const double radius = companion.eigenvalues().cwiseAbs().maxCoeff();
    if (!(radius < 1.0)) throw Error(ErrorCode::kNonStationary, "AR coefficients are not stationary");
  }
  ArFit fit;
  fit.m = static_cast<int>(m);
  fit.gamma_hat = ar_model_autocovariance(phi, sigma2_e, m);
  fit.phi = std::move(phi);
  fit.sigma2_e = sigma2_e;
  return fit;
}

double ar_sigma(const ArFit& fit) {
  const double denom = 1.0 - sum_of(fit.phi);
  if (!(denom > 0.0)) throw Error(ErrorCode::kNonStationary, "sum of AR coefficients >= 1");
  return fit.sigma2_e / (denom * denom);
}

namespace {

// sum_i phi_i sum_{k=1}^{i} k gamma(i - k)
double lower_lag_term(const ArFit& fit) {
  double total = 0.0;
  for (int i = 1; i <= fit.m; ++i) {
    double inner = 0.0;
    for (int k = 1; k <= i; ++k) inner += k * fit.gamma_hat[i - k];
    total += fit.phi[i - 1] * inner;
  }
  return total;
}

double weighted_phi_sum(const ArFit& fit) {
  double s = 0.0;
  for (int i = 1; i <= fit.m; ++i) s += i * fit.phi[i - 1];
  return s;
}

}  // namespace

double ar_gamma(const ArFit& fit) {
  const double sigma = ar_sigma(fit);
  const double denom = 1.0 - sum_of(fit.phi);
  // sum_{s>=1} gamma(s) = (Sigma - gamma(0)) / 2
  const double tail = 0.5 * (sigma - fit.gamma_hat[0]);
  const double sum_k_gamma = (lower_lag_term(fit) + tail * weighted_phi_sum(fit)) / denom;
  return -2.0 * sum_k_gamma;
}

double ar_gamma_printed(const ArFit& fit) {
  const double denom = 1.0 - sum_of(fit.phi);
  if (!(denom > 0.0)) throw Error(ErrorCode::kNonStationary, "sum of AR coefficients >= 1");
  const double half = 0.5 * (fit.sigma2_e - fit.gamma_hat[0]);
  return -2.0 * (lower_lag_term(fit) + half * weighted_phi_sum(fit) / denom);
}

PilotEstimates ar_pilot(const ChainMatrix& chain, int max_order) {
  const Eigen::Index p = chain.p();
  PilotEstimates out;
  out.method = PilotMethod::kArFit;
  out.sigma_p.resize(p);
  out.gamma_p.resize(p);
  out.orders.resize(static_cast<std::size_t>(p));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(p));

#pragma omp parallel for schedule(dynamic) if (p > 1)
  for (Eigen::Index i = 0; i < p; ++i) {
    try {
      const ArFit fit = fit_ar(chain.column(i), max_order);
      out.sigma_p(i) = ar_sigma(fit);
      out.gamma_p(i) = ar_gamma(fit);
      out.orders[i] = fit.m;
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "component " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::int64_t lag_rule(const ChainMatrix& chain) {
  const std::int64_t n = chain.n();
  if (n < 10) throw Error(ErrorCode::kInvalidArgument, "lag rule needs n >= 10");
  const CorrelationScanner scan(chain);
  const double threshold = 2.0 * std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(n));
  const std::int64_t cap = n / 4;
  int run = 0;
  // run counts consecutive lags below threshold ending at k; r = k - 5.
  for (std::int64_t k = 2; k < n && k - 5 <= cap; ++k) {
    if (scan.max_abs(k) < threshold) {
      if (++run == 5) return k - 5;
    } else {
      run = 0;
    }
  }
  throw Error(ErrorCode::kNoCutoff, "no correlation cutoff found");
}

PilotEstimates nonparametric_pilot(const ChainMatrix& chain) {
  if (chain.n() < 100) throw Error(ErrorCode::kInvalidArgument, "nonparametric pilot needs n >= 100");
  const std::int64_t bandwidth = 2 * lag_rule(chain);
  const LagWindow window(WindowKind::kFlatTop, bandwidth);
  const Eigen::Index p = chain.p();

  PilotEstimates out;
  out.method = PilotMethod::kNonparametric;
  out.bandwidth = bandwidth;
  out.sigma_p.resize(p);
  out.gamma_p.resize(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const AcovSeries g = sample_autocovariance(chain, i, bandwidth);
    double sigma = g[0];
    double gamma = 0.0;
    for (std::int64_t k = 1; k <= bandwidth; ++k) {
      const double wk = window.value(k) * g[static_cast<std::size_t>(k)];
      sigma += 2.0 * wk;
      gamma -= 2.0 * static_cast<double>(k) * wk;
    }
    if (!(sigma > 0.0)) sigma = g[0] * 1e-6;
    out.sigma_p(i) = sigma;
    out.gamma_p(i) = gamma;
  }
  return out;
}

double bopt_coefficient(const Eigen::Ref<const Eigen::VectorXd>& sigma_diag,
                        const Eigen::Ref<const Eigen::VectorXd>& gamma_diag) {
  const double denom = sigma_diag.squaredNorm();
  if (!(denom > 0.0)) throw Error(ErrorCode::kDegenerate, "all pilot Sigma values are zero");
  return std::cbrt(gamma_diag.squaredNorm() / denom);
}

namespace {

std::int64_t largest_even_at_most(std::int64_t v) { return v - (v % 2); }

std::int64_t clamp_batch(double raw, std::int64_t n, bool even) {
  const std::int64_t half = n / 2;
  auto b = static_cast<std::int64_t>(std::llround(std::min(raw, static_cast<double>(half))));
  if (!even) return std::clamp<std::int64_t>(b, 1, std::max<std::int64_t>(1, half));
  if (b % 2 != 0) ++b;
  const std::int64_t top = std::max<std::int64_t>(2, largest_even_at_most(half));
  return std::clamp<std::int64_t>(b, 2, top);
}

}  // namespace

BatchSizeResult lag_based_batchsize(const ChainMatrix& chain, bool /*flat_top_target*/) {
  const std::int64_t r = lag_rule(chain);
  BatchSizeResult out;
  out.method = SelectionMethod::kLagBased;
  out.n = chain.n();
  out.b = clamp_batch(static_cast<double>(2 * r), chain.n(), true);
  return out;
}

BatchSizeResult optimal_batchsize(const PilotEstimates& pilot, std::int64_t n, WindowKind kind,
                                  Family family, bool flat_top_target) {
  if (kind == WindowKind::kTukeyHanning) {
    throw Error(ErrorCode::kUnsupported, "batch size optimization is not available for Tukey-Hanning");
  }
  const bool even = flat_top_target || kind == WindowKind::kFlatTop;
  // Flat-top constants give C = 0 and a degenerate optimum; use Bartlett's.
  const MseConstants c = mse_constants(WindowKind::kBartlett, family);

  BatchSizeResult out;
  out.method = pilot.method == PilotMethod::kArFit ? SelectionMethod::kArFit
                                                   : SelectionMethod::kNonparametric;
  out.n = n;
  out.coefficient = bopt_coefficient(pilot.sigma_p, pilot.gamma_p);
  out.family_constant = std::cbrt(2.0 * c.C * c.C / c.S);
  // On a diagonal entry the optimum's denominator is Sigma_ii^2 + Sigma_ii^2.
  const double raw = out.family_constant * out.coefficient * std::cbrt(0.5 * static_cast<double>(n));
  out.b = clamp_batch(raw, n, even);
  return out;
}

}  // namespace bmse
