#ifndef BMSE_BATCH_SELECT_HPP
#define BMSE_BATCH_SELECT_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>
#include <vector>

#include "bmse/chain.hpp"
#include "bmse/lag_window.hpp"

namespace bmse {

/// Fitted AR(m) marginal model. `gamma_hat` holds the sample autocovariances
/// at lags 0..m that the Yule-Walker system was built from.
struct ArFit {
  int m = 0;
  std::vector<double> phi;
  double sigma2_e = 0.0;
  std::vector<double> gamma_hat;
  std::int64_t n = 0;
  double aic = 0.0;
};

// Reject fits with sum(phi) >= 1 - margin.
inline constexpr double kStationarityMargin = 1e-6;

/// floor(10 log10 n), capped below n/2.
int default_max_order(std::int64_t n);

/// Yule-Walker fits at orders 1..max_order (Levinson-Durbin); returns the
/// AIC minimizer among the fits that clear the stationarity margin.
/// max_order <= 0 selects default_max_order(n).
ArFit fit_ar(const Eigen::Ref<const Eigen::VectorXd>& series, int max_order = 0);

/// Same selection from given autocovariances gamma(0..max_order) of a series
/// of length n.
ArFit fit_ar_from_autocov(const std::vector<double>& gamma, std::int64_t n, int max_order);

/// Builds the fit an exact AR model would produce: gamma_hat are the model's
/// own autocovariances at lags 0..m. Requires a stationary phi.
ArFit ar_model(std::vector<double> phi, double sigma2_e);

/// Autocovariances 0..max_lag of a stationary AR model.
std::vector<double> ar_model_autocovariance(const std::vector<double>& phi, double sigma2_e,
                                            std::int64_t max_lag);

/// sigma2_e / (1 - sum phi)^2: the sum of all autocovariances.
double ar_sigma(const ArFit& fit);

/// -2 sum_{k>=1} k gamma(k) of the fitted model, in closed form.
double ar_gamma(const ArFit& fit);

/// The alternative closed form that substitutes sigma2_e for the full
/// autocovariance sum and scales only the second bracket term by
/// 1/(1 - sum phi). Kept for comparison runs only; it is not exact.
double ar_gamma_printed(const ArFit& fit);

enum class PilotMethod { kArFit, kNonparametric };
std::string_view to_string(PilotMethod method);

/// Per-component pilot values of Sigma_ii and Gamma_ii.
struct PilotEstimates {
  Eigen::VectorXd sigma_p;
  Eigen::VectorXd gamma_p;
  PilotMethod method = PilotMethod::kArFit;
  std::vector<int> orders;     // AR orders, AR pilot only
  std::int64_t bandwidth = 0;  // flat-top bandwidth, nonparametric pilot only
};

PilotEstimates ar_pilot(const ChainMatrix& chain, int max_order = 0);

/// Flat-top lag-window sums at bandwidth 2r, r from lag_rule.
PilotEstimates nonparametric_pilot(const ChainMatrix& chain);

/// Smallest r >= 1 with max-component |rho(r+s)| < 2 sqrt(log n / n) for
/// s = 1..5. Searches r <= n/4.
std::int64_t lag_rule(const ChainMatrix& chain);

enum class SelectionMethod { kArFit, kNonparametric, kLagBased };
std::string_view to_string(SelectionMethod method);
SelectionMethod parse_selection_method(std::string_view name);

struct BatchSizeResult {
  std::int64_t b = 0;
  double coefficient = 0.0;      // (sum Gamma_ii^2 / sum Sigma_ii^2)^(1/3)
  double family_constant = 0.0;  // (2 C^2 / S)^(1/3)
  SelectionMethod method = SelectionMethod::kArFit;
  std::int64_t n = 0;
};

/// (sum Gamma_ii^2 / sum Sigma_ii^2)^(1/3) over the diagonals.
double bopt_coefficient(const Eigen::Ref<const Eigen::VectorXd>& sigma_diag,
                        const Eigen::Ref<const Eigen::VectorXd>& gamma_diag);

BatchSizeResult lag_based_batchsize(const ChainMatrix& chain, bool flat_top_target);

/// MSE-optimal batch size for a run of length n. Flat-top windows (or
/// flat_top_target) use the Bartlett constants of the same family and an even
/// result.
BatchSizeResult optimal_batchsize(const PilotEstimates& pilot, std::int64_t n, WindowKind kind,
                                  Family family, bool flat_top_target);

}  // namespace bmse

#endif  // BMSE_BATCH_SELECT_HPP
