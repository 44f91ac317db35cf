#ifndef BMSE_INFERENCE_HPP
#define BMSE_INFERENCE_HPP

#include <Eigen/Dense>

#include <cstdint>

#include "bmse/batch_select.hpp"
#include "bmse/chain.hpp"
#include "bmse/estimators.hpp"

namespace bmse {

enum class QuantileRule {
  kChiSquare,   // chi-square(p) quantile, the default
  kHotellingF,  // df p / (df - p + 1) F(p, df - p + 1), for BM with few batches
};

double chi_square_quantile(double level, int dof);

/// Threshold q of {theta : n (ybar - theta)' Sigma^{-1} (ybar - theta) <= q}.
/// `df` is only read by the Hotelling rule and must be >= p.
double region_threshold(int p, double level, QuantileRule rule, std::int64_t df = 0);

/// Ellipsoidal confidence region for the mean. Construction fails unless the
/// covariance estimate is positive definite.
class ConfidenceRegion {
 public:
  ConfidenceRegion(Eigen::VectorXd center, Eigen::MatrixXd sigma, std::int64_t n, double level,
                   double threshold);

  const Eigen::VectorXd& center() const noexcept { return center_; }
  const Eigen::MatrixXd& sigma() const noexcept { return sigma_; }
  std::int64_t n() const noexcept { return n_; }
  double level() const noexcept { return level_; }
  double threshold() const noexcept { return threshold_; }

  /// n (center - x)' Sigma^{-1} (center - x)
  double statistic(const Eigen::Ref<const Eigen::VectorXd>& point) const;

  /// Boundary counts as inside; a relative slack of 1e-12 absorbs rounding.
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& point) const;

  /// Half-width of the region's projection onto each coordinate axis.
  Eigen::VectorXd half_widths() const;

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd sigma_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  std::int64_t n_;
  double level_;
  double threshold_;
};

ConfidenceRegion confidence_region(const Eigen::VectorXd& mean, const CovEstimate& est,
                                   std::int64_t n, double level,
                                   QuantileRule rule = QuantileRule::kChiSquare);

bool contains(const ConfidenceRegion& region, const Eigen::Ref<const Eigen::VectorXd>& point);

/// n gamma_i(0) / Sigma_p,i per component.
Eigen::VectorXd ess_univariate(const ChainMatrix& chain, const PilotEstimates& pilot);

}  // namespace bmse

#endif  // BMSE_INFERENCE_HPP
