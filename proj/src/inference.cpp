#include "bmse/inference.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include <string>

namespace bmse {

double chi_square_quantile(double level, int dof) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::kInvalidArgument, "level must lie in (0, 1)");
  if (dof < 1) throw Error(ErrorCode::kInvalidArgument, "degrees of freedom must be >= 1");
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), level);
}

double region_threshold(int p, double level, QuantileRule rule, std::int64_t df) {
  if (rule == QuantileRule::kChiSquare) return chi_square_quantile(level, p);
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::kInvalidArgument, "level must lie in (0, 1)");
  if (df < p) throw Error(ErrorCode::kInvalidArgument, "Hotelling rule needs df >= p");
  const double d2 = static_cast<double>(df - p + 1);
  const boost::math::fisher_f_distribution<double> f(p, d2);
  return static_cast<double>(df) * p / d2 * boost::math::quantile(f, level);
}

ConfidenceRegion::ConfidenceRegion(Eigen::VectorXd center, Eigen::MatrixXd sigma, std::int64_t n,
                                   double level, double threshold)
    : center_(std::move(center)), sigma_(std::move(sigma)), n_(n), level_(level), threshold_(threshold) {
  if (sigma_.rows() != center_.size() || sigma_.cols() != center_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "covariance and mean dimensions differ");
  }
  if (!(threshold_ > 0.0)) throw Error(ErrorCode::kInvalidArgument, "threshold must be positive");
  if (n_ < 1) throw Error(ErrorCode::kInvalidArgument, "n must be positive");
  factor_.compute(sigma_);
  if (factor_.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingular, "covariance estimate is singular or indefinite");
  }
}

double ConfidenceRegion::statistic(const Eigen::Ref<const Eigen::VectorXd>& point) const {
  if (point.size() != center_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "point dimension " + std::to_string(point.size()) +
                                                 " does not match region dimension " +
                                                 std::to_string(center_.size()));
  }
  const Eigen::VectorXd d = center_ - point;
  const Eigen::VectorXd z = factor_.matrixL().solve(d);
  return static_cast<double>(n_) * z.squaredNorm();
}

bool ConfidenceRegion::contains(const Eigen::Ref<const Eigen::VectorXd>& point) const {
  return statistic(point) <= threshold_ * (1.0 + 1e-12);
}

Eigen::VectorXd ConfidenceRegion::half_widths() const {
  return (threshold_ * sigma_.diagonal().array() / static_cast<double>(n_)).sqrt();
}

ConfidenceRegion confidence_region(const Eigen::VectorXd& mean, const CovEstimate& est,
                                   std::int64_t n, double level, QuantileRule rule) {
  std::int64_t df = 0;
  if (rule == QuantileRule::kHotellingF) {
    // batches - 1 for BM-type estimators, n - 1 otherwise
    const bool batched = est.method == Method::kBM || est.method == Method::kFlatTopBM;
    df = batched ? est.n / est.b - 1 : n - 1;
  }
  const double q = region_threshold(static_cast<int>(mean.size()), level, rule, df);
  return ConfidenceRegion(mean, est.sigma, n, level, q);
}

bool contains(const ConfidenceRegion& region, const Eigen::Ref<const Eigen::VectorXd>& point) {
  return region.contains(point);
}

Eigen::VectorXd ess_univariate(const ChainMatrix& chain, const PilotEstimates& pilot) {
  if (pilot.sigma_p.size() != chain.p()) {
    throw Error(ErrorCode::kInvalidArgument, "pilot dimension does not match chain");
  }
  Eigen::VectorXd ess(chain.p());
  for (Eigen::Index i = 0; i < chain.p(); ++i) {
    if (!(pilot.sigma_p(i) > 0.0)) {
      throw Error(ErrorCode::kDegenerate, "pilot Sigma for component " + std::to_string(i) + " is not positive");
    }
    const double g0 = sample_autocovariance(chain, i, 0)[0];
    ess(i) = static_cast<double>(chain.n()) * g0 / pilot.sigma_p(i);
  }
  return ess;
}

}  // namespace bmse
