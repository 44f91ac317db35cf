#ifndef BMSE_ESTIMATORS_HPP
#define BMSE_ESTIMATORS_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string_view>

#include "bmse/chain.hpp"
#include "bmse/lag_window.hpp"

namespace bmse {

enum class Method { kBM, kOBM, kGeneralizedOBM, kFlatTopBM, kFlatTopOBM };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);
bool is_flat_top(Method method);

/// Estimate of the asymptotic covariance of the sample mean. `sigma` is
/// stored exactly symmetric.
struct CovEstimate {
  Eigen::MatrixXd sigma;
  Method method = Method::kOBM;
  std::optional<WindowKind> window;
  std::int64_t b = 0;
  std::int64_t n = 0;
};

/// Non-overlapping batch means. Uses the first floor(n/b)*b rows and the mean
/// of those rows.
CovEstimate bm(const ChainMatrix& chain, std::int64_t b);

/// Overlapping batch means with divisor n, via prefix sums.
CovEstimate obm(const ChainMatrix& chain, std::int64_t b);

/// Lag-window weighted sum of overlapping batch mean outer products. Only
/// lags where the window's second difference is nonzero are visited.
CovEstimate generalized_obm(const ChainMatrix& chain, const LagWindow& window);

/// 2 * bm(b) - bm(b/2). May be indefinite.
CovEstimate flat_top_bm(const ChainMatrix& chain, std::int64_t b);

/// 2 * obm(b) - obm(b/2). May be indefinite.
CovEstimate flat_top_obm(const ChainMatrix& chain, std::int64_t b);

/// Dispatch on the method tag. GeneralizedOBM uses `window` (Bartlett if
/// unset).
CovEstimate estimate(const ChainMatrix& chain, Method method, std::int64_t b,
                     std::optional<WindowKind> window = std::nullopt);

namespace kernel {

/// Centered prefix sums P[t] = sum_{s<t} (y_s - ybar), t = 0..n, stored
/// row-major in extended precision.
class PrefixSums {
 public:
  explicit PrefixSums(const Eigen::MatrixXd& data);

  Eigen::Index n() const noexcept { return n_; }
  Eigen::Index p() const noexcept { return p_; }
  const long double* row(Eigen::Index t) const { return sums_.data() + t * p_; }

 private:
  Eigen::Index n_;
  Eigen::Index p_;
  std::vector<long double> sums_;
};

/// sum_{l=0}^{n-k} S_l S_l^T with S_l the centered sum over rows l..l+k-1.
/// The l range is split into fixed-size blocks reduced in block order, so the
/// result does not depend on the OpenMP thread count.
Eigen::MatrixXd overlapping_outer_sum(const PrefixSums& prefix, Eigen::Index k);

}  // namespace kernel

}  // namespace bmse

#endif  // BMSE_ESTIMATORS_HPP
