#ifndef BMSE_LAG_WINDOW_HPP
#define BMSE_LAG_WINDOW_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bmse/error.hpp"

namespace bmse {

enum class WindowKind { kBartlett, kFlatTop, kTukeyHanning };
enum class Family { kBM, kOBM };

std::string_view to_string(WindowKind kind);
std::string_view to_string(Family family);
WindowKind parse_window_kind(std::string_view name);
Family parse_family(std::string_view name);

/// Even lag window with support |k| < b. Flat-top requires an even b >= 2.
class LagWindow {
 public:
  LagWindow(WindowKind kind, std::int64_t b);

  WindowKind kind() const noexcept { return kind_; }
  std::int64_t b() const noexcept { return b_; }

  /// w(k); zero outside the support.
  double value(std::int64_t k) const;

  /// w(k-1) - w(k).
  double delta1(std::int64_t k) const;

  /// w(k-1) - 2w(k) + w(k+1).
  double delta2(std::int64_t k) const;

  /// Lags k in [1, b] with a nonzero second difference, ascending.
  std::vector<std::int64_t> delta2_support() const;

 private:
  // Bartlett and flat-top are piecewise linear with w(k) = numerator(k) / b
  // for an integer numerator, so differences are exact integer arithmetic.
  std::int64_t numerator(std::int64_t k) const;
  bool is_linear() const noexcept { return kind_ != WindowKind::kTukeyHanning; }

  WindowKind kind_;
  std::int64_t b_;
};

/// Constants of the leading MSE term: squared-bias weight C and variance
/// weight S.
struct MseConstants {
  double C = 0.0;
  double S = 0.0;
  Family family = Family::kOBM;
};

MseConstants mse_constants(WindowKind kind, Family family);

struct WindowConditionReport {
  double sum_k_delta2 = 0.0;     // must equal 1
  double sum_delta2_sq = 0.0;    // closed value: 1/b^2 Bartlett, 8/b^2 flat-top
  double expected_delta2_sq = 0.0;
  double sum_abs_delta2 = 0.0;   // 1/b Bartlett, 4/b flat-top
  double expected_abs_delta2 = 0.0;
  double bias_constant = 0.0;    // C = b * sum delta2
  double expected_bias_constant = 0.0;
  double max_residual = 0.0;
  bool passed = false;
};

WindowConditionReport verify_window_conditions(const LagWindow& window, double tol = 1e-12);

}  // namespace bmse

#endif  // BMSE_LAG_WINDOW_HPP
