#include "bmse/lag_window.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bmse {

std::string_view to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::kBartlett: return "bartlett";
    case WindowKind::kFlatTop: return "flat-top";
    case WindowKind::kTukeyHanning: return "tukey-hanning";
  }
  return "unknown";
}

std::string_view to_string(Family family) {
  return family == Family::kBM ? "bm" : "obm";
}

WindowKind parse_window_kind(std::string_view name) {
  if (name == "bartlett") return WindowKind::kBartlett;
  if (name == "flat-top" || name == "flattop" || name == "ft") return WindowKind::kFlatTop;
  if (name == "tukey-hanning" || name == "tukey") return WindowKind::kTukeyHanning;
  throw Error(ErrorCode::kInvalidArgument, "unknown window '" + std::string(name) + "'");
}

Family parse_family(std::string_view name) {
  if (name == "bm") return Family::kBM;
  if (name == "obm") return Family::kOBM;
  throw Error(ErrorCode::kInvalidArgument, "unknown family '" + std::string(name) + "'");
}

LagWindow::LagWindow(WindowKind kind, std::int64_t b) : kind_(kind), b_(b) {
  if (b < 1) throw Error(ErrorCode::kInvalidArgument, "batch size must be >= 1");
  if (kind == WindowKind::kFlatTop && (b < 2 || b % 2 != 0)) {
    throw Error(ErrorCode::kInvalidArgument, "flat-top requires even b");
  }
}

std::int64_t LagWindow::numerator(std::int64_t k) const {
  const std::int64_t a = k < 0 ? -k : k;
  if (a > b_) return 0;
  if (kind_ == WindowKind::kBartlett) return b_ - a;
  // flat-top: 1 on |k| <= b/2, then 2(1 - |k|/b)
  if (2 * a <= b_) return b_;
  return 2 * (b_ - a);
}

double LagWindow::value(std::int64_t k) const {
  if (is_linear()) {
    return static_cast<double>(numerator(k)) / static_cast<double>(b_);
  }
  const std::int64_t a = k < 0 ? -k : k;
  if (a > b_) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(a) /
                                 static_cast<double>(b_)));
}

double LagWindow::delta1(std::int64_t k) const {
  if (is_linear()) {
    return static_cast<double>(numerator(k - 1) - numerator(k)) / static_cast<double>(b_);
  }
  return value(k - 1) - value(k);
}

double LagWindow::delta2(std::int64_t k) const {
  if (is_linear()) {
    const std::int64_t d = numerator(k - 1) - 2 * numerator(k) + numerator(k + 1);
    return static_cast<double>(d) / static_cast<double>(b_);
  }
  return value(k - 1) - 2.0 * value(k) + value(k + 1);
}

std::vector<std::int64_t> LagWindow::delta2_support() const {
  switch (kind_) {
    case WindowKind::kBartlett:
      return {b_};
    case WindowKind::kFlatTop:
      return {b_ / 2, b_};
    case WindowKind::kTukeyHanning: {
      std::vector<std::int64_t> ks;
      for (std::int64_t k = 1; k <= b_; ++k) {
        if (delta2(k) != 0.0) ks.push_back(k);
      }
      return ks;
    }
  }
  return {};
}

MseConstants mse_constants(WindowKind kind, Family family) {
  switch (kind) {
    case WindowKind::kBartlett:
      return family == Family::kOBM ? MseConstants{1.0, 2.0 / 3.0, family}
                                    : MseConstants{1.0, 1.0, family};
    case WindowKind::kFlatTop:
      return family == Family::kOBM ? MseConstants{0.0, 4.0 / 3.0, family}
                                    : MseConstants{0.0, 5.0 / 2.0, family};
    case WindowKind::kTukeyHanning:
      break;
  }
  throw Error(ErrorCode::kUnsupported, "no MSE constants are available for the Tukey-Hanning window");
}

WindowConditionReport verify_window_conditions(const LagWindow& window, double tol) {
  if (window.kind() == WindowKind::kTukeyHanning) {
    throw Error(ErrorCode::kUnsupported, "window conditions are only tabulated for Bartlett and flat-top");
  }
  const std::int64_t b = window.b();
  const double bd = static_cast<double>(b);
  // Accumulate integer numerators of b * delta2 so that the sums are exact.
  std::int64_t sum_k = 0;
  std::int64_t sum_sq = 0;
  std::int64_t sum_abs = 0;
  std::int64_t sum_plain = 0;
  for (std::int64_t k = 1; k <= b; ++k) {
    const auto d = static_cast<std::int64_t>(std::llround(window.delta2(k) * bd));
    sum_k += k * d;
    sum_sq += d * d;
    sum_abs += d < 0 ? -d : d;
    sum_plain += d;
  }
  WindowConditionReport r;
  r.sum_k_delta2 = static_cast<double>(sum_k) / bd;
  r.sum_delta2_sq = static_cast<double>(sum_sq) / (bd * bd);
  r.sum_abs_delta2 = static_cast<double>(sum_abs) / bd;
  r.bias_constant = static_cast<double>(sum_plain);
  const bool bartlett = window.kind() == WindowKind::kBartlett;
  r.expected_delta2_sq = (bartlett ? 1.0 : 8.0) / (bd * bd);
  r.expected_abs_delta2 = (bartlett ? 1.0 : 4.0) / bd;
  r.expected_bias_constant = bartlett ? 1.0 : 0.0;

  r.max_residual = std::max({std::abs(r.sum_k_delta2 - 1.0),
                             std::abs(r.sum_delta2_sq - r.expected_delta2_sq) * bd * bd,
                             std::abs(r.sum_abs_delta2 - r.expected_abs_delta2) * bd,
                             std::abs(r.bias_constant - r.expected_bias_constant)});
  r.passed = r.max_residual <= tol;
  return r;
}

}  // namespace bmse
