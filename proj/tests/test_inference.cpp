#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bmse/inference.hpp"
#include "bmse/rng.hpp"
#include "test_support.hpp"

namespace bmse {
namespace {

// Chi-square CDF by composite Simpson after x = u^2, which removes the
// singular density at zero for one degree of freedom.
double chi_square_cdf_oracle(double x, int k) {
  const double upper = std::sqrt(x);
  const int steps = 20000;
  const double h = upper / steps;
  const double norm = std::pow(2.0, 0.5 * k) * std::tgamma(0.5 * k);
  const auto f = [&](double u) { return 2.0 * std::pow(u, k - 1) * std::exp(-0.5 * u * u) / norm; };
  double s = f(0.0) + f(upper);
  for (int i = 1; i < steps; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

double chi_square_quantile_oracle(double level, int k) {
  double lo = 0.0, hi = 200.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (chi_square_cdf_oracle(mid, k) < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }
Eigen::MatrixXd mat1(double x) { return Eigen::MatrixXd::Constant(1, 1, x); }

TEST(Quantile, MatchesQuadrature) {
  EXPECT_NEAR(chi_square_quantile(0.9, 1), 2.7055, 5e-5);
  for (const int k : {1, 2, 3, 5}) {
    for (const double level : {0.5, 0.9, 0.95, 0.99}) {
      EXPECT_NEAR(chi_square_quantile(level, k), chi_square_quantile_oracle(level, k), 1e-8) << k << " " << level;
    }
  }
  EXPECT_THROW(chi_square_quantile(1.0, 1), Error);
  EXPECT_THROW(chi_square_quantile(0.9, 0), Error);
}

TEST(Region, ScalarExample) {
  const double q = chi_square_quantile(0.9, 1);
  const ConfidenceRegion r(vec1(1.5), mat1(4.0), 100, 0.9, q);
  const double hw = r.half_widths()(0);
  EXPECT_NEAR(hw, std::sqrt(q * 0.04), 1e-15);
  EXPECT_NEAR(hw, 0.3290, 5e-5);
  EXPECT_TRUE(r.contains(vec1(1.5)));
  EXPECT_FALSE(r.contains(vec1(1.5 + 0.33)));
  EXPECT_FALSE(r.contains(vec1(1.5 - 0.33)));
  // boundary is inside
  EXPECT_TRUE(r.contains(vec1(1.5 + hw)));
  EXPECT_TRUE(r.contains(vec1(1.5 - hw)));
  EXPECT_FALSE(r.contains(vec1(1.5 + hw * (1.0 + 1e-9))));
}

TEST(Region, DoublingNShrinksBySqrt2) {
  Eigen::MatrixXd s(2, 2);
  s << 2.0, 0.3, 0.3, 1.0;
  const double q = chi_square_quantile(0.9, 2);
  const ConfidenceRegion a(Eigen::VectorXd::Zero(2), s, 1000, 0.9, q);
  const ConfidenceRegion b(Eigen::VectorXd::Zero(2), s, 2000, 0.9, q);
  const Eigen::VectorXd ratio = a.half_widths().cwiseQuotient(b.half_widths());
  EXPECT_NEAR(ratio(0), std::numbers::sqrt2, 1e-14);
  EXPECT_NEAR(ratio(1), std::numbers::sqrt2, 1e-14);
}

TEST(Region, Errors) {
  EXPECT_THROW(ConfidenceRegion(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(3, 3), 10, 0.9, 1.0), Error);
  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;
  try {
    ConfidenceRegion(Eigen::VectorXd::Zero(2), indef, 10, 0.9, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingular);
  }
  const ConfidenceRegion r(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2), 10, 0.9, 1.0);
  EXPECT_THROW(r.contains(Eigen::VectorXd::Zero(3)), Error);
}

TEST(Region, DiagonalRescalingInvariance) {
  Engine eng = make_engine(5);
  NormalSource normal(make_engine(6));
  Eigen::MatrixXd s(3, 3);
  s << 2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 0.5;
  const Eigen::Vector3d center(0.1, -0.2, 0.3);
  const Eigen::Vector3d d(3.0, 0.25, 7.0);
  const double q = chi_square_quantile(0.9, 3);
  const ConfidenceRegion r(center, s, 50, 0.9, q);
  const ConfidenceRegion rd(d.cwiseProduct(center), d.asDiagonal() * s * d.asDiagonal(), 50, 0.9, q);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Vector3d pt = center + 0.4 * Eigen::Vector3d(normal(), normal(), normal());
    EXPECT_NEAR(r.statistic(pt), rd.statistic(d.cwiseProduct(pt)), 1e-10 * (1.0 + r.statistic(pt)));
    if (std::abs(r.statistic(pt) - q) > 1e-8) EXPECT_EQ(r.contains(pt), rd.contains(d.cwiseProduct(pt)));
  }
}

TEST(Region, IidCoverageWithTrueSigma) {
  NormalSource normal(make_engine(2024, {7}));
  const int reps = 2000;
  const Eigen::Index n = 10000;
  const double q = chi_square_quantile(0.9, 3);
  int covered = 0;
  for (int rep = 0; rep < reps; ++rep) {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (Eigen::Index t = 0; t < n; ++t) sum += Eigen::Vector3d(normal(), normal(), normal());
    const ConfidenceRegion r(sum / static_cast<double>(n), Eigen::MatrixXd::Identity(3, 3), n, 0.9, q);
    covered += r.contains(Eigen::Vector3d::Zero()) ? 1 : 0;
  }
  const double cov = static_cast<double>(covered) / reps;
  EXPECT_GE(cov, 0.88);
  EXPECT_LE(cov, 0.92);
}

TEST(Region, FromEstimateAndHotelling) {
  CovEstimate est;
  est.sigma = Eigen::MatrixXd::Identity(2, 2);
  est.method = Method::kBM;
  est.b = 100;
  est.n = 1000;
  const auto chi = confidence_region(Eigen::VectorXd::Zero(2), est, 1000, 0.9);
  EXPECT_NEAR(chi.threshold(), chi_square_quantile(0.9, 2), 1e-15);
  const auto hot = confidence_region(Eigen::VectorXd::Zero(2), est, 1000, 0.9, QuantileRule::kHotellingF);
  // with a - 1 = 9 degrees of freedom the F form is wider than chi-square
  EXPECT_GT(hot.threshold(), chi.threshold());
  EXPECT_NEAR(region_threshold(2, 0.9, QuantileRule::kHotellingF, 1000000), chi.threshold(), 1e-4);
  EXPECT_THROW(region_threshold(3, 0.9, QuantileRule::kHotellingF, 2), Error);
}

TEST(Ess, IidAndAr1) {
  const Eigen::Index n = 100000;
  Eigen::MatrixXd d(n, 2);
  NormalSource normal(make_engine(77));
  for (Eigen::Index t = 0; t < n; ++t) d(t, 0) = normal();
  d.col(1) = test::ar1_series(n, 0.5, 78);
  const ChainMatrix c(std::move(d));
  const PilotEstimates pilot = ar_pilot(c);
  const Eigen::VectorXd ess = ess_univariate(c, pilot);
  EXPECT_NEAR(ess(0) / static_cast<double>(n), 1.0, 0.05);
  EXPECT_NEAR(ess(1) / static_cast<double>(n), 1.0 / 3.0, 0.04);
}

TEST(Ess, ShrinksAsPilotGrowsAndRejectsNonPositive) {
  const ChainMatrix c(test::ar1_series(1000, 0.5, 3));
  PilotEstimates p;
  p.sigma_p = Eigen::VectorXd::Constant(1, 1e12);
  p.gamma_p = Eigen::VectorXd::Zero(1);
  EXPECT_LT(ess_univariate(c, p)(0), 1e-6);
  p.sigma_p(0) = 0.0;
  EXPECT_THROW(ess_univariate(c, p), Error);
}

}  // namespace
}  // namespace bmse
