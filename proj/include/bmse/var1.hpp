#ifndef BMSE_VAR1_HPP
#define BMSE_VAR1_HPP

#include <Eigen/Dense>

#include <cstdint>

#include "bmse/chain.hpp"

namespace bmse {

/// X_t = Phi X_{t-1} + e_t, e_t ~ N(0, I), with its closed-form moments.
struct Var1Spec {
  Eigen::MatrixXd phi;
  Eigen::MatrixXd v;           // stationary covariance
  Eigen::MatrixXd sigma_true;  // asymptotic covariance of the sample mean
  Eigen::MatrixXd gamma_true;  // -sum_{k>=1} k (R(k) + R(k)^T)
  double spectral_radius = 0.0;
};

/// rho * B / (lambda_max(B) + 0.001) with B = A A^T and A standard normal
/// drawn from the stream (seed, 0). rho in [0, 1).
Eigen::MatrixXd make_phi(Eigen::Index p, double rho, std::uint64_t seed);

/// Solves vec(V) = (I - Phi (x) Phi)^{-1} vec(I).
Eigen::MatrixXd stationary_cov(const Eigen::MatrixXd& phi);

Eigen::MatrixXd true_sigma(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& v);
Eigen::MatrixXd true_gamma(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& v);

double spectral_radius(const Eigen::MatrixXd& m);

/// Validates the radius and fills in V, Sigma and Gamma.
Var1Spec make_var1(Eigen::MatrixXd phi);

/// n rows X_1..X_n after drawing X_0 from N(0, V); stream (seed, 1).
ChainMatrix simulate(const Var1Spec& spec, Eigen::Index n, std::uint64_t seed);

/// Same, drawing from an explicit stream path under `seed`.
ChainMatrix simulate(const Var1Spec& spec, Eigen::Index n, std::uint64_t seed,
                     std::initializer_list<std::uint64_t> path);

/// (sum Gamma_ii^2 / sum Sigma_ii^2)^(1/3) of the true moments.
double true_bopt_coefficient(const Var1Spec& spec);

}  // namespace bmse

#endif  // BMSE_VAR1_HPP
