#include "bmse/var1.hpp"

#include <cmath>

#include "bmse/batch_select.hpp"
#include "bmse/rng.hpp"

namespace bmse {

namespace {

void symmetrize(Eigen::MatrixXd& m) { m = (0.5 * (m + m.transpose())).eval(); }

}  // namespace

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd make_phi(Eigen::Index p, double rho, std::uint64_t seed) {
  if (p < 1) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw Error(ErrorCode::kInvalidArgument, "rho must lie in [0, 1)");
  NormalSource normal(make_engine(seed, {0}));
  Eigen::MatrixXd a(p, p);
  // Row-major fill order is part of the reproducibility contract.
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) a(i, j) = normal();
  }
  const Eigen::MatrixXd b = a * a.transpose();
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .maxCoeff();
  Eigen::MatrixXd phi = rho * b / (top + 0.001);
  symmetrize(phi);
  return phi;
}

Eigen::MatrixXd stationary_cov(const Eigen::MatrixXd& phi) {
  const Eigen::Index p = phi.rows();
  const Eigen::Index pp = p * p;
  Eigen::MatrixXd kron(pp, pp);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) kron.block(i * p, j * p, p, p) = phi(i, j) * phi;
  }
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(pp, pp) - kron;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (lu.rcond() < 1e-12) throw Error(ErrorCode::kSingular, "stationary covariance system is near-singular");
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
  const Eigen::VectorXd vec_i = Eigen::Map<const Eigen::VectorXd>(eye.data(), pp);
  const Eigen::VectorXd vec_v = lu.solve(vec_i);
  Eigen::MatrixXd v = Eigen::Map<const Eigen::MatrixXd>(vec_v.data(), p, p);
  symmetrize(v);
  return v;
}

Eigen::MatrixXd true_sigma(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& v) {
  const Eigen::Index p = phi.rows();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(p, p) - phi);
  const Eigen::MatrixXd left = lu.solve(v);  // (I - Phi)^{-1} V
  Eigen::MatrixXd sigma = left + left.transpose() - v;
  symmetrize(sigma);
  return sigma;
}

Eigen::MatrixXd true_gamma(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& v) {
  const Eigen::Index p = phi.rows();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(p, p) - phi);
  // (I - Phi)^{-2} Phi V; the second term is its transpose.
  const Eigen::MatrixXd left = lu.solve(lu.solve(phi * v));
  Eigen::MatrixXd gamma = -(left + left.transpose());
  symmetrize(gamma);
  return gamma;
}

Var1Spec make_var1(Eigen::MatrixXd phi) {
  if (phi.rows() != phi.cols() || phi.rows() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "Phi must be a non-empty square matrix");
  }
  Var1Spec spec;
  spec.spectral_radius = spectral_radius(phi);
  if (!(spec.spectral_radius < 1.0)) {
    throw Error(ErrorCode::kNonStationary, "spectral radius of Phi must be < 1");
  }
  spec.v = stationary_cov(phi);
  spec.sigma_true = true_sigma(phi, spec.v);
  spec.gamma_true = true_gamma(phi, spec.v);
  spec.phi = std::move(phi);
  return spec;
}

ChainMatrix simulate(const Var1Spec& spec, Eigen::Index n, std::uint64_t seed,
                     std::initializer_list<std::uint64_t> path) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "simulation length must be >= 2");
  const Eigen::Index p = spec.phi.rows();
  NormalSource normal(make_engine(seed, path));
  const Eigen::LLT<Eigen::MatrixXd> chol(spec.v);
  if (chol.info() != Eigen::Success) throw Error(ErrorCode::kSingular, "V is not positive definite");
  const Eigen::MatrixXd lower = chol.matrixL();

  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < p; ++i) z(i) = normal();
  Eigen::VectorXd x = lower * z;

  Eigen::MatrixXd data(n, p);
  Eigen::VectorXd next(p);
  for (Eigen::Index t = 0; t < n; ++t) {
    next.noalias() = spec.phi * x;
    for (Eigen::Index i = 0; i < p; ++i) next(i) += normal();
    x.swap(next);
    data.row(t) = x.transpose();
  }
  return ChainMatrix(std::move(data));
}

ChainMatrix simulate(const Var1Spec& spec, Eigen::Index n, std::uint64_t seed) {
  return simulate(spec, n, seed, {1});
}

double true_bopt_coefficient(const Var1Spec& spec) {
  return bopt_coefficient(spec.sigma_true.diagonal(), spec.gamma_true.diagonal());
}

}  // namespace bmse
