#ifndef BMSE_CHAIN_HPP
#define BMSE_CHAIN_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bmse/error.hpp"

namespace bmse {

/// n x p matrix of Monte Carlo output; rows are iterations, columns are
/// components. Immutable once constructed. All entries are finite, n >= 2,
/// p >= 1.
class ChainMatrix {
 public:
  explicit ChainMatrix(Eigen::MatrixXd data);

  Eigen::Index n() const noexcept { return data_.rows(); }
  Eigen::Index p() const noexcept { return data_.cols(); }
  const Eigen::MatrixXd& data() const noexcept { return data_; }
  auto column(Eigen::Index i) const { return data_.col(i); }
  double operator()(Eigen::Index t, Eigen::Index i) const { return data_(t, i); }

 private:
  Eigen::MatrixXd data_;
};

/// Lag autocovariances gamma(0..K) of one component, divide-by-n convention,
/// centered at the full-sample mean.
struct AcovSeries {
  Eigen::Index component = 0;
  std::vector<double> values;
  Eigen::Index n = 0;

  double operator[](std::size_t k) const { return values[k]; }
  std::size_t max_lag() const { return values.size() - 1; }
};

ChainMatrix load_csv(const std::filesystem::path& path, bool has_header);
ChainMatrix parse_csv(std::istream& in, bool has_header);

// Writes with round-trip precision so that reloading is lossless.
void write_csv(const ChainMatrix& chain, std::ostream& out);
void write_csv(const ChainMatrix& chain, const std::filesystem::path& path);

Eigen::VectorXd mean_vector(const ChainMatrix& chain);

AcovSeries sample_autocovariance(const ChainMatrix& chain, Eigen::Index component,
                                 Eigen::Index max_lag);

/// Single lag autocovariance of a column already centered at its mean.
double centered_autocovariance(const Eigen::Ref<const Eigen::VectorXd>& centered,
                               Eigen::Index lag);

/// max_i |gamma_i(k) / gamma_i(0)|, skipping constant components.
double max_abs_crosscorrelation(const ChainMatrix& chain, Eigen::Index lag);

/// Lazily evaluates max_abs_crosscorrelation at increasing lags without
/// recentering the chain for every call.
class CorrelationScanner {
 public:
  explicit CorrelationScanner(const ChainMatrix& chain);

  double max_abs(Eigen::Index lag) const;
  Eigen::Index n() const noexcept { return centered_.rows(); }

 private:
  Eigen::MatrixXd centered_;
  std::vector<Eigen::Index> live_;  // components with gamma(0) > 0
  std::vector<double> gamma0_;
};

}  // namespace bmse

#endif  // BMSE_CHAIN_HPP
