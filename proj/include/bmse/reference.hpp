#ifndef BMSE_REFERENCE_HPP
#define BMSE_REFERENCE_HPP

// Serial, direct-definition evaluations of the batch means estimators. They
// compute every batch mean from scratch (O(n*b*p)) and exist as oracles for the
// prefix-sum kernels and as the baseline in the benchmark.

#include <Eigen/Dense>

#include <cstdint>

#include "bmse/chain.hpp"
#include "bmse/lag_window.hpp"

namespace bmse::reference {

Eigen::MatrixXd bm_naive(const ChainMatrix& chain, std::int64_t b);
Eigen::MatrixXd obm_naive(const ChainMatrix& chain, std::int64_t b);

// Visits every k = 1..b, including those with zero second difference.
Eigen::MatrixXd generalized_obm_naive(const ChainMatrix& chain, const LagWindow& window);

}  // namespace bmse::reference

#endif  // BMSE_REFERENCE_HPP
