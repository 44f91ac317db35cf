#ifndef BMSE_RNG_HPP
#define BMSE_RNG_HPP

#include <boost/random/normal_distribution.hpp>

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bmse {

// mt19937_64 and seed_seq are fully specified by the standard and boost's
// normal sampler is header code, so streams are identical across platforms.
using Engine = std::mt19937_64;

/// Engine for the stream identified by (seed, path...). Each 64-bit word is
/// fed to std::seed_seq as two 32-bit halves, low half first, seed first.
/// Replication r of experiment cell c uses path {c, r, role}.
Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {});

class NormalSource {
 public:
  explicit NormalSource(Engine engine) : engine_(std::move(engine)) {}

  double operator()() { return dist_(engine_); }

 private:
  Engine engine_;
  boost::random::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace bmse

#endif  // BMSE_RNG_HPP
