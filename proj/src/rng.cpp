#include "bmse/rng.hpp"

#include <vector>

namespace bmse {

Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1));
  const auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffULL));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (const auto v : path) push(v);
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

}  // namespace bmse
