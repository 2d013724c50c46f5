#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "multinorm/arith.hpp"

namespace testsupport {

using multinorm::int64_t;

// Multiplicative span of residues mod m (subgroup closure).
inline std::set<int64_t> span_mod(const std::vector<int64_t>& gens, int64_t m) {
  std::set<int64_t> seen = {1 % m};
  std::vector<int64_t> frontier = {1 % m};
  while (!frontier.empty()) {
    int64_t x = frontier.back();
    frontier.pop_back();
    for (int64_t g : gens) {
      int64_t y = multinorm::mulmod(x, multinorm::mod_reduce(g, m), m);
      if (seen.insert(y).second) frontier.push_back(y);
    }
  }
  return seen;
}

inline std::mt19937_64 make_rng(uint64_t seed) { return std::mt19937_64(seed); }

inline int64_t rand_range(std::mt19937_64& rng, int64_t lo, int64_t hi) {
  std::uniform_int_distribution<int64_t> d(lo, hi);
  return d(rng);
}

}  // namespace testsupport
