#pragma once

#include <cstdint>

#include "condorcet/culture.hpp"
#include "condorcet/saddle.hpp"

namespace condorcet {

struct ExactOptions {
  // Largest capped lattice allowed, in states.
  std::uint64_t state_budget = std::uint64_t{1} << 28;
  // Neumaier-compensated accumulation of each state's incoming mass.
  bool compensated = false;
  // Allowed drift of the total mass (including OVER states) from 1.
  double mass_tolerance = 1e-9;
};

/// P(candidate is an alpha-winner among n voters), computed by a voter-by-voter
/// dynamic program on per-adversary counts capped at L_j with an absorbing
/// overflow bucket. Throws ResourceError when prod_j (L_j + 2) exceeds the
/// state budget.
double exact_probability(const CharPoly& p, const Thresholds& th, long long n, const ExactOptions& opts = {});
double exact_probability(const Culture& culture, int candidate, const Thresholds& th, long long n,
                         const ExactOptions& opts = {});

}  // namespace condorcet
