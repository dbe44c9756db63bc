#pragma once

#include <cstdint>

#include "condorcet/culture.hpp"
#include "condorcet/saddle.hpp"

namespace condorcet {

struct MCResult {
  double estimate = 0.0;
  double std_error = 0.0;  // sqrt(p (1 - p) / N)
  long long samples = 0;
  std::uint64_t seed = 0;
  long long successes = 0;
};

/// Fraction of `samples` simulated profiles of n voters in which the candidate
/// is an alpha-winner. Sample s draws its voters from CounterRng(seed, s), so
/// the result does not depend on the thread count.
MCResult mc_estimate(const Culture& culture, int candidate, const Thresholds& th, long long n, long long samples,
                     std::uint64_t seed);

}  // namespace condorcet
