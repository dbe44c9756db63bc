#pragma once

#include <cstdint>
#include <vector>

namespace condorcet {

using SubsetMask = std::uint32_t;

// Largest polynomial dimension (number of adversaries) we represent densely.
inline constexpr int kMaxPolyDim = 24;

// A multilinear polynomial in `dim` variables with coefficients stored densely
// by monomial bitmask: coeffs[S] multiplies prod_{k in S} x_k.
struct MultilinearPoly {
  int dim = 0;
  std::vector<double> coeffs;

  std::size_t size() const { return coeffs.size(); }
  double total() const;
};

inline bool contains(SubsetMask s, int k) { return (s >> k) & 1u; }

inline int popcount(SubsetMask s) { return __builtin_popcount(s); }

}  // namespace condorcet
