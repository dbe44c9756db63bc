#include "condorcet/exact.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "condorcet/asymptotics.hpp"
#include "condorcet/error.hpp"

namespace condorcet {

double exact_probability(const CharPoly& p, const Thresholds& th, long long n, const ExactOptions& opts) {
  if (n < 1) throw InvalidInput("exact_probability: n must be >= 1");
  const int d = p.dim();
  if (th.dim() != d) throw InvalidInput("thresholds must have one entry per adversary");

  // digit j ranges over 0..L_j plus OVER = L_j + 1
  std::vector<long long> cap(d);
  std::vector<std::uint64_t> stride(d);
  std::uint64_t states = 1;
  for (int j = 0; j < d; ++j) {
    cap[j] = win_bound(th.beta[j], n, th.weak);
    if (cap[j] < 0) return 0.0;  // some adversary can never be held below the bound
    const auto radix = static_cast<std::uint64_t>(cap[j]) + 2;
    stride[j] = states;
    if (states > opts.state_budget / radix) {
      std::ostringstream os;
      os << "exact DP needs more than " << opts.state_budget
         << " states; use the Monte Carlo method (--methods mc) for this size";
      throw ResourceError(os.str());
    }
    states *= radix;
  }

  // nonzero increments of the characteristic polynomial
  std::vector<std::pair<SubsetMask, double>> steps;
  for (std::size_t s = 0; s < p.poly().coeffs.size(); ++s)
    if (p.poly().coeffs[s] > 0.0) steps.emplace_back(static_cast<SubsetMask>(s), p.poly().coeffs[s]);

  std::vector<double> cur(states, 0.0), next(states), comp;
  if (opts.compensated) comp.resize(states);
  cur[0] = 1.0;
  std::vector<long long> digit(d);
  for (long long voter = 0; voter < n; ++voter) {
    std::fill(next.begin(), next.end(), 0.0);
    if (opts.compensated) std::fill(comp.begin(), comp.end(), 0.0);
    std::fill(digit.begin(), digit.end(), 0);
    for (std::uint64_t idx = 0; idx < states; ++idx) {
      const double mass = cur[idx];
      if (mass != 0.0) {
        for (const auto& [mask, prob] : steps) {
          std::uint64_t to = idx;
          for (int j = 0; j < d; ++j)
            if (contains(mask, j) && digit[j] <= cap[j]) to += stride[j];
          const double add = mass * prob;
          if (opts.compensated) {
            const double t = next[to] + add;
            comp[to] += std::abs(next[to]) >= std::abs(add) ? (next[to] - t) + add : (add - t) + next[to];
            next[to] = t;
          } else {
            next[to] += add;
          }
        }
      }
      // odometer increment of the mixed-radix digits
      for (int j = 0; j < d; ++j) {
        if (++digit[j] <= cap[j] + 1) break;
        digit[j] = 0;
      }
    }
    if (opts.compensated)
      for (std::uint64_t i = 0; i < states; ++i) next[i] += comp[i];
    cur.swap(next);
    double total = 0.0;
    for (double v : cur) total += v;
    if (std::abs(total - 1.0) > opts.mass_tolerance) {
      std::ostringstream os;
      os << "exact DP lost probability mass (total " << total << " after voter " << voter + 1 << ")";
      throw ComputationError(os.str());
    }
  }

  double result = 0.0;
  std::fill(digit.begin(), digit.end(), 0);
  for (std::uint64_t idx = 0; idx < states; ++idx) {
    bool ok = true;
    for (int j = 0; j < d && ok; ++j) ok = digit[j] <= cap[j];
    if (ok) result += cur[idx];
    for (int j = 0; j < d; ++j) {
      if (++digit[j] <= cap[j] + 1) break;
      digit[j] = 0;
    }
  }
  return result;
}

double exact_probability(const Culture& culture, int candidate, const Thresholds& th, long long n,
                         const ExactOptions& opts) {
  return exact_probability(char_poly(culture, candidate), th, n, opts);
}

}  // namespace condorcet
