#include "condorcet/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <vector>

#include "condorcet/asymptotics.hpp"
#include "condorcet/error.hpp"
#include "condorcet/parallel.hpp"
#include "condorcet/rng.hpp"

namespace condorcet {

MCResult mc_estimate(const Culture& culture, int candidate, const Thresholds& th, long long n, long long samples,
                     std::uint64_t seed) {
  const int m = culture.m();
  if (candidate < 1 || candidate > m) throw InvalidInput("candidate must lie in 1..m");
  if (n < 1) throw InvalidInput("mc_estimate: n must be >= 1");
  if (samples < 1) throw InvalidInput("mc_estimate: samples must be >= 1");
  if (th.dim() != m - 1) throw InvalidInput("thresholds must have one entry per adversary");

  // bound on voters ranking each candidate label above `candidate` (index = label)
  std::vector<long long> bound(static_cast<std::size_t>(m) + 1, 0);
  for (int k = 0, label = 1; label <= m; ++label) {
    if (label == candidate) continue;
    bound[label] = win_bound(th.beta[k], n, th.weak);
    ++k;
  }

  const RankingSampler sampler(culture);
  const std::size_t blocks = static_cast<std::size_t>(std::min<long long>(samples, 4096));
  std::vector<long long> wins(blocks, 0);
  parallel_for(blocks, [&](std::size_t b) {
    const long long lo = samples * static_cast<long long>(b) / static_cast<long long>(blocks);
    const long long hi = samples * static_cast<long long>(b + 1) / static_cast<long long>(blocks);
    std::vector<std::uint8_t> order(static_cast<std::size_t>(m));
    std::vector<long long> above(static_cast<std::size_t>(m) + 1);
    for (long long s = lo; s < hi; ++s) {
      CounterRng rng(seed, static_cast<std::uint64_t>(s));
      std::fill(above.begin(), above.end(), 0);
      for (long long v = 0; v < n; ++v) {
        sampler.draw(rng, order);
        for (int i = 0; i < m && order[i] != candidate; ++i) ++above[order[i]];
      }
      bool win = true;
      for (int label = 1; label <= m && win; ++label)
        if (label != candidate && above[label] > bound[label]) win = false;
      wins[b] += win ? 1 : 0;
    }
  });

  MCResult r;
  r.samples = samples;
  r.seed = seed;
  for (long long w : wins) r.successes += w;
  r.estimate = static_cast<double>(r.successes) / static_cast<double>(samples);
  r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(samples));
  return r;
}

}  // namespace condorcet
