#pragma once

#include <algorithm>
#include <cstddef>

#include "fdnoma/params.hpp"
#include "fdnoma/rng.hpp"

namespace fdnoma {

/// ||h||^2 of an N-element Rayleigh vector: sum of N exponentials of mean lambda_ps.
template <class Rng>
double sample_gamma_gain(int n_antennas, double lambda_ps, Rng& rng) {
  double sum = 0.0;
  for (int n = 0; n < n_antennas; ++n) sum += rng.exponential(lambda_ps);
  return sum;
}

/// One Rayleigh block: best of K PT->ST vector gains, then M+1 receiver
/// gains sorted ascending. The PR link is drawn with mean lambda_sp and the
/// SR links with lambda_sr; after sorting the weakest gain belongs to the PR
/// (pessimistic grouping), which is the i.i.d. order-statistics model when
/// lambda_sp == lambda_sr.
template <class Rng>
ChannelRealization sample_realization(const SystemParams& p, Rng& rng) {
  ChannelRealization r;
  r.best_gain = 0.0;
  for (int k = 0; k < p.n_sts; ++k) r.best_gain = std::max(r.best_gain, sample_gamma_gain(p.n_antennas, p.lambda_ps, rng));
  r.sorted_gains.resize(p.receivers());
  r.sorted_gains[0] = rng.exponential(p.lambda_sp);
  for (std::size_t i = 1; i < r.sorted_gains.size(); ++i) r.sorted_gains[i] = rng.exponential(p.lambda_sr);
  std::sort(r.sorted_gains.begin(), r.sorted_gains.end());
  return r;
}

/// Realization used by trial/draw `index` under `seed`.
inline ChannelRealization realization_for(const SystemParams& p, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, index);
  return sample_realization(p, rng);
}

}  // namespace fdnoma
