#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "fdnoma/channel.hpp"
#include "fdnoma/link.hpp"
#include "fdnoma/params.hpp"
#include "fdnoma/rng.hpp"
#include "fdnoma/throughput.hpp"

namespace fdnoma {

/// Instantaneous rates for one realization. If the ST cannot decode x_0 it
/// stays silent and every node rate is zero.
struct RateProfile {
  double r_st_decode = 0.0;
  std::vector<double> r_node;  // PR, SR_1..SR_M
  bool st_decoded = false;
};

inline RateProfile instantaneous_rates(const ChannelRealization& real, const PowerAllocation& alpha,
                                       const SystemParams& p, DuplexMode mode) {
  RateProfile out;
  out.r_st_decode = st_decode_rate(real.best_gain, p, mode);
  out.st_decoded = out.r_st_decode >= p.target_rates[0];
  out.r_node.assign(real.sorted_gains.size(), 0.0);
  if (!out.st_decoded) return out;
  const double scale = effective_rho(p, mode) * p.snr_linear() * real.best_gain;
  const std::size_t count = real.sorted_gains.size();
  if (mode == DuplexMode::OMA_TDMA) {
    const double prelog = (1.0 - p.kappa) / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double power = p.oma_slot_power == OmaSlotPower::Full ? 1.0 : alpha[i];
      out.r_node[i] = prelog * std::log2(1.0 + power * scale * real.sorted_gains[i]);
    }
    return out;
  }
  const double prelog = noma_prelog(mode);
  for (std::size_t i = 0; i < count; ++i)
    out.r_node[i] = prelog * std::log2(1.0 + sinr(alpha.coefficients(), count, scale * real.sorted_gains[i], i));
  return out;
}

/// Monte Carlo outage tallies with 95% normal-approximation intervals.
struct OutageEstimate {
  std::uint64_t trials = 0;
  std::vector<std::uint64_t> failures;  // PR, SR_1..SR_M
  std::vector<double> probability;
  std::vector<double> ci_halfwidth;

  void finalize() {
    probability.assign(failures.size(), 0.0);
    ci_halfwidth.assign(failures.size(), 0.0);
    for (std::size_t i = 0; i < failures.size(); ++i) {
      const double pr = static_cast<double>(failures[i]) / static_cast<double>(trials);
      probability[i] = pr;
      ci_halfwidth[i] = 1.96 * std::sqrt(pr * (1.0 - pr) / static_cast<double>(trials));
    }
  }

  void merge(const OutageEstimate& other) {
    if (failures.empty()) failures.assign(other.failures.size(), 0);
    trials += other.trials;
    for (std::size_t i = 0; i < failures.size(); ++i) failures[i] += other.failures[i];
  }

  friend bool operator==(const OutageEstimate&, const OutageEstimate&) = default;
};

struct SimulationOptions {
  unsigned threads = 0;                 // 0 = hardware concurrency
  std::uint64_t batch_size = 1u << 16;  // trials per independently tallied batch
};

/// Runs fn(batch_index) for every batch on a small thread pool. Batches are
/// handed out round-robin so the assignment itself is deterministic.
template <class Fn>
void parallel_batches(std::size_t batches, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(batches, 1)));
  if (threads <= 1) {
    for (std::size_t b = 0; b < batches; ++b) fn(b);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t b = w; b < batches; b += threads) fn(b);
    });
  for (auto& t : pool) t.join();
}

namespace detail {

/// Marks failed receivers of one trial. NOMA receivers must clear every SIC
/// stage up to their own message; OMA receivers only decode their own slot.
inline void tally_trial(const ChannelRealization& real, const SystemParams& p, DuplexMode mode,
                        std::vector<std::uint64_t>& failures) {
  const std::size_t count = real.sorted_gains.size();
  if (st_decode_rate(real.best_gain, p, mode) < p.target_rates[0]) {
    for (auto& f : failures) ++f;
    return;
  }
  const double scale = effective_rho(p, mode) * p.snr_linear() * real.best_gain;
  if (mode == DuplexMode::OMA_TDMA) {
    const double prelog = (1.0 - p.kappa) / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double power = p.oma_slot_power == OmaSlotPower::Full ? 1.0 : p.alpha[i];
      if (prelog * std::log2(1.0 + power * scale * real.sorted_gains[i]) < p.target_rates[i]) ++failures[i];
    }
    return;
  }
  const double prelog = noma_prelog(mode);
  const auto& alpha = p.alpha.coefficients();
  for (std::size_t m = 0; m < count; ++m) {
    const double gain = scale * real.sorted_gains[m];
    for (std::size_t stage = 0; stage <= m; ++stage) {
      if (prelog * std::log2(1.0 + sinr(alpha, count, gain, stage)) < p.target_rates[stage]) {
        ++failures[m];
        break;
      }
    }
  }
}

}  // namespace detail

/// Outage of PR and every SR over `trials` independent blocks. Trial t uses
/// the counter stream (seed, t), so results do not depend on threading.
inline OutageEstimate estimate_outage(const SystemParams& p, DuplexMode mode, std::uint64_t trials,
                                      std::uint64_t seed, const SimulationOptions& opt = {}) {
  validate(p);
  if (trials == 0) throw std::invalid_argument("estimate_outage: trials must be >= 1");
  const std::uint64_t batch = std::max<std::uint64_t>(opt.batch_size, 1);
  const std::size_t batches = static_cast<std::size_t>((trials + batch - 1) / batch);
  std::vector<OutageEstimate> partial(batches);
  parallel_batches(batches, opt.threads, [&](std::size_t b) {
    OutageEstimate& est = partial[b];
    est.failures.assign(p.receivers(), 0);
    const std::uint64_t begin = b * batch;
    const std::uint64_t end = std::min(trials, begin + batch);
    ChannelRealization real;
    for (std::uint64_t t = begin; t < end; ++t) {
      CounterRng rng(seed, t);
      real = sample_realization(p, rng);
      detail::tally_trial(real, p, mode, est.failures);
    }
    est.trials = end - begin;
  });
  OutageEstimate total;
  total.failures.assign(p.receivers(), 0);
  for (const auto& part : partial) total.merge(part);
  total.finalize();
  return total;
}

inline Throughput estimate_throughput(const SystemParams& p, DuplexMode mode, std::uint64_t trials,
                                      std::uint64_t seed, const SimulationOptions& opt = {}) {
  return throughput_from_outage(p, estimate_outage(p, mode, trials, seed, opt).probability);
}

}  // namespace fdnoma
