#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fdnoma/channel.hpp"
#include "fdnoma/errors.hpp"
#include "fdnoma/link.hpp"
#include "fdnoma/optimizer.hpp"
#include "fdnoma/params.hpp"
#include "fdnoma/simulator.hpp"

namespace fdnoma {

enum class DrawStatus {
  Optimized,      // QoS-feasible, optimizer ran
  StSilent,       // ST could not decode x_0; sum rate is 0 for the block
  Infeasible,     // no allocation meets every QoS target
  SolverFailure,  // interior-point solve gave up
};

inline std::string_view to_string(DrawStatus s) {
  switch (s) {
    case DrawStatus::Optimized: return "optimized";
    case DrawStatus::StSilent: return "st_silent";
    case DrawStatus::Infeasible: return "infeasible";
    case DrawStatus::SolverFailure: return "solver_failure";
  }
  return "?";
}

struct SumRateOptions {
  double eps = 1e-4;
  int max_iter = 50;
  double es_grid = 0.0;  // 0 disables the exhaustive-search comparison
  unsigned threads = 0;
};

struct DrawResult {
  std::uint64_t index = 0;
  DrawStatus status = DrawStatus::Infeasible;
  int iterations = 0;
  bool converged = false;
  double initial_rate = 0.0;
  double sum_rate = 0.0;
  double es_rate = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> alpha;
  std::vector<double> objectives;  // SCA trace, prod t_i
  std::string message;             // solver error text, if any

  /// Draws that enter the average: optimized ones and ST-silent blocks (rate 0).
  [[nodiscard]] bool counted() const { return status == DrawStatus::Optimized || status == DrawStatus::StSilent; }
};

/// OMA-TDMA has no power-allocation problem: each slot carries its own
/// message, so the draw's rate is the sum of the per-slot rates.
inline DrawResult oma_draw(const ChannelRealization& real, const SystemParams& p) {
  DrawResult r;
  const RateProfile rates = instantaneous_rates(real, p.alpha, p, DuplexMode::OMA_TDMA);
  if (!rates.st_decoded) {
    r.status = DrawStatus::StSilent;
    return r;
  }
  for (std::size_t i = 0; i < rates.r_node.size(); ++i)
    if (rates.r_node[i] < p.target_rates[i]) return r;
  r.status = DrawStatus::Optimized;
  for (double v : rates.r_node) r.sum_rate += v;
  r.initial_rate = r.sum_rate;
  r.es_rate = r.sum_rate;
  return r;
}

/// Optimizes one channel draw. Solver failures are recorded on the result
/// rather than thrown so a sweep can report them per draw.
inline DrawResult optimize_draw(const SystemParams& p, DuplexMode mode, std::uint64_t seed, std::uint64_t index,
                                const SumRateOptions& opt = {}) {
  const ChannelRealization real = realization_for(p, seed, index);
  DrawResult r;
  if (mode == DuplexMode::OMA_TDMA) {
    r = oma_draw(real, p);
    r.index = index;
    return r;
  }
  r.index = index;
  if (st_decode_rate(real.best_gain, p, mode) < p.target_rates[0]) {
    r.status = DrawStatus::StSilent;
    return r;
  }
  const LinkBudget b = make_link_budget(real.best_gain, real.sorted_gains, p, mode);
  try {
    const ScaTrace trace = sca_optimize(b, opt.eps, opt.max_iter);
    r.status = DrawStatus::Optimized;
    r.iterations = trace.iterations;
    r.converged = trace.converged;
    r.objectives = trace.objectives;
    r.alpha = trace.final_point().alpha;
    r.initial_rate = achievable_sum_rate(trace.iterates.front().alpha, b);
    r.sum_rate = achievable_sum_rate(r.alpha, b);
    if (opt.es_grid > 0) r.es_rate = exhaustive_search(b, opt.es_grid).sum_rate;
  } catch (const Infeasible&) {
    r.status = DrawStatus::Infeasible;
  } catch (const NoFeasibleGridPoint& e) {
    // The grid missed a thin feasible region that SCA found; keep SCA's rate.
    r.message = e.what();
  } catch (const SolverFailure& e) {
    r.status = DrawStatus::SolverFailure;
    r.message = e.what();
  }
  return r;
}

inline std::vector<DrawResult> optimize_draws(const SystemParams& p, DuplexMode mode, std::uint64_t draws,
                                              std::uint64_t seed, const SumRateOptions& opt = {}) {
  validate(p);
  std::vector<DrawResult> out(static_cast<std::size_t>(draws));
  parallel_batches(out.size(), opt.threads, [&](std::size_t i) { out[i] = optimize_draw(p, mode, seed, i, opt); });
  return out;
}

struct SumRateSummary {
  std::size_t draws = 0;
  std::size_t counted = 0;
  std::size_t infeasible = 0;
  std::size_t solver_failures = 0;
  std::size_t st_silent = 0;
  std::size_t converged = 0;
  double mean_sum_rate = 0.0;
  double mean_es_rate = std::numeric_limits<double>::quiet_NaN();
  double mean_iterations = 0.0;
};

inline SumRateSummary summarize(const std::vector<DrawResult>& results) {
  SumRateSummary s;
  s.draws = results.size();
  double rate = 0.0, es = 0.0, iters = 0.0;
  std::size_t es_count = 0, optimized = 0;
  for (const auto& r : results) {
    if (r.status == DrawStatus::Infeasible) ++s.infeasible;
    if (r.status == DrawStatus::SolverFailure) ++s.solver_failures;
    if (r.status == DrawStatus::StSilent) ++s.st_silent;
    if (!r.counted()) continue;
    ++s.counted;
    rate += r.sum_rate;
    if (r.status == DrawStatus::Optimized) {
      ++optimized;
      iters += r.iterations;
      if (r.converged) ++s.converged;
    }
    if (r.status == DrawStatus::StSilent) {
      ++es_count;  // contributes a zero rate
    } else if (!std::isnan(r.es_rate)) {
      es += r.es_rate;
      ++es_count;
    }
  }
  if (s.counted > 0) s.mean_sum_rate = rate / static_cast<double>(s.counted);
  if (es_count == s.counted && s.counted > 0 && es_count > s.st_silent) s.mean_es_rate = es / static_cast<double>(es_count);
  if (optimized > 0) s.mean_iterations = iters / static_cast<double>(optimized);
  return s;
}

}  // namespace fdnoma
