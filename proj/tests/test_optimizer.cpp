#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fdnoma/barrier.hpp"
#include "fdnoma/channel.hpp"
#include "fdnoma/optimizer.hpp"
#include "fdnoma/sumrate.hpp"

using namespace fdnoma;

namespace {

SystemParams at_minus5() {
  SystemParams p;
  p.snr_db = -5.0;
  return p;
}

LinkBudget budget_for(const SystemParams& p, std::uint64_t seed, std::uint64_t index,
                      DuplexMode mode = DuplexMode::FD) {
  const ChannelRealization r = realization_for(p, seed, index);
  return make_link_budget(r.best_gain, r.sorted_gains, p, mode);
}

LinkBudget manual_budget(std::vector<double> gains, double rate = 0.5) {
  LinkBudget b;
  b.gains = std::move(gains);
  b.gamma_th.assign(b.gains.size(), std::exp2(rate) - 1.0);
  return b;
}

/// Checks the original (non-convexified) constraints on an iterate.
void expect_original_constraints(const ScaPoint& pt, const LinkBudget& b) {
  const QosCheck q = qos_feasible(pt.alpha, b);
  EXPECT_TRUE(q.feasible);
  double total = 0.0;
  for (std::size_t i = 0; i < pt.alpha.size(); ++i) {
    EXPECT_GE(pt.alpha[i], -1e-9);
    if (i > 0) {
      EXPECT_LE(pt.alpha[i], pt.alpha[i - 1] + 1e-9);
    }
    total += pt.alpha[i];
    EXPECT_LE(pt.t[i], (1.0 + sinr(pt.alpha, b, i, i)) * (1.0 + 1e-8));
    EXPECT_GE(pt.t[i], 1.0 - 1e-9);
  }
  EXPECT_LE(total, 1.0 + 1e-9);
  for (double z : pt.z) EXPECT_GE(z, 1.0 - 1e-9);
}

}  // namespace

TEST(Barrier, SolvesSmallQuadraticProgram) {
  // min -x - y  s.t.  x^2 + y^2 <= 1  ->  x = y = 1/sqrt(2).
  convex::Problem prob;
  prob.c = Eigen::Vector2d(-1.0, -1.0);
  convex::Constraint disk;
  disk.P = 2.0 * Eigen::Matrix2d::Identity();
  disk.q = Eigen::Vector2d::Zero();
  disk.r = -1.0;
  prob.constraints.push_back(disk);
  const convex::BarrierResult r = convex::minimize(prob, Eigen::Vector2d::Zero());
  EXPECT_NEAR(r.x[0], std::sqrt(0.5), 1e-8);
  EXPECT_NEAR(r.x[1], std::sqrt(0.5), 1e-8);
}

TEST(Barrier, LogTermsAndPhaseOne) {
  // max log x + log y  s.t.  x + y <= 2  ->  x = y = 1, started from an
  // infeasible hint that phase I has to repair.
  convex::Problem prob;
  prob.c = Eigen::Vector2d::Zero();
  prob.log_terms = {0, 1};
  prob.constraints.push_back(convex::linear_constraint(Eigen::Vector2d(1.0, 1.0), -2.0));
  Eigen::VectorXd start;
  ASSERT_TRUE(convex::find_interior_point(prob, Eigen::Vector2d(1.5, 1.5), start));
  const convex::BarrierResult r = convex::minimize(prob, start);
  EXPECT_NEAR(r.x[0], 1.0, 1e-8);
  EXPECT_NEAR(r.x[1], 1.0, 1e-8);
}

TEST(Barrier, ReportsEmptyInteriorAndBadStarts) {
  convex::Problem prob;
  prob.c = Eigen::Vector2d::Zero();
  prob.constraints.push_back(convex::linear_constraint(Eigen::Vector2d(1.0, 0.0), -1.0));  // x <= 1
  prob.constraints.push_back(convex::linear_constraint(Eigen::Vector2d(-1.0, 0.0), 2.0));  // x >= 2
  Eigen::VectorXd out;
  EXPECT_FALSE(convex::find_interior_point(prob, Eigen::Vector2d::Zero(), out));
  EXPECT_THROW(convex::minimize(prob, Eigen::Vector2d::Zero()), SolverFailure);
}

TEST(AchievableSumRate, AllPowerOnPrimaryMessage) {
  const LinkBudget b = manual_budget({5.0, 20.0, 40.0});
  EXPECT_NEAR(achievable_sum_rate({1.0, 0.0, 0.0}, b), std::log2(1.0 + 5.0), 1e-14);
}

TEST(AchievableSumRate, EqualGainsByHand) {
  const double a = 12.0;
  const LinkBudget b = manual_budget({a, a, a});
  const double expect = std::log2(1.0 + 0.5 * a / (0.5 * a + 1.0)) + std::log2(1.0 + 0.3 * a / (0.2 * a + 1.0)) +
                        std::log2(1.0 + 0.2 * a);
  EXPECT_NEAR(achievable_sum_rate({0.5, 0.3, 0.2}, b), expect, 1e-13);
}

TEST(AchievableSumRate, EqualsExplicitMinimumOverDownstreamReceivers) {
  const SystemParams p = at_minus5();
  for (std::uint64_t d = 0; d < 500; ++d) {
    const LinkBudget b = budget_for(p, 31, d);
    CounterRng rng(8, d);
    std::vector<double> w{rng.uniform_open0(), rng.uniform_open0(), rng.uniform_open0()};
    std::sort(w.rbegin(), w.rend());
    const double s = w[0] + w[1] + w[2];
    for (double& v : w) v /= s;
    double explicit_min = 0.0;
    for (std::size_t m = 0; m < 3; ++m) {
      double lo = sinr(w, b, m, m);
      for (std::size_t v = m; v < 3; ++v) lo = std::min(lo, sinr(w, b, v, m));
      explicit_min += std::log2(1.0 + lo);
    }
    EXPECT_NEAR(achievable_sum_rate(w, b), explicit_min, 1e-12);
  }
}

TEST(QosFeasible, Examples) {
  SystemParams p;
  p.snr_db = 40.0;
  const ChannelRealization r = realization_for(p, 1, 0);
  EXPECT_TRUE(qos_feasible(p.alpha, r, p).feasible);
  const ChannelRealization dead{0.0, {0.0, 0.0, 0.0}};
  EXPECT_FALSE(qos_feasible(p.alpha, dead, p).feasible);

  // alpha_2 solving the last QoS row with equality.
  const LinkBudget b = manual_budget({30.0, 60.0, 90.0});
  const double a2 = b.gamma_th[2] / b.gains[2];
  const QosCheck q = qos_feasible({0.6, 0.3, a2}, b);
  EXPECT_NEAR(q.margin[2], 0.0, 1e-9);
}

TEST(InitialFeasiblePoint, SatisfiesQosAndSitsBelowExhaustiveOptimum) {
  const SystemParams p = at_minus5();
  int checked = 0;
  for (std::uint64_t d = 0; d < 30; ++d) {
    const ChannelRealization r = realization_for(p, 7, d);
    const LinkBudget b = make_link_budget(r.best_gain, r.sorted_gains, p, DuplexMode::FD);
    ScaPoint pt;
    try {
      pt = initial_feasible_point(b);
    } catch (const Infeasible&) {
      continue;
    }
    ++checked;
    for (double m : qos_feasible(pt.alpha, b).margin) EXPECT_GE(m, 0.0);
    expect_original_constraints(pt, b);
    const ExhaustiveResult es = exhaustive_search(b, 0.01);
    EXPECT_LE(std::log2(pt.objective()), es.sum_rate + 1e-9);
  }
  EXPECT_GT(checked, 20);
}

TEST(InitialFeasiblePoint, DeadChannelIsInfeasible) {
  const SystemParams p = at_minus5();
  const ChannelRealization dead{0.0, {0.0, 0.0, 0.0}};
  EXPECT_THROW(initial_feasible_point(dead, p), Infeasible);
  EXPECT_THROW(sca_optimize(dead, p), Infeasible);
  EXPECT_THROW(exhaustive_search(dead, p, 0.01), NoFeasibleGridPoint);
}

TEST(ConvexSubproblem, NeverDecreasesFromAFeasibleStart) {
  const SystemParams p = at_minus5();
  int checked = 0;
  for (std::uint64_t d = 0; d < 40; ++d) {
    const LinkBudget b = budget_for(p, 13, d);
    CounterRng rng(99, d);
    // Random QoS-feasible allocations as linearization points.
    for (int k = 0; k < 5; ++k) {
      std::vector<double> w{rng.uniform_open0(), rng.uniform_open0(), rng.uniform_open0()};
      std::sort(w.rbegin(), w.rend());
      const double s = (w[0] + w[1] + w[2]) * (1.0 + 0.2 * rng.uniform_open0());
      for (double& v : w) v /= s;
      if (!qos_feasible(w, b).feasible) continue;
      ScaPoint start;
      start.alpha = w;
      for (std::size_t i = 0; i < 3; ++i) start.t.push_back(1.0 + sinr(w, b, i, i));
      start.z = {(w[1] + w[2]) * b.gains[0] + 1.0, w[2] * b.gains[1] + 1.0};
      const ScaPoint next = solve_convex_subproblem(b, start);
      EXPECT_GE(next.log_objective(), start.log_objective() - 1e-12);
      expect_original_constraints(next, b);
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(ConvexSubproblem, FixedPointAtConvergence) {
  // Draws whose optimum sits on the alpha_0 = ... = alpha_M face creep there
  // for hundreds of iterations, so only converged traces are checked.
  const SystemParams p = at_minus5();
  int checked = 0;
  for (std::uint64_t d = 0; d < 20; ++d) {
    ScaTrace trace;
    const LinkBudget b = budget_for(p, 7, d);
    try {
      trace = sca_optimize(b, 1e-12, 200);
    } catch (const Infeasible&) {
      continue;
    }
    if (!trace.converged) continue;
    const ScaPoint& last = trace.final_point();
    const ScaPoint again = solve_convex_subproblem(b, last);
    EXPECT_LT(std::fabs(again.log_objective() - last.log_objective()), 1e-8) << "draw " << d;
    ++checked;
  }
  EXPECT_GE(checked, 5);
}

TEST(ScaOptimize, TwoUserInstanceMatchesDenseGrid) {
  for (std::uint64_t d = 0; d < 15; ++d) {
    SystemParams q = at_minus5();
    q.n_srs = 1;
    q.target_rates = {0.5, 0.5};
    q.alpha = PowerAllocation({0.7, 0.3});
    const LinkBudget b = budget_for(q, 21, d);
    ScaTrace trace;
    try {
      trace = sca_optimize(b, 1e-9, 200);
    } catch (const Infeasible&) {
      continue;
    }
    const double sca = achievable_sum_rate(trace.final_point().alpha, b);
    const ExhaustiveResult grid = exhaustive_search(b, 1e-3);
    EXPECT_NEAR(sca, grid.sum_rate, 1e-3) << "draw " << d;
    EXPECT_GE(sca, grid.sum_rate - 1e-3);
  }
}

TEST(ScaOptimize, TraceIsMonotoneAndIteratesStayFeasible) {
  const SystemParams p = at_minus5();
  for (std::uint64_t d = 0; d < 40; ++d) {
    const LinkBudget b = budget_for(p, 3, d);
    ScaTrace trace;
    try {
      trace = sca_optimize(b, 1e-4, 50);
    } catch (const Infeasible&) {
      continue;
    }
    ASSERT_EQ(trace.iterates.size(), trace.objectives.size());
    ASSERT_EQ(trace.iterates.size(), static_cast<std::size_t>(trace.iterations) + 1);
    for (std::size_t k = 1; k < trace.objectives.size(); ++k) EXPECT_GE(trace.objectives[k], trace.objectives[k - 1]);
    for (const ScaPoint& pt : trace.iterates) expect_original_constraints(pt, b);
    EXPECT_GE(achievable_sum_rate(trace.final_point().alpha, b),
              achievable_sum_rate(trace.iterates.front().alpha, b) - 1e-12);
  }
}

TEST(ScaOptimize, RateSlacksActiveAtConvergence) {
  const SystemParams p = at_minus5();
  int checked = 0;
  for (std::uint64_t d = 0; d < 20; ++d) {
    const LinkBudget b = budget_for(p, 5, d);
    ScaTrace trace;
    try {
      trace = sca_optimize(b, 1e-10, 200);
    } catch (const Infeasible&) {
      continue;
    }
    if (!trace.converged) continue;
    const ScaPoint& pt = trace.final_point();
    for (std::size_t i = 0; i < pt.t.size(); ++i) {
      const double bound = 1.0 + sinr(pt.alpha, b, i, i);
      EXPECT_NEAR(pt.t[i] / bound, 1.0, 1e-6) << "draw " << d << " i " << i;
    }
    ++checked;
  }
  EXPECT_GE(checked, 5);
}

TEST(ScaOptimize, EverySubproblemSaturatesItsSlacks) {
  // Whether or not the outer loop has converged, each subproblem optimum
  // pushes t_i and z_i onto their own (convexified) bounds.
  const SystemParams p = at_minus5();
  for (std::uint64_t d = 0; d < 20; ++d) {
    const LinkBudget b = budget_for(p, 5, d);
    ScaTrace trace;
    try {
      trace = sca_optimize(b, 1e-4, 10);
    } catch (const Infeasible&) {
      continue;
    }
    for (std::size_t k = 1; k < trace.iterates.size(); ++k) {
      const ScaPoint& pt = trace.iterates[k];
      const ScaPoint& lin = trace.iterates[k - 1];
      const std::size_t M = pt.t.size() - 1;
      EXPECT_NEAR(pt.t[M] / (1.0 + pt.alpha[M] * b.gains[M]), 1.0, 1e-8);
      for (std::size_t i = 0; i < M; ++i) {
        double tail = 0.0;
        for (std::size_t j = i + 1; j <= M; ++j) tail += pt.alpha[j];
        EXPECT_NEAR(pt.z[i] / (tail * b.gains[i] + 1.0), 1.0, 1e-8);
        const double dl = lin.z[i] - lin.t[i];
        const double dc = pt.z[i] - pt.t[i];
        // z t - z under the tangent of -(z - t)^2 / 4 at the previous iterate.
        const double surrogate = 0.25 * (pt.z[i] + pt.t[i]) * (pt.z[i] + pt.t[i]) - 0.25 * dl * dl -
                                 0.5 * dl * (dc - dl) - pt.z[i];
        EXPECT_NEAR(surrogate / (pt.alpha[i] * b.gains[i]), 1.0, 1e-8) << "draw " << d << " k " << k;
      }
    }
  }
}

TEST(ScaOptimize, InvariantUnderGainSnrRescaling) {
  SystemParams p = at_minus5();
  for (std::uint64_t d = 0; d < 10; ++d) {
    ChannelRealization r = realization_for(p, 44, d);
    ScaTrace a;
    try {
      a = sca_optimize(r, p, 1e-6, 100);
    } catch (const Infeasible&) {
      continue;
    }
    SystemParams q = p;
    q.snr_db = p.snr_db + 10.0 * std::log10(4.0);
    ChannelRealization s = r;
    for (double& g : s.sorted_gains) g /= 4.0;
    // The ST decode rate changes, but the NOMA problem only sees the products.
    const ScaTrace b = sca_optimize(s, q, 1e-6, 100);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a.final_point().alpha[i], b.final_point().alpha[i], 1e-6);
  }
}

TEST(ScaOptimize, HalfDuplexSumRateNotAboveFullDuplex) {
  const SystemParams p = at_minus5();
  SumRateOptions opt;
  const SumRateSummary fd = summarize(optimize_draws(p, DuplexMode::FD, 100, 7, opt));
  const SumRateSummary hd = summarize(optimize_draws(p, DuplexMode::HD, 100, 7, opt));
  EXPECT_LT(hd.mean_sum_rate, fd.mean_sum_rate);
  int hd_wins = 0;
  for (std::uint64_t d = 0; d < 100; ++d) {
    const DrawResult f = optimize_draw(p, DuplexMode::FD, 7, d);
    const DrawResult h = optimize_draw(p, DuplexMode::HD, 7, d);
    if (f.counted() && h.counted() && h.sum_rate > f.sum_rate) ++hd_wins;
  }
  EXPECT_EQ(hd_wins, 0);
}

TEST(ExhaustiveSearch, GridCountsAndErrors) {
  const LinkBudget two = manual_budget({50.0, 200.0});
  const ExhaustiveResult r = exhaustive_search(two, 0.01);
  EXPECT_EQ(r.grid_points, 2601u);
  EXPECT_GT(r.feasible_points, 0u);
  EXPECT_THROW(exhaustive_search(two, 0.03), std::invalid_argument);
  EXPECT_THROW(exhaustive_search(two, 0.0), std::invalid_argument);
}

TEST(ExhaustiveSearch, RefinementNeverHurts) {
  const SystemParams p = at_minus5();
  for (std::uint64_t d = 0; d < 20; ++d) {
    const LinkBudget b = budget_for(p, 7, d);
    double coarse = -1.0;
    try {
      coarse = exhaustive_search(b, 0.1).sum_rate;
    } catch (const NoFeasibleGridPoint&) {
      continue;
    }
    EXPECT_LE(coarse, exhaustive_search(b, 0.01).sum_rate + 1e-12);
  }
}

TEST(ExhaustiveSearch, SingleFeasiblePoint) {
  // Grid 0.5 for M = 1: only (0.5, 0.5) gives the second message any power.
  const LinkBudget b = manual_budget({10.0, 10.0});
  const ExhaustiveResult r = exhaustive_search(b, 0.5);
  EXPECT_EQ(r.grid_points, 4u);
  EXPECT_EQ(r.feasible_points, 1u);
  EXPECT_EQ(r.alpha, (std::vector<double>{0.5, 0.5}));
}

TEST(ExhaustiveSearch, TiesResolveToLexicographicallySmallest) {
  // With equal gains the two-user sum rate is log2(1 + (alpha_0 + alpha_1) a),
  // so every full-power split ties; the smallest alpha_0 must win.
  const LinkBudget b = manual_budget({10.0, 10.0});
  const ExhaustiveResult r = exhaustive_search(b, 0.01);
  EXPECT_NEAR(r.sum_rate, std::log2(11.0), 1e-12);
  EXPECT_EQ(r.alpha, (std::vector<double>{0.5, 0.5}));
}
