#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "fdnoma/barrier.hpp"
#include "fdnoma/errors.hpp"
#include "fdnoma/link.hpp"
#include "fdnoma/params.hpp"

namespace fdnoma {

/// One iterate of the successive convex approximation: power coefficients,
/// rate slacks t_i (1 + SINR_i >= t_i) and interference slacks z_i for
/// every receiver except the strongest.
struct ScaPoint {
  std::vector<double> alpha;
  std::vector<double> t;
  std::vector<double> z;

  /// prod_i t_i, the monotone surrogate of the sum rate.
  [[nodiscard]] double objective() const {
    return std::accumulate(t.begin(), t.end(), 1.0, std::multiplies<>());
  }
  [[nodiscard]] double log_objective() const {
    double v = 0.0;
    for (double ti : t) v += std::log(ti);
    return v;
  }
};

struct ScaTrace {
  std::vector<ScaPoint> iterates;  // iterates[0] is the initial feasible point
  std::vector<double> objectives;  // prod t_i per iterate
  bool converged = false;
  int iterations = 0;              // convex subproblems solved

  [[nodiscard]] const ScaPoint& final_point() const { return iterates.back(); }
};

/// prelog * sum_i log2(1 + SINR_{r_i, x_i}); own-index SINRs are the
/// binding ones for sorted gains.
inline double achievable_sum_rate(const std::vector<double>& alpha, const LinkBudget& b) {
  double rate = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) rate += std::log2(1.0 + sinr(alpha, b, i, i));
  return b.prelog * rate;
}

inline double achievable_sum_rate(const PowerAllocation& alpha, const ChannelRealization& real, const SystemParams& p,
                                  DuplexMode mode = DuplexMode::FD) {
  return achievable_sum_rate(alpha.coefficients(), make_link_budget(real.best_gain, real.sorted_gains, p, mode));
}

struct QosCheck {
  bool feasible = false;
  std::vector<double> margin;  // alpha_i a_i - gamma_i (tail_i a_i + 1)
};

inline QosCheck qos_feasible(const std::vector<double>& alpha, const LinkBudget& b) {
  QosCheck out;
  out.feasible = true;
  out.margin.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    double tail = 0.0;
    for (std::size_t k = i + 1; k < b.size(); ++k) tail += alpha[k];
    const double signal = alpha[i] * b.gains[i];
    out.margin[i] = signal - b.gamma_th[i] * (tail * b.gains[i] + 1.0);
    if (out.margin[i] < -1e-12 * (1.0 + signal)) out.feasible = false;
  }
  return out;
}

inline QosCheck qos_feasible(const PowerAllocation& alpha, const ChannelRealization& real, const SystemParams& p,
                             DuplexMode mode = DuplexMode::FD) {
  return qos_feasible(alpha.coefficients(), make_link_budget(real.best_gain, real.sorted_gains, p, mode));
}

namespace detail {

inline ScaPoint point_from_alpha(const std::vector<double>& alpha, const LinkBudget& b) {
  ScaPoint pt;
  pt.alpha = alpha;
  const std::size_t count = b.size();
  for (std::size_t i = 0; i < count; ++i) pt.t.push_back(1.0 + sinr(alpha, b, i, i));
  for (std::size_t i = 0; i + 1 < count; ++i) {
    double tail = 0.0;
    for (std::size_t k = i + 1; k < count; ++k) tail += alpha[k];
    pt.z.push_back(tail * b.gains[i] + 1.0);
  }
  return pt;
}

/// Variable layout [alpha_0..alpha_M, t_0..t_M, z_0..z_{M-1}].
struct Layout {
  int count;
  [[nodiscard]] int dim() const { return 3 * count - 1; }
  [[nodiscard]] int alpha(int i) const { return i; }
  [[nodiscard]] int t(int i) const { return count + i; }
  [[nodiscard]] int z(int i) const { return 2 * count + i; }
};

inline Eigen::VectorXd pack(const ScaPoint& pt, const Layout& L) {
  Eigen::VectorXd x(L.dim());
  for (int i = 0; i < L.count; ++i) {
    x[L.alpha(i)] = pt.alpha[static_cast<std::size_t>(i)];
    x[L.t(i)] = pt.t[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i + 1 < L.count; ++i) x[L.z(i)] = pt.z[static_cast<std::size_t>(i)];
  return x;
}

inline ScaPoint unpack(const Eigen::VectorXd& x, const Layout& L) {
  ScaPoint pt;
  for (int i = 0; i < L.count; ++i) {
    pt.alpha.push_back(x[L.alpha(i)]);
    pt.t.push_back(x[L.t(i)]);
  }
  for (int i = 0; i + 1 < L.count; ++i) pt.z.push_back(x[L.z(i)]);
  return pt;
}

/// Constraints on alpha alone: QoS rows (scaled by 1/a_i), SIC ordering and
/// the power budget. Columns past alpha_M are left at zero.
inline void add_alpha_constraints(std::vector<convex::Constraint>& rows, const LinkBudget& b, int dim) {
  const int count = static_cast<int>(b.size());
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(dim);
    q[i] = -1.0;
    for (int k = i + 1; k < count; ++k) q[k] = b.gamma_th[static_cast<std::size_t>(i)];
    const double a = b.gains[static_cast<std::size_t>(i)];
    // gamma_i (tail a_i + 1) - alpha_i a_i <= 0, divided by a_i.
    rows.push_back(convex::linear_constraint(q, a > 0 ? b.gamma_th[static_cast<std::size_t>(i)] / a : 1e300));
  }
  for (int i = 0; i + 1 < count; ++i) {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(dim);
    q[i + 1] = 1.0;
    q[i] = -1.0;
    rows.push_back(convex::linear_constraint(q, 0.0));
  }
  Eigen::VectorXd q = Eigen::VectorXd::Zero(dim);
  q.head(count).setOnes();
  rows.push_back(convex::linear_constraint(q, -1.0));
}

inline convex::Problem subproblem(const LinkBudget& b, const ScaPoint& lin) {
  const Layout L{static_cast<int>(b.size())};
  const int n = L.dim();
  const int M = L.count - 1;
  convex::Problem prob;
  prob.c = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < L.count; ++i) prob.log_terms.push_back(L.t(i));
  for (int i = 0; i < M; ++i) {
    const double a = b.gains[static_cast<std::size_t>(i)];
    // Interference slack: tail_i a_i + 1 - z_i <= 0.
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    for (int k = i + 1; k < L.count; ++k) q[L.alpha(k)] = a;
    q[L.z(i)] = -1.0;
    prob.constraints.push_back(convex::linear_constraint(q, 1.0));
    // z t - z <= alpha_i a_i with z t = ((z+t)^2 - (z-t)^2)/4 and the
    // concave -(z-t)^2 part replaced by its tangent at the previous iterate.
    const double d = lin.z[static_cast<std::size_t>(i)] - lin.t[static_cast<std::size_t>(i)];
    convex::Constraint quad;
    quad.P = Eigen::MatrixXd::Zero(n, n);
    quad.P(L.z(i), L.z(i)) = 0.5;
    quad.P(L.t(i), L.t(i)) = 0.5;
    quad.P(L.z(i), L.t(i)) = 0.5;
    quad.P(L.t(i), L.z(i)) = 0.5;
    quad.q = Eigen::VectorXd::Zero(n);
    quad.q[L.z(i)] = -1.0 - 0.5 * d;
    quad.q[L.t(i)] = 0.5 * d;
    quad.q[L.alpha(i)] = -a;
    quad.r = 0.25 * d * d;
    prob.constraints.push_back(std::move(quad));
  }
  // Strongest receiver sees no NOMA interference: t_M - 1 <= alpha_M a_M.
  {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    q[L.t(M)] = 1.0;
    q[L.alpha(M)] = -b.gains[static_cast<std::size_t>(M)];
    prob.constraints.push_back(convex::linear_constraint(q, -1.0));
  }
  add_alpha_constraints(prob.constraints, b, n);
  for (int i = 0; i < L.count; ++i) {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    q[L.t(i)] = -1.0;
    prob.constraints.push_back(convex::linear_constraint(q, 1.0));
  }
  return prob;
}

}  // namespace detail

/// Max-min-margin linear program over alpha, followed by a second LP that
/// maximizes alpha_M while keeping `margin_fraction` of that margin. Throws
/// Infeasible when no admissible allocation meets every QoS target.
inline ScaPoint initial_feasible_point(const LinkBudget& b, double margin_fraction = 0.1) {
  const int count = static_cast<int>(b.size());
  const int n = count + 1;  // alpha plus the common margin s
  convex::Problem lp;
  lp.c = Eigen::VectorXd::Zero(n);
  lp.c[count] = -1.0;
  detail::add_alpha_constraints(lp.constraints, b, n);
  for (auto& row : lp.constraints) row.q[count] = 1.0;  // row + s <= 0
  {
    // Bound s above so the program stays bounded even for huge gains.
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    q[count] = 1.0;
    lp.constraints.push_back(convex::linear_constraint(q, -1.0));
  }
  for (double g : b.gains)
    if (!(g > 0)) throw Infeasible("initial_feasible_point: a receiver has zero effective gain");

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  double weight_sum = 0.0;
  for (int i = 0; i < count; ++i) weight_sum += count - i;
  for (int i = 0; i < count; ++i) x0[i] = 0.5 * (count - i) / weight_sum;
  double worst = -1e300;
  for (const auto& row : lp.constraints) worst = std::max(worst, row.value(x0));
  x0[count] = -(worst - x0[count]) - 1.0;  // every row strictly negative

  convex::BarrierSettings settings;
  settings.gap_tolerance = 1e-11;
  const convex::BarrierResult res = convex::minimize(lp, x0, settings);
  const double best_margin = res.x[count];
  if (best_margin < 0) throw Infeasible("initial_feasible_point: best QoS margin is negative");
  std::vector<double> alpha(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) alpha[static_cast<std::size_t>(i)] = res.x[i];
  if (best_margin > 0 && margin_fraction < 1.0) {
    // Second stage: push power to the strongest receiver while every row
    // keeps a fraction of the best margin, so the start stays interior.
    convex::Problem shift;
    shift.c = Eigen::VectorXd::Zero(count);
    shift.c[count - 1] = -1.0;
    detail::add_alpha_constraints(shift.constraints, b, count);
    for (auto& row : shift.constraints) row.r += margin_fraction * best_margin;
    const convex::BarrierResult moved = convex::minimize(shift, res.x.head(count), settings);
    for (int i = 0; i < count; ++i) alpha[static_cast<std::size_t>(i)] = moved.x[i];
  }
  return detail::point_from_alpha(alpha, b);
}

inline ScaPoint initial_feasible_point(const ChannelRealization& real, const SystemParams& p,
                                       DuplexMode mode = DuplexMode::FD, double margin_fraction = 0.1) {
  return initial_feasible_point(make_link_budget(real.best_gain, real.sorted_gains, p, mode), margin_fraction);
}

/// Solves the convexified program around `lin` and returns its maximizer of
/// sum log t_i. The linearization point is feasible for its own subproblem,
/// so the result never has a smaller objective than `lin`.
inline ScaPoint solve_convex_subproblem(const LinkBudget& b, const ScaPoint& lin) {
  const detail::Layout L{static_cast<int>(b.size())};
  const convex::Problem prob = detail::subproblem(b, lin);
  const Eigen::VectorXd hint = detail::pack(lin, L);
  Eigen::VectorXd start;
  if (!convex::find_interior_point(prob, hint, start)) return lin;  // feasible set has no interior
  convex::BarrierSettings settings;
  settings.gap_tolerance = 1e-11;
  const convex::BarrierResult res = convex::minimize(prob, start, settings);
  ScaPoint next = detail::unpack(res.x, L);
  if (next.log_objective() < lin.log_objective()) return lin;
  return next;
}

inline ScaPoint solve_convex_subproblem(const ChannelRealization& real, const SystemParams& p, const ScaPoint& lin,
                                        DuplexMode mode = DuplexMode::FD) {
  return solve_convex_subproblem(make_link_budget(real.best_gain, real.sorted_gains, p, mode), lin);
}

/// Successive convex approximation: start from the max-min-margin point and
/// re-linearize at each subproblem optimum until the relative increase of
/// prod t_i drops below `eps`.
inline ScaTrace sca_optimize(const LinkBudget& b, double eps = 1e-4, int max_iter = 50) {
  ScaTrace trace;
  trace.iterates.push_back(initial_feasible_point(b));
  trace.objectives.push_back(trace.iterates.back().objective());
  for (int it = 0; it < max_iter; ++it) {
    const ScaPoint& prev = trace.iterates.back();
    ScaPoint next = solve_convex_subproblem(b, prev);
    const double gain = std::expm1(next.log_objective() - prev.log_objective());
    trace.objectives.push_back(next.objective());
    trace.iterates.push_back(std::move(next));
    ++trace.iterations;
    if (gain < eps) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

inline ScaTrace sca_optimize(const ChannelRealization& real, const SystemParams& p, double eps = 1e-4,
                             int max_iter = 50, DuplexMode mode = DuplexMode::FD) {
  return sca_optimize(make_link_budget(real.best_gain, real.sorted_gains, p, mode), eps, max_iter);
}

struct ExhaustiveResult {
  std::vector<double> alpha;
  double sum_rate = 0.0;
  std::size_t grid_points = 0;      // admissible points enumerated
  std::size_t feasible_points = 0;  // points passing the QoS filter
};

/// Enumerates alpha = k/n with k_0 >= ... >= k_M >= 0 and sum k <= n, keeps
/// QoS-feasible points and returns the best sum rate. Ties resolve to the
/// lexicographically smallest alpha.
inline ExhaustiveResult exhaustive_search(const LinkBudget& b, double grid_step) {
  const double inv = 1.0 / grid_step;
  const long steps = std::lround(inv);
  if (!(grid_step > 0) || steps < 1 || std::fabs(inv - static_cast<double>(steps)) > 1e-6 * inv)
    throw std::invalid_argument("exhaustive_search: grid step must divide 1");
  const std::size_t count = b.size();
  ExhaustiveResult best;
  best.sum_rate = -1.0;
  std::vector<long> k(count, 0);
  std::vector<double> alpha(count, 0.0);

  // Depth-first over nonincreasing integer vectors in lexicographic order.
  auto visit = [&](auto&& self, std::size_t depth, long upper, long remaining) -> void {
    if (depth == count) {
      ++best.grid_points;
      for (std::size_t i = 0; i < count; ++i) alpha[i] = static_cast<double>(k[i]) / static_cast<double>(steps);
      if (!qos_feasible(alpha, b).feasible) return;
      ++best.feasible_points;
      const double rate = achievable_sum_rate(alpha, b);
      // Rates within rounding of the incumbent count as ties; the earlier
      // (lexicographically smaller) point keeps the slot.
      if (rate > best.sum_rate + 1e-12 * (1.0 + std::fabs(best.sum_rate))) {
        best.sum_rate = rate;
        best.alpha = alpha;
      }
      return;
    }
    const long cap = std::min(upper, remaining);
    for (long v = 0; v <= cap; ++v) {
      k[depth] = v;
      self(self, depth + 1, v, remaining - v);
    }
  };
  visit(visit, 0, steps, steps);
  if (best.feasible_points == 0) throw NoFeasibleGridPoint("exhaustive_search: no grid point meets the QoS targets");
  return best;
}

inline ExhaustiveResult exhaustive_search(const ChannelRealization& real, const SystemParams& p, double grid_step,
                                          DuplexMode mode = DuplexMode::FD) {
  return exhaustive_search(make_link_budget(real.best_gain, real.sorted_gains, p, mode), grid_step);
}

}  // namespace fdnoma
