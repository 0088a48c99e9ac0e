#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "fdnoma/errors.hpp"

namespace fdnoma::convex {

/// 0.5 x'Px + q'x + r <= 0, with P positive semidefinite (empty for linear rows).
struct Constraint {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  double r = 0.0;

  [[nodiscard]] bool linear() const noexcept { return P.size() == 0; }

  [[nodiscard]] double value(const Eigen::VectorXd& x) const {
    double v = q.dot(x) + r;
    if (!linear()) v += 0.5 * x.dot(P * x);
    return v;
  }

  [[nodiscard]] Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    if (linear()) return q;
    return P * x + q;
  }
};

inline Constraint linear_constraint(Eigen::VectorXd q, double r) { return Constraint{Eigen::MatrixXd(), std::move(q), r}; }

/// minimize c'x - sum_{i in log_terms} log x_i  subject to every constraint.
struct Problem {
  Eigen::VectorXd c;
  std::vector<int> log_terms;
  std::vector<Constraint> constraints;

  [[nodiscard]] Eigen::Index dim() const { return c.size(); }

  [[nodiscard]] double objective(const Eigen::VectorXd& x) const {
    double v = c.dot(x);
    for (int i : log_terms) v -= std::log(x[i]);
    return v;
  }
};

struct BarrierSettings {
  double gap_tolerance = 1e-10;   // stop when constraints/tau falls below this
  double tau_initial = 1.0;
  double tau_growth = 10.0;
  double newton_tolerance = 1e-12;  // half squared Newton decrement
  int max_newton_steps = 4000;      // across all centering steps
  double armijo = 0.01;
  double backtrack = 0.5;
};

struct BarrierResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  int newton_steps = 0;
};

namespace detail {

inline bool strictly_feasible(const Problem& prob, const Eigen::VectorXd& x) {
  for (int i : prob.log_terms)
    if (!(x[i] > 0)) return false;
  for (const auto& con : prob.constraints)
    if (!(con.value(x) < 0)) return false;
  return true;
}

inline double barrier_value(const Problem& prob, const Eigen::VectorXd& x, double tau) {
  double v = tau * prob.objective(x);
  for (const auto& con : prob.constraints) v -= std::log(-con.value(x));
  return v;
}

}  // namespace detail

/// Log-barrier interior-point method with damped Newton centering.
/// `x0` must be strictly feasible; throws SolverFailure otherwise or when the
/// Newton budget runs out.
inline BarrierResult minimize(const Problem& prob, Eigen::VectorXd x0, const BarrierSettings& s = {}) {
  if (!detail::strictly_feasible(prob, x0)) throw SolverFailure("barrier: starting point is not strictly feasible");
  const Eigen::Index n = prob.dim();
  const double m = static_cast<double>(prob.constraints.size() + prob.log_terms.size());
  BarrierResult res;
  res.x = std::move(x0);
  double tau = s.tau_initial;
  while (true) {
    // Centering.
    while (true) {
      if (res.newton_steps >= s.max_newton_steps)
        throw SolverFailure("barrier: Newton budget of " + std::to_string(s.max_newton_steps) + " steps exhausted");
      const Eigen::VectorXd& x = res.x;
      Eigen::VectorXd grad = tau * prob.c;
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
      for (int i : prob.log_terms) {
        grad[i] -= tau / x[i];
        hess(i, i) += tau / (x[i] * x[i]);
      }
      for (const auto& con : prob.constraints) {
        const double f = con.value(x);
        const Eigen::VectorXd g = con.gradient(x);
        grad -= g / f;
        hess.noalias() += (g * g.transpose()) / (f * f);
        if (!con.linear()) hess -= con.P / f;
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      Eigen::VectorXd step = -ldlt.solve(grad);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        hess.diagonal().array() += 1e-12 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
        step = -hess.ldlt().solve(grad);
        if (!step.allFinite()) throw SolverFailure("barrier: singular Newton system");
      }
      const double decrement = -grad.dot(step);
      ++res.newton_steps;
      if (decrement / 2.0 <= s.newton_tolerance) break;
      double t = 1.0;
      const double base = detail::barrier_value(prob, x, tau);
      Eigen::VectorXd trial = x + t * step;
      int backtracks = 0;
      while (!detail::strictly_feasible(prob, trial) ||
             detail::barrier_value(prob, trial, tau) > base - s.armijo * t * decrement) {
        t *= s.backtrack;
        trial = x + t * step;
        if (++backtracks > 80) break;
      }
      // No progress possible at this precision.
      if (backtracks > 80 || !(detail::barrier_value(prob, trial, tau) < base)) break;
      res.x = std::move(trial);
    }
    if (m / tau < s.gap_tolerance) break;
    tau *= s.tau_growth;
  }
  res.objective = prob.objective(res.x);
  return res;
}

/// Phase I: minimize the largest constraint value starting from `hint`.
/// Returns a strictly feasible point, or nothing if the best achievable
/// worst-case slack is not below `-margin`.
inline bool find_interior_point(const Problem& prob, const Eigen::VectorXd& hint, Eigen::VectorXd& out,
                                double margin = 1e-10, const BarrierSettings& s = {}) {
  const Eigen::Index n = prob.dim();
  Problem aux;
  aux.c = Eigen::VectorXd::Zero(n + 1);
  aux.c[n] = 1.0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& con : prob.constraints) {
    Constraint shifted = con;
    shifted.q.conservativeResize(n + 1);
    shifted.q[n] = -1.0;
    if (!con.linear()) {
      shifted.P = Eigen::MatrixXd::Zero(n + 1, n + 1);
      shifted.P.topLeftCorner(n, n) = con.P;
    }
    worst = std::max(worst, con.value(hint));
    aux.constraints.push_back(std::move(shifted));
  }
  // Log-term variables must end up positive: -x_i <= s.
  for (int i : prob.log_terms) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n + 1);
    row[i] = -1.0;
    row[n] = -1.0;
    worst = std::max(worst, -hint[i]);
    aux.constraints.push_back(linear_constraint(row, 0.0));
  }
  // Keep the slack bounded below so the auxiliary problem stays bounded.
  Eigen::VectorXd floor_row = Eigen::VectorXd::Zero(n + 1);
  floor_row[n] = -1.0;
  aux.constraints.push_back(linear_constraint(floor_row, -1.0));

  Eigen::VectorXd start(n + 1);
  start.head(n) = hint;
  start[n] = std::max(worst, -0.5) + 1.0;
  for (int i : prob.log_terms)
    if (!(hint[i] > 0)) return false;

  BarrierSettings phase = s;
  phase.gap_tolerance = 1e-9;
  const BarrierResult r = minimize(aux, start, phase);
  if (!(r.x[n] < -margin)) return false;
  out = r.x.head(n);
  return detail::strictly_feasible(prob, out);
}

}  // namespace fdnoma::convex
