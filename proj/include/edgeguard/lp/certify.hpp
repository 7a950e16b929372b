#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "edgeguard/lp/problem.hpp"

namespace edgeguard::lp {

// Residuals of a primal/dual pair recomputed from the problem data alone.
struct Certificate {
  double primal_residual = 0.0;     // worst row or bound violation of x
  double dual_residual = 0.0;       // worst multiplier-sign or reduced-cost violation
  double complementarity = 0.0;     // worst |multiplier * slack| over rows and bounds
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;                 // |primal - dual|
  double relative_gap = 0.0;        // gap / (1 + |primal|)
};

// Lagrangian dual function at `dual` (same sign convention as LpSolution::dual):
//   g(y) = -b'y + sum_j min_{lo_j <= x_j <= hi_j} (c_j + a_j'y) x_j.
// Reduced costs pointing at an infinite bound are counted as dual residual
// and contribute nothing.
inline double dual_objective(const LpProblem& p, std::span<const double> dual,
                             double* residual = nullptr) {
  const int n = p.num_cols();
  std::vector<double> d(n);
  for (int j = 0; j < n; ++j) d[j] = p.cost(j);
  double value = 0.0, worst = 0.0;
  for (int i = 0; i < p.num_rows(); ++i) {
    const double y = dual[i];
    for (const Entry& e : p.row(i)) d[e.index] += e.value * y;
    value -= p.rhs(i) * y;
    if (p.sense(i) == RowSense::Le) worst = std::max(worst, -y);
    if (p.sense(i) == RowSense::Ge) worst = std::max(worst, y);
  }
  for (int j = 0; j < n; ++j) {
    if (d[j] > 0) {
      if (std::isfinite(p.lower(j))) value += d[j] * p.lower(j);
      else worst = std::max(worst, d[j]);
    } else if (d[j] < 0) {
      if (std::isfinite(p.upper(j))) value += d[j] * p.upper(j);
      else worst = std::max(worst, -d[j]);
    }
  }
  if (residual) *residual = worst;
  return value;
}

inline Certificate certify(const LpProblem& p, std::span<const double> x,
                           std::span<const double> dual) {
  Certificate c;
  const int n = p.num_cols();
  for (int j = 0; j < n; ++j) {
    c.primal_residual = std::max({c.primal_residual, p.lower(j) - x[j], x[j] - p.upper(j)});
  }
  std::vector<double> d(n);
  for (int j = 0; j < n; ++j) d[j] = p.cost(j);
  for (int i = 0; i < p.num_rows(); ++i) {
    const double act = p.activity(i, x);
    const double slack = p.rhs(i) - act;
    switch (p.sense(i)) {
      case RowSense::Le: c.primal_residual = std::max(c.primal_residual, -slack); break;
      case RowSense::Ge: c.primal_residual = std::max(c.primal_residual, slack); break;
      case RowSense::Eq: c.primal_residual = std::max(c.primal_residual, std::abs(slack)); break;
    }
    c.complementarity = std::max(c.complementarity, std::abs(dual[i] * slack));
    for (const Entry& e : p.row(i)) d[e.index] += e.value * dual[i];
  }
  for (int j = 0; j < n; ++j) {
    if (d[j] > 0 && std::isfinite(p.lower(j)))
      c.complementarity = std::max(c.complementarity, std::abs(d[j] * (x[j] - p.lower(j))));
    if (d[j] < 0 && std::isfinite(p.upper(j)))
      c.complementarity = std::max(c.complementarity, std::abs(d[j] * (p.upper(j) - x[j])));
  }
  c.primal_objective = p.objective(x);
  c.dual_objective = dual_objective(p, dual, &c.dual_residual);
  c.gap = std::abs(c.primal_objective - c.dual_objective);
  c.relative_gap = c.gap / (1.0 + std::abs(c.primal_objective));
  return c;
}

inline Certificate certify(const LpProblem& p, const LpSolution& s) {
  if (!s.optimal()) throw std::logic_error("certify: solution is not optimal");
  return certify(p, s.x, s.dual);
}

// |c'x - g(dual)| from the problem data, ignoring the solver's bookkeeping.
inline double check_duality_gap(const LpProblem& p, const LpSolution& s) {
  if (!s.optimal()) throw std::logic_error("check_duality_gap: solution is not optimal");
  return std::abs(p.objective(s.x) - dual_objective(p, s.dual));
}

}  // namespace edgeguard::lp
