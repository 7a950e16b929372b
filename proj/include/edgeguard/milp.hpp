#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "edgeguard/error.hpp"
#include "edgeguard/lp.hpp"
#include "edgeguard/reform.hpp"

namespace edgeguard {

enum class MilpStatus { Optimal, Infeasible, Unbounded, BudgetExceeded };

inline const char* to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::Optimal: return "optimal";
    case MilpStatus::Infeasible: return "infeasible";
    case MilpStatus::Unbounded: return "unbounded";
    case MilpStatus::BudgetExceeded: return "budget_exceeded";
  }
  return "?";
}

// Proposes a full solution vector for a given 0/1 attack vector, or nothing.
using AttackCompletion = std::function<std::optional<std::vector<double>>(const std::vector<int>& z)>;

struct MilpOptions {
  long node_limit = 1'000'000;
  double time_limit_s = 1800.0;
  double integrality_tol = 1e-6;
  double tie_rel_tol = 1e-9;  // objective values this close count as equal
  double feasibility_tol = 1e-7;     // for points proposed by `complete` or rounding
  double complementarity_tol = 1e-9;  // relative to the pair's big-M
  lp::SimplexOptions lp;
  AttackCompletion complete;  // optional primal heuristic
  // When set, `complete(z)` must return a point whose value no solution with
  // attack z can exceed (the inner optimum). A node whose attack is settled
  // then closes on that point without further branching.
  bool close_settled_attacks = false;
};

struct MilpSolution {
  MilpStatus status = MilpStatus::Infeasible;
  double objective = -std::numeric_limits<double>::infinity();  // maximization sense
  std::vector<double> x;
  std::vector<int> z;  // attack binaries, rounded
  long nodes = 0;
  long lp_iterations = 0;
  double wall_time_s = 0.0;
  // Largest relaxation bound among nodes discarded by bound (maximization sense).
  double max_pruned_bound = -std::numeric_limits<double>::infinity();
  bool has_incumbent() const { return !x.empty(); }
};

namespace detail {

inline std::vector<int> support_of(const std::vector<int>& z) {
  std::vector<int> s;
  for (int j = 0; j < static_cast<int>(z.size()); ++j)
    if (z[j]) s.push_back(j);
  return s;
}

// Orders plans by their sorted support: {1} < {1,5} < {2}.
inline bool support_less(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> sa = support_of(a), sb = support_of(b);
  return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end());
}

// Smallest support a node can still reach when attack binary j is pinned
// to state[j] (1, 0) or free (-1) and at most k may be set.
inline std::vector<int> smallest_reachable(const std::vector<signed char>& state, int k) {
  int need = 0;
  for (signed char v : state) need += v == 1;
  std::vector<int> out;
  int budget = k;
  for (int j = 0; j < static_cast<int>(state.size()) && need > 0; ++j) {
    if (state[j] == 1) {
      out.push_back(j);
      --need;
      --budget;
    } else if (state[j] < 0 && budget > need) {
      out.push_back(j);
      --budget;
    }
  }
  return out;
}

inline bool point_feasible(const MilpFormulation& f, const std::vector<double>& x, double tol) {
  const lp::LpProblem& p = f.lp;
  if (static_cast<int>(x.size()) != p.num_cols()) return false;
  for (int c = 0; c < p.num_cols(); ++c) {
    const double scale = tol * (1.0 + std::abs(x[c]));
    if (x[c] < p.lower(c) - scale || x[c] > p.upper(c) + scale) return false;
    if (f.binary[c] && std::abs(x[c] - std::round(x[c])) > tol) return false;
  }
  for (int r = 0; r < p.num_rows(); ++r) {
    double act = 0.0, mag = std::abs(p.rhs(r));
    for (const lp::Entry& e : p.row(r)) {
      act += e.value * x[e.index];
      mag = std::max(mag, std::abs(e.value * x[e.index]));
    }
    const double slack = tol * (1.0 + mag);
    switch (p.sense(r)) {
      case lp::RowSense::Le: if (act > p.rhs(r) + slack) return false; break;
      case lp::RowSense::Ge: if (act < p.rhs(r) - slack) return false; break;
      case lp::RowSense::Eq: if (std::abs(act - p.rhs(r)) > slack) return false; break;
    }
  }
  return true;
}

}  // namespace detail

// Best-first branch and bound on the LP relaxation. Branches on the most
// fractional attack binary, then on the most fractional other binary (lowest
// index on ties); once a relaxation is integral,
// keeps splitting on free attack binaries so that equally good attacks are
// seen and the smallest support can be reported. A node whose bound only
// ties the incumbent is kept only if it can still reach a smaller support.
inline MilpSolution solve_milp(const MilpFormulation& f, const MilpOptions& opts = {}) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const int ncols = f.lp.num_cols();
  const int nz = static_cast<int>(f.z_col.size());
  std::vector<int> bin_cols;
  for (int c = 0; c < ncols; ++c)
    if (f.binary[c]) bin_cols.push_back(c);
  std::vector<int> other_bins;
  for (int c : bin_cols)
    if (std::find(f.z_col.begin(), f.z_col.end(), c) == f.z_col.end()) other_bins.push_back(c);

  struct Node {
    double bound;  // minimization sense
    long id;
    std::vector<std::pair<int, signed char>> fixings;
    std::shared_ptr<const lp::Basis> basis;
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);

  lp::Simplex simplex(f.lp, opts.lp);
  simplex.set_deadline(start + std::chrono::duration_cast<clock::duration>(
                                    std::chrono::duration<double>(std::min(opts.time_limit_s, 1e9))));
  MilpSolution out;
  double incumbent = std::numeric_limits<double>::infinity();  // minimization sense
  std::vector<double> best_x;
  std::vector<int> best_z;
  auto tie_tol = [&](double v) { return opts.tie_rel_tol * (1.0 + std::abs(v)); };
  auto offer = [&](double value, std::vector<double> x, std::vector<int> z) {
    const bool better = !std::isfinite(incumbent) || value < incumbent - tie_tol(incumbent);
    const bool tie = !better && value <= incumbent + tie_tol(incumbent);
    if (better || (tie && (detail::support_less(z, best_z) || (z == best_z && value < incumbent)))) {
      incumbent = better ? value : std::min(incumbent, value);
      best_x = std::move(x);
      best_z = std::move(z);
    }
  };

  std::vector<signed char> fix(ncols, -1);
  std::vector<signed char> zstate(nz);
  auto load_zstate = [&] {
    for (int j = 0; j < nz; ++j) {
      const int c = f.z_col[j];
      const double lo = fix[c] < 0 ? f.lp.lower(c) : fix[c];
      const double hi = fix[c] < 0 ? f.lp.upper(c) : fix[c];
      zstate[j] = lo > 0.5 ? 1 : (hi < 0.5 ? 0 : -1);
    }
  };
  // Discard a node whose bound is worse than the incumbent, or only ties it
  // while every attack below it is no smaller than the current one.
  auto prunable = [&](double bound) {
    if (!std::isfinite(incumbent)) return false;
    if (bound > incumbent + tie_tol(incumbent)) return true;
    if (bound < incumbent - tie_tol(incumbent)) return false;
    std::vector<int> reach = detail::smallest_reachable(zstate, f.k);
    std::vector<int> best = detail::support_of(best_z);
    return !std::lexicographical_compare(reach.begin(), reach.end(), best.begin(), best.end());
  };
  auto fractionality = [](double v) { return std::min(v - std::floor(v), std::ceil(v) - v); };
  auto record_prune = [&](double bound) { out.max_pruned_bound = std::max(out.max_pruned_bound, -bound); };

  // Attack fixed by the node: every binary pinned, or the budget used up by
  // the ones pinned to 1.
  auto settled_attack = [&]() -> std::optional<std::vector<int>> {
    std::vector<int> z(nz, 0);
    int ones = 0, free = 0;
    for (int j = 0; j < nz; ++j) {
      ones += zstate[j] == 1;
      free += zstate[j] < 0;
      z[j] = zstate[j] == 1;
    }
    if (free > 0 && ones < f.k) return std::nullopt;
    return z;
  };
  std::map<std::vector<int>, std::optional<double>> closed_value;

  std::set<std::vector<int>> tried;
  auto try_completion = [&](const std::vector<double>& relax) {
    if (!opts.complete) return;
    std::vector<int> order;
    std::vector<int> z(nz, 0);
    int used = 0;
    for (int j = 0; j < nz; ++j)
      if (zstate[j] == 1) {
        z[j] = 1;
        ++used;
      } else if (zstate[j] < 0) {
        order.push_back(j);
      }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return relax[f.z_col[a]] > relax[f.z_col[b]]; });
    for (int j : order)
      if (used < f.k) {
        z[j] = 1;
        ++used;
      }
    if (!tried.insert(z).second) return;
    std::optional<std::vector<double>> x = opts.complete(z);
    if (!x || !detail::point_feasible(f, *x, opts.feasibility_tol)) return;
    for (int c : bin_cols) (*x)[c] = std::round((*x)[c]);
    const double value = f.lp.objective(*x);
    offer(value, std::move(*x), std::move(z));
  };

  open.push({-std::numeric_limits<double>::infinity(), 0, {}, nullptr});
  long next_id = 1;
  bool limit_hit = false;

  while (!open.empty()) {
    if (out.nodes >= opts.node_limit ||
        std::chrono::duration<double>(clock::now() - start).count() > opts.time_limit_s) {
      limit_hit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    std::fill(fix.begin(), fix.end(), static_cast<signed char>(-1));
    for (auto [c, v] : node.fixings) fix[c] = v;
    load_zstate();
    if (prunable(node.bound)) {
      record_prune(node.bound);
      continue;
    }
    ++out.nodes;
    if (opts.close_settled_attacks && opts.complete) {
      if (std::optional<std::vector<int>> z = settled_attack()) {
        auto it = closed_value.find(*z);
        if (it == closed_value.end()) {
          std::optional<double> value;
          std::optional<std::vector<double>> x = opts.complete(*z);
          if (x && detail::point_feasible(f, *x, opts.feasibility_tol)) {
            for (int c : bin_cols) (*x)[c] = std::round((*x)[c]);
            value = f.lp.objective(*x);
            tried.insert(*z);
            offer(*value, std::move(*x), *z);
          }
          it = closed_value.emplace(*z, value).first;
        }
        if (it->second) continue;
      }
    }
    for (int c : bin_cols) {
      const double lo = fix[c] < 0 ? f.lp.lower(c) : fix[c];
      const double hi = fix[c] < 0 ? f.lp.upper(c) : fix[c];
      simplex.set_col_bounds(c, lo, hi);
    }
    lp::LpSolution s = simplex.solve(node.basis.get());
    if (s.status == lp::Status::NumericalFailure || s.status == lp::Status::IterationLimit)
      s = simplex.solve(nullptr);
    out.lp_iterations += s.iterations;
    if (s.status == lp::Status::TimeLimit) {
      limit_hit = true;
      break;
    }
    if (s.status == lp::Status::Infeasible) continue;
    if (s.status == lp::Status::Unbounded) {
      out.status = MilpStatus::Unbounded;
      out.wall_time_s = std::chrono::duration<double>(clock::now() - start).count();
      return out;
    }
    if (!s.optimal())
      throw SolverError(std::string("branch and bound: node relaxation failed (") + lp::to_string(s.status) + ")");
    try_completion(s.x);
    if (prunable(s.objective)) {
      record_prune(s.objective);
      continue;
    }

    int branch = -1;
    std::vector<double> rounded;  // set when the relaxation is complementary
    {
      double best_frac = opts.integrality_tol;
      for (int c : f.z_col) {
        const double frac = fractionality(s.x[c]);
        if (frac > best_frac) {
          best_frac = frac;
          branch = c;
        }
      }
    }
    if (branch < 0 && opts.close_settled_attacks && opts.complete) {
      // Settled attacks close on their own, so split free attack binaries
      // before any other binary.
      double best = -1.0;
      for (int j = 0; j < nz; ++j)
        if (zstate[j] < 0 && s.x[f.z_col[j]] > best) {
          best = s.x[f.z_col[j]];
          branch = f.z_col[j];
        }
    }
    if (branch < 0 && !f.complementarity.empty()) {
      // Split the most violated pair; if every pair already holds, fix the
      // indicators to match and keep the point.
      bool fractional = false;
      std::vector<std::pair<double, int>> cands;
      for (const ComplementarityPair& cp : f.complementarity) {
        if (fractionality(s.x[cp.indicator]) <= opts.integrality_tol) continue;
        fractional = true;
        const double expr = f.lp.activity(cp.expr_row, s.x) - f.lp.rhs(cp.expr_row);
        const double viol = expr * s.x[cp.var_col] / (cp.m * cp.m);
        if (viol > opts.complementarity_tol) cands.push_back({-viol, cp.indicator});
      }
      std::stable_sort(cands.begin(), cands.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      if (!cands.empty()) branch = cands.front().second;
    if (branch < 0 && fractional) {
        rounded = s.x;
        for (const ComplementarityPair& cp : f.complementarity) {
          const double expr = f.lp.activity(cp.expr_row, s.x) - f.lp.rhs(cp.expr_row);
          rounded[cp.indicator] = s.x[cp.var_col] <= expr ? 1.0 : 0.0;
          if (rounded[cp.indicator] == 1.0) rounded[cp.var_col] = 0.0;
          else rounded[cp.var_col] = s.x[cp.var_col];
        }
        if (!detail::point_feasible(f, rounded, opts.feasibility_tol)) rounded.clear();
      }
    }
    if (branch < 0 && rounded.empty()) {
      double best_frac = opts.integrality_tol;
      for (int c : other_bins) {
        const double frac = fractionality(s.x[c]);
        if (frac > best_frac) {
          best_frac = frac;
          branch = c;
        }
      }
    }
    if (branch < 0) {
      std::vector<double> x = rounded.empty() ? s.x : std::move(rounded);
      std::vector<int> z;
      for (int c : bin_cols) x[c] = std::round(x[c]);
      for (int c : f.z_col) z.push_back(static_cast<int>(x[c]));
      const double value = f.lp.objective(x);
      offer(value, std::move(x), std::move(z));
      // Look for other attacks of equal value below this node.
      for (int j = 0; j < nz; ++j)
        if (zstate[j] < 0) {
          branch = f.z_col[j];
          break;
        }
      if (branch < 0 || prunable(s.objective)) continue;
    }
    auto basis = std::make_shared<const lp::Basis>(s.basis);
    const signed char first = s.x[branch] >= 0.5 ? 1 : 0;
    for (signed char v : {first, static_cast<signed char>(1 - first)}) {
      Node child{s.objective, next_id++, node.fixings, basis};
      child.fixings.emplace_back(branch, v);
      open.push(std::move(child));
    }
  }

  out.wall_time_s = std::chrono::duration<double>(clock::now() - start).count();
  if (best_x.empty()) {
    out.status = limit_hit ? MilpStatus::BudgetExceeded : MilpStatus::Infeasible;
    return out;
  }
  out.status = limit_hit ? MilpStatus::BudgetExceeded : MilpStatus::Optimal;
  out.objective = -incumbent;
  out.x = std::move(best_x);
  out.z = std::move(best_z);
  return out;
}

}  // namespace edgeguard
