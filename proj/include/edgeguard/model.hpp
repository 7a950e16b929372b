#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boykov_kolmogorov_max_flow.hpp>

#include "edgeguard/error.hpp"
#include "edgeguard/instance.hpp"
#include "edgeguard/lp.hpp"

namespace edgeguard {

// ---------------------------------------------------------------- validation

struct ScreenEntry {
  int k = 0;
  double surviving_capacity = 0.0;  // eligible capacity left after the k largest ENs fall
  double required = 0.0;            // sum_i (1 - theta) lambda_i
  int weakest_area = -1;            // area whose own eligible ENs fall short, or -1
  bool passes = false;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<ScreenEntry> screen;  // one entry per k = 0..n

  bool ok() const { return violations.empty(); }
  bool screen_passes(int k) const {
    return k >= 0 && k < static_cast<int>(screen.size()) && screen[k].passes;
  }
};

namespace detail {

inline double sum_top(std::vector<double> v, int k) {
  std::sort(v.begin(), v.end(), std::greater<>());
  double s = 0.0;
  for (int t = 0; t < k && t < static_cast<int>(v.size()); ++t) s += v[t];
  return s;
}

}  // namespace detail

// Structural checks plus a necessary-condition capacity screen for each
// attack size k: after the k largest relevant ENs fall, the eligible
// capacity left must still cover the demand that the theta caps force to be
// served, both in total and for every area on its own.
inline ValidationReport validate_instance(const Instance& inst) {
  ValidationReport r;
  auto bad = [&](std::string s) { r.violations.push_back(std::move(s)); };
  const int m = inst.m, n = inst.n;
  if (m < 1) bad("m must be positive");
  if (n < 1) bad("n must be positive");
  if (static_cast<int>(inst.lambda.size()) != m) bad("lambda has " + std::to_string(inst.lambda.size()) + " entries, expected m");
  if (static_cast<int>(inst.phi.size()) != m) bad("phi has " + std::to_string(inst.phi.size()) + " entries, expected m");
  if (static_cast<int>(inst.c.size()) != n) bad("c has " + std::to_string(inst.c.size()) + " entries, expected n");
  bool dims = static_cast<int>(inst.d.size()) == m && static_cast<int>(inst.a.size()) == m;
  for (int i = 0; dims && i < m; ++i)
    dims = static_cast<int>(inst.d[i].size()) == n && static_cast<int>(inst.a[i].size()) == n;
  if (!dims) bad("d and a must be m x n");
  if (!r.ok()) return r;

  for (int i = 0; i < m; ++i) {
    if (!(inst.lambda[i] > 0.0) || !std::isfinite(inst.lambda[i]))
      bad("area " + std::to_string(i) + ": demand must be finite and > 0");
    if (!(inst.phi[i] >= 0.0) || !std::isfinite(inst.phi[i]))
      bad("area " + std::to_string(i) + ": penalty must be finite and >= 0");
    bool any = false;
    for (int j = 0; j < n; ++j) {
      if (inst.a[i][j] != 0 && inst.a[i][j] != 1)
        bad("eligibility entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not 0/1");
      if (!(inst.d[i][j] >= 0.0) || !std::isfinite(inst.d[i][j]))
        bad("delay entry (" + std::to_string(i) + "," + std::to_string(j) + ") must be finite and >= 0");
      any = any || inst.a[i][j] == 1;
    }
    if (!any) bad("area " + std::to_string(i) + " has no eligible EN");
  }
  for (int j = 0; j < n; ++j)
    if (!(inst.c[j] >= 0.0) || !std::isfinite(inst.c[j]))
      bad("EN " + std::to_string(j) + ": capacity must be finite and >= 0");
  if (!(inst.gamma >= 0.0 && inst.gamma <= 1.0)) bad("gamma must lie in [0,1]");
  if (!(inst.theta >= 0.0 && inst.theta <= 1.0)) bad("theta must lie in [0,1]");
  if (!(inst.beta >= 0.0)) bad("beta must be >= 0");
  if (!r.ok()) return r;

  std::vector<double> relevant;
  for (int j = 0; j < n; ++j) {
    bool used = false;
    for (int i = 0; i < m; ++i) used = used || inst.a[i][j];
    if (used) relevant.push_back(inst.c[j]);
  }
  const double total = std::accumulate(relevant.begin(), relevant.end(), 0.0);
  double required = 0.0;
  for (int i = 0; i < m; ++i) required += (1.0 - inst.theta) * inst.lambda[i];
  const double tol = 1e-9 * (1.0 + required);
  for (int k = 0; k <= n; ++k) {
    ScreenEntry e;
    e.k = k;
    e.required = required;
    e.surviving_capacity = total - detail::sum_top(relevant, k);
    e.passes = e.surviving_capacity >= required - tol;
    for (int i = 0; e.passes && i < m; ++i) {
      std::vector<double> own;
      for (int j = 0; j < n; ++j)
        if (inst.a[i][j]) own.push_back(inst.c[j]);
      const double left = std::accumulate(own.begin(), own.end(), 0.0) - detail::sum_top(own, k);
      if (left < (1.0 - inst.theta) * inst.lambda[i] - tol) {
        e.passes = false;
        e.weakest_area = i;
      }
    }
    r.screen.push_back(e);
  }
  return r;
}

inline void require_valid(const Instance& inst) {
  ValidationReport r = validate_instance(inst);
  if (!r.ok()) throw ValidationError("invalid instance: " + r.violations.front());
}

// ------------------------------------------------------------ defender LP

enum class DualSymbol { Pi, Mu, Sigma, Eta, Tau, Nu };

inline const char* to_string(DualSymbol s) {
  switch (s) {
    case DualSymbol::Pi: return "pi";
    case DualSymbol::Mu: return "mu";
    case DualSymbol::Sigma: return "sigma";
    case DualSymbol::Eta: return "eta";
    case DualSymbol::Tau: return "tau";
    case DualSymbol::Nu: return "nu";
  }
  return "?";
}

// Which dual symbol a row carries; (i, j) are (area, EN) for sigma, the
// area pair (i, i') for eta/tau, and the single index otherwise.
struct RowTag {
  DualSymbol symbol;
  int i = -1;
  int j = -1;
};

struct DefenderLpOptions {
  bool fairness = true;  // false drops the pair rows and the theta caps
};

// Row order: capacity (n), balance (m), eligibility caps (one per eligible
// pair, row-major), all eta rows, all tau rows (pairs i < i'), theta caps (m).
// Columns: eligible x in row-major order, then q.
struct DefenderLp {
  lp::LpProblem lp;
  std::vector<RowTag> tags;
  std::vector<std::vector<int>> x_col;     // -1 where ineligible
  std::vector<int> q_col;
  std::vector<std::pair<int, int>> pairs;  // (i, i'), i < i'
  std::vector<std::pair<int, int>> eligible_pairs;
  int cap_row = 0, balance_row = 0, elig_row = 0, eta_row = -1, tau_row = -1, theta_row = -1;
};

inline DefenderLp build_defender_lp(const Instance& inst, const AttackPlan& plan, DefenderLpOptions opts = {}) {
  const int m = inst.m, n = inst.n;
  if (static_cast<int>(plan.z.size()) != n) throw ValidationError("attack plan length does not match n");
  DefenderLp out;
  lp::LpProblem& p = out.lp;
  const double g = inst.gamma;

  out.x_col.assign(m, std::vector<int>(n, -1));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (inst.eligible(i, j)) {
        out.x_col[i][j] = p.add_variable(g * inst.d[i][j], 0.0, lp::kInf, "x_" + std::to_string(i) + "_" + std::to_string(j));
        out.eligible_pairs.emplace_back(i, j);
      }
  for (int i = 0; i < m; ++i)
    out.q_col.push_back(p.add_variable((1.0 - g) * inst.phi[i], 0.0, lp::kInf, "q_" + std::to_string(i)));

  std::vector<lp::Entry> row;
  out.cap_row = p.num_rows();
  for (int j = 0; j < n; ++j) {
    row.clear();
    for (int i = 0; i < m; ++i)
      if (out.x_col[i][j] >= 0) row.push_back({out.x_col[i][j], 1.0});
    p.add_row(row, lp::RowSense::Le, inst.c[j] * (1 - plan.z[j]), "cap_" + std::to_string(j));
    out.tags.push_back({DualSymbol::Pi, -1, j});
  }
  out.balance_row = p.num_rows();
  for (int i = 0; i < m; ++i) {
    row.clear();
    for (int j = 0; j < n; ++j)
      if (out.x_col[i][j] >= 0) row.push_back({out.x_col[i][j], 1.0});
    row.push_back({out.q_col[i], 1.0});
    p.add_row(row, lp::RowSense::Eq, inst.lambda[i], "balance_" + std::to_string(i));
    out.tags.push_back({DualSymbol::Mu, i, -1});
  }
  out.elig_row = p.num_rows();
  for (auto [i, j] : out.eligible_pairs) {
    p.add_row({{out.x_col[i][j], 1.0}}, lp::RowSense::Le, inst.c[j] * inst.a[i][j],
              "elig_" + std::to_string(i) + "_" + std::to_string(j));
    out.tags.push_back({DualSymbol::Sigma, i, j});
  }
  for (int i = 0; i < m; ++i)
    for (int l = i + 1; l < m; ++l) out.pairs.emplace_back(i, l);
  if (opts.fairness) {
    out.eta_row = p.num_rows();
    for (auto [i, l] : out.pairs) {
      p.add_row({{out.q_col[i], 1.0 / inst.lambda[i]}, {out.q_col[l], -1.0 / inst.lambda[l]}}, lp::RowSense::Le,
                inst.beta, "eta_" + std::to_string(i) + "_" + std::to_string(l));
      out.tags.push_back({DualSymbol::Eta, i, l});
    }
    out.tau_row = p.num_rows();
    for (auto [i, l] : out.pairs) {
      p.add_row({{out.q_col[i], 1.0 / inst.lambda[i]}, {out.q_col[l], -1.0 / inst.lambda[l]}}, lp::RowSense::Ge,
                -inst.beta, "tau_" + std::to_string(i) + "_" + std::to_string(l));
      out.tags.push_back({DualSymbol::Tau, i, l});
    }
    out.theta_row = p.num_rows();
    for (int i = 0; i < m; ++i) {
      p.add_row({{out.q_col[i], 1.0 / inst.lambda[i]}}, lp::RowSense::Le, inst.theta, "theta_" + std::to_string(i));
      out.tags.push_back({DualSymbol::Nu, i, -1});
    }
  }
  return out;
}

// Duals of the defender LP in the signs used by the dual program: every
// multiplier except mu is nonnegative, and
//   -pi_j + mu_i - sigma_ij <= gamma d_ij,
//   mu_i - (1/l_i) sum_{i'>i}(eta - tau) + (1/l_i) sum_{i'<i}(eta - tau) - nu_i/l_i <= (1-gamma) phi_i.
struct DefenderDuals {
  std::vector<double> pi, mu, nu;
  std::vector<std::vector<double>> sigma;  // m x n, zero where ineligible
  std::vector<double> eta, tau;            // per pair, DefenderLp::pairs order
};

inline DefenderDuals extract_duals(const DefenderLp& dl, const lp::LpSolution& s) {
  const int m = static_cast<int>(dl.q_col.size()), n = static_cast<int>(dl.x_col.empty() ? 0 : dl.x_col[0].size());
  DefenderDuals d;
  d.pi.assign(n, 0.0);
  d.mu.assign(m, 0.0);
  d.nu.assign(m, 0.0);
  d.sigma.assign(m, std::vector<double>(n, 0.0));
  d.eta.assign(dl.pairs.size(), 0.0);
  d.tau.assign(dl.pairs.size(), 0.0);
  for (int r = 0; r < static_cast<int>(dl.tags.size()); ++r) {
    const RowTag& t = dl.tags[r];
    const double y = s.dual[r];
    switch (t.symbol) {
      case DualSymbol::Pi: d.pi[t.j] = y; break;
      case DualSymbol::Mu: d.mu[t.i] = -y; break;
      case DualSymbol::Sigma: d.sigma[t.i][t.j] = y; break;
      case DualSymbol::Eta: d.eta[r - dl.eta_row] = y; break;
      case DualSymbol::Tau: d.tau[r - dl.tau_row] = -y; break;
      case DualSymbol::Nu: d.nu[t.i] = y; break;
    }
  }
  return d;
}

// ------------------------------------------------------------- allocation

struct Allocation {
  std::vector<std::vector<double>> x;  // m x n
  std::vector<double> q;
};

inline Allocation allocation_from(const DefenderLp& dl, const lp::LpSolution& s) {
  const int m = static_cast<int>(dl.q_col.size()), n = static_cast<int>(dl.x_col.empty() ? 0 : dl.x_col[0].size());
  Allocation a;
  a.x.assign(m, std::vector<double>(n, 0.0));
  a.q.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j)
      if (dl.x_col[i][j] >= 0) a.x[i][j] = s.x[dl.x_col[i][j]];
    a.q[i] = s.x[dl.q_col[i]];
  }
  return a;
}

struct Residual {
  std::string constraint;
  double value = 0.0;
};

struct CostBreakdown {
  double unmet_penalty_term = 0.0;
  double delay_term = 0.0;
  double total = 0.0;
  bool feasible = true;
  std::vector<Residual> residuals;  // violations beyond tolerance only
};

inline CostBreakdown evaluate_allocation(const Instance& inst, const AttackPlan& plan, const Allocation& alloc,
                                         double tol = 1e-8, bool fairness = true) {
  const int m = inst.m, n = inst.n;
  if (static_cast<int>(alloc.x.size()) != m || static_cast<int>(alloc.q.size()) != m)
    throw ValidationError("allocation dimensions do not match the instance");
  CostBreakdown c;
  auto check = [&](double resid, const std::string& name) {
    if (resid > tol) c.residuals.push_back({name, resid});
  };
  std::vector<double> used(n, 0.0);
  for (int i = 0; i < m; ++i) {
    double served = 0.0;
    for (int j = 0; j < n; ++j) {
      const double x = alloc.x[i][j];
      const std::string id = std::to_string(i) + "," + std::to_string(j);
      check(-x, "x[" + id + "] >= 0");
      check(x - inst.c[j] * inst.a[i][j], "x[" + id + "] <= C a");
      served += x;
      used[j] += x;
      c.delay_term += inst.gamma * inst.d[i][j] * x;
    }
    check(-alloc.q[i], "q[" + std::to_string(i) + "] >= 0");
    check(std::abs(served + alloc.q[i] - inst.lambda[i]), "balance[" + std::to_string(i) + "]");
    c.unmet_penalty_term += (1.0 - inst.gamma) * inst.phi[i] * alloc.q[i];
    if (fairness) check(alloc.q[i] / inst.lambda[i] - inst.theta, "theta[" + std::to_string(i) + "]");
  }
  for (int j = 0; j < n; ++j)
    check(used[j] - inst.c[j] * (1 - plan.z[j]), "capacity[" + std::to_string(j) + "]");
  if (fairness)
    for (int i = 0; i < m; ++i)
      for (int l = i + 1; l < m; ++l)
        check(std::abs(alloc.q[i] / inst.lambda[i] - alloc.q[l] / inst.lambda[l]) - inst.beta,
              "fairness[" + std::to_string(i) + "," + std::to_string(l) + "]");
  c.total = c.unmet_penalty_term + c.delay_term;
  c.feasible = c.residuals.empty();
  return c;
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Indices in exported files are 1-based.
inline void write_allocation_csv(std::ostream& os, const Instance& inst, const Allocation& alloc) {
  os << "area,en,x\n";
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j)
      if (inst.eligible(i, j)) os << i + 1 << ',' << j + 1 << ',' << format_number(alloc.x[i][j]) << '\n';
}

inline void write_unmet_csv(std::ostream& os, const Instance& inst, const Allocation& alloc) {
  os << "area,q,q_over_lambda\n";
  for (int i = 0; i < inst.m; ++i)
    os << i + 1 << ',' << format_number(alloc.q[i]) << ',' << format_number(alloc.q[i] / inst.lambda[i]) << '\n';
}

// ------------------------------------------------- feasibility certificate

// The defender LP under `plan` is feasible iff every area can have
// (1 - theta) lambda_i served at once: equal unmet ratios of theta satisfy
// every pair row, and serving more than that can always be undone.
// Decided by a max-flow from areas to surviving eligible ENs.
inline bool attack_leaves_feasible_defense(const Instance& inst, const AttackPlan& plan) {
  using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
  using FlowGraph = boost::adjacency_list<
      boost::vecS, boost::vecS, boost::directedS,
      boost::property<boost::vertex_index_t, long,
                      boost::property<boost::vertex_color_t, boost::default_color_type,
                                      boost::property<boost::vertex_distance_t, long,
                                                      boost::property<boost::vertex_predecessor_t, Traits::edge_descriptor>>>>,
      boost::property<boost::edge_capacity_t, double,
                      boost::property<boost::edge_residual_capacity_t, double,
                                      boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;
  const int m = inst.m, n = inst.n;
  const int source = m + n, sink = m + n + 1;
  FlowGraph fg(m + n + 2);
  auto cap = boost::get(boost::edge_capacity, fg);
  auto rev = boost::get(boost::edge_reverse, fg);
  auto add = [&](int u, int v, double c) {
    auto e = boost::add_edge(u, v, fg).first;
    auto r = boost::add_edge(v, u, fg).first;
    cap[e] = c;
    cap[r] = 0.0;
    rev[e] = r;
    rev[r] = e;
  };
  double need = 0.0;
  for (int i = 0; i < m; ++i) {
    const double w = (1.0 - inst.theta) * inst.lambda[i];
    need += w;
    add(source, i, w);
    for (int j = 0; j < n; ++j)
      if (inst.eligible(i, j) && !plan.z[j] && inst.c[j] > 0) add(i, m + j, inst.c[j]);
  }
  for (int j = 0; j < n; ++j)
    if (!plan.z[j] && inst.c[j] > 0) add(m + j, sink, inst.c[j]);
  const double flow = boost::boykov_kolmogorov_max_flow(fg, source, sink);
  return flow >= need - 1e-9 * (1.0 + need);
}

}  // namespace edgeguard
