#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "edgeguard/error.hpp"
#include "edgeguard/instance.hpp"
#include "edgeguard/lp.hpp"
#include "edgeguard/milp.hpp"
#include "edgeguard/model.hpp"
#include "edgeguard/parallel.hpp"
#include "edgeguard/reform.hpp"

namespace edgeguard {

enum class Method { Duality, Kkt, Enum };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Duality: return "duality";
    case Method::Kkt: return "kkt";
    case Method::Enum: return "enum";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "duality") return Method::Duality;
  if (s == "kkt") return Method::Kkt;
  if (s == "enum") return Method::Enum;
  throw ValidationError("unknown method '" + s + "' (expected duality, kkt or enum)");
}

// ------------------------------------------------------------ plan sets

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return std::round(r);
}

// Every subset of `ground` with at most k elements, by size and then
// lexicographically.
inline std::vector<std::vector<int>> attack_supports(const std::vector<int>& ground, int k) {
  std::vector<std::vector<int>> out;
  const int g = static_cast<int>(ground.size());
  for (int s = 0; s <= std::min(k, g); ++s) {
    std::vector<int> idx(s);
    for (int t = 0; t < s; ++t) idx[t] = t;
    while (true) {
      std::vector<int> sup(s);
      for (int t = 0; t < s; ++t) sup[t] = ground[idx[t]];
      out.push_back(std::move(sup));
      int t = s - 1;
      while (t >= 0 && idx[t] == g - s + t) --t;
      if (t < 0) break;
      ++idx[t];
      for (int u = t + 1; u < s; ++u) idx[u] = idx[u - 1] + 1;
    }
  }
  return out;
}

inline std::vector<int> unprotected_ground(int n, const std::vector<int>& protected_ens) {
  std::vector<int> g;
  for (int j = 0; j < n; ++j)
    if (std::find(protected_ens.begin(), protected_ens.end(), j) == protected_ens.end()) g.push_back(j);
  return g;
}

// Solves the defender LP for many capacity patterns on one prebuilt problem;
// each solve starts from the no-attack basis so results do not depend on the
// order of calls.
class InnerSolver {
 public:
  explicit InnerSolver(const Instance& inst, DefenderLpOptions opts = {})
      : inst_(inst), dl_(build_defender_lp(inst, AttackPlan::none(inst.n), opts)), simplex_(dl_.lp) {
    base_ = simplex_.solve();
    has_base_ = base_.optimal();
  }

  const DefenderLp& lp() const { return dl_; }

  lp::LpSolution solve(const std::vector<int>& support) {
    for (int j : attacked_) simplex_.set_row_rhs(dl_.cap_row + j, inst_.c[j]);
    attacked_ = support;
    for (int j : attacked_) simplex_.set_row_rhs(dl_.cap_row + j, 0.0);
    lp::LpSolution s = simplex_.solve(has_base_ ? &base_.basis : nullptr);
    if (s.status == lp::Status::NumericalFailure || s.status == lp::Status::IterationLimit) s = simplex_.solve();
    if (s.status == lp::Status::NumericalFailure || s.status == lp::Status::IterationLimit)
      throw SolverError(std::string("defender LP failed: ") + lp::to_string(s.status));
    return s;
  }

 private:
  const Instance& inst_;
  DefenderLp dl_;
  lp::Simplex simplex_;
  lp::LpSolution base_;
  bool has_base_ = false;
  std::vector<int> attacked_;
};

// ------------------------------------------------------------ enumeration

struct PlanOutcome {
  std::vector<int> support;
  bool feasible = false;
  double cost = std::numeric_limits<double>::quiet_NaN();
};

struct AttackResult {
  AttackPlan worst_plan;
  double worst_cost = std::numeric_limits<double>::quiet_NaN();
  bool any_feasible = false;
  std::vector<PlanOutcome> per_plan;
  std::vector<int> attacker_wins_sizes;  // sizes at which no plan leaves a feasible defense
  long infeasible_plans = 0;
};

struct EnumOptions {
  double cap = 1e6;
  int jobs = 1;
  std::vector<int> protected_ens;  // the attacker may not touch these
  bool keep_table = true;
  double tie_rel_tol = 1e-9;
};

inline AttackResult enumerate_attacks(const Instance& inst, int k, const EnumOptions& opts = {}) {
  require_valid(inst);
  if (k < 0) throw ValidationError("budget k must be >= 0");
  const std::vector<int> ground = unprotected_ground(inst.n, opts.protected_ens);
  double count = 0.0;
  for (int s = 0; s <= std::min<int>(k, ground.size()); ++s) count += binomial(ground.size(), s);
  if (count > opts.cap)
    throw EnumerationCapExceeded("enumeration would scan " + std::to_string(static_cast<long long>(count)) +
                                 " attack plans, above the cap of " +
                                 std::to_string(static_cast<long long>(opts.cap)));
  auto supports = attack_supports(ground, k);
  std::vector<PlanOutcome> outcomes(supports.size());
  const int jobs = std::max(1, opts.jobs);
  std::vector<std::unique_ptr<InnerSolver>> solvers(jobs);
  parallel_for(static_cast<long>(supports.size()), jobs, [&](long p, int w) {
    if (!solvers[w]) solvers[w] = std::make_unique<InnerSolver>(inst);
    lp::LpSolution s = solvers[w]->solve(supports[p]);
    outcomes[p].support = supports[p];
    outcomes[p].feasible = s.optimal();
    if (s.optimal()) outcomes[p].cost = s.objective;
  });

  AttackResult r;
  const int max_size = std::min<int>(k, ground.size());
  std::vector<int> feasible_at(max_size + 1, 0);
  const PlanOutcome* best = nullptr;
  for (const PlanOutcome& o : outcomes) {
    if (!o.feasible) {
      ++r.infeasible_plans;
      continue;
    }
    ++feasible_at[o.support.size()];
    if (!best) {
      best = &o;
      continue;
    }
    const double tol = opts.tie_rel_tol * (1.0 + std::abs(best->cost));
    if (o.cost > best->cost + tol) best = &o;
    else if (o.cost >= best->cost - tol &&
             std::lexicographical_compare(o.support.begin(), o.support.end(), best->support.begin(),
                                          best->support.end()))
      best = &o;
  }
  for (int s = 0; s <= max_size; ++s)
    if (feasible_at[s] == 0) r.attacker_wins_sizes.push_back(s);
  if (best) {
    r.any_feasible = true;
    r.worst_cost = best->cost;
    r.worst_plan = AttackPlan::from_support(inst.n, best->support, k);
  } else {
    r.worst_plan = AttackPlan::none(inst.n);
    r.worst_plan.k = k;
  }
  if (opts.keep_table) r.per_plan = std::move(outcomes);
  return r;
}

// Exact check that every admissible attack of size min(k, |ground|) leaves
// the defender a feasible allocation (smaller attacks are then feasible too).
// Returns nullopt when there are more than `cap` plans to check.
inline std::optional<bool> all_attacks_defensible(const Instance& inst, int k, double cap,
                                                  const std::vector<int>& protected_ens = {}, int jobs = 1,
                                                  std::vector<int>* witness = nullptr) {
  const std::vector<int> ground = unprotected_ground(inst.n, protected_ens);
  const int s = std::min<int>(k, ground.size());
  if (binomial(ground.size(), s) > cap) return std::nullopt;
  std::vector<std::vector<int>> plans;
  for (auto& sup : attack_supports(ground, s))
    if (static_cast<int>(sup.size()) == s) plans.push_back(std::move(sup));
  std::vector<char> ok(plans.size(), 1);
  parallel_for(static_cast<long>(plans.size()), jobs, [&](long p, int) {
    ok[p] = attack_leaves_feasible_defense(inst, AttackPlan::from_support(inst.n, plans[p]));
  });
  for (std::size_t p = 0; p < plans.size(); ++p)
    if (!ok[p]) {
      if (witness) *witness = plans[p];
      return false;
    }
  return true;
}

// ------------------------------------------------------------ verification

struct Verdict {
  bool ok = false;
  bool feasible = false;
  double claimed = 0.0;
  double actual = std::numeric_limits<double>::quiet_NaN();
  std::string message;
};

inline Verdict verify_solution(const Instance& inst, const AttackPlan& plan, double claimed_cost,
                               double rel_tol = 1e-6) {
  Verdict v;
  v.claimed = claimed_cost;
  DefenderLp dl = build_defender_lp(inst, plan);
  lp::LpSolution s = lp::solve_lp(dl.lp);
  v.feasible = s.optimal();
  if (!s.optimal()) {
    v.message = std::string("defender LP under the plan is ") + lp::to_string(s.status);
    return v;
  }
  v.actual = s.objective;
  v.ok = std::abs(v.actual - claimed_cost) <= rel_tol * std::max(1.0, std::abs(v.actual));
  if (!v.ok) v.message = "re-solved cost " + format_number(v.actual) + " vs claimed " + format_number(claimed_cost);
  return v;
}

// ------------------------------------------------------------ big-M audit

struct BigMAudit {
  bool lp_ok = false;
  std::vector<const BigMRow*> binding;
  double min_relative_slack = std::numeric_limits<double>::infinity();
  double max_linearization_error = 0.0;  // duality path: |g - (1 - z) pi| / (1 + M)
  std::vector<double> x;
};

// With the binaries fixed at the incumbent, finds an optimal point that
// stays as far from the switched-on big-M bounds as possible and reports the
// bounds that are still tight.
inline BigMAudit audit_big_m(const MilpFormulation& f, const MilpSolution& sol) {
  BigMAudit a;
  lp::LpProblem p = f.lp;
  for (int c = 0; c < p.num_cols(); ++c)
    if (f.binary[c]) p.set_bounds(c, sol.x[c], sol.x[c]);
  lp::LpSolution s = lp::solve_lp(p);
  if (!s.optimal()) return a;
  a.lp_ok = true;
  a.x = s.x;

  std::vector<const BigMRow*> active;
  for (const BigMRow& r : f.big_m)
    if (static_cast<int>(std::round(sol.x[r.binary_col])) == r.active_value) active.push_back(&r);
  if (!active.empty()) {
    lp::LpProblem q = p;
    std::vector<double> cost(q.num_cols(), 0.0);
    for (const BigMRow* r : active) {
      const double sign = q.sense(r->row) == lp::RowSense::Ge ? -1.0 : 1.0;
      for (const lp::Entry& e : q.row(r->row))
        if (!f.binary[e.index]) cost[e.index] += sign * e.value / r->m;
    }
    std::vector<lp::Entry> objrow;
    for (int c = 0; c < q.num_cols(); ++c) {
      if (p.cost(c) != 0.0) objrow.push_back({c, p.cost(c)});
      q.set_cost(c, cost[c]);
    }
    q.add_row(objrow, lp::RowSense::Le, s.objective + 1e-9 * (1.0 + std::abs(s.objective)));
    lp::LpSolution t = lp::solve_lp(q);
    if (t.optimal()) a.x = t.x;
  }
  for (const BigMRow* r : active) {
    const double act = p.activity(r->row, a.x);
    const double slack = p.sense(r->row) == lp::RowSense::Ge ? act - p.rhs(r->row) : p.rhs(r->row) - act;
    a.min_relative_slack = std::min(a.min_relative_slack, slack / r->m);
    if (slack <= 1e-6 * r->m) a.binding.push_back(r);
  }
  if (f.flavor == Flavor::Duality)
    for (std::size_t j = 0; j < f.g_col.size(); ++j) {
      const double z = std::round(sol.x[f.z_col[j]]);
      const double err = std::abs(a.x[f.g_col[j]] - (1.0 - z) * a.x[f.pi_col[j]]) / (1.0 + f.bigm.duality[j]);
      a.max_linearization_error = std::max(a.max_linearization_error, err);
    }
  return a;
}

// ------------------------------------------------------------ completion

// Maps the defender optimum under a fixed attack onto a point of the
// reformulation: multipliers for the duality path, primal values plus
// multipliers and indicators for the KKT path.
inline std::vector<double> reformulation_point(const MilpFormulation& f, const Instance& inst,
                                               const std::vector<int>& z, const DefenderLp& dl,
                                               const lp::LpSolution& s) {
  DefenderDuals d = extract_duals(dl, s);
  std::vector<double> x(f.lp.num_cols(), 0.0);
  for (int j = 0; j < inst.n; ++j) x[f.z_col[j]] = z[j];
  for (int j = 0; j < inst.n; ++j) x[f.pi_col[j]] = d.pi[j];
  for (std::size_t p = 0; p < f.pairs.size(); ++p) {
    x[f.eta_col[p]] = d.eta[p];
    x[f.tau_col[p]] = d.tau[p];
  }
  for (int i = 0; i < inst.m; ++i) {
    x[f.nu_col[i]] = d.nu[i];
    for (int j = 0; j < inst.n; ++j)
      if (f.sigma_col[i][j] >= 0) x[f.sigma_col[i][j]] = d.sigma[i][j];
  }
  if (f.flavor == Flavor::Duality) {
    for (int i = 0; i < inst.m; ++i) x[f.mu_col[i]] = d.mu[i];
    for (int j = 0; j < inst.n; ++j) x[f.g_col[j]] = z[j] ? 0.0 : d.pi[j];
    return x;
  }
  for (int i = 0; i < inst.m; ++i) {
    x[f.mu_col[i]] = -d.mu[i];
    x[f.q_col[i]] = s.x[dl.q_col[i]];
    for (int j = 0; j < inst.n; ++j)
      if (f.x_col[i][j] >= 0) x[f.x_col[i][j]] = s.x[dl.x_col[i][j]];
  }
  // An indicator is 1 when its variable sits at zero.
  for (const BigMRow& r : f.big_m) {
    if (r.active_value != 0) continue;
    for (const lp::Entry& e : f.lp.row(r.row))
      if (e.index != r.binary_col) {
        const bool at_zero = x[e.index] <= 1e-9 * (1.0 + r.m);
        if (at_zero) x[e.index] = 0.0;
        x[r.binary_col] = at_zero ? 1.0 : 0.0;
      }
  }
  return x;
}

inline AttackCompletion inner_completion(const MilpFormulation& f, const Instance& inst) {
  auto solver = std::make_shared<InnerSolver>(inst);
  return [solver, &f, &inst](const std::vector<int>& z) -> std::optional<std::vector<double>> {
    std::vector<int> sup;
    for (int j = 0; j < inst.n; ++j)
      if (z[j]) sup.push_back(j);
    lp::LpSolution s = solver->solve(sup);
    if (!s.optimal()) return std::nullopt;
    return reformulation_point(f, inst, z, solver->lp(), s);
  };
}

// ------------------------------------------------------------ top level

struct HardeningPlan {
  enum class Provenance { None, Heuristic, Random, Proposed };
  std::vector<int> protected_ens;  // sorted, 0-based
  Provenance provenance = Provenance::None;
};

inline const char* to_string(HardeningPlan::Provenance p) {
  switch (p) {
    case HardeningPlan::Provenance::None: return "none";
    case HardeningPlan::Provenance::Heuristic: return "heuristic";
    case HardeningPlan::Provenance::Random: return "random";
    case HardeningPlan::Provenance::Proposed: return "proposed";
  }
  return "?";
}

struct SolveOptions {
  MilpOptions milp;
  EnumOptions enumeration;
  double defensibility_cap = 2e5;  // exact feasibility check for MILP methods
  int max_escalations = 3;
  int jobs = 1;
  std::vector<int> protected_ens;
  // Close branch-and-bound nodes whose attack is settled on the inner LP
  // optimum instead of branching on the remaining binaries.
  bool close_settled_attacks = true;
};

struct AdResult {
  Method method = Method::Enum;
  int k = 0;
  MilpStatus status = MilpStatus::Optimal;
  AttackPlan plan;
  double worst_cost = std::numeric_limits<double>::quiet_NaN();
  HardeningPlan hardening;
  long nodes = 0;
  double wall_time_s = 0.0;
  bool verified = false;
  std::string verify_message;
  int escalations = 0;
  BigMValues bigm;
  bool defensibility_certified = false;  // every admissible attack checked exactly
  std::vector<int> attacker_wins_sizes;  // enumeration only
  long infeasible_plans = 0;             // enumeration only
  double max_pruned_bound = -std::numeric_limits<double>::infinity();
};

namespace detail {

inline void refuse_unless_defensible(const Instance& inst, int k, const SolveOptions& opts, AdResult& r) {
  ValidationReport rep = validate_instance(inst);
  if (!rep.ok()) throw ValidationError("invalid instance: " + rep.violations.front());
  if (!rep.screen_passes(k)) {
    const ScreenEntry& e = rep.screen[k];
    std::string why = e.weakest_area >= 0
                          ? "area " + std::to_string(e.weakest_area + 1) + " can lose all the capacity it needs"
                          : "surviving capacity " + format_number(e.surviving_capacity) + " < required " +
                                format_number(e.required);
    throw InfeasibilityRefusal("feasibility screen fails for k=" + std::to_string(k) + ": " + why +
                               "; some attack leaves no feasible defense (use --method enum)");
  }
  std::vector<int> witness;
  auto exact = all_attacks_defensible(inst, k, opts.defensibility_cap, opts.protected_ens, opts.jobs, &witness);
  if (exact && !*exact) {
    std::string s;
    for (int j : witness) s += (s.empty() ? "" : ",") + std::to_string(j + 1);
    throw InfeasibilityRefusal("attack {" + s + "} leaves no feasible defense for k=" + std::to_string(k) +
                               " (use --method enum)");
  }
  r.defensibility_certified = exact.has_value();
}

}  // namespace detail

inline AdResult solve_attacker_defender(const Instance& inst, int k, Method method, const SolveOptions& opts = {}) {
  const auto start = std::chrono::steady_clock::now();
  require_valid(inst);
  if (k < 0 || k > inst.n) throw ValidationError("budget k must lie in [0, n]");
  AdResult r;
  r.method = method;
  r.k = k;

  if (method == Method::Enum) {
    EnumOptions eo = opts.enumeration;
    eo.jobs = opts.jobs;
    eo.protected_ens = opts.protected_ens;
    eo.keep_table = false;
    AttackResult a = enumerate_attacks(inst, k, eo);
    r.attacker_wins_sizes = a.attacker_wins_sizes;
    r.infeasible_plans = a.infeasible_plans;
    r.defensibility_certified = true;
    if (!a.any_feasible) {
      r.status = MilpStatus::Infeasible;
      r.plan = a.worst_plan;
    } else {
      r.plan = a.worst_plan;
      r.worst_cost = a.worst_cost;
      Verdict v = verify_solution(inst, r.plan, r.worst_cost);
      r.verified = v.ok;
      r.verify_message = v.message;
    }
  } else {
    detail::refuse_unless_defensible(inst, k, opts, r);
    BigMValues bigm = compute_big_m(inst);
    for (int round = 0;; ++round) {
      MilpFormulation f =
          method == Method::Duality ? build_duality_milp(inst, k, bigm) : build_kkt_milp(inst, k, bigm);
      for (int j : opts.protected_ens) f.lp.set_bounds(f.z_col[j], 0.0, 0.0);
      MilpOptions mo = opts.milp;
      if (!mo.complete) {
        mo.complete = inner_completion(f, inst);
        mo.close_settled_attacks = opts.close_settled_attacks;
      }
      MilpSolution s = solve_milp(f, mo);
      r.nodes += s.nodes;
      r.max_pruned_bound = s.max_pruned_bound;
      r.status = s.status;
      r.bigm = bigm;
      if (s.status == MilpStatus::Unbounded)
        throw InfeasibilityRefusal("dual relaxation is unbounded: some attack leaves no feasible defense");
      if (!s.has_incumbent()) {
        if (s.status == MilpStatus::BudgetExceeded) break;
        throw SolverError(std::string("reformulation reported ") + to_string(s.status));
      }
      r.plan = AttackPlan{s.z, k};
      r.worst_cost = s.objective;
      Verdict v = verify_solution(inst, r.plan, r.worst_cost);
      r.verified = v.ok;
      r.verify_message = v.message;
      if (s.status == MilpStatus::BudgetExceeded) break;
      BigMAudit audit = audit_big_m(f, s);
      const bool clean = audit.lp_ok && audit.binding.empty() && v.ok;
      if (clean) break;
      if (round >= opts.max_escalations) {
        std::string what = !audit.binding.empty() ? f.lp.row_name(audit.binding.front()->row)
                                                  : (v.ok ? std::string("audit LP failed") : v.message);
        throw SolverError("big-M insufficient after " + std::to_string(round) + " escalations: " + what);
      }
      ++r.escalations;
      if (audit.binding.empty()) {
        for (double& m : bigm.duality) m *= 2.0;
        for (double& m : bigm.kkt) m *= 2.0;
      } else {
        for (const BigMRow* b : audit.binding) {
          if (method == Method::Duality) bigm.duality[b->family] *= 2.0;
          else bigm.kkt[b->family] *= 2.0;
        }
        // one doubling per family even if several of its rows bind
        if (method == Method::Kkt) {
          BigMValues base = r.bigm;
          for (int fam = 0; fam < 7; ++fam) bigm.kkt[fam] = std::min(bigm.kkt[fam], 2.0 * base.kkt[fam]);
        } else {
          for (std::size_t j = 0; j < bigm.duality.size(); ++j)
            bigm.duality[j] = std::min(bigm.duality[j], 2.0 * r.bigm.duality[j]);
        }
      }
    }
  }
  r.hardening.protected_ens = r.plan.support();
  r.hardening.provenance = HardeningPlan::Provenance::Proposed;
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline Json result_to_json(const AdResult& r, bool include_time = true) {
  Json j;
  j["method"] = to_string(r.method);
  j["k"] = r.k;
  j["status"] = to_string(r.status);
  j["worst_cost"] = std::isfinite(r.worst_cost) ? Json(r.worst_cost) : Json(nullptr);
  std::vector<int> crit;
  for (int e : r.plan.support()) crit.push_back(e + 1);
  j["critical_set"] = crit;
  j["wall_time_s"] = include_time ? r.wall_time_s : 0.0;
  j["nodes"] = r.nodes;
  j["verified"] = r.verified;
  if (r.method != Method::Enum) {
    j["big_m_escalations"] = r.escalations;
    j["defensibility_certified"] = r.defensibility_certified;
  } else {
    std::vector<int> wins = r.attacker_wins_sizes;
    j["attacker_wins_sizes"] = wins;
    j["infeasible_plans"] = r.infeasible_plans;
  }
  return j;
}

}  // namespace edgeguard
