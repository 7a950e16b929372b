#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "edgeguard/error.hpp"
#include "edgeguard/instance.hpp"
#include "edgeguard/model.hpp"
#include "edgeguard/parallel.hpp"
#include "edgeguard/reform.hpp"
#include "edgeguard/solve.hpp"
#include "edgeguard/topology.hpp"

namespace edgeguard {

// ------------------------------------------------------------ schemes

enum class SchemeKind { None, Heuristic, Random, Proposed };

inline const char* to_string(SchemeKind s) {
  switch (s) {
    case SchemeKind::None: return "none";
    case SchemeKind::Heuristic: return "heuristic";
    case SchemeKind::Random: return "random";
    case SchemeKind::Proposed: return "proposed";
  }
  return "?";
}

inline SchemeKind parse_scheme(const std::string& s) {
  if (s == "none") return SchemeKind::None;
  if (s == "heuristic") return SchemeKind::Heuristic;
  if (s == "random") return SchemeKind::Random;
  if (s == "proposed") return SchemeKind::Proposed;
  throw ValidationError("unknown scheme '" + s + "' (expected none, heuristic, random or proposed)");
}

struct Scheme {
  SchemeKind kind = SchemeKind::None;
  int k = 0;
  std::uint64_t seed = 1;  // Random only
};

// Picks `count` distinct entries of `pool` with a seeded partial shuffle;
// the result is sorted.
inline std::vector<int> sample_without_replacement(std::vector<int> pool, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = static_cast<int>(pool.size());
  for (int t = 0; t < count && t < n; ++t) {
    std::uniform_int_distribution<int> pick(t, n - 1);
    std::swap(pool[t], pool[pick(rng)]);
  }
  pool.resize(std::min(count, n));
  std::sort(pool.begin(), pool.end());
  return pool;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline HardeningPlan protection_plan(const Instance& inst, const Scheme& scheme, Method method = Method::Duality,
                                     const SolveOptions& opts = {}) {
  require_valid(inst);
  if (scheme.k < 0 || scheme.k > inst.n) throw ValidationError("protection budget k must lie in [0, n]");
  HardeningPlan p;
  switch (scheme.kind) {
    case SchemeKind::None:
      p.provenance = HardeningPlan::Provenance::None;
      break;
    case SchemeKind::Heuristic: {
      std::vector<int> order(inst.n);
      for (int j = 0; j < inst.n; ++j) order[j] = j;
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return inst.c[a] > inst.c[b]; });
      p.protected_ens.assign(order.begin(), order.begin() + scheme.k);
      std::sort(p.protected_ens.begin(), p.protected_ens.end());
      p.provenance = HardeningPlan::Provenance::Heuristic;
      break;
    }
    case SchemeKind::Random: {
      std::vector<int> all(inst.n);
      for (int j = 0; j < inst.n; ++j) all[j] = j;
      p.protected_ens = sample_without_replacement(all, scheme.k, scheme.seed);
      p.provenance = HardeningPlan::Provenance::Random;
      break;
    }
    case SchemeKind::Proposed:
      p = solve_attacker_defender(inst, scheme.k, method, opts).hardening;
      break;
  }
  return p;
}

// ------------------------------------------------------------ simulation

struct ScenarioReport {
  HardeningPlan plan;
  int q_failures = 0;
  int n_scenarios = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> failures;  // sorted EN indices per scenario
  std::vector<double> costs;
  std::vector<char> flagged;  // solved with the fairness rows dropped
  std::vector<std::vector<double>> ratios;  // q_i / lambda_i per scenario
  double mean = 0.0;
  double worst = 0.0;
  int flagged_count = 0;
};

namespace detail {

struct ScenarioSolver {
  explicit ScenarioSolver(const Instance& inst) : fair(inst), relaxed(inst, DefenderLpOptions{false}) {}
  InnerSolver fair, relaxed;
};

inline void run_scenarios(const Instance& inst, ScenarioReport& r, int jobs) {
  const int n = static_cast<int>(r.failures.size());
  r.n_scenarios = n;
  r.costs.assign(n, 0.0);
  r.flagged.assign(n, 0);
  r.ratios.assign(n, std::vector<double>(inst.m, 0.0));
  std::vector<std::unique_ptr<ScenarioSolver>> solvers(std::max(1, jobs));
  parallel_for(n, jobs, [&](long s, int w) {
    if (!solvers[w]) solvers[w] = std::make_unique<ScenarioSolver>(inst);
    InnerSolver* used = &solvers[w]->fair;
    lp::LpSolution sol = used->solve(r.failures[s]);
    if (!sol.optimal()) {
      used = &solvers[w]->relaxed;
      sol = used->solve(r.failures[s]);
      r.flagged[s] = 1;
      if (!sol.optimal())
        throw SolverError("scenario " + std::to_string(s) + ": defender LP " + lp::to_string(sol.status) +
                          " even without fairness rows");
    }
    r.costs[s] = sol.objective;
    for (int i = 0; i < inst.m; ++i) r.ratios[s][i] = sol.x[used->lp().q_col[i]] / inst.lambda[i];
  });
  double sum = 0.0;
  r.worst = n > 0 ? -std::numeric_limits<double>::infinity() : 0.0;
  r.flagged_count = 0;
  for (int s = 0; s < n; ++s) {
    sum += r.costs[s];
    r.worst = std::max(r.worst, r.costs[s]);
    r.flagged_count += r.flagged[s];
  }
  r.mean = n > 0 ? sum / n : 0.0;
}

}  // namespace detail

// Random failures hit q_failures distinct unprotected ENs per scenario;
// scenario s draws from derive_seed(seed, s).
inline ScenarioReport simulate_failures(const Instance& inst, const HardeningPlan& plan, int q_failures,
                                        int n_scenarios, std::uint64_t seed, int jobs = 1) {
  require_valid(inst);
  const std::vector<int> pool = unprotected_ground(inst.n, plan.protected_ens);
  if (q_failures < 0 || q_failures > static_cast<int>(pool.size()))
    throw ValidationError("q_failures must lie in [0, number of unprotected ENs = " + std::to_string(pool.size()) +
                          "]");
  if (n_scenarios < 1) throw ValidationError("n_scenarios must be positive");
  ScenarioReport r;
  r.plan = plan;
  r.q_failures = q_failures;
  r.seed = seed;
  for (int s = 0; s < n_scenarios; ++s) r.failures.push_back(sample_without_replacement(pool, q_failures, derive_seed(seed, s)));
  detail::run_scenarios(inst, r, jobs);
  return r;
}

// Every q_failures-subset of the unprotected ENs, once each.
inline ScenarioReport enumerate_failures(const Instance& inst, const HardeningPlan& plan, int q_failures,
                                         double cap = 1e6, int jobs = 1) {
  require_valid(inst);
  const std::vector<int> pool = unprotected_ground(inst.n, plan.protected_ens);
  if (q_failures < 0 || q_failures > static_cast<int>(pool.size()))
    throw ValidationError("q_failures must lie in [0, number of unprotected ENs]");
  if (binomial(pool.size(), q_failures) > cap)
    throw EnumerationCapExceeded("exact failure scan needs more than " +
                                 std::to_string(static_cast<long long>(cap)) + " scenarios");
  ScenarioReport r;
  r.plan = plan;
  r.q_failures = q_failures;
  for (auto& sup : attack_supports(pool, q_failures))
    if (static_cast<int>(sup.size()) == q_failures) r.failures.push_back(std::move(sup));
  detail::run_scenarios(inst, r, jobs);
  return r;
}

struct FairnessProfile {
  std::vector<double> mean_ratio, max_ratio;  // per area
  std::vector<double> gap;                    // per scenario: max_i r_i - min_i r_i
  std::vector<double> spread;                 // per scenario: std deviation of r_i across areas
  double gap_mean = 0.0, gap_max = 0.0;
  double spread_mean = 0.0;
  double worst_excess = 0.0;  // max over unflagged scenarios of gap - beta (<= 0 when fair)
};

inline FairnessProfile fairness_profile(const ScenarioReport& r, double beta) {
  if (r.ratios.empty()) throw ValidationError("fairness profile of an empty report");
  const int m = static_cast<int>(r.ratios.front().size());
  const int n = static_cast<int>(r.ratios.size());
  FairnessProfile p;
  p.mean_ratio.assign(m, 0.0);
  p.max_ratio.assign(m, 0.0);
  p.worst_excess = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < n; ++s) {
    const auto& q = r.ratios[s];
    double lo = q[0], hi = q[0], sum = 0.0;
    for (int i = 0; i < m; ++i) {
      p.mean_ratio[i] += q[i] / n;
      p.max_ratio[i] = std::max(p.max_ratio[i], q[i]);
      lo = std::min(lo, q[i]);
      hi = std::max(hi, q[i]);
      sum += q[i];
    }
    const double mean = sum / m;
    double var = 0.0;
    for (double v : q) var += (v - mean) * (v - mean);
    p.gap.push_back(hi - lo);
    p.spread.push_back(std::sqrt(var / m));
    p.gap_mean += (hi - lo) / n;
    p.gap_max = std::max(p.gap_max, hi - lo);
    p.spread_mean += p.spread.back() / n;
    if (!r.flagged[s]) p.worst_excess = std::max(p.worst_excess, hi - lo - beta);
  }
  return p;
}

// ------------------------------------------------------------ tables

// String cells with a header; written as CSV and as a JSON array of objects
// whose numeric cells are numbers.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  void write_csv(std::ostream& os) const {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t c = 0; c < cells.size(); ++c) os << (c ? "," : "") << cells[c];
      os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
  }

  Json to_json() const {
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json o = Json::object();
      for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& v = r[c];
        char* end = nullptr;
        const double d = v.empty() ? 0.0 : std::strtod(v.c_str(), &end);
        if (!v.empty() && end == v.c_str() + v.size() && v != "nan" && v != "inf" && v != "-inf")
          o[header[c]] = d;
        else
          o[header[c]] = v;
      }
      arr.push_back(std::move(o));
    }
    return arr;
  }
};

inline std::string en_list(const std::vector<int>& ens) {
  std::string s;
  for (int j : ens) s += (s.empty() ? "" : ";") + std::to_string(j + 1);
  return s;
}

inline std::string num(double v) { return std::isfinite(v) ? format_number(v) : "nan"; }

// ------------------------------------------------------------ experiments

enum class FailureMode { Random, Adversarial };

struct ExperimentConfig {
  std::string family;  // scheme-comparison, k-vs-q-grid, beta-sweep, size-and-time-table
  std::vector<int> ks{1, 2, 3};
  std::vector<int> qs{2, 4, 6};
  std::vector<double> betas{0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<FailureMode> modes{FailureMode::Random, FailureMode::Adversarial};
  int n_scenarios = 500;
  std::uint64_t seed = 1;
  int random_draws = 10;
  Method method = Method::Duality;
  SolveOptions solve;
  int jobs = 1;
  bool record_time = true;
  // size-and-time-table
  std::vector<std::pair<int, int>> sizes{{30, 10}, {80, 30}};  // (areas, ENs)
  std::vector<std::uint64_t> instance_seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  SynthesisParams base = SynthesisParams::paper();
  int table_k = 2;
  double kkt_time_limit_s = 600.0;
  double duality_time_limit_s = 1800.0;

  Json to_json() const {
    Json j;
    j["family"] = family;
    j["ks"] = ks;
    j["qs"] = qs;
    j["betas"] = betas;
    Json m = Json::array();
    for (FailureMode f : modes) m.push_back(f == FailureMode::Random ? "random" : "adversarial");
    j["modes"] = m;
    j["n_scenarios"] = n_scenarios;
    j["seed"] = seed;
    j["random_draws"] = random_draws;
    j["method"] = to_string(method);
    j["node_limit"] = solve.milp.node_limit;
    j["time_limit_s"] = solve.milp.time_limit_s;
    j["enumeration_cap"] = solve.enumeration.cap;
    if (family == "size-and-time-table") {
      Json s = Json::array();
      for (auto [m_, n_] : sizes) s.push_back({{"areas", m_}, {"ens", n_}});
      j["sizes"] = s;
      j["instance_seeds"] = instance_seeds;
      j["synthesis"] = base.to_json();
      j["k"] = table_k;
      j["kkt_time_limit_s"] = kkt_time_limit_s;
      j["duality_time_limit_s"] = duality_time_limit_s;
    }
    return j;
  }
};

struct ReportBundle {
  std::string family;
  Json config;
  Json instance;
  Table results;
  Table flags{{"context", "scenario", "failed_ens"}, {}};
};

namespace detail {

inline void record_flags(Table& flags, const std::string& context, const ScenarioReport& r) {
  for (int s = 0; s < r.n_scenarios; ++s)
    if (r.flagged[s]) flags.add({context, std::to_string(s), en_list(r.failures[s])});
}

// Worst cost of an attack of size <= k on the unprotected ENs: enumeration
// when it fits under the cap, the chosen reformulation otherwise.
inline std::pair<double, std::string> adversarial_cost(const Instance& inst, const HardeningPlan& plan, int k,
                                                       const ExperimentConfig& cfg) {
  const std::vector<int> pool = unprotected_ground(inst.n, plan.protected_ens);
  double count = 0.0;
  for (int s = 0; s <= std::min<int>(k, pool.size()); ++s) count += binomial(pool.size(), s);
  SolveOptions o = cfg.solve;
  o.protected_ens = plan.protected_ens;
  o.jobs = cfg.jobs;
  try {
    AdResult r = solve_attacker_defender(inst, k, count <= cfg.solve.enumeration.cap ? Method::Enum : cfg.method, o);
    if (r.method == Method::Enum && !r.attacker_wins_sizes.empty() &&
        r.attacker_wins_sizes.back() == std::min<int>(k, pool.size()))
      return {std::numeric_limits<double>::quiet_NaN(), "attacker_wins"};
    return {r.worst_cost, ""};
  } catch (const InfeasibilityRefusal&) {
    return {std::numeric_limits<double>::quiet_NaN(), "attacker_wins"};
  }
}

inline ReportBundle scheme_comparison(const Instance& inst, const ExperimentConfig& cfg) {
  ReportBundle b;
  b.results.header = {"k", "scheme", "mode", "draws", "mean_cost", "worst_cost", "flagged", "protected"};
  const SchemeKind kinds[] = {SchemeKind::None, SchemeKind::Heuristic, SchemeKind::Random, SchemeKind::Proposed};
  for (int k : cfg.ks) {
    for (SchemeKind kind : kinds) {
      const int draws = kind == SchemeKind::Random ? cfg.random_draws : 1;
      std::vector<HardeningPlan> plans;
      for (int d = 0; d < draws; ++d)
        plans.push_back(protection_plan(inst, {kind, kind == SchemeKind::None ? 0 : k, derive_seed(cfg.seed ^ 0x5eedULL, d)},
                                        cfg.method, cfg.solve));
      std::string prot;
      for (const auto& p : plans) prot += (prot.empty() ? "" : "|") + en_list(p.protected_ens);
      for (FailureMode mode : cfg.modes) {
        double mean = 0.0, worst = 0.0;
        int flagged = 0;
        std::string note;
        for (int d = 0; d < draws; ++d) {
          if (mode == FailureMode::Random) {
            const int pool = inst.n - static_cast<int>(plans[d].protected_ens.size());
            ScenarioReport r = simulate_failures(inst, plans[d], std::min(k, pool), cfg.n_scenarios, cfg.seed, cfg.jobs);
            mean += r.mean / draws;
            worst += r.worst / draws;
            flagged += r.flagged_count;
            record_flags(b.flags, "k=" + std::to_string(k) + " " + to_string(kind) + " draw " + std::to_string(d), r);
          } else {
            auto [cost, why] = adversarial_cost(inst, plans[d], k, cfg);
            mean += cost / draws;
            worst += cost / draws;
            if (!why.empty()) note = why;
          }
        }
        b.results.add({std::to_string(k), to_string(kind), mode == FailureMode::Random ? "random" : "adversarial",
                       std::to_string(draws), num(mean), num(worst),
                       mode == FailureMode::Random ? std::to_string(flagged) : note, prot});
      }
    }
  }
  return b;
}

inline ReportBundle k_vs_q_grid(const Instance& inst, const ExperimentConfig& cfg) {
  ReportBundle b;
  b.results.header = {"K", "Q", "scheme", "mean_cost", "worst_cost", "flagged", "protected"};
  for (int K : cfg.ks) {
    HardeningPlan plan = K == 0 ? HardeningPlan{} : protection_plan(inst, {SchemeKind::Proposed, K}, cfg.method, cfg.solve);
    for (int Q : cfg.qs) {
      const int pool = inst.n - static_cast<int>(plan.protected_ens.size());
      if (Q > pool) {
        b.results.add({std::to_string(K), std::to_string(Q), K == 0 ? "none" : "proposed", "nan", "nan",
                       "too_few_unprotected", en_list(plan.protected_ens)});
        continue;
      }
      ScenarioReport r = simulate_failures(inst, plan, Q, cfg.n_scenarios, cfg.seed, cfg.jobs);
      record_flags(b.flags, "K=" + std::to_string(K) + " Q=" + std::to_string(Q), r);
      b.results.add({std::to_string(K), std::to_string(Q), K == 0 ? "none" : "proposed", num(r.mean), num(r.worst),
                     std::to_string(r.flagged_count), en_list(plan.protected_ens)});
    }
  }
  return b;
}

inline ReportBundle beta_sweep(const Instance& base, const ExperimentConfig& cfg) {
  ReportBundle b;
  b.results.header = {"beta",     "k",        "worst_cost", "critical_set", "no_attack_cost", "mean_cost",
                      "gap_mean", "gap_max",  "spread_mean", "max_gap_excess", "flagged"};
  for (double beta : cfg.betas) {
    Instance inst = base;
    inst.beta = beta;
    lp::LpSolution none = lp::solve_lp(build_defender_lp(inst, AttackPlan::none(inst.n)).lp);
    for (int k : cfg.ks) {
      std::string worst = "nan", crit = "refused";
      try {
        SolveOptions o = cfg.solve;
        o.jobs = cfg.jobs;
        AdResult r = solve_attacker_defender(inst, k, cfg.method, o);
        worst = num(r.worst_cost);
        crit = en_list(r.plan.support());
      } catch (const InfeasibilityRefusal&) {
      }
      ScenarioReport s = simulate_failures(inst, HardeningPlan{}, k, cfg.n_scenarios, cfg.seed, cfg.jobs);
      FairnessProfile fp = fairness_profile(s, beta);
      record_flags(b.flags, "beta=" + format_number(beta) + " k=" + std::to_string(k), s);
      b.results.add({format_number(beta), std::to_string(k), worst, crit,
                     none.optimal() ? num(none.objective) : "nan", num(s.mean), num(fp.gap_mean), num(fp.gap_max),
                     num(fp.spread_mean), num(fp.worst_excess), std::to_string(s.flagged_count)});
    }
  }
  return b;
}

inline ReportBundle size_and_time_table(const ExperimentConfig& cfg) {
  ReportBundle b;
  b.results.header = {"areas",       "ens",          "seed",       "flavor",         "rows",           "binary",
                      "continuous",  "table_rows",   "table_binary", "table_continuous", "delta_rows", "delta_binary",
                      "delta_continuous", "status",  "worst_cost", "nodes",          "wall_time_s"};
  Json instances = Json::array();
  for (auto [m, n] : cfg.sizes)
    for (std::uint64_t seed : cfg.instance_seeds) {
      SynthesisParams p = cfg.base;
      p.n_aps = m;
      p.n_ens = n;
      p.seed = seed;
      Instance inst = synthesize_instance(p);
      instances.push_back({{"areas", m}, {"ens", n}, {"seed", seed}});
      BigMValues bigm = compute_big_m(inst);
      for (Flavor fl : {Flavor::Duality, Flavor::Kkt}) {
        const int k = std::min(cfg.table_k, inst.n);
        SizeStats st = formulation_stats(fl == Flavor::Duality ? build_duality_milp(inst, k, bigm)
                                                               : build_kkt_milp(inst, k, bigm),
                                         m, n);
        SolveOptions o = cfg.solve;
        o.jobs = cfg.jobs;
        o.milp.time_limit_s = fl == Flavor::Duality ? cfg.duality_time_limit_s : cfg.kkt_time_limit_s;
        std::string status, worst = "nan", nodes = "0", wall = "0";
        try {
          AdResult r = solve_attacker_defender(inst, k, fl == Flavor::Duality ? Method::Duality : Method::Kkt, o);
          status = to_string(r.status);
          worst = num(r.worst_cost);
          nodes = std::to_string(r.nodes);
          wall = cfg.record_time ? num(r.wall_time_s) : "0";
        } catch (const InfeasibilityRefusal&) {
          status = "refused";
        }
        b.results.add({std::to_string(m), std::to_string(n), std::to_string(seed), to_string(fl),
                       std::to_string(st.n_rows), std::to_string(st.n_binary), std::to_string(st.n_continuous),
                       std::to_string(st.table_rows), std::to_string(st.table_binary),
                       std::to_string(st.table_continuous), std::to_string(st.delta_rows()),
                       std::to_string(st.delta_binary()), std::to_string(st.delta_continuous()), status, worst,
                       nodes, wall});
      }
    }
  b.instance = {{"instances", instances}};
  return b;
}

}  // namespace detail

inline ReportBundle run_experiment(const Instance* inst, const ExperimentConfig& cfg) {
  ReportBundle b;
  if (cfg.family == "size-and-time-table") {
    b = detail::size_and_time_table(cfg);
  } else {
    if (!inst) throw ValidationError("experiment '" + cfg.family + "' needs an instance");
    require_valid(*inst);
    if (cfg.family == "scheme-comparison") b = detail::scheme_comparison(*inst, cfg);
    else if (cfg.family == "k-vs-q-grid") b = detail::k_vs_q_grid(*inst, cfg);
    else if (cfg.family == "beta-sweep") b = detail::beta_sweep(*inst, cfg);
    else
      throw ValidationError("unknown experiment family '" + cfg.family +
                            "' (expected scheme-comparison, k-vs-q-grid, beta-sweep or size-and-time-table)");
    b.instance = to_json(*inst);
  }
  b.family = cfg.family;
  b.config = cfg.to_json();
  return b;
}

inline void write_bundle(const ReportBundle& b, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "results");
  auto open = [](const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw ValidationError("cannot write " + p.string());
    return os;
  };
  open(dir / "config.json") << b.config.dump(2) << '\n';
  open(dir / "instance.json") << b.instance.dump(2) << '\n';
  {
    auto os = open(dir / "results" / (b.family + ".csv"));
    b.results.write_csv(os);
  }
  open(dir / "results" / (b.family + ".json")) << b.results.to_json().dump(2) << '\n';
  auto os = open(dir / "flags.csv");
  b.flags.write_csv(os);
}

}  // namespace edgeguard
