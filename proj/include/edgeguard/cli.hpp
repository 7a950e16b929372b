#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "edgeguard/error.hpp"
#include "edgeguard/experiments.hpp"
#include "edgeguard/instance.hpp"
#include "edgeguard/model.hpp"
#include "edgeguard/reform.hpp"
#include "edgeguard/solve.hpp"
#include "edgeguard/topology.hpp"

namespace edgeguard::cli {

enum ExitCode { kOk = 0, kUsage = 1, kSolverFailure = 2, kRefused = 3 };

namespace detail {

inline std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

inline bool env_flag(const char* name) {
  const char* v = std::getenv(name);
  return v && *v && std::string(v) != "0";
}

// 1-based EN lists on the command line, 0-based inside.
inline std::vector<int> to_zero_based(const std::vector<int>& ens, int n) {
  std::vector<int> out;
  for (int j : ens) {
    if (j < 1 || j > n) throw ValidationError("EN index " + std::to_string(j) + " out of range [1, " + std::to_string(n) + "]");
    out.push_back(j - 1);
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw ValidationError("EN list has duplicates");
  return out;
}

inline Json one_based(const std::vector<int>& ens) {
  Json a = Json::array();
  for (int j : ens) a.push_back(j + 1);
  return a;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw ValidationError("cannot write " + p.string());
  os << text;
}

struct InstanceArgs {
  std::string path;
  std::optional<double> beta, theta, gamma;

  void attach(CLI::App* sub, bool required = true) {
    auto* o = sub->add_option("-i,--instance", path, "instance JSON file");
    if (required) o->required();
    sub->add_option("--beta", beta, "override the fairness gap");
    sub->add_option("--theta", theta, "override the unmet-ratio cap");
    sub->add_option("--gamma", gamma, "override the delay weight");
  }

  Instance load() const {
    Instance inst = load_instance(path);
    if (beta) inst.beta = *beta;
    if (theta) inst.theta = *theta;
    if (gamma) inst.gamma = *gamma;
    require_valid(inst);
    return inst;
  }
};

struct SolverArgs {
  std::string method = "duality";
  long node_limit = 1'000'000;
  double time_limit = 1800.0;
  double enum_cap = 1e6;

  void attach(CLI::App* sub) {
    sub->add_option("--method", method, "duality, kkt or enum")->capture_default_str();
    sub->add_option("--node-limit", node_limit, "branch-and-bound node limit")->capture_default_str();
    sub->add_option("--time-limit", time_limit, "branch-and-bound time limit in seconds")->capture_default_str();
    sub->add_option("--enum-cap", enum_cap, "largest number of attack plans to enumerate")->capture_default_str();
  }

  SolveOptions options(int jobs) const {
    SolveOptions o;
    o.milp.node_limit = node_limit;
    o.milp.time_limit_s = time_limit;
    o.enumeration.cap = enum_cap;
    o.jobs = jobs;
    return o;
  }
};

}  // namespace detail

inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  using namespace detail;
  CLI::App app{"Find and protect the most critical edge nodes of an edge network"};
  app.name("edgeguard");
  app.require_subcommand(1);
  int jobs = 1;
  bool deterministic = env_flag("EDGEGUARD_DETERMINISTIC");
  app.add_option("--jobs", jobs, "worker threads for scenarios and enumeration")->capture_default_str();
  app.add_flag("--deterministic", deterministic, "write zero for every wall-clock field");
  const std::string default_out = env_or("EDGEGUARD_OUT", ".");

  // gen
  auto* gen = app.add_subcommand("gen", "synthesize an instance on a random scale-free topology");
  SynthesisParams sp = SynthesisParams::paper();
  std::string preset, gen_out;
  gen->add_option("--preset", preset, "parameter preset")->check(CLI::IsMember({"paper"}));
  gen->add_option("--seed", sp.seed, "random seed")->capture_default_str();
  gen->add_option("--nodes", sp.n_nodes, "graph nodes")->capture_default_str();
  gen->add_option("--attachment", sp.attachment_rate, "edges per new node")->capture_default_str();
  gen->add_option("--aps", sp.n_aps, "access points (areas)")->capture_default_str();
  gen->add_option("--ens", sp.n_ens, "edge nodes")->capture_default_str();
  gen->add_option("--threshold", sp.eligibility_threshold, "eligibility delay threshold, ms")->capture_default_str();
  gen->add_option("--gamma", sp.gamma)->capture_default_str();
  gen->add_option("--theta", sp.theta)->capture_default_str();
  gen->add_option("--beta", sp.beta)->capture_default_str();
  gen->add_option("-o,--out", gen_out, "output file (default $EDGEGUARD_OUT/instance.json)");

  // solve-defender
  auto* sd = app.add_subcommand("solve-defender", "solve the defender LP under a fixed attack");
  InstanceArgs sd_in;
  sd_in.attach(sd);
  std::vector<int> sd_attack;
  std::string sd_out;
  sd->add_option("--attack", sd_attack, "failed ENs, 1-based")->delimiter(',');
  sd->add_option("-o,--out", sd_out, "directory for allocation.csv, unmet.csv and result.json");

  // solve-ad
  auto* ad = app.add_subcommand("solve-ad", "find the worst attack of at most k ENs");
  InstanceArgs ad_in;
  ad_in.attach(ad);
  SolverArgs ad_solver;
  ad_solver.attach(ad);
  int ad_k = 1;
  std::vector<int> ad_protect;
  std::string ad_out;
  ad->add_option("-k,--k", ad_k, "attack budget")->required();
  ad->add_option("--protect", ad_protect, "ENs immune to attack, 1-based")->delimiter(',');
  ad->add_option("-o,--out", ad_out, "also write the result JSON to this file");

  // harden
  auto* hd = app.add_subcommand("harden", "choose ENs to protect");
  InstanceArgs hd_in;
  hd_in.attach(hd);
  SolverArgs hd_solver;
  hd_solver.attach(hd);
  int hd_k = 1;
  std::string hd_scheme = "proposed";
  std::uint64_t hd_seed = 1;
  hd->add_option("-k,--k", hd_k, "protection budget")->required();
  hd->add_option("--scheme", hd_scheme, "none, heuristic, random or proposed")->capture_default_str();
  hd->add_option("--seed", hd_seed, "seed for the random scheme")->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "random EN failures against a protection plan");
  InstanceArgs sim_in;
  sim_in.attach(sim);
  SolverArgs sim_solver;
  sim_solver.attach(sim);
  std::string sim_scheme = "none";
  std::vector<int> sim_protect;
  int sim_k = 0, sim_q = 1, sim_n = 500;
  std::uint64_t sim_seed = 1;
  bool sim_exact = false;
  std::string sim_out;
  sim->add_option("--scheme", sim_scheme, "protection scheme")->capture_default_str();
  sim->add_option("-k,--k", sim_k, "protection budget")->capture_default_str();
  sim->add_option("--protect", sim_protect, "explicit protected ENs, 1-based (overrides --scheme)")->delimiter(',');
  sim->add_option("-q,--q", sim_q, "failures per scenario")->capture_default_str();
  sim->add_option("--scenarios", sim_n, "number of scenarios")->capture_default_str();
  sim->add_option("--seed", sim_seed, "master seed")->capture_default_str();
  sim->add_flag("--exact", sim_exact, "scan every failure set once instead of sampling");
  sim->add_option("-o,--out", sim_out, "directory for scenarios.csv and summary.json");

  // compare and sweep share the experiment settings
  ExperimentConfig ex;
  std::vector<std::string> modes;
  std::string ex_method = "duality", ex_out;
  InstanceArgs ex_in;
  auto attach_experiment = [&](CLI::App* sub) {
    sub->add_option("--k", ex.ks, "budgets")->delimiter(',')->capture_default_str();
    sub->add_option("--scenarios", ex.n_scenarios, "scenarios per point")->capture_default_str();
    sub->add_option("--seed", ex.seed, "master seed")->capture_default_str();
    sub->add_option("--method", ex_method, "reformulation for the proposed scheme")->capture_default_str();
    sub->add_option("--node-limit", ex.solve.milp.node_limit)->capture_default_str();
    sub->add_option("--time-limit", ex.solve.milp.time_limit_s)->capture_default_str();
    sub->add_option("--enum-cap", ex.solve.enumeration.cap)->capture_default_str();
    sub->add_option("-o,--out", ex_out, "bundle directory (default $EDGEGUARD_OUT/<family>)");
  };
  auto* cmp = app.add_subcommand("compare", "compare hardening schemes (mean and worst cost)");
  ex_in.attach(cmp);
  attach_experiment(cmp);
  cmp->add_option("--modes", modes, "random and/or adversarial")->delimiter(',');
  cmp->add_option("--draws", ex.random_draws, "protection draws for the random scheme")->capture_default_str();

  auto* sw = app.add_subcommand("sweep", "beta sweep, (K, Q) grid, or formulation size and time table");
  std::string family;
  ex_in.attach(sw, false);
  attach_experiment(sw);
  sw->add_option("--family", family, "beta, kq or size-time")
      ->required()
      ->check(CLI::IsMember({"beta", "kq", "size-time"}));
  sw->add_option("--betas", ex.betas, "beta values")->delimiter(',');
  sw->add_option("--q", ex.qs, "failures per scenario")->delimiter(',');
  std::vector<std::string> sizes;
  sw->add_option("--sizes", sizes, "AREASxENS pairs, e.g. 30x10,80x30")->delimiter(',');
  sw->add_option("--instance-seeds", ex.instance_seeds)->delimiter(',');
  sw->add_option("--table-k", ex.table_k)->capture_default_str();
  sw->add_option("--kkt-time-limit", ex.kkt_time_limit_s)->capture_default_str();
  sw->add_option("--duality-time-limit", ex.duality_time_limit_s)->capture_default_str();

  // stats
  auto* st = app.add_subcommand("stats", "formulation sizes against the closed-form counts");
  InstanceArgs st_in;
  st_in.attach(st, false);
  int st_k = 1;
  std::vector<std::string> st_sizes;
  st->add_option("-k,--k", st_k, "attack budget")->capture_default_str();
  st->add_option("--sizes", st_sizes, "closed forms only, AREASxENS pairs")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  auto parse_sizes = [](const std::vector<std::string>& in) {
    std::vector<std::pair<int, int>> outp;
    for (const std::string& s : in) {
      const auto x = s.find('x');
      if (x == std::string::npos) throw ValidationError("size '" + s + "' is not AREASxENS");
      outp.emplace_back(std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1)));
    }
    return outp;
  };

  try {
    if (jobs < 1) throw ValidationError("--jobs must be positive");
    if (*gen) {
      sp.validate();
      Instance inst = synthesize_instance(sp);
      const std::filesystem::path p = gen_out.empty() ? std::filesystem::path(default_out) / "instance.json" : std::filesystem::path(gen_out);
      write_text(p, to_json(inst).dump(2) + "\n");
      out << "wrote " << p.string() << " (" << inst.m << " areas, " << inst.n << " ENs)\n";
      return kOk;
    }
    if (*sd) {
      Instance inst = sd_in.load();
      AttackPlan plan = AttackPlan::from_support(inst.n, to_zero_based(sd_attack, inst.n));
      DefenderLp dl = build_defender_lp(inst, plan);
      lp::LpSolution s = lp::solve_lp(dl.lp);
      if (s.status == lp::Status::Infeasible) {
        err << "defender LP is infeasible under this attack\n";
        return kRefused;
      }
      if (!s.optimal()) throw SolverError(std::string("defender LP ") + lp::to_string(s.status));
      Allocation alloc = allocation_from(dl, s);
      CostBreakdown cb = evaluate_allocation(inst, plan, alloc);
      Json j{{"attack", one_based(plan.support())},
             {"total", cb.total},
             {"unmet_penalty_term", cb.unmet_penalty_term},
             {"delay_term", cb.delay_term},
             {"feasible", cb.feasible}};
      out << j.dump(2) << '\n';
      if (!sd_out.empty()) {
        std::ostringstream a, u;
        write_allocation_csv(a, inst, alloc);
        write_unmet_csv(u, inst, alloc);
        write_text(std::filesystem::path(sd_out) / "allocation.csv", a.str());
        write_text(std::filesystem::path(sd_out) / "unmet.csv", u.str());
        write_text(std::filesystem::path(sd_out) / "result.json", j.dump(2) + "\n");
      }
      return kOk;
    }
    if (*ad) {
      Instance inst = ad_in.load();
      SolveOptions o = ad_solver.options(jobs);
      o.protected_ens = to_zero_based(ad_protect, inst.n);
      AdResult r = solve_attacker_defender(inst, ad_k, parse_method(ad_solver.method), o);
      Json j = result_to_json(r, !deterministic);
      out << j.dump(2) << '\n';
      if (!ad_out.empty()) write_text(ad_out, j.dump(2) + "\n");
      if (r.method == Method::Enum && !r.attacker_wins_sizes.empty())
        err << "note: attacks of size " << Json(r.attacker_wins_sizes).dump() << " leave no feasible defense\n";
      if (r.status != MilpStatus::Optimal) {
        err << "solver stopped early: " << to_string(r.status) << '\n';
        return kSolverFailure;
      }
      if (!r.verified) {
        err << "verification failed: " << r.verify_message << '\n';
        return kSolverFailure;
      }
      return kOk;
    }
    if (*hd) {
      Instance inst = hd_in.load();
      HardeningPlan p = protection_plan(inst, {parse_scheme(hd_scheme), hd_k, hd_seed},
                                        parse_method(hd_solver.method), hd_solver.options(jobs));
      out << Json{{"scheme", hd_scheme}, {"k", hd_k}, {"protected", one_based(p.protected_ens)}}.dump(2) << '\n';
      return kOk;
    }
    if (*sim) {
      Instance inst = sim_in.load();
      HardeningPlan plan;
      if (!sim_protect.empty()) {
        plan.protected_ens = to_zero_based(sim_protect, inst.n);
      } else {
        plan = protection_plan(inst, {parse_scheme(sim_scheme), sim_k, sim_seed}, parse_method(sim_solver.method),
                               sim_solver.options(jobs));
      }
      ScenarioReport r = sim_exact ? enumerate_failures(inst, plan, sim_q, sim_solver.enum_cap, jobs)
                                   : simulate_failures(inst, plan, sim_q, sim_n, sim_seed, jobs);
      FairnessProfile fp = fairness_profile(r, inst.beta);
      Json j{{"protected", one_based(plan.protected_ens)},
             {"q_failures", r.q_failures},
             {"scenarios", r.n_scenarios},
             {"seed", sim_exact ? Json(nullptr) : Json(sim_seed)},
             {"mean_cost", r.mean},
             {"worst_cost", r.worst},
             {"flagged", r.flagged_count},
             {"gap_mean", fp.gap_mean},
             {"gap_max", fp.gap_max},
             {"mean_ratio", fp.mean_ratio},
             {"max_ratio", fp.max_ratio}};
      out << j.dump(2) << '\n';
      if (!sim_out.empty()) {
        std::ostringstream csv;
        csv << "scenario,failed_ens,cost,flagged,gap\n";
        for (int s = 0; s < r.n_scenarios; ++s)
          csv << s << ',' << en_list(r.failures[s]) << ',' << num(r.costs[s]) << ',' << int(r.flagged[s]) << ','
              << num(fp.gap[s]) << '\n';
        write_text(std::filesystem::path(sim_out) / "scenarios.csv", csv.str());
        write_text(std::filesystem::path(sim_out) / "summary.json", j.dump(2) + "\n");
      }
      return kOk;
    }
    if (*cmp || *sw) {
      ex.method = parse_method(ex_method);
      ex.jobs = jobs;
      ex.record_time = !deterministic;
      if (*cmp) {
        ex.family = "scheme-comparison";
        if (!modes.empty()) {
          ex.modes.clear();
          for (const std::string& m : modes) {
            if (m == "random") ex.modes.push_back(FailureMode::Random);
            else if (m == "adversarial") ex.modes.push_back(FailureMode::Adversarial);
            else throw ValidationError("unknown failure mode '" + m + "'");
          }
        }
      } else {
        ex.family = family == "beta" ? "beta-sweep" : family == "kq" ? "k-vs-q-grid" : "size-and-time-table";
        if (!sizes.empty()) ex.sizes = parse_sizes(sizes);
      }
      std::optional<Instance> inst;
      if (!ex_in.path.empty()) inst = ex_in.load();
      ReportBundle b = run_experiment(inst ? &*inst : nullptr, ex);
      const std::filesystem::path dir = ex_out.empty() ? std::filesystem::path(default_out) / ex.family : std::filesystem::path(ex_out);
      write_bundle(b, dir);
      b.results.write_csv(out);
      return kOk;
    }
    if (*st) {
      Table t;
      t.header = {"flavor", "areas", "ens", "rows", "binary", "continuous", "table_rows", "table_binary",
                  "table_continuous"};
      if (!st_in.path.empty()) {
        Instance inst = st_in.load();
        BigMValues bigm = compute_big_m(inst);
        for (Flavor fl : {Flavor::Duality, Flavor::Kkt}) {
          SizeStats s = formulation_stats(
              fl == Flavor::Duality ? build_duality_milp(inst, st_k, bigm) : build_kkt_milp(inst, st_k, bigm), inst.m,
              inst.n);
          t.add({to_string(fl), std::to_string(inst.m), std::to_string(inst.n), std::to_string(s.n_rows),
                 std::to_string(s.n_binary), std::to_string(s.n_continuous), std::to_string(s.table_rows),
                 std::to_string(s.table_binary), std::to_string(s.table_continuous)});
        }
      }
      for (auto [m, n] : parse_sizes(st_sizes))
        for (Flavor fl : {Flavor::Duality, Flavor::Kkt})
          t.add({to_string(fl), std::to_string(m), std::to_string(n), "", "", "", std::to_string(table_rows(fl, m, n)),
                 std::to_string(table_binary(fl, m, n)), std::to_string(table_continuous(fl, m, n))});
      if (t.rows.empty()) throw ValidationError("stats needs --instance or --sizes");
      t.write_csv(out);
      return kOk;
    }
  } catch (const InfeasibilityRefusal& e) {
    err << "refused: " << e.what() << '\n';
    return kRefused;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kUsage;
}

}  // namespace edgeguard::cli
