#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/dijkstra_shortest_paths.hpp>

#include "edgeguard/error.hpp"
#include "edgeguard/instance.hpp"

namespace edgeguard {

// Undirected graph; link_delay[e] belongs to edges[e].
struct Graph {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> link_delay;
};

struct SynthesisParams {
  int n_nodes = 100;
  int attachment_rate = 2;
  int n_aps = 80;
  int n_ens = 30;
  double delay_low = 2.0;
  double delay_high = 5.0;
  double eligibility_threshold = 20.0;
  std::vector<double> capacity_choices{16, 32, 64, 128, 256, 512, 1024};
  double demand_low = 20.0;
  double demand_high = 35.0;
  double unmet_penalty = 5.0;
  double gamma = 0.1;
  double theta = 0.8;
  double beta = 1.0;
  std::uint64_t seed = 1;

  // Setup of the reference evaluation: 100-node BA graph with attachment 2,
  // 80 APs, 30 ENs, links in [2,5] ms, eligibility under 20 ms.
  static SynthesisParams paper() { return {}; }

  void validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
      throw ValidationError("synthesis parameter " + field + ": " + why);
    };
    if (n_nodes < 1) fail("n_nodes", "must be positive");
    if (attachment_rate < 1) fail("attachment_rate", "must be positive");
    if (n_nodes < attachment_rate + 1) fail("n_nodes", "must be at least attachment_rate + 1");
    if (n_aps < 1 || n_aps > n_nodes) fail("n_aps", "must be in [1, n_nodes]");
    if (n_ens < 1 || n_ens > n_nodes) fail("n_ens", "must be in [1, n_nodes]");
    if (!(delay_low >= 0.0) || !(delay_low <= delay_high) || !std::isfinite(delay_high))
      fail("delay_range", "need 0 <= low <= high < inf");
    if (std::isnan(eligibility_threshold)) fail("eligibility_threshold", "is NaN");
    if (capacity_choices.empty()) fail("capacity_choices", "is empty");
    for (double c : capacity_choices)
      if (!(c >= 0.0) || !std::isfinite(c)) fail("capacity_choices", "entries must be finite and >= 0");
    if (!(demand_low > 0.0) || !(demand_low <= demand_high) || !std::isfinite(demand_high))
      fail("demand_range", "need 0 < low <= high < inf");
    if (!(unmet_penalty >= 0.0) || !std::isfinite(unmet_penalty)) fail("unmet_penalty", "must be >= 0");
    if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma", "must lie in [0,1]");
    if (!(theta >= 0.0 && theta <= 1.0)) fail("theta", "must lie in [0,1]");
    if (!(beta >= 0.0)) fail("beta", "must be >= 0");
  }

  Json to_json() const {
    Json j;
    j["n_nodes"] = n_nodes;
    j["attachment_rate"] = attachment_rate;
    j["n_aps"] = n_aps;
    j["n_ens"] = n_ens;
    j["delay_range"] = {delay_low, delay_high};
    j["eligibility_threshold"] = std::isfinite(eligibility_threshold) ? Json(eligibility_threshold) : Json("inf");
    j["capacity_choices"] = capacity_choices;
    j["demand_range"] = {demand_low, demand_high};
    j["unmet_penalty"] = unmet_penalty;
    j["gamma"] = gamma;
    j["theta"] = theta;
    j["beta"] = beta;
    j["seed"] = seed;
    return j;
  }
};

// Barabasi-Albert growth from a complete graph on attachment_rate + 1 nodes.
// Each new node draws attachment_rate distinct targets with probability
// proportional to current degree. Delays are uniform on [delay_low, delay_high].
inline Graph generate_ba_topology(const SynthesisParams& params) {
  params.validate();
  const int n = params.n_nodes, m0 = params.attachment_rate;
  std::mt19937_64 rng(params.seed);
  Graph g;
  g.node_count = n;
  std::vector<int> degree(n, 0);
  auto link = [&](int u, int v) {
    g.edges.emplace_back(u, v);
    ++degree[u];
    ++degree[v];
  };
  for (int u = 0; u <= m0; ++u)
    for (int v = u + 1; v <= m0; ++v) link(u, v);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> targets;
  for (int v = m0 + 1; v < n; ++v) {
    targets.clear();
    long total = 0;
    for (int u = 0; u < v; ++u) total += degree[u];
    for (int t = 0; t < m0; ++t) {
      // Roulette over nodes not picked yet.
      double r = unit(rng) * static_cast<double>(total);
      int pick = -1;
      for (int u = 0; u < v; ++u) {
        if (std::find(targets.begin(), targets.end(), u) != targets.end()) continue;
        pick = u;
        r -= degree[u];
        if (r < 0) break;
      }
      targets.push_back(pick);
      total -= degree[pick];
    }
    std::sort(targets.begin(), targets.end());
    for (int u : targets) link(u, v);
  }

  std::uniform_real_distribution<double> delay(params.delay_low, params.delay_high);
  g.link_delay.reserve(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    g.link_delay.push_back(params.delay_low == params.delay_high ? params.delay_low : delay(rng));
  return g;
}

// Single-source shortest-path delays to every node (infinity if unreachable).
inline std::vector<double> shortest_delays(const Graph& g, int source) {
  using BGraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS, boost::no_property,
                                       boost::property<boost::edge_weight_t, double>>;
  BGraph bg(g.node_count);
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    boost::add_edge(g.edges[e].first, g.edges[e].second, g.link_delay[e], bg);
  std::vector<double> dist(g.node_count);
  boost::dijkstra_shortest_paths(
      bg, boost::vertex(source, bg),
      boost::distance_map(boost::make_iterator_property_map(dist.begin(), boost::get(boost::vertex_index, bg))));
  for (double& x : dist)
    if (x == std::numeric_limits<double>::max()) x = std::numeric_limits<double>::infinity();
  return dist;
}

// d[i][j] = shortest-path delay from ap_nodes[i] to en_nodes[j].
inline std::vector<std::vector<double>> all_pairs_delay(const Graph& g, const std::vector<int>& ap_nodes,
                                                        const std::vector<int>& en_nodes) {
  for (int v : ap_nodes)
    if (v < 0 || v >= g.node_count) throw ValidationError("all_pairs_delay: AP node out of range");
  for (int v : en_nodes)
    if (v < 0 || v >= g.node_count) throw ValidationError("all_pairs_delay: EN node out of range");
  std::vector<std::vector<double>> d(ap_nodes.size(), std::vector<double>(en_nodes.size()));
  for (std::size_t i = 0; i < ap_nodes.size(); ++i) {
    std::vector<double> dist = shortest_delays(g, ap_nodes[i]);
    for (std::size_t j = 0; j < en_nodes.size(); ++j) {
      d[i][j] = dist[en_nodes[j]];
      if (!std::isfinite(d[i][j]))
        throw ValidationError("all_pairs_delay: nodes " + std::to_string(ap_nodes[i]) + " and " +
                              std::to_string(en_nodes[j]) + " are disconnected");
    }
  }
  return d;
}

// Picks disjoint AP and EN node sets when n_aps + n_ens fits in the graph.
// Otherwise every non-EN node hosts an AP and the remaining APs share nodes
// with ENs (zero delay between the co-located pair).
inline std::pair<std::vector<int>, std::vector<int>> assign_roles(int n_nodes, int n_aps, int n_ens,
                                                                  std::mt19937_64& rng) {
  std::vector<int> order(n_nodes);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n_nodes - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<int> ens(order.begin(), order.begin() + n_ens);
  std::vector<int> aps(order.begin() + n_ens, order.end());
  if (static_cast<int>(aps.size()) > n_aps) aps.resize(n_aps);
  for (int t = 0; static_cast<int>(aps.size()) < n_aps; ++t) aps.push_back(ens[t]);
  return {aps, ens};
}

inline Instance synthesize_instance(const SynthesisParams& params, int max_attempts = 100) {
  params.validate();
  Graph g = generate_ba_topology(params);
  std::mt19937_64 rng(params.seed ^ 0x9e3779b97f4a7c15ULL);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    auto [aps, ens] = assign_roles(params.n_nodes, params.n_aps, params.n_ens, rng);
    auto d = all_pairs_delay(g, aps, ens);
    std::vector<std::vector<int>> a(params.n_aps, std::vector<int>(params.n_ens, 0));
    bool covered = true;
    for (int i = 0; i < params.n_aps; ++i) {
      bool any = false;
      for (int j = 0; j < params.n_ens; ++j) {
        a[i][j] = d[i][j] < params.eligibility_threshold ? 1 : 0;
        any = any || a[i][j];
      }
      covered = covered && any;
    }
    if (!covered) continue;

    Instance inst;
    inst.m = params.n_aps;
    inst.n = params.n_ens;
    inst.d = std::move(d);
    inst.a = std::move(a);
    std::uniform_int_distribution<std::size_t> cap(0, params.capacity_choices.size() - 1);
    for (int j = 0; j < inst.n; ++j) inst.c.push_back(params.capacity_choices[cap(rng)]);
    std::uniform_real_distribution<double> demand(params.demand_low, params.demand_high);
    for (int i = 0; i < inst.m; ++i)
      inst.lambda.push_back(params.demand_low == params.demand_high ? params.demand_low : demand(rng));
    inst.phi.assign(inst.m, params.unmet_penalty);
    inst.gamma = params.gamma;
    inst.theta = params.theta;
    inst.beta = params.beta;
    inst.meta["seed"] = params.seed;
    inst.meta["params"] = params.to_json();
    inst.meta["ap_nodes"] = aps;
    inst.meta["en_nodes"] = ens;
    inst.meta["role_attempts"] = attempt + 1;
    return inst;
  }
  throw SynthesisError("synthesize_instance: some area has no eligible EN after " + std::to_string(max_attempts) +
                       " role assignments (eligibility threshold " +
                       std::to_string(params.eligibility_threshold) + " ms)");
}

}  // namespace edgeguard
