#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "edgeguard/topology.hpp"

using namespace edgeguard;

namespace {

// Independent all-pairs oracle.
std::vector<std::vector<double>> floyd_warshall(const Graph& g) {
  const int n = g.node_count;
  std::vector<std::vector<double>> d(n, std::vector<double>(n, INFINITY));
  for (int u = 0; u < n; ++u) d[u][u] = 0.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [u, v] = g.edges[e];
    d[u][v] = std::min(d[u][v], g.link_delay[e]);
    d[v][u] = std::min(d[v][u], g.link_delay[e]);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

bool connected(const Graph& g) {
  auto d = floyd_warshall(g);
  for (double x : d[0])
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

TEST(Topology, PaperScaleGraph) {
  SynthesisParams p = SynthesisParams::paper();
  p.seed = 3;
  Graph g = generate_ba_topology(p);
  EXPECT_EQ(g.node_count, 100);
  // Seed clique on 3 nodes plus 2 links for each of the 97 later nodes.
  EXPECT_EQ(g.edges.size(), 3u + 2u * 97u);
  EXPECT_GE(g.edges.size(), 197u);
  EXPECT_TRUE(connected(g));
  std::set<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [u, v] = g.edges[e];
    EXPECT_NE(u, v);
    EXPECT_TRUE(seen.insert({std::min(u, v), std::max(u, v)}).second) << "duplicate edge";
    EXPECT_GE(g.link_delay[e], 2.0);
    EXPECT_LE(g.link_delay[e], 5.0);
  }
}

TEST(Topology, EdgeCountMatchesGrowthRule) {
  for (int a : {1, 2, 3, 5})
    for (int n : {a + 1, a + 2, 20, 60}) {
      SynthesisParams p;
      p.n_nodes = n;
      p.attachment_rate = a;
      p.n_aps = 1;
      p.n_ens = 1;
      p.seed = static_cast<std::uint64_t>(n * 7 + a);
      Graph g = generate_ba_topology(p);
      std::size_t expect = static_cast<std::size_t>(a * (a + 1) / 2 + a * (n - a - 1));
      EXPECT_EQ(g.edges.size(), expect) << "n=" << n << " a=" << a;
      std::vector<int> deg(n, 0);
      for (auto [u, v] : g.edges) ++deg[u], ++deg[v];
      int total = 0;
      for (int x : deg) total += x;
      EXPECT_EQ(total, 2 * static_cast<int>(g.edges.size()));
      EXPECT_TRUE(connected(g));
    }
}

TEST(Topology, ThreeNodeTree) {
  SynthesisParams p;
  p.n_nodes = 3;
  p.attachment_rate = 1;
  p.n_aps = 1;
  p.n_ens = 1;
  Graph g = generate_ba_topology(p);
  EXPECT_EQ(g.edges.size(), 2u);
  EXPECT_TRUE(connected(g));
}

TEST(Topology, Deterministic) {
  SynthesisParams p = SynthesisParams::paper();
  p.seed = 99;
  Graph a = generate_ba_topology(p), b = generate_ba_topology(p);
  EXPECT_EQ(a.edges, b.edges);
  EXPECT_EQ(a.link_delay, b.link_delay);
  p.seed = 100;
  EXPECT_NE(generate_ba_topology(p).link_delay, a.link_delay);
}

TEST(Topology, RejectsBadParameters) {
  SynthesisParams p;
  p.n_nodes = 2;
  p.attachment_rate = 2;
  try {
    generate_ba_topology(p);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("n_nodes"), std::string::npos);
  }
  p = SynthesisParams{};
  p.gamma = 1.5;
  EXPECT_THROW(p.validate(), ValidationError);
  p = SynthesisParams{};
  p.delay_low = 6.0;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Topology, ShortestPathsHandCases) {
  Graph path{3, {{0, 1}, {1, 2}}, {2.0, 3.0}};
  EXPECT_DOUBLE_EQ(all_pairs_delay(path, {0}, {2})[0][0], 5.0);
  Graph tri{3, {{0, 1}, {1, 2}, {0, 2}}, {2.0, 2.0, 5.0}};
  EXPECT_DOUBLE_EQ(all_pairs_delay(tri, {0}, {2})[0][0], 4.0);
  EXPECT_DOUBLE_EQ(all_pairs_delay(tri, {1}, {1})[0][0], 0.0);
  Graph split{4, {{0, 1}, {2, 3}}, {1.0, 1.0}};
  EXPECT_THROW(all_pairs_delay(split, {0}, {3}), ValidationError);
}

TEST(Topology, ShortestPathsMatchFloydWarshall) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthesisParams p = SynthesisParams::paper();
    p.seed = seed;
    Graph g = generate_ba_topology(p);
    auto fw = floyd_warshall(g);
    std::vector<int> all(g.node_count);
    for (int v = 0; v < g.node_count; ++v) all[v] = v;
    auto d = all_pairs_delay(g, all, all);
    for (int u = 0; u < g.node_count; ++u)
      for (int v = 0; v < g.node_count; ++v) {
        EXPECT_NEAR(d[u][v], fw[u][v], 1e-9);
        EXPECT_NEAR(d[u][v], d[v][u], 1e-9);
      }
  }
}

TEST(Topology, PaperInstance) {
  SynthesisParams p = SynthesisParams::paper();
  p.seed = 7;
  Instance inst = synthesize_instance(p);
  EXPECT_EQ(inst.m, 80);
  EXPECT_EQ(inst.n, 30);
  EXPECT_DOUBLE_EQ(inst.gamma, 0.1);
  EXPECT_DOUBLE_EQ(inst.theta, 0.8);
  const std::set<double> caps{16, 32, 64, 128, 256, 512, 1024};
  for (double c : inst.c) EXPECT_TRUE(caps.count(c));
  for (double l : inst.lambda) {
    EXPECT_GE(l, 20.0);
    EXPECT_LE(l, 35.0);
  }
  for (double f : inst.phi) EXPECT_DOUBLE_EQ(f, 5.0);
  // Delay and eligibility consistency against an independent recomputation.
  Graph g = generate_ba_topology(p);
  auto fw = floyd_warshall(g);
  auto aps = inst.meta["ap_nodes"].get<std::vector<int>>();
  auto ens = inst.meta["en_nodes"].get<std::vector<int>>();
  std::set<int> en_set(ens.begin(), ens.end());
  EXPECT_EQ(en_set.size(), 30u);
  // 110 roles on 100 nodes: the 70 non-EN nodes all host APs.
  int on_en = 0;
  for (int v : aps) on_en += en_set.count(v);
  EXPECT_EQ(on_en, 10);
  EXPECT_EQ(std::set<int>(aps.begin(), aps.end()).size(), 80u);
  for (int i = 0; i < inst.m; ++i) {
    bool any = false;
    for (int j = 0; j < inst.n; ++j) {
      EXPECT_NEAR(inst.d[i][j], fw[aps[i]][ens[j]], 1e-9);
      EXPECT_EQ(inst.a[i][j], inst.d[i][j] < 20.0 ? 1 : 0);
      any = any || inst.a[i][j];
    }
    EXPECT_TRUE(any);
  }
}

TEST(Topology, DisjointRolesWhenTheyFit) {
  SynthesisParams p = SynthesisParams::paper();
  p.n_aps = 30;
  p.n_ens = 10;
  Instance inst = synthesize_instance(p);
  auto aps = inst.meta["ap_nodes"].get<std::vector<int>>();
  auto ens = inst.meta["en_nodes"].get<std::vector<int>>();
  for (int v : aps) EXPECT_EQ(std::count(ens.begin(), ens.end(), v), 0);
}

TEST(Topology, SynthesisIsBitIdentical) {
  SynthesisParams p = SynthesisParams::paper();
  p.seed = 11;
  EXPECT_EQ(to_json(synthesize_instance(p)).dump(), to_json(synthesize_instance(p)).dump());
}

TEST(Topology, ThresholdExtremes) {
  SynthesisParams p = SynthesisParams::paper();
  p.eligibility_threshold = INFINITY;
  Instance inst = synthesize_instance(p);
  for (auto& row : inst.a)
    for (int v : row) EXPECT_EQ(v, 1);
  p.eligibility_threshold = 0.0;
  EXPECT_THROW(synthesize_instance(p), SynthesisError);
}

TEST(Topology, JsonRoundTrip) {
  SynthesisParams p = SynthesisParams::paper();
  Instance inst = synthesize_instance(p);
  Instance back = instance_from_json(Json::parse(to_json(inst).dump()));
  EXPECT_EQ(back.d, inst.d);
  EXPECT_EQ(back.lambda, inst.lambda);
  EXPECT_EQ(back.a, inst.a);
  EXPECT_EQ(to_json(back).dump(), to_json(inst).dump());
}
