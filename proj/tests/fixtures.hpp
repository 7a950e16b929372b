#pragma once

#include <random>

#include "edgeguard/instance.hpp"

namespace fixtures {

// Two areas, two ENs, each area one hop from "its" EN.
inline edgeguard::Instance t1() {
  edgeguard::Instance inst;
  inst.m = 2;
  inst.n = 2;
  inst.lambda = {10, 10};
  inst.c = {10, 10};
  inst.phi = {5, 5};
  inst.d = {{1, 2}, {2, 1}};
  inst.a = {{1, 1}, {1, 1}};
  inst.gamma = 0.1;
  inst.theta = 0.8;
  inst.beta = 1.0;
  return inst;
}

// Small random instance with dense-ish eligibility; every area keeps at
// least one eligible EN. `roomy` doubles capacities and adds eligible ENs so
// that most attacks still leave a feasible defense.
inline edgeguard::Instance random_small(std::uint64_t seed, int m, int n, bool roomy = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> demand(5.0, 20.0), delay(1.0, 10.0), unit(0.0, 1.0);
  const double caps[] = {4, 8, 16, 32};
  edgeguard::Instance inst;
  inst.m = m;
  inst.n = n;
  for (int i = 0; i < m; ++i) inst.lambda.push_back(std::round(demand(rng)));
  for (int j = 0; j < n; ++j) inst.c.push_back(caps[rng() % 4] * (roomy ? 2 : 1));
  for (int i = 0; i < m; ++i) inst.phi.push_back(3.0 + static_cast<double>(rng() % 5));
  inst.d.assign(m, std::vector<double>(n));
  inst.a.assign(m, std::vector<int>(n));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      inst.d[i][j] = std::round(delay(rng) * 4) / 4;
      inst.a[i][j] = unit(rng) < 0.6;
    }
    inst.a[i][rng() % n] = 1;
    if (roomy)
      for (int t = 0; t < 3; ++t) inst.a[i][rng() % n] = 1;
  }
  inst.gamma = 0.1 + 0.1 * static_cast<double>(rng() % 5);
  inst.theta = 0.5 + 0.1 * static_cast<double>(rng() % 5);
  inst.beta = 0.1 * static_cast<double>(1 + rng() % 8);
  return inst;
}

}  // namespace fixtures
