#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgeguard/error.hpp"

namespace edgeguard {

using Json = nlohmann::ordered_json;

// Problem data. Areas (APs) are rows i in [0, m), edge nodes (ENs) columns j in [0, n).
struct Instance {
  int m = 0;
  int n = 0;
  std::vector<double> lambda;            // demand per area, vCPU
  std::vector<double> c;                 // capacity per EN, vCPU
  std::vector<double> phi;               // unmet-demand penalty per area
  std::vector<std::vector<double>> d;    // m x n delay, ms
  std::vector<std::vector<int>> a;       // m x n eligibility (0/1)
  double gamma = 0.1;
  double theta = 0.8;
  double beta = 1.0;
  Json meta = Json::object();

  bool eligible(int i, int j) const { return a[i][j] != 0; }
};

// Attack plan: z[j] = 1 means EN j is destroyed.
struct AttackPlan {
  std::vector<int> z;
  int k = 0;

  static AttackPlan none(int n) { return {std::vector<int>(n, 0), 0}; }

  static AttackPlan from_support(int n, const std::vector<int>& support, int k = -1) {
    AttackPlan p{std::vector<int>(n, 0), k < 0 ? static_cast<int>(support.size()) : k};
    for (int j : support) {
      if (j < 0 || j >= n) throw ValidationError("attack plan: EN index " + std::to_string(j) + " out of range");
      p.z[j] = 1;
    }
    return p;
  }

  std::vector<int> support() const {
    std::vector<int> s;
    for (int j = 0; j < static_cast<int>(z.size()); ++j)
      if (z[j]) s.push_back(j);
    return s;
  }

  int size() const {
    int s = 0;
    for (int v : z) s += v != 0;
    return s;
  }
};

inline Json to_json(const Instance& inst) {
  Json j;
  j["m"] = inst.m;
  j["n"] = inst.n;
  j["lambda"] = inst.lambda;
  j["c"] = inst.c;
  j["phi"] = inst.phi;
  j["d"] = inst.d;
  j["a"] = inst.a;
  j["gamma"] = inst.gamma;
  j["theta"] = inst.theta;
  j["beta"] = inst.beta;
  j["meta"] = inst.meta.is_null() ? Json::object() : inst.meta;
  return j;
}

inline Instance instance_from_json(const Json& j) {
  Instance inst;
  try {
    inst.m = j.at("m").get<int>();
    inst.n = j.at("n").get<int>();
    inst.lambda = j.at("lambda").get<std::vector<double>>();
    inst.c = j.at("c").get<std::vector<double>>();
    inst.phi = j.at("phi").get<std::vector<double>>();
    inst.d = j.at("d").get<std::vector<std::vector<double>>>();
    inst.a = j.at("a").get<std::vector<std::vector<int>>>();
    inst.gamma = j.at("gamma").get<double>();
    inst.theta = j.at("theta").get<double>();
    inst.beta = j.at("beta").get<double>();
    if (j.contains("meta")) inst.meta = j.at("meta");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("instance json: ") + e.what());
  }
  return inst;
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file " + path);
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("instance file " + path + ": " + e.what());
  }
  return instance_from_json(j);
}

// Doubles are printed with enough digits to round-trip exactly.
inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << to_json(inst).dump(2) << '\n';
}

}  // namespace edgeguard
