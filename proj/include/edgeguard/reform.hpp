#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "edgeguard/error.hpp"
#include "edgeguard/instance.hpp"
#include "edgeguard/lp.hpp"
#include "edgeguard/model.hpp"

namespace edgeguard {

enum class Flavor { Duality, Kkt };

inline const char* to_string(Flavor f) { return f == Flavor::Duality ? "duality" : "kkt"; }

// M_j per EN for the duality path; one bound per complementarity family
// (u0..u6) for the KKT path.
struct BigMValues {
  std::vector<double> duality;
  std::array<double, 7> kkt{};
};

namespace detail {

inline double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

// Price bound for one unit of capacity or demand: the most an extra unit can
// save is dropping it at the highest penalty instead of routing it.
inline double dual_scale(const Instance& inst) {
  double dmax = 0.0;
  for (const auto& row : inst.d) dmax = std::max(dmax, max_of(row));
  return (1.0 - inst.gamma) * max_of(inst.phi) + inst.gamma * dmax;
}

}  // namespace detail

inline BigMValues compute_big_m(const Instance& inst) {
  BigMValues b;
  const double pen = (1.0 - inst.gamma) * detail::max_of(inst.phi);
  for (int j = 0; j < inst.n; ++j) {
    double dj = 0.0;
    for (int i = 0; i < inst.m; ++i) dj = std::max(dj, inst.d[i][j]);
    b.duality.push_back(2.0 * (pen + inst.gamma * dj));
  }

  const double p = detail::dual_scale(inst);
  const double cmax = detail::max_of(inst.c), lmax = detail::max_of(inst.lambda);
  double lmin = lmax, dmax = 0.0;
  for (double l : inst.lambda) lmin = std::min(lmin, l);
  for (const auto& row : inst.d) dmax = std::max(dmax, detail::max_of(row));
  const double pair_dual = lmax * p;  // eta, tau, nu
  const double x_range = std::min(cmax, lmax);
  b.kkt[0] = 2.0 * std::max(x_range, inst.gamma * dmax + 3.0 * p);
  b.kkt[1] = 2.0 * std::max(lmax, (1.0 - inst.gamma) * detail::max_of(inst.phi) + p +
                                      (std::max(inst.m - 1, 0) + 1) * pair_dual / lmin);
  b.kkt[2] = 2.0 * std::max(cmax, p);
  b.kkt[3] = 2.0 * std::max(cmax, p);
  b.kkt[4] = 2.0 * std::max(inst.beta + 1.0, pair_dual);
  b.kkt[5] = b.kkt[4];
  b.kkt[6] = 2.0 * std::max(inst.theta, pair_dual);
  for (double& v : b.duality) v = std::max(v, 1e-6);
  for (double& v : b.kkt) v = std::max(v, 1e-6);
  return b;
}

// A row carrying a big-M coefficient. The bound is "switched on" when the
// binary sits at `active_value`; otherwise the row is an exact complementarity
// or linearization identity and is tight by design.
struct BigMRow {
  int row = -1;
  int binary_col = -1;
  int active_value = 0;
  int family = 0;  // EN index for duality, u-family 0..6 for kkt
  double m = 0.0;
};

// 0 <= expr _|_ var >= 0 with indicator u; expr is the activity of
// `expr_row` minus its right-hand side.
struct ComplementarityPair {
  int indicator = -1;
  int expr_row = -1;
  int var_col = -1;
  double m = 0.0;
};

// Maximization problem stored as an LpProblem in minimization form (costs
// negated) plus integrality marks.
struct MilpFormulation {
  Flavor flavor = Flavor::Duality;
  lp::LpProblem lp;
  std::vector<char> binary;
  std::vector<int> z_col;
  int card_row = -1;
  std::vector<BigMRow> big_m;
  std::vector<ComplementarityPair> complementarity;  // kkt path only
  BigMValues bigm;
  int k = 0;

  // duality path
  std::vector<int> g_col, pi_col, mu_col, nu_col, eta_col, tau_col;
  std::vector<std::vector<int>> sigma_col;
  // kkt path
  std::vector<std::vector<int>> x_col;
  std::vector<int> q_col;
  std::vector<std::pair<int, int>> pairs;

  int num_binary() const {
    int s = 0;
    for (char b : binary) s += b != 0;
    return s;
  }
  double objective(std::span<const double> x) const { return -lp.objective(x); }
};

namespace detail {

inline int add_binary(MilpFormulation& f, const std::string& name) {
  int c = f.lp.add_variable(0.0, 0.0, 1.0, name);
  f.binary.resize(f.lp.num_cols(), 0);
  f.binary[c] = 1;
  return c;
}

inline int add_cont(MilpFormulation& f, double max_cost, double lo, double hi, const std::string& name) {
  int c = f.lp.add_variable(-max_cost, lo, hi, name);
  f.binary.resize(f.lp.num_cols(), 0);
  return c;
}

inline std::string idx(int a) { return std::to_string(a + 1); }
inline std::string idx(int a, int b) { return idx(a) + "_" + idx(b); }

inline void check_budget(const Instance& inst, int k) {
  require_valid(inst);
  if (k < 0 || k > inst.n) throw ValidationError("budget k must lie in [0, n]");
}

}  // namespace detail

// max  -sum C_j g_j + sum lambda_i mu_i - sum C_j sigma_ij - beta sum(eta + tau) - theta sum nu
//  s.t. -pi_j + mu_i - sigma_ij <= gamma d_ij                       (eligible i,j)
//       mu_i - (1/l_i) sum_{i'>i}(eta - tau) + (1/l_i) sum_{i'<i}(eta - tau) - nu_i/l_i <= (1-gamma) phi_i
//       g_j <= M_j (1 - z_j),  g_j <= pi_j,  g_j >= pi_j - M_j z_j,  sum z_j <= k
inline MilpFormulation build_duality_milp(const Instance& inst, int k, const BigMValues& bigm) {
  detail::check_budget(inst, k);
  using detail::idx;
  const int m = inst.m, n = inst.n;
  MilpFormulation f;
  f.flavor = Flavor::Duality;
  f.bigm = bigm;
  f.k = k;
  for (int j = 0; j < n; ++j) f.z_col.push_back(detail::add_binary(f, "z_" + idx(j)));
  for (int j = 0; j < n; ++j) f.g_col.push_back(detail::add_cont(f, -inst.c[j], 0.0, bigm.duality[j], "g_" + idx(j)));
  for (int j = 0; j < n; ++j) f.pi_col.push_back(detail::add_cont(f, 0.0, 0.0, lp::kInf, "pi_" + idx(j)));
  for (int i = 0; i < m; ++i)
    f.mu_col.push_back(detail::add_cont(f, inst.lambda[i], -lp::kInf, lp::kInf, "mu_" + idx(i)));
  f.sigma_col.assign(m, std::vector<int>(n, -1));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (inst.eligible(i, j)) f.sigma_col[i][j] = detail::add_cont(f, -inst.c[j], 0.0, lp::kInf, "sigma_" + idx(i, j));
  for (int i = 0; i < m; ++i)
    for (int l = i + 1; l < m; ++l) f.pairs.emplace_back(i, l);
  for (auto [i, l] : f.pairs) f.eta_col.push_back(detail::add_cont(f, -inst.beta, 0.0, lp::kInf, "eta_" + idx(i, l)));
  for (auto [i, l] : f.pairs) f.tau_col.push_back(detail::add_cont(f, -inst.beta, 0.0, lp::kInf, "tau_" + idx(i, l)));
  for (int i = 0; i < m; ++i) f.nu_col.push_back(detail::add_cont(f, -inst.theta, 0.0, lp::kInf, "nu_" + idx(i)));

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (inst.eligible(i, j))
        f.lp.add_row({{f.pi_col[j], -1.0}, {f.mu_col[i], 1.0}, {f.sigma_col[i][j], -1.0}}, lp::RowSense::Le,
                     inst.gamma * inst.d[i][j], "dual_x_" + idx(i, j));
  for (int i = 0; i < m; ++i) {
    std::vector<lp::Entry> row{{f.mu_col[i], 1.0}, {f.nu_col[i], -1.0 / inst.lambda[i]}};
    for (std::size_t p = 0; p < f.pairs.size(); ++p) {
      auto [a, b] = f.pairs[p];
      if (a == i) {
        row.push_back({f.eta_col[p], -1.0 / inst.lambda[i]});
        row.push_back({f.tau_col[p], 1.0 / inst.lambda[i]});
      } else if (b == i) {
        row.push_back({f.eta_col[p], 1.0 / inst.lambda[i]});
        row.push_back({f.tau_col[p], -1.0 / inst.lambda[i]});
      }
    }
    f.lp.add_row(row, lp::RowSense::Le, (1.0 - inst.gamma) * inst.phi[i], "dual_q_" + idx(i));
  }
  for (int j = 0; j < n; ++j) {
    const double mj = bigm.duality[j];
    int r = f.lp.add_row({{f.g_col[j], 1.0}, {f.z_col[j], mj}}, lp::RowSense::Le, mj, "g_cap_" + idx(j));
    f.big_m.push_back({r, f.z_col[j], 0, j, mj});
    f.lp.add_row({{f.g_col[j], 1.0}, {f.pi_col[j], -1.0}}, lp::RowSense::Le, 0.0, "g_le_pi_" + idx(j));
    r = f.lp.add_row({{f.g_col[j], 1.0}, {f.pi_col[j], -1.0}, {f.z_col[j], mj}}, lp::RowSense::Ge, 0.0,
                     "g_ge_pi_" + idx(j));
    f.big_m.push_back({r, f.z_col[j], 1, j, mj});
  }
  std::vector<lp::Entry> card;
  for (int c : f.z_col) card.push_back({c, 1.0});
  f.card_row = f.lp.add_row(card, lp::RowSense::Le, k, "budget");
  return f;
}

// Complementarity 0 <= expr  _|_  var >= 0 encoded with indicator u:
//   expr >= 0,  expr <= M u,  var <= M (1 - u)   (var >= 0 is its bound).
// Signs follow the Lagrangian with +mu_i (sum_j x_ij + q_i - lambda_i).
inline MilpFormulation build_kkt_milp(const Instance& inst, int k, const BigMValues& bigm) {
  detail::check_budget(inst, k);
  using detail::idx;
  const int m = inst.m, n = inst.n;
  const auto& M = bigm.kkt;
  MilpFormulation f;
  f.flavor = Flavor::Kkt;
  f.bigm = bigm;
  f.k = k;
  for (int j = 0; j < n; ++j) f.z_col.push_back(detail::add_binary(f, "z_" + idx(j)));
  f.x_col.assign(m, std::vector<int>(n, -1));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (inst.eligible(i, j))
        f.x_col[i][j] = detail::add_cont(f, inst.gamma * inst.d[i][j], 0.0, lp::kInf, "x_" + idx(i, j));
  for (int i = 0; i < m; ++i)
    f.q_col.push_back(detail::add_cont(f, (1.0 - inst.gamma) * inst.phi[i], 0.0, lp::kInf, "q_" + idx(i)));
  for (int j = 0; j < n; ++j) f.pi_col.push_back(detail::add_cont(f, 0.0, 0.0, lp::kInf, "pi_" + idx(j)));
  for (int i = 0; i < m; ++i) f.mu_col.push_back(detail::add_cont(f, 0.0, -lp::kInf, lp::kInf, "mu_" + idx(i)));
  f.sigma_col.assign(m, std::vector<int>(n, -1));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (inst.eligible(i, j)) f.sigma_col[i][j] = detail::add_cont(f, 0.0, 0.0, lp::kInf, "sigma_" + idx(i, j));
  for (int i = 0; i < m; ++i)
    for (int l = i + 1; l < m; ++l) f.pairs.emplace_back(i, l);
  for (auto [i, l] : f.pairs) f.eta_col.push_back(detail::add_cont(f, 0.0, 0.0, lp::kInf, "eta_" + idx(i, l)));
  for (auto [i, l] : f.pairs) f.tau_col.push_back(detail::add_cont(f, 0.0, 0.0, lp::kInf, "tau_" + idx(i, l)));
  for (int i = 0; i < m; ++i) f.nu_col.push_back(detail::add_cont(f, 0.0, 0.0, lp::kInf, "nu_" + idx(i)));

  // expr = sum(entries) + constant
  auto complementarity = [&](int family, const std::string& tag, std::vector<lp::Entry> expr, double constant,
                             int var) {
    const double mf = M[family];
    int u = detail::add_binary(f, "u" + std::to_string(family) + "_" + tag);
    int lo = f.lp.add_row(expr, lp::RowSense::Ge, -constant, "cs" + std::to_string(family) + "_lo_" + tag);
    f.complementarity.push_back({u, lo, var, mf});
    std::vector<lp::Entry> up = expr;
    up.push_back({u, -mf});
    int r = f.lp.add_row(up, lp::RowSense::Le, -constant, "cs" + std::to_string(family) + "_hi_" + tag);
    f.big_m.push_back({r, u, 1, family, mf});
    r = f.lp.add_row({{var, 1.0}, {u, mf}}, lp::RowSense::Le, mf, "cs" + std::to_string(family) + "_var_" + tag);
    f.big_m.push_back({r, u, 0, family, mf});
  };

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (inst.eligible(i, j))
        complementarity(0, idx(i, j), {{f.pi_col[j], 1.0}, {f.mu_col[i], 1.0}, {f.sigma_col[i][j], 1.0}},
                        inst.gamma * inst.d[i][j], f.x_col[i][j]);
  for (int i = 0; i < m; ++i) {
    const double inv = 1.0 / inst.lambda[i];
    std::vector<lp::Entry> e{{f.mu_col[i], 1.0}, {f.nu_col[i], inv}};
    for (std::size_t p = 0; p < f.pairs.size(); ++p) {
      auto [a, b] = f.pairs[p];
      if (a == i) {
        e.push_back({f.eta_col[p], inv});
        e.push_back({f.tau_col[p], -inv});
      } else if (b == i) {
        e.push_back({f.eta_col[p], -inv});
        e.push_back({f.tau_col[p], inv});
      }
    }
    complementarity(1, idx(i), e, (1.0 - inst.gamma) * inst.phi[i], f.q_col[i]);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<lp::Entry> e{{f.z_col[j], -inst.c[j]}};
    for (int i = 0; i < m; ++i)
      if (f.x_col[i][j] >= 0) e.push_back({f.x_col[i][j], -1.0});
    complementarity(2, idx(j), e, inst.c[j], f.pi_col[j]);
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (inst.eligible(i, j))
        complementarity(3, idx(i, j), {{f.x_col[i][j], -1.0}}, inst.c[j] * inst.a[i][j], f.sigma_col[i][j]);
  for (std::size_t p = 0; p < f.pairs.size(); ++p) {
    auto [i, l] = f.pairs[p];
    const double ri = 1.0 / inst.lambda[i], rl = 1.0 / inst.lambda[l];
    complementarity(4, idx(i, l), {{f.q_col[i], -ri}, {f.q_col[l], rl}}, inst.beta, f.eta_col[p]);
  }
  for (std::size_t p = 0; p < f.pairs.size(); ++p) {
    auto [i, l] = f.pairs[p];
    const double ri = 1.0 / inst.lambda[i], rl = 1.0 / inst.lambda[l];
    complementarity(5, idx(i, l), {{f.q_col[i], ri}, {f.q_col[l], -rl}}, inst.beta, f.tau_col[p]);
  }
  for (int i = 0; i < m; ++i)
    complementarity(6, idx(i), {{f.q_col[i], -1.0 / inst.lambda[i]}}, inst.theta, f.nu_col[i]);
  for (int i = 0; i < m; ++i) {
    std::vector<lp::Entry> e;
    for (int j = 0; j < n; ++j)
      if (f.x_col[i][j] >= 0) e.push_back({f.x_col[i][j], 1.0});
    e.push_back({f.q_col[i], 1.0});
    f.lp.add_row(e, lp::RowSense::Eq, inst.lambda[i], "balance_" + idx(i));
  }
  std::vector<lp::Entry> card;
  for (int c : f.z_col) card.push_back({c, 1.0});
  f.card_row = f.lp.add_row(card, lp::RowSense::Le, k, "budget");
  return f;
}

// ------------------------------------------------------------ size stats

struct SizeStats {
  Flavor flavor = Flavor::Duality;
  int m = 0, n = 0;
  long n_rows = 0, n_binary = 0, n_continuous = 0;           // built formulation
  long table_rows = 0, table_binary = 0, table_continuous = 0;  // closed-form counts
  // Reconciliation of the built counts with the closed forms: fairness
  // multipliers and indicators over ordered pairs i != i', sign and range
  // restrictions written as rows, and the budget row left out.
  long pair_delta_binary = 0, pair_delta_continuous = 0, pair_delta_rows = 0;
  long bound_rows = 0;
  long residual_rows = 0, residual_binary = 0, residual_continuous = 0;

  long delta_rows() const { return n_rows - table_rows; }
  long delta_binary() const { return n_binary - table_binary; }
  long delta_continuous() const { return n_continuous - table_continuous; }
};

inline long table_rows(Flavor f, long m, long n) {
  return f == Flavor::Duality ? 6 * n + 2 * m * (m + n) : 5 * n + m * (8 * m + 8 * n + 1);
}
inline long table_binary(Flavor f, long m, long n) { return f == Flavor::Duality ? n : 2 * n + 2 * m * (m + n); }
inline long table_continuous(Flavor f, long m, long n) {
  return f == Flavor::Duality ? 2 * n + m * (2 * m + n) : n + 2 * m * (m + n + 1);
}

inline SizeStats formulation_stats(const MilpFormulation& f, int m, int n) {
  SizeStats s;
  s.flavor = f.flavor;
  s.m = m;
  s.n = n;
  s.n_rows = f.lp.num_rows();
  s.n_binary = f.num_binary();
  s.n_continuous = f.lp.num_cols() - s.n_binary;
  s.table_rows = table_rows(f.flavor, m, n);
  s.table_binary = table_binary(f.flavor, m, n);
  s.table_continuous = table_continuous(f.flavor, m, n);
  const long unordered = static_cast<long>(m) * (m - 1) / 2;
  long ineligible = 0;
  if (!f.sigma_col.empty())
    for (const auto& row : f.sigma_col)
      for (int c : row) ineligible += c < 0;
  if (f.flavor == Flavor::Duality) {
    // eta and tau per unordered pair instead of per ordered pair.
    s.pair_delta_continuous = -2 * unordered;
    // Closed form counts a row for: pi, sigma, eta, tau, nu >= 0; g >= 0 and
    // g <= M(1-z) as two rows of the linearization; binary z. Built: none of
    // those sign rows, and g >= 0 lives in the bound.
    s.bound_rows = n /*pi*/ + (static_cast<long>(m) * n - ineligible) /*sigma*/ + 2 * unordered /*eta,tau*/ +
                   m /*nu*/ + n /*g >= 0*/ + n /*z*/;
    s.pair_delta_rows = -2 * unordered;  // eta/tau sign rows, ordered minus unordered
    s.residual_continuous = s.n_continuous - s.table_continuous - s.pair_delta_continuous + ineligible;
    s.residual_binary = s.n_binary - s.table_binary;
    s.residual_rows = (s.n_rows - 1 /*budget*/ + s.bound_rows) - s.table_rows - s.pair_delta_rows + 2 * ineligible;
  } else {
    s.pair_delta_binary = -2 * unordered;
    s.pair_delta_continuous = -2 * unordered;
    // Closed form writes four rows per complementarity pair (x >= 0 and
    // pi >= 0 included); built writes three and keeps var >= 0 as a bound.
    const long pairs_cs = static_cast<long>(s.n_binary) - n;
    s.bound_rows = pairs_cs /*var >= 0*/ + n /*z binary*/;
    s.pair_delta_rows = -8 * unordered;  // four rows each for u4 and u5
    s.residual_binary = s.n_binary - s.table_binary - s.pair_delta_binary + 2 * ineligible;
    // x and sigma only where eligible; closed form also has one extra
    // continuous per area.
    s.residual_continuous = s.n_continuous - s.table_continuous - s.pair_delta_continuous + 2 * ineligible + m;
    s.residual_rows = (s.n_rows - 1 + s.bound_rows) - s.table_rows - s.pair_delta_rows + 8 * ineligible;
  }
  return s;
}

inline void write_mps(std::ostream& os, const MilpFormulation& f, const std::string& name) {
  std::vector<char> flags(f.binary.begin(), f.binary.end());
  std::span<const bool> ints(reinterpret_cast<const bool*>(flags.data()), flags.size());
  lp::write_mps(os, f.lp, name, ints, true);
}

}  // namespace edgeguard
