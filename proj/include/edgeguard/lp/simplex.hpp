#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "edgeguard/lp/problem.hpp"

namespace edgeguard::lp {

struct SimplexOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  long max_iterations = 0;  // 0 selects a size-dependent cap
  int refactor_interval = 64;
  int bland_after_degenerate = 50;
};

// Bounded-variable revised simplex (primal with composite phase 1, plus a
// dual phase for warm starts after bound or right-hand-side changes).
//
// Internally every row i gets a logical r_i with  A x - r = 0  and the row
// sense turned into bounds on r_i. A basis B then splits into
//   S: rows whose logical is basic,   T: rows whose logical is nonbasic,
//   J: basic structural columns,      |J| == |T|.
// Solving with B only needs the inverse of the kernel K = A[T, J]; the
// logical part is recovered by one sparse product. The kernel inverse is
// kept dense and updated in place for the four pivot shapes (grow, shrink,
// column swap, row swap) and rebuilt from scratch every few updates.
class Simplex {
 public:
  explicit Simplex(const LpProblem& p, SimplexOptions opts = {})
      : opts_(opts), n_(p.num_cols()), m_(p.num_rows()) {
    const int total = n_ + m_;
    cost_.assign(total, 0.0);
    lo_.assign(total, 0.0);
    up_.assign(total, 0.0);
    for (int j = 0; j < n_; ++j) {
      cost_[j] = p.cost(j);
      lo_[j] = p.lower(j);
      up_[j] = p.upper(j);
    }
    rstart_.assign(m_ + 1, 0);
    std::vector<int> count(n_ + 1, 0);
    for (int i = 0; i < m_; ++i) {
      auto row = p.row(i);
      rstart_[i + 1] = rstart_[i] + static_cast<int>(row.size());
      for (const Entry& e : row) {
        rcol_.push_back(e.index);
        rval_.push_back(e.value);
        ++count[e.index + 1];
      }
      sense_.push_back(p.sense(i));
      set_row_rhs(i, p.rhs(i));
    }
    cstart_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) cstart_[j + 1] = cstart_[j] + count[j + 1];
    crow_.resize(rcol_.size());
    cval_.resize(rcol_.size());
    std::vector<int> fill(cstart_.begin(), cstart_.end() - 1);
    for (int i = 0; i < m_; ++i)
      for (int e = rstart_[i]; e < rstart_[i + 1]; ++e) {
        int slot = fill[rcol_[e]]++;
        crow_[slot] = i;
        cval_[slot] = rval_[e];
      }
    if (opts_.max_iterations <= 0) opts_.max_iterations = 20000 + 20L * (n_ + m_);
  }

  void set_col_bounds(int j, double lo, double hi) {
    lo_[j] = lo;
    up_[j] = hi;
  }

  // Solves give up with TimeLimit once this passes.
  void set_deadline(std::chrono::steady_clock::time_point t) {
    deadline_ = t;
    has_deadline_ = true;
  }

  void set_row_rhs(int i, double rhs) {
    const int v = n_ + i;
    switch (sense_[i]) {
      case RowSense::Le: lo_[v] = -kInf; up_[v] = rhs; break;
      case RowSense::Ge: lo_[v] = rhs; up_[v] = kInf; break;
      case RowSense::Eq: lo_[v] = rhs; up_[v] = rhs; break;
    }
  }

  LpSolution solve(const Basis* hint = nullptr) {
    iterations_ = 0;
    bool loaded = hint != nullptr && load_basis(*hint);
    if (!loaded) slack_basis();
    compute_primal();

    Status st = Status::NumericalFailure;
    for (int attempt = 0; attempt < 4; ++attempt) {
      if (loaded && attempt == 0 && !primal_feasible() && dual_feasible()) {
        st = dual_phase();
        if (st == Status::IterationLimit || st == Status::TimeLimit) break;
        if (st == Status::NumericalFailure) {
          slack_basis();
          compute_primal();
        }
      }
      st = primal_phase();
      if (st == Status::NumericalFailure && attempt < 3) {
        slack_basis();
        compute_primal();
        continue;
      }
      if (st != Status::Optimal) break;
      if (!refactor()) {
        slack_basis();
        compute_primal();
        continue;
      }
      compute_primal();
      compute_duals(cost_);
      if (primal_feasible() && dual_feasible()) break;
      st = Status::NumericalFailure;
    }
    return extract(st);
  }

 private:
  using Index = int;

  // ---- basis bookkeeping -------------------------------------------------

  double nonbasic_value(int j) const {
    switch (status_[j]) {
      case VarStatus::AtLower: return lo_[j];
      case VarStatus::AtUpper: return up_[j];
      default: return 0.0;
    }
  }

  VarStatus resting_status(int j) const {
    if (std::isfinite(lo_[j])) return VarStatus::AtLower;
    if (std::isfinite(up_[j])) return VarStatus::AtUpper;
    return VarStatus::AtZero;
  }

  bool is_fixed(int j) const { return lo_[j] == up_[j]; }

  void clear_kernel() {
    k_ = 0;
    kt_.clear();
    kj_.clear();
    kinv_.clear();
    row_kpos_.assign(m_, -1);
    var_kpos_.assign(n_, -1);
    updates_ = 0;
  }

  void slack_basis() {
    status_.assign(n_ + m_, VarStatus::Basic);
    for (int j = 0; j < n_; ++j) status_[j] = resting_status(j);
    x_.assign(n_ + m_, 0.0);
    clear_kernel();
  }

  bool load_basis(const Basis& b) {
    if (static_cast<int>(b.status.size()) != n_ + m_) return false;
    status_ = b.status;
    x_.assign(n_ + m_, 0.0);
    clear_kernel();
    int basics = 0;
    for (int j = 0; j < n_ + m_; ++j) {
      if (status_[j] == VarStatus::Basic) {
        ++basics;
        continue;
      }
      // Re-seat nonbasics whose recorded bound no longer exists.
      if (status_[j] == VarStatus::AtLower && !std::isfinite(lo_[j])) status_[j] = resting_status(j);
      if (status_[j] == VarStatus::AtUpper && !std::isfinite(up_[j])) status_[j] = resting_status(j);
      if (status_[j] == VarStatus::AtZero && (std::isfinite(lo_[j]) || std::isfinite(up_[j])))
        status_[j] = resting_status(j);
    }
    if (basics != m_) return false;
    for (int i = 0; i < m_; ++i)
      if (status_[n_ + i] != VarStatus::Basic) {
        row_kpos_[i] = static_cast<int>(kt_.size());
        kt_.push_back(i);
      }
    for (int j = 0; j < n_; ++j)
      if (status_[j] == VarStatus::Basic) {
        var_kpos_[j] = static_cast<int>(kj_.size());
        kj_.push_back(j);
      }
    if (kt_.size() != kj_.size()) return false;
    k_ = static_cast<int>(kt_.size());
    return refactor();
  }

  // Rebuild the kernel inverse by Gauss-Jordan elimination with partial pivoting.
  bool refactor() {
    updates_ = 0;
    if (k_ == 0) {
      kinv_.clear();
      return true;
    }
    const int k = k_;
    std::vector<double> a(static_cast<std::size_t>(k) * k, 0.0);  // a(row, col)
    for (int b = 0; b < k; ++b) {
      const int j = kj_[b];
      for (int e = cstart_[j]; e < cstart_[j + 1]; ++e) {
        const int pos = row_kpos_[crow_[e]];
        if (pos >= 0) a[static_cast<std::size_t>(pos) * k + b] = cval_[e];
      }
    }
    // Invert a in place into inv (inv is K^{-1}, indexed inv(col-of-K, row-of-K)).
    std::vector<double> inv(static_cast<std::size_t>(k) * k, 0.0);
    for (int i = 0; i < k; ++i) inv[static_cast<std::size_t>(i) * k + i] = 1.0;
    for (int c = 0; c < k; ++c) {
      int piv = c;
      double best = std::abs(a[static_cast<std::size_t>(c) * k + c]);
      for (int r = c + 1; r < k; ++r) {
        double v = std::abs(a[static_cast<std::size_t>(r) * k + c]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (best < 1e-11) return false;
      if (piv != c) {
        for (int t = 0; t < k; ++t) {
          std::swap(a[static_cast<std::size_t>(piv) * k + t], a[static_cast<std::size_t>(c) * k + t]);
          std::swap(inv[static_cast<std::size_t>(piv) * k + t], inv[static_cast<std::size_t>(c) * k + t]);
        }
      }
      const double d = a[static_cast<std::size_t>(c) * k + c];
      double* arow = &a[static_cast<std::size_t>(c) * k];
      double* irow = &inv[static_cast<std::size_t>(c) * k];
      for (int t = 0; t < k; ++t) {
        arow[t] /= d;
        irow[t] /= d;
      }
      for (int r = 0; r < k; ++r) {
        if (r == c) continue;
        const double f = a[static_cast<std::size_t>(r) * k + c];
        if (f == 0.0) continue;
        double* ar = &a[static_cast<std::size_t>(r) * k];
        double* ir = &inv[static_cast<std::size_t>(r) * k];
        for (int t = 0; t < k; ++t) {
          ar[t] -= f * arow[t];
          ir[t] -= f * irow[t];
        }
      }
    }
    // Gauss-Jordan on rows of K gives (K^{-1}) with rows indexed by K's columns.
    kinv_ = std::move(inv);
    return true;
  }

  double& kinv(int b, int a) { return kinv_[static_cast<std::size_t>(b) * k_ + a]; }
  double kinv(int b, int a) const { return kinv_[static_cast<std::size_t>(b) * k_ + a]; }

  // ---- linear algebra with the basis ---------------------------------------

  // Solve B w = column of variable q. Results: wj_ (kernel columns), ws_ (rows in S).
  void ftran_var(int q) {
    std::fill(h_.begin(), h_.end(), 0.0);
    if (q < n_) {
      for (int e = cstart_[q]; e < cstart_[q + 1]; ++e) h_[crow_[e]] = cval_[e];
    } else {
      h_[q - n_] = -1.0;
    }
    ftran_dense();
  }

  // Solve B w = h_ for the current contents of h_.
  void ftran_dense() {
    wj_.assign(k_, 0.0);
    for (int a = 0; a < k_; ++a) {
      const double v = h_[kt_[a]];
      if (v == 0.0) continue;
      for (int b = 0; b < k_; ++b) wj_[b] += kinv(b, a) * v;
    }
    ws_.assign(m_, 0.0);
    for (int b = 0; b < k_; ++b) {
      const double v = wj_[b];
      if (v == 0.0) continue;
      const int j = kj_[b];
      for (int e = cstart_[j]; e < cstart_[j + 1]; ++e) ws_[crow_[e]] += cval_[e] * v;
    }
    for (int i = 0; i < m_; ++i) ws_[i] = row_kpos_[i] >= 0 ? 0.0 : ws_[i] - h_[i];
  }

  // Solve y' B = hb' where hb is indexed by basic variable (hj_ for kernel
  // columns, hs_ for logical rows in S). Result in y_.
  void btran() {
    y_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i)
      if (row_kpos_[i] < 0) y_[i] = -hs_[i];
    std::vector<double>& u = scratch_;
    u.assign(k_, 0.0);
    for (int b = 0; b < k_; ++b) {
      const int j = kj_[b];
      double v = hj_[b];
      for (int e = cstart_[j]; e < cstart_[j + 1]; ++e) {
        const int r = crow_[e];
        if (row_kpos_[r] < 0) v -= cval_[e] * y_[r];
      }
      u[b] = v;
    }
    for (int b = 0; b < k_; ++b) {
      const double v = u[b];
      if (v == 0.0) continue;
      const double* row = &kinv_[static_cast<std::size_t>(b) * k_];
      for (int a = 0; a < k_; ++a) y_[kt_[a]] += row[a] * v;
    }
  }

  void compute_duals(const std::vector<double>& c) {
    hj_.assign(k_, 0.0);
    hs_.assign(m_, 0.0);
    for (int b = 0; b < k_; ++b) hj_[b] = c[kj_[b]];
    for (int i = 0; i < m_; ++i)
      if (row_kpos_[i] < 0) hs_[i] = c[n_ + i];
    btran();
    d_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (status_[j] == VarStatus::Basic) continue;
      double v = c[j];
      for (int e = cstart_[j]; e < cstart_[j + 1]; ++e) v -= cval_[e] * y_[crow_[e]];
      d_[j] = v;
    }
    for (int i = 0; i < m_; ++i)
      if (status_[n_ + i] != VarStatus::Basic) d_[n_ + i] = c[n_ + i] + y_[i];
  }

  void compute_primal() {
    h_.assign(m_, 0.0);
    for (int j = 0; j < n_ + m_; ++j) {
      if (status_[j] == VarStatus::Basic) continue;
      const double v = nonbasic_value(j);
      x_[j] = v;
      if (v == 0.0) continue;
      if (j < n_) {
        for (int e = cstart_[j]; e < cstart_[j + 1]; ++e) h_[crow_[e]] -= cval_[e] * v;
      } else {
        h_[j - n_] += v;
      }
    }
    ftran_dense();
    for (int b = 0; b < k_; ++b) x_[kj_[b]] = wj_[b];
    for (int i = 0; i < m_; ++i)
      if (row_kpos_[i] < 0) x_[n_ + i] = ws_[i];
  }

  // ---- feasibility checks ----------------------------------------------------

  double infeasibility(int j) const {
    if (x_[j] < lo_[j]) return lo_[j] - x_[j];
    if (x_[j] > up_[j]) return x_[j] - up_[j];
    return 0.0;
  }

  bool primal_feasible() const {
    for (int j = 0; j < n_ + m_; ++j)
      if (status_[j] == VarStatus::Basic && infeasibility(j) > opts_.primal_tol) return false;
    return true;
  }

  // Uses d_ from the most recent compute_duals with the true costs.
  bool dual_feasible() {
    compute_duals(cost_);
    const double tol = opts_.dual_tol * 10;
    for (int j = 0; j < n_ + m_; ++j) {
      if (status_[j] == VarStatus::Basic || is_fixed(j)) continue;
      switch (status_[j]) {
        case VarStatus::AtLower: if (d_[j] < -tol) return false; break;
        case VarStatus::AtUpper: if (d_[j] > tol) return false; break;
        case VarStatus::AtZero: if (std::abs(d_[j]) > tol) return false; break;
        default: break;
      }
    }
    return true;
  }

  // ---- pivoting ------------------------------------------------------------------

  // Entering variable q takes the basic slot of variable `leave`; wj_/ws_ must
  // hold B^{-1} a_q. Updates kernel inverse and index maps.
  bool pivot(int q, int leave, VarStatus leave_status) {
    const bool q_struct = q < n_;
    const bool l_struct = leave < n_;
    if (q_struct && !l_struct) {
      if (!grow(q, leave - n_)) return false;
    } else if (q_struct && l_struct) {
      replace_column(var_kpos_[leave], q);
    } else if (!q_struct && l_struct) {
      shrink(row_kpos_[q - n_], var_kpos_[leave]);
    } else {
      replace_row(row_kpos_[q - n_], leave - n_);
    }
    status_[q] = VarStatus::Basic;
    status_[leave] = leave_status;
    ++updates_;
    return true;
  }

  // Structural q enters, logical of row t leaves: kernel gains row t and column q.
  bool grow(int q, int t) {
    const int k = k_;
    std::vector<double> a(k, 0.0);
    double alpha = 0.0;
    for (int e = cstart_[q]; e < cstart_[q + 1]; ++e) {
      const int r = crow_[e];
      if (row_kpos_[r] >= 0) a[row_kpos_[r]] = cval_[e];
      if (r == t) alpha = cval_[e];
    }
    std::vector<double> v(k, 0.0);
    for (int e = rstart_[t]; e < rstart_[t + 1]; ++e) {
      const int j = rcol_[e];
      if (j < n_ && var_kpos_[j] >= 0) v[var_kpos_[j]] = rval_[e];
    }
    std::vector<double> w(k, 0.0), u(k, 0.0);
    for (int b = 0; b < k; ++b) {
      double s = 0.0;
      for (int c = 0; c < k; ++c) s += kinv(b, c) * a[c];
      w[b] = s;
    }
    for (int b = 0; b < k; ++b) {
      if (v[b] == 0.0) continue;
      for (int c = 0; c < k; ++c) u[c] += v[b] * kinv(b, c);
    }
    double s = alpha;
    for (int b = 0; b < k; ++b) s -= v[b] * w[b];
    if (std::abs(s) < 1e-12) return false;
    const int k1 = k + 1;
    std::vector<double> inv(static_cast<std::size_t>(k1) * k1, 0.0);
    for (int b = 0; b < k; ++b) {
      for (int c = 0; c < k; ++c)
        inv[static_cast<std::size_t>(b) * k1 + c] = kinv(b, c) + w[b] * u[c] / s;
      inv[static_cast<std::size_t>(b) * k1 + k] = -w[b] / s;
    }
    for (int c = 0; c < k; ++c) inv[static_cast<std::size_t>(k) * k1 + c] = -u[c] / s;
    inv[static_cast<std::size_t>(k) * k1 + k] = 1.0 / s;
    kinv_ = std::move(inv);
    k_ = k1;
    kt_.push_back(t);
    row_kpos_[t] = k;
    kj_.push_back(q);
    var_kpos_[q] = k;
    return true;
  }

  // Structural q replaces the structural at kernel column bp (wj_ holds K^{-1} a_T).
  void replace_column(int bp, int q) {
    const int k = k_;
    const double wp = wj_[bp];
    double* prow = &kinv_[static_cast<std::size_t>(bp) * k];
    for (int c = 0; c < k; ++c) prow[c] /= wp;
    for (int b = 0; b < k; ++b) {
      if (b == bp || wj_[b] == 0.0) continue;
      const double f = wj_[b];
      double* row = &kinv_[static_cast<std::size_t>(b) * k];
      for (int c = 0; c < k; ++c) row[c] -= f * prow[c];
    }
    var_kpos_[kj_[bp]] = -1;
    kj_[bp] = q;
    var_kpos_[q] = bp;
  }

  // Logical of kernel row ar enters, structural at kernel column bp leaves.
  void shrink(int ar, int bp) {
    const int k = k_;
    const double g = kinv(bp, ar);
    const int k1 = k - 1;
    // Surviving indices: the last index moves into the vacated slot.
    auto map_b = [&](int b) { return b == bp ? -1 : (b == k1 ? bp : b); };
    auto map_a = [&](int a) { return a == ar ? -1 : (a == k1 ? ar : a); };
    std::vector<double> inv(static_cast<std::size_t>(k1) * k1, 0.0);
    for (int b = 0; b < k; ++b) {
      const int nb = map_b(b);
      if (nb < 0) continue;
      const double f = kinv(b, ar) / g;
      for (int a = 0; a < k; ++a) {
        const int na = map_a(a);
        if (na < 0) continue;
        inv[static_cast<std::size_t>(nb) * k1 + na] = kinv(b, a) - f * kinv(bp, a);
      }
    }
    kinv_ = std::move(inv);
    const int row_out = kt_[ar];
    const int var_out = kj_[bp];
    row_kpos_[row_out] = -1;
    var_kpos_[var_out] = -1;
    if (ar != k1) {
      kt_[ar] = kt_[k1];
      row_kpos_[kt_[ar]] = ar;
    }
    if (bp != k1) {
      kj_[bp] = kj_[k1];
      var_kpos_[kj_[bp]] = bp;
    }
    kt_.pop_back();
    kj_.pop_back();
    k_ = k1;
  }

  // Logical of kernel row ar enters, logical of row t (in S) leaves: row swap.
  void replace_row(int ar, int t) {
    const int k = k_;
    std::vector<double> v(k, 0.0);
    for (int e = rstart_[t]; e < rstart_[t + 1]; ++e) {
      const int j = rcol_[e];
      if (var_kpos_[j] >= 0) v[var_kpos_[j]] = rval_[e];
    }
    std::vector<double> u(k, 0.0);
    for (int b = 0; b < k; ++b) {
      if (v[b] == 0.0) continue;
      const double* row = &kinv_[static_cast<std::size_t>(b) * k];
      for (int c = 0; c < k; ++c) u[c] += v[b] * row[c];
    }
    const double up = u[ar];
    for (int b = 0; b < k; ++b) {
      double* row = &kinv_[static_cast<std::size_t>(b) * k];
      row[ar] /= up;
      const double col = row[ar];
      for (int c = 0; c < k; ++c)
        if (c != ar) row[c] -= u[c] * col;
    }
    row_kpos_[kt_[ar]] = -1;
    kt_[ar] = t;
    row_kpos_[t] = ar;
  }

  // Rate of change of basic variable `var` per unit increase of the entering variable.
  double rate_of(int var) const {
    return var < n_ ? -wj_[var_kpos_[var]] : -ws_[var - n_];
  }

  template <typename Fn>
  void for_each_basic(Fn&& fn) const {
    for (int b = 0; b < k_; ++b) fn(kj_[b], wj_[b]);
    for (int i = 0; i < m_; ++i)
      if (row_kpos_[i] < 0) fn(n_ + i, ws_[i]);
  }

  bool maybe_refactor() {
    if (updates_ < opts_.refactor_interval) return true;
    if (!refactor()) return false;
    compute_primal();
    return true;
  }

  // ---- primal simplex ---------------------------------------------------------------

  Status primal_phase() {
    int degenerate = 0;
    std::vector<double> phase_cost(n_ + m_, 0.0);
    const double ptol = opts_.primal_tol;
    while (true) {
      if (iterations_ >= opts_.max_iterations) return Status::IterationLimit;
      if (past_deadline()) return Status::TimeLimit;
      if (!maybe_refactor()) return Status::NumericalFailure;
      const bool bland = degenerate >= opts_.bland_after_degenerate;

      bool phase1 = false;
      std::fill(phase_cost.begin(), phase_cost.end(), 0.0);
      for (int j = 0; j < n_ + m_; ++j) {
        if (status_[j] != VarStatus::Basic) continue;
        if (x_[j] < lo_[j] - ptol) {
          phase_cost[j] = -1.0;
          phase1 = true;
        } else if (x_[j] > up_[j] + ptol) {
          phase_cost[j] = 1.0;
          phase1 = true;
        }
      }
      compute_duals(phase1 ? phase_cost : cost_);

      int q = -1;
      double best = 0.0;
      for (int j = 0; j < n_ + m_; ++j) {
        if (status_[j] == VarStatus::Basic || is_fixed(j)) continue;
        const double dj = d_[j];
        bool ok = false;
        switch (status_[j]) {
          case VarStatus::AtLower: ok = dj < -opts_.dual_tol; break;
          case VarStatus::AtUpper: ok = dj > opts_.dual_tol; break;
          case VarStatus::AtZero: ok = std::abs(dj) > opts_.dual_tol; break;
          default: break;
        }
        if (!ok) continue;
        if (bland) {
          q = j;
          break;
        }
        if (std::abs(dj) > best) {
          best = std::abs(dj);
          q = j;
        }
      }
      if (q < 0) return phase1 ? Status::Infeasible : Status::Optimal;

      const double dir = d_[q] < 0 ? 1.0 : -1.0;
      ftran_var(q);

      // Harris two-pass ratio test over basics (rate = dx_basic / dtheta).
      double theta_max = kInf;
      for_each_basic([&](int var, double w) {
        const double rate = -dir * w;
        if (std::abs(rate) <= opts_.pivot_tol) return;
        double lim = kInf;
        if (rate < 0) {
          if (x_[var] > up_[var] + ptol) lim = (x_[var] - up_[var]) / -rate;
          else if (std::isfinite(lo_[var]) && x_[var] >= lo_[var] - ptol)
            lim = (x_[var] - lo_[var] + ptol) / -rate;
        } else {
          if (x_[var] < lo_[var] - ptol) lim = (lo_[var] - x_[var]) / rate;
          else if (std::isfinite(up_[var]) && x_[var] <= up_[var] + ptol)
            lim = (up_[var] - x_[var] + ptol) / rate;
        }
        theta_max = std::min(theta_max, lim);
      });
      const double range = up_[q] - lo_[q];

      int leave = -1;
      double leave_theta = kInf, leave_rate = 0.0, leave_target = 0.0;
      VarStatus leave_status = VarStatus::AtLower;
      if (std::isfinite(theta_max)) {
        for_each_basic([&](int var, double w) {
          const double rate = -dir * w;
          if (std::abs(rate) <= opts_.pivot_tol) return;
          double target;
          VarStatus st;
          if (rate < 0) {
            if (x_[var] > up_[var] + ptol) { target = up_[var]; st = VarStatus::AtUpper; }
            else if (std::isfinite(lo_[var]) && x_[var] >= lo_[var] - ptol) { target = lo_[var]; st = VarStatus::AtLower; }
            else return;
          } else {
            if (x_[var] < lo_[var] - ptol) { target = lo_[var]; st = VarStatus::AtLower; }
            else if (std::isfinite(up_[var]) && x_[var] <= up_[var] + ptol) { target = up_[var]; st = VarStatus::AtUpper; }
            else return;
          }
          const double ratio = std::max(0.0, (target - x_[var]) / rate);
          bool take;
          if (bland) {
            take = ratio < leave_theta - 1e-12 ||
                   (ratio <= leave_theta + 1e-12 && (leave < 0 || var < leave));
          } else {
            take = ratio <= theta_max && std::abs(rate) > std::abs(leave_rate);
          }
          if (take) {
            leave = var;
            leave_theta = ratio;
            leave_rate = rate;
            leave_target = target;
            leave_status = st;
          }
        });
      }

      if (leave < 0 && !std::isfinite(range)) {
        return phase1 ? Status::NumericalFailure : Status::Unbounded;
      }
      ++iterations_;
      if (std::isfinite(range) && (leave < 0 || range <= leave_theta)) {
        // Entering variable hits its own opposite bound: no basis change.
        const double step = range;
        for_each_basic([&](int var, double w) { x_[var] -= dir * w * step; });
        status_[q] = dir > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
        x_[q] = nonbasic_value(q);
        degenerate = step <= 1e-12 ? degenerate + 1 : 0;
        continue;
      }
      const double step = leave_theta;
      for_each_basic([&](int var, double w) { x_[var] -= dir * w * step; });
      x_[q] += dir * step;
      x_[leave] = leave_target;
      if (!pivot(q, leave, leave_status)) {
        if (!refactor()) return Status::NumericalFailure;
        compute_primal();
        continue;
      }
      degenerate = step <= 1e-12 ? degenerate + 1 : 0;
    }
  }

  // ---- dual simplex -----------------------------------------------------------------

  Status dual_phase() {
    const double ptol = opts_.primal_tol;
    const long cap = iterations_ + 10L * (n_ + m_) + 1000;
    int retries = 0;
    while (true) {
      if (iterations_ >= opts_.max_iterations) return Status::IterationLimit;
      if (past_deadline()) return Status::TimeLimit;
      if (iterations_ >= cap) return Status::NumericalFailure;
      if (!maybe_refactor()) return Status::NumericalFailure;

      int p = -1;
      double worst = ptol;
      for (int j = 0; j < n_ + m_; ++j) {
        if (status_[j] != VarStatus::Basic) continue;
        const double inf = infeasibility(j);
        if (inf > worst) {
          worst = inf;
          p = j;
        }
      }
      if (p < 0) return Status::Optimal;
      const bool to_lower = x_[p] < lo_[p];

      compute_duals(cost_);
      hj_.assign(k_, 0.0);
      hs_.assign(m_, 0.0);
      if (p < n_) hj_[var_kpos_[p]] = 1.0;
      else hs_[p - n_] = 1.0;
      btran();  // y_ now holds rho = e_p' B^{-1}
      rho_ = y_;

      auto alpha_of = [&](int j) {
        if (j >= n_) return -rho_[j - n_];
        double v = 0.0;
        for (int e = cstart_[j]; e < cstart_[j + 1]; ++e) v += cval_[e] * rho_[crow_[e]];
        return v;
      };
      alpha_.assign(n_ + m_, 0.0);
      double smax = kInf;
      for (int j = 0; j < n_ + m_; ++j) {
        if (status_[j] == VarStatus::Basic || is_fixed(j)) continue;
        const double a = alpha_of(j);
        alpha_[j] = a;
        if (std::abs(a) <= opts_.pivot_tol) continue;
        if (!dual_candidate(j, a, to_lower)) continue;
        smax = std::min(smax, (std::abs(d_[j]) + opts_.dual_tol) / std::abs(a));
      }
      if (!std::isfinite(smax)) return Status::Infeasible;
      int q = -1;
      double best_alpha = 0.0;
      for (int j = 0; j < n_ + m_; ++j) {
        if (status_[j] == VarStatus::Basic || is_fixed(j)) continue;
        const double a = alpha_[j];
        if (std::abs(a) <= opts_.pivot_tol || !dual_candidate(j, a, to_lower)) continue;
        if (std::abs(d_[j]) / std::abs(a) <= smax && std::abs(a) > best_alpha) {
          best_alpha = std::abs(a);
          q = j;
        }
      }
      if (q < 0) return Status::Infeasible;

      ftran_var(q);
      const double wp = p < n_ ? wj_[var_kpos_[p]] : ws_[p - n_];
      if (std::abs(wp - alpha_[q]) > 1e-7 * (1.0 + std::abs(wp))) {
        if (++retries > 3 || !refactor()) return Status::NumericalFailure;
        compute_primal();
        continue;
      }
      const double target = to_lower ? lo_[p] : up_[p];
      const double delta = (x_[p] - target) / wp;
      for_each_basic([&](int var, double w) { x_[var] -= w * delta; });
      x_[q] += delta;
      x_[p] = target;
      ++iterations_;
      if (!pivot(q, p, to_lower ? VarStatus::AtLower : VarStatus::AtUpper)) {
        if (!refactor()) return Status::NumericalFailure;
        compute_primal();
      }
    }
  }

  bool dual_candidate(int j, double a, bool to_lower) const {
    switch (status_[j]) {
      case VarStatus::AtLower: return to_lower ? a < 0 : a > 0;
      case VarStatus::AtUpper: return to_lower ? a > 0 : a < 0;
      case VarStatus::AtZero: return true;
      default: return false;
    }
  }

  // ---- result -----------------------------------------------------------------------

  LpSolution extract(Status st) {
    LpSolution s;
    s.status = st;
    s.iterations = iterations_;
    s.x.assign(x_.begin(), x_.begin() + n_);
    s.row_activity.assign(x_.begin() + n_, x_.end());
    s.objective = 0.0;
    for (int j = 0; j < n_; ++j) s.objective += cost_[j] * x_[j];
    if (st == Status::Optimal) {
      s.dual.resize(m_);
      for (int i = 0; i < m_; ++i) s.dual[i] = -y_[i];
      s.reduced_cost.assign(d_.begin(), d_.begin() + n_);
      for (int j = 0; j < n_; ++j)
        if (status_[j] == VarStatus::Basic) s.reduced_cost[j] = 0.0;
      s.basis.status = status_;
    }
    return s;
  }

  SimplexOptions opts_;
  int n_, m_;
  long iterations_ = 0;
  bool has_deadline_ = false;
  std::chrono::steady_clock::time_point deadline_;

  bool past_deadline() const {
    return has_deadline_ && (iterations_ & 15) == 0 && std::chrono::steady_clock::now() > deadline_;
  }

  std::vector<int> rstart_, rcol_;
  std::vector<double> rval_;
  std::vector<int> cstart_, crow_;
  std::vector<double> cval_;
  std::vector<RowSense> sense_;

  std::vector<double> cost_, lo_, up_, x_, d_;
  std::vector<VarStatus> status_;

  int k_ = 0;
  std::vector<int> kt_, kj_, row_kpos_, var_kpos_;
  std::vector<double> kinv_;
  int updates_ = 0;

  std::vector<double> h_ = std::vector<double>(m_, 0.0);
  std::vector<double> wj_, ws_, y_, hj_, hs_, scratch_, rho_, alpha_;
};

}  // namespace edgeguard::lp
