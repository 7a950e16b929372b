#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edgeguard/error.hpp"

namespace edgeguard::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense : std::uint8_t { Le, Eq, Ge };

struct Entry {
  int index;
  double value;
};

// Minimization LP over bounded columns and sparse sense-tagged rows:
//
//   min  c'x   s.t.  a_i'x (<= | = | >=) b_i,   lo <= x <= hi.
//
// Rows are stored row-major; the solver builds its own column view.
class LpProblem {
 public:
  int add_variable(double cost, double lower = 0.0, double upper = kInf,
                   std::string name = {}) {
    if (!std::isfinite(cost)) throw ValidationError("lp: non-finite cost");
    if (std::isnan(lower) || std::isnan(upper) || lower > upper || lower == kInf ||
        upper == -kInf)
      throw ValidationError("lp: invalid bounds on variable '" + name + "'");
    cost_.push_back(cost);
    lower_.push_back(lower);
    upper_.push_back(upper);
    col_names_.push_back(std::move(name));
    return static_cast<int>(cost_.size()) - 1;
  }

  int add_row(std::span<const Entry> entries, RowSense sense, double rhs,
              std::string name = {}) {
    if (!std::isfinite(rhs)) throw ValidationError("lp: non-finite right-hand side");
    for (const Entry& e : entries) {
      if (e.index < 0 || e.index >= num_cols())
        throw ValidationError("lp: row references unknown column");
      if (!std::isfinite(e.value)) throw ValidationError("lp: non-finite coefficient");
      if (e.value != 0.0) entries_.push_back(e);
    }
    row_start_.push_back(entries_.size());
    sense_.push_back(sense);
    rhs_.push_back(rhs);
    row_names_.push_back(std::move(name));
    return num_rows() - 1;
  }

  int add_row(std::initializer_list<Entry> entries, RowSense sense, double rhs,
              std::string name = {}) {
    return add_row(std::span<const Entry>(entries.begin(), entries.size()), sense, rhs,
                   std::move(name));
  }

  int num_cols() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(sense_.size()); }
  std::size_t num_nonzeros() const { return entries_.size(); }

  double cost(int j) const { return cost_[j]; }
  double lower(int j) const { return lower_[j]; }
  double upper(int j) const { return upper_[j]; }
  const std::string& col_name(int j) const { return col_names_[j]; }

  RowSense sense(int i) const { return sense_[i]; }
  double rhs(int i) const { return rhs_[i]; }
  const std::string& row_name(int i) const { return row_names_[i]; }
  std::span<const Entry> row(int i) const {
    return {entries_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
  }

  void set_bounds(int j, double lower, double upper) {
    if (lower > upper) throw ValidationError("lp: lower bound above upper bound");
    lower_[j] = lower;
    upper_[j] = upper;
  }
  void set_rhs(int i, double rhs) { rhs_[i] = rhs; }
  void set_cost(int j, double cost) { cost_[j] = cost; }

  double objective(std::span<const double> x) const {
    double v = 0.0;
    for (int j = 0; j < num_cols(); ++j) v += cost_[j] * x[j];
    return v;
  }

  double activity(int i, std::span<const double> x) const {
    double v = 0.0;
    for (const Entry& e : row(i)) v += e.value * x[e.index];
    return v;
  }

 private:
  std::vector<double> cost_, lower_, upper_;
  std::vector<std::string> col_names_;
  std::vector<std::size_t> row_start_{0};
  std::vector<Entry> entries_;
  std::vector<RowSense> sense_;
  std::vector<double> rhs_;
  std::vector<std::string> row_names_;
};

enum class Status : std::uint8_t { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure, TimeLimit };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration_limit";
    case Status::NumericalFailure: return "numerical_failure";
    case Status::TimeLimit: return "time_limit";
  }
  return "unknown";
}

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, AtZero };

// Simplex basis over structural columns followed by one logical per row.
// Usable as a warm-start hint for any LP with the same shape.
struct Basis {
  std::vector<VarStatus> status;
  bool empty() const { return status.empty(); }
};

// Row multipliers follow the Lagrangian L = c'x + sum_i dual_i (a_i'x - b_i):
// in a minimization, <= rows carry dual >= 0, >= rows dual <= 0, = rows free.
struct LpSolution {
  Status status = Status::NumericalFailure;
  std::vector<double> x;
  std::vector<double> row_activity;
  std::vector<double> dual;
  std::vector<double> reduced_cost;
  double objective = 0.0;
  long iterations = 0;
  Basis basis;

  bool optimal() const { return status == Status::Optimal; }
};

}  // namespace edgeguard::lp
