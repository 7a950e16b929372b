#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "edgeguard/lp/problem.hpp"

namespace edgeguard::lp {

namespace detail {

inline std::string mps_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  std::string s(buf);
  if (s.size() > 12) {
    std::snprintf(buf, sizeof buf, "%.6e", v);
    s = buf;
  }
  return s;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline void mps_line(std::ostream& os, const std::string& f1, const std::string& f2,
                     const std::string& f3, const std::string& f4,
                     const std::string& f5 = {}, const std::string& f6 = {}) {
  // Fixed layout: fields start at columns 2, 5, 15, 25, 40, 50.
  std::string line = " " + pad(f1, 2) + " " + pad(f2, 8) + "  " + pad(f3, 8) + "  " + pad(f4, 12);
  if (!f5.empty()) line += "   " + pad(f5, 8) + "  " + f6;
  while (!line.empty() && line.back() == ' ') line.pop_back();
  os << line << '\n';
}

}  // namespace detail

// Writes `p` in fixed-format MPS. Names are generated as C0000001/R0000001 so
// they fit the 8-character fields; the original names follow as comments.
// `integer` marks columns to wrap in INTORG markers (binary when bounds are [0,1]).
inline void write_mps(std::ostream& os, const LpProblem& p, const std::string& name = "EDGEGUARD",
                      std::span<const bool> integer = {}, bool maximize_comment = false) {
  using detail::mps_line;
  using detail::mps_number;
  const int n = p.num_cols(), m = p.num_rows();
  auto cname = [](int j) { char b[16]; std::snprintf(b, sizeof b, "C%07d", j + 1); return std::string(b); };
  auto rname = [](int i) { char b[16]; std::snprintf(b, sizeof b, "R%07d", i + 1); return std::string(b); };

  os << "* generated by edgeguard; objective sense MIN";
  if (maximize_comment) os << " (negated maximization)";
  os << '\n';
  for (int j = 0; j < n; ++j)
    if (!p.col_name(j).empty()) os << "* " << cname(j) << ' ' << p.col_name(j) << '\n';
  for (int i = 0; i < m; ++i)
    if (!p.row_name(i).empty()) os << "* " << rname(i) << ' ' << p.row_name(i) << '\n';

  os << "NAME          " << name << '\n';
  os << "ROWS\n";
  mps_line(os, "N", "COST", "", "");
  for (int i = 0; i < m; ++i) {
    const char* s = p.sense(i) == RowSense::Le ? "L" : p.sense(i) == RowSense::Ge ? "G" : "E";
    mps_line(os, s, rname(i), "", "");
  }

  std::vector<std::vector<std::pair<int, double>>> cols(n);
  for (int i = 0; i < m; ++i)
    for (const Entry& e : p.row(i)) cols[e.index].emplace_back(i, e.value);

  os << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int j = 0; j < n; ++j) {
    const bool is_int = !integer.empty() && integer[j];
    if (is_int != in_int) {
      char b[16];
      std::snprintf(b, sizeof b, "MARKER%02d", marker++ % 100);
      os << "    " << detail::pad(b, 8) << "                 'MARKER'                 "
         << (is_int ? "'INTORG'" : "'INTEND'") << '\n';
      in_int = is_int;
    }
    if (p.cost(j) != 0.0) mps_line(os, "", cname(j), "COST", mps_number(p.cost(j)));
    for (auto [i, v] : cols[j]) mps_line(os, "", cname(j), rname(i), mps_number(v));
    if (p.cost(j) == 0.0 && cols[j].empty()) mps_line(os, "", cname(j), "COST", "0");
  }
  if (in_int) os << "    MARKERZZ                 'MARKER'                 'INTEND'\n";

  os << "RHS\n";
  for (int i = 0; i < m; ++i)
    if (p.rhs(i) != 0.0) mps_line(os, "", "RHS", rname(i), mps_number(p.rhs(i)));

  os << "BOUNDS\n";
  for (int j = 0; j < n; ++j) {
    const double lo = p.lower(j), hi = p.upper(j);
    if (lo == hi) {
      mps_line(os, "FX", "BND", cname(j), mps_number(lo));
      continue;
    }
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
      mps_line(os, "FR", "BND", cname(j), "");
      continue;
    }
    if (!std::isfinite(lo)) mps_line(os, "MI", "BND", cname(j), "");
    else if (lo != 0.0) mps_line(os, "LO", "BND", cname(j), mps_number(lo));
    if (std::isfinite(hi)) mps_line(os, "UP", "BND", cname(j), mps_number(hi));
  }
  os << "ENDATA\n";
}

}  // namespace edgeguard::lp
