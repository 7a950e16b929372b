#pragma once

#include "edgeguard/lp/certify.hpp"
#include "edgeguard/lp/mps.hpp"
#include "edgeguard/lp/problem.hpp"
#include "edgeguard/lp/simplex.hpp"

namespace edgeguard::lp {

// Solves `p` to optimality. `hint` is an optional starting basis from an LP of
// the same shape (it is ignored if it does not fit).
inline LpSolution solve_lp(const LpProblem& p, const Basis* hint = nullptr,
                           SimplexOptions opts = {}) {
  Simplex simplex(p, opts);
  return simplex.solve(hint);
}

}  // namespace edgeguard::lp
