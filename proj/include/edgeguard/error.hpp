#pragma once

#include <stdexcept>
#include <string>

namespace edgeguard {

// Bad user input: out-of-range parameter, malformed file, inconsistent sizes.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Instance synthesis could not meet its postconditions within the retry budget.
class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solver failed to produce a certified answer (iteration cap, numerical
// breakdown, node limit without incumbent, big-M escalation exhausted).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The single-level reformulations are unsound when some admissible attack
// leaves the defender without a feasible allocation; callers get this
// instead of an answer.
class InfeasibilityRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Too many attack plans to enumerate under the configured cap.
class EnumerationCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edgeguard
