#pragma once

#include <stdexcept>
#include <string>

namespace trapwave {

// Bad specs, violated preconditions, malformed files.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// An iterative method ran out of budget or a factorization broke down.
class SolverFailure : public std::runtime_error {
 public:
  explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

// The numbers came out, but they contradict a property the theory guarantees
// (b <= 0, a lost compatibility condition, ...). Kept apart from
// SolverFailure so callers can tell a broken discretization from a broken
// machine.
class ScientificFailure : public std::runtime_error {
 public:
  explicit ScientificFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace trapwave
