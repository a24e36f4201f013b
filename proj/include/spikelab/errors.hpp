#pragma once

#include <stdexcept>
#include <string>

namespace spikelab {

// Precondition violations: bad parameters, inconsistent specs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to deliver its contract (no bracket, no
// convergence, grid/analytic disagreement).
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace spikelab
