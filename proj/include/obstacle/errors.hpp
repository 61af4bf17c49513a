#pragma once

#include <stdexcept>
#include <string>

namespace obstacle {

// Caller supplied data that violates a documented precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An engine reached a state it cannot continue from (e.g. lattice too coarse).
class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace obstacle
