#pragma once

#include <stdexcept>
#include <string>

namespace econet {

// Raised for malformed or out-of-range configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Contract violations in the model: self-loops, unknown connections,
// bankrupting an agent at the consumption floor, k_in = 0 leverage.
class ModelError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// Statistical procedures that cannot produce a meaningful answer
// (too few tail samples, zero variation, bracket failures).
class StatsError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace econet
