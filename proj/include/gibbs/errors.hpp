#pragma once

#include <stdexcept>
#include <string>

namespace gibbs {

// Precondition and domain violations use std::invalid_argument /
// std::domain_error directly. The types below mark failures that callers
// (notably the CLI) map onto distinct exit statuses.

/// A sampler left the region where its iterates are meaningful.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A Metropolis chain rejected every proposal over the whole run.
class ZeroAcceptanceError : public std::runtime_error {
 public:
  explicit ZeroAcceptanceError(const std::string& what) : std::runtime_error(what) {}
};

/// Enumeration would exceed the configured state-space cap.
class StateSpaceError : public std::invalid_argument {
 public:
  explicit StateSpaceError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace gibbs
