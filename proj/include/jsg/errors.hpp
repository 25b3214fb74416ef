#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace jsg {

/// Input outside the domain of an operation (point off the open disk, s <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Coincident or otherwise degenerate geometric input.
class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A monotone root search could not bracket its root.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nonlinear solve that did not reach its tolerance; carries the residual history.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace jsg
