#pragma once

#include <stdexcept>
#include <string>

namespace vrl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value or name fell outside its declared domain (off-grid reward,
// unknown state, utility table missing entries, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Scenario file could not be parsed or validated. `field` holds the
// JSON path of the offending entry when known.
class ScenarioError : public Error {
 public:
  explicit ScenarioError(const std::string& field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// The stacked extraction matrix does not have full column rank.
class RankDeficientError : public Error {
 public:
  using Error::Error;
};

// The least-squares solution is not a probability distribution within
// the validation tolerance.
class NotADistributionError : public Error {
 public:
  using Error::Error;
};

// Greedy anchor selection cannot reach full column rank.
class InsufficientRankError : public Error {
 public:
  using Error::Error;
};

// The CP filter is empty but a CP-constrained agent was asked to act.
class NoCPActionError : public Error {
 public:
  using Error::Error;
};

}  // namespace vrl
