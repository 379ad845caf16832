#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>

namespace floc {

// Bad arguments, malformed files, violated invariants on inputs.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Anything that goes wrong once the numbers start moving.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationFailure : public NumericalFailure {
 public:
  IntegrationFailure(const std::string& what, std::size_t step)
      : NumericalFailure(what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class ConditionalMeasure;

// Forward solve failed inside a cost evaluation; carries the measure that
// was being evaluated.
class CostEvaluationFailure : public NumericalFailure {
 public:
  CostEvaluationFailure(const std::string& what,
                        std::shared_ptr<const ConditionalMeasure> measure)
      : NumericalFailure(what), measure_(std::move(measure)) {}

  const std::shared_ptr<const ConditionalMeasure>& measure() const noexcept {
    return measure_;
  }

 private:
  std::shared_ptr<const ConditionalMeasure> measure_;
};

// Finite-difference step too small to move the perturbed weights.
class DegenerateStep : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace floc
