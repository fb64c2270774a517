#ifndef PFLOW_ERRORS_HPP
#define PFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace pflow {

/// Argument outside the domain of an operation (negative length, p outside (1, 2], ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Flux weight is infinite: eps = delta = 0 with a vanishing cell gradient and p < 2.
class DegenerateWeightError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Objects that must live on related meshes do not.
class MismatchError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Linear or nonlinear solve failed.  `step` is the time step index when known (-1 otherwise).
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, std::vector<double> residual_history = {}, int step = -1)
      : std::runtime_error(what), residual_history_(std::move(residual_history)), step_(step)
  {
  }

  const std::vector<double>& residual_history() const { return residual_history_; }
  int step() const { return step_; }

private:
  std::vector<double> residual_history_;
  int step_;
};

}  // namespace pflow

#endif  // PFLOW_ERRORS_HPP
