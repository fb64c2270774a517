#ifndef PFLOW_LEDGERS_HPP
#define PFLOW_LEDGERS_HPP

#include <string>
#include <vector>

#include "pflow/schemes.hpp"

namespace pflow {

/// One cumulative inequality lhs(l) <= rhs(l), checked for every l = 0..K.
///
/// Semi-implicit runs (omega_{k-1} the flux weight at u^{k-1}):
///   energy-stability  (f = 0, d = 0)
///     E[u^l] + tau sum ||d u^k||^2 + tau^2/2 sum int omega_{k-1} |grad d u^k|^2 <= E[u^0]
///   energy-bound
///     E[u^l] + tau/2 sum ||d u^k||^2 + tau^2/2 sum int omega_{k-1} |grad d u^k|^2
///       <= E[u^0] + tau sum ||f_h||^2 + tau sum int |d(u^{k-1})|^2 |u^k|^2
///   apriori
///     1/2 ||u^l||^2 + tau sum int omega_{k-1} |grad u^k|^2
///       <= 1/2 ||u^0||^2 + (c7 + 1) tau sum ||u^k||^2 + tau sum ||f_h||^2
/// Implicit runs (weights at u^k):
///   energy-implicit   (f = 0, d = 0)
///     E[u^l] + tau sum ||d u^k||^2 <= E[u^0]
///   apriori-implicit
///     1/2 ||u^l||^2 + tau sum int omega_k |grad u^k|^2
///       <= 1/2 ||u^0||^2 + (c7 + 1/2) tau sum ||u^k||^2 + tau/2 sum ||f_h||^2
///
/// d u^k = (u^k - u^{k-1}) / tau, ||f_h|| is the discrete dual norm sqrt(F^T M^{-1} F)
/// and E is the regularized energy of the trajectory's regularization kind.
///
/// The allowance added to rhs is rel_slack * max(|lhs|, |rhs|) plus the
/// accumulated effect of the recorded step residuals R_k on the tested
/// equation, sum_k |R_k| |v_k| with v_k the coefficient vector of the test function.
struct LedgerSummary {
  std::string name;
  bool applicable = false;
  bool holds = true;
  int worst_step = 0;  // l with the smallest relative margin
  double lhs = 0.0;
  double rhs = 0.0;
  double allowance = 0.0;
  double slack = 0.0;  // rhs - lhs at worst_step
};

/// Per-step quantities the ledgers are built from (index k = 1..K at k - 1).
struct StepQuantities {
  std::vector<double> energy;         // E[u^k], k = 0..K
  std::vector<double> l2_squared;     // ||u^k||^2, k = 0..K
  std::vector<double> dtau_squared;   // ||d u^k||^2
  std::vector<double> dissipation;    // int omega |grad d u^k|^2 (semi-implicit weights)
  std::vector<double> weighted_grad;  // int omega |grad u^k|^2 (scheme weights)
  std::vector<double> source_squared; // ||f_h(t_k)||^2
  std::vector<double> lower_order;    // int |d(u^{k-1})|^2 |u^k|^2
  std::vector<double> residual_energy;  // |R_k| |u^k - u^{k-1}|
  std::vector<double> residual_apriori; // tau |R_k| |u^k|
};

StepQuantities step_quantities(const Trajectory& trajectory);

std::vector<LedgerSummary> energy_ledgers(const Trajectory& trajectory, double rel_slack = 1e-9);
std::vector<LedgerSummary> energy_ledgers(const Trajectory& trajectory, const StepQuantities& q,
                                          double rel_slack = 1e-9);

/// True if every applicable ledger holds.
bool ledgers_hold(const std::vector<LedgerSummary>& ledgers);

}  // namespace pflow

#endif  // PFLOW_LEDGERS_HPP
