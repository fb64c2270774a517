#ifndef PFLOW_DIAGNOSTICS_HPP
#define PFLOW_DIAGNOSTICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "pflow/ledgers.hpp"
#include "pflow/schemes.hpp"

namespace pflow {

/// Cellwise split of the semi-implicit flux against the unregularized one,
///
///   A_0(grad u^k) - omega(grad u^{k-1}) grad u^k = E^k + F^k,
///   E^k = A_0(grad u^k) - R_eps(grad u^k),
///   F^k = R_eps(grad u^k) - omega(grad u^{k-1}) grad u^k,
///
/// where R_eps is the regularized flux of the trajectory and omega its weight.
/// For QuadraticNorm with delta = 0, R_eps = S_eps and A_0 = S_0.
struct DiscrepancyRecord {
  int k = 0;
  double E_norm_L1 = 0.0;     // sum_T area_T |E^k_T|
  double E_max = 0.0;         // max_T |E^k_T|
  double E_cell_bound = 0.0;  // (1 - kappa0) phi'(eps), = (2 - p) eps^{p-1} for delta = 0
  double E_bound = 0.0;       // E_cell_bound |Omega|
  double F_dual_norm = 0.0;   // max_i |(F^k, grad psi_i)| / ||psi_i||_{W^{1,2}}
  double alpha_eps = 0.0;
  bool within_bound = true;
};

struct DiscrepancyOptions {
  std::optional<double> alpha;      // default (tau (delta + eps)^{p-2})^{1/2}
  std::optional<double> lipschitz;  // default regularized_lipschitz_constant(p)
};

/// Throws DomainError for implicit trajectories or k outside 1..K.
DiscrepancyRecord discrepancy_terms(const Trajectory& trajectory, int k, const DiscrepancyOptions& options = {});

struct DiscrepancyBreakdown {
  double alpha = 0.0;
  double lipschitz = 0.0;
  double dissipation = 0.0;        // tau^2 sum_k int omega_{k-1} |grad d u^k|^2
  double consistency_term = 0.0;   // (1 - kappa0) phi'(eps), C1 = 1
  double dissipation_term = 0.0;   // lipschitz^2 alpha dissipation
  double balance_term = 0.0;       // tau (delta + eps)^{p-2} / (2 alpha), C2 = 1
  double total = 0.0;
};

DiscrepancyBreakdown discrepancy_breakdown(const Trajectory& trajectory, const DiscrepancyOptions& options = {});
double discrepancy_total(const Trajectory& trajectory, const DiscrepancyOptions& options = {});

/// Sup over t of ||a(t) - b(t)||_{L^2} for piecewise constant interpolants on
/// possibly different uniform grids over [0, T]; b may live on the parent mesh
/// of a's mesh, in which case it is prolonged.
double cauchy_linf_l2(const Trajectory& fine, const Trajectory& coarse);
/// (int_0^T |a(t) - b(t)|_{W^{1,p}}^p dt)^{1/p}, same conventions.
double cauchy_lp_w1p(const Trajectory& fine, const Trajectory& coarse, double p);

/// max_k ||a^k - b^k||_{L^2} for two trajectories on the same mesh and time grid.
double trajectory_gap(const Trajectory& a, const Trajectory& b);

struct StudyConfig {
  enum class Coupling { Default, FixedTau };

  int levels = 4;
  int base_n = 4;
  /// Level-0 parameters: eps_0 = base.eps, tau_0 = base.T / base.K.
  SchemeConfig base;
  ScalarField initial;
  Coupling coupling = Coupling::Default;
  bool negative_control = true;
  DiscrepancyOptions discrepancy;

  void validate() const;
};

/// Level-n parameters.  Default:  eps_n = eps_0 2^{-n},
///   tau_n = c eps_n^{2-p} 2^{-n/2},  c = tau_0 / eps_0^{2-p},
/// rounded to K_n = round(T / tau_n) >= 1 steps.  FixedTau keeps tau_n = tau_0.
SchemeConfig level_config(const StudyConfig& study, int level);

struct StudyLevel {
  int level = 0;
  int n = 0;
  double h = 0.0;
  double eps = 0.0;
  double tau = 0.0;
  int K = 0;
  double coupling_product = 0.0;  // tau phi''(eps)
  bool failed = false;
  std::string failure;

  double max_l2 = 0.0;            // max_k ||u^k|| of the semi-implicit run
  double max_w1p = 0.0;
  double final_energy = 0.0;
  double gap = 0.0;               // max_k ||u_semi^k - u_impl^k||
  DiscrepancyBreakdown discrepancy;
  double E_max_ratio = 0.0;       // max_k max_T |E^k_T| / E_cell_bound
  bool E_within_bound = true;
  double dissipation_bound = 0.0; // 2 (max_m E_{eps_m}[u^0] + data terms)
  int implicit_iterations = 0;
  std::vector<LedgerSummary> semi_ledgers;
  std::vector<LedgerSummary> implicit_ledgers;
  bool ledgers_hold = true;
};

struct StudyChecks {
  bool coupling_product_decreasing = true;
  bool cauchy_decreasing = true;
  bool gap_decreasing = true;
  bool discrepancy_decreasing = true;
  bool E_bound = true;
  bool ledgers = true;
  bool dissipation_uniform = true;
  bool no_failures = true;

  bool all() const
  {
    return coupling_product_decreasing && cauchy_decreasing && gap_decreasing && discrepancy_decreasing &&
           E_bound && ledgers && dissipation_uniform && no_failures;
  }
};

struct StudyReport {
  double p = 0.0;
  StudyConfig::Coupling coupling = StudyConfig::Coupling::Default;
  std::vector<StudyLevel> levels;
  std::vector<double> cauchy_linf_l2;  // entry n compares levels n + 1 and n
  std::vector<double> cauchy_lp_w1p;
  StudyChecks checks;

  bool has_control = false;
  std::vector<StudyLevel> control_levels;
  /// Discrepancy total or gap fails to decrease strictly along the fixed-tau run.
  bool control_behaves = false;

  bool passed() const { return checks.all() && (!has_control || control_behaves); }
};

/// Gaps at or below this value count as coinciding schemes.
inline constexpr double kSchemeCoincidence = 1e-8;

StudyReport run_study(const StudyConfig& study);

struct HeatErrorResult {
  std::vector<double> errors;  // ||u^k - u(t_k)||_{L^2}, k = 0..K
  double max_error = 0.0;
};

/// Backward Euler for u_t = Laplace u with u^0 = I_h sin(pi x) sin(pi y) on the
/// n x n unit square mesh; exact solution exp(-2 pi^2 t) sin(pi x) sin(pi y).
/// The configuration must have p = 2 and a zero lower-order term; its
/// eps, regularization and scheme are irrelevant because the weight is 1.
HeatErrorResult heat_manufactured_error(const SchemeConfig& config, int n);

}  // namespace pflow

#endif  // PFLOW_DIAGNOSTICS_HPP
