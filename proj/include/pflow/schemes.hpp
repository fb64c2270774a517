#ifndef PFLOW_SCHEMES_HPP
#define PFLOW_SCHEMES_HPP

#include <memory>
#include <vector>

#include <Eigen/SparseCholesky>

#include "pflow/assembly.hpp"
#include "pflow/lower_order.hpp"
#include "pflow/mesh.hpp"
#include "pflow/orlicz.hpp"

namespace pflow {

struct LinearSolverSettings {
  enum class Kind { Cholesky, CG };
  Kind kind = Kind::Cholesky;
  double tol_rel = 1e-12;  // CG only
  int max_iter = 10000;    // CG only
};

struct NonlinearSettings {
  enum class Kind { Kacanov, NewtonDamped };
  Kind kind = Kind::Kacanov;
  double tol_res = 1e-10;
  int max_iter = 200;
};

/// Everything a trajectory depends on besides the mesh and the initial value.
struct SchemeConfig {
  NFunctionPD nf{2.0, 0.0};
  double eps = 0.1;
  Regularization regularization = Regularization::AdditiveShift;
  double T = 1.0;
  int K = 10;
  LowerOrderCoeff coeff = LowerOrderCoeff::zero();
  SchemeKind scheme = SchemeKind::SemiImplicit;
  SpaceTimeField source;  // empty means f = 0
  LinearSolverSettings linear;
  NonlinearSettings nonlinear;

  double tau() const { return T / K; }
  double time(int k) const { return T * k / K; }

  /// Throws DomainError unless T > 0, K >= 0 and
  ///   SemiImplicit: eps in (0, 1),
  ///   Implicit:     eps in [0, 1), with eps = 0 only if delta > 0 or p = 2.
  void validate() const;
};

struct StepStats {
  int iterations = 0;
  /// Euclidean norm of the discrete equation residual over the free DOFs.
  double residual = 0.0;
  std::vector<double> history;
};

/// Assembles and solves the per-step systems of one configuration on one mesh.
///
/// The semi-implicit system freezes the flux weight and the lower-order
/// coefficient at the previous iterate:
///
///   (M / tau + K_w(u_prev) + M_d(u_prev)) u = M u_prev / tau + F(t_k).
///
/// Kacanov iteration for the implicit scheme solves the same system with the
/// lag moved to the current iterate, so its first step from v0 = u_prev is
/// the semi-implicit step.
class TimeStepper {
public:
  TimeStepper(MeshPtr mesh, SchemeConfig config);

  const SchemeConfig& config() const { return config_; }
  const MeshPtr& mesh() const { return mesh_; }
  const SymSparse& mass() const { return mass_; }

  Eigen::VectorXd load(int k) const;

  FemFunction semi_implicit_step(const FemFunction& u_prev, int k, StepStats* stats = nullptr) const;
  FemFunction implicit_step(const FemFunction& u_prev, int k, StepStats* stats = nullptr) const;
  /// The configured scheme.
  FemFunction step(const FemFunction& u_prev, int k, StepStats* stats = nullptr) const;

  /// M (u - u_prev)/tau + K_w(lag) u + M_d(lag) u - F(t_k).
  Eigen::VectorXd residual(const FemFunction& u, const FemFunction& lag, const FemFunction& u_prev, int k) const;

  /// M / tau + K_w(lag) + M_d(lag).
  SymSparse lagged_system(const FemFunction& lag) const;

private:
  Eigen::VectorXd solve(const SymSparse& system, const Eigen::VectorXd& rhs) const;
  FemFunction kacanov(const FemFunction& u_prev, int k, StepStats& stats) const;
  FemFunction newton(const FemFunction& u_prev, int k, StepStats& stats) const;
  SymSparse newton_jacobian(const FemFunction& u) const;

  MeshPtr mesh_;
  SchemeConfig config_;
  SymSparse mass_;
  // p = 2 without lower-order term: the system matrix never changes
  std::shared_ptr<const Eigen::SimplicialLLT<SymSparse>> constant_factor_;
};

/// A computed evolution u^0, ..., u^K.  Immutable once built.
struct Trajectory {
  SchemeConfig config;
  std::vector<FemFunction> iterates;
  std::vector<StepStats> stats;  // stats[k-1] belongs to step k

  const MeshPtr& mesh() const { return iterates.front().mesh(); }
  int steps() const { return int(iterates.size()) - 1; }
  double tau() const { return config.tau(); }
};

FemFunction semi_implicit_step(const FemFunction& u_prev, const SchemeConfig& config, int k);

struct ImplicitStepResult {
  FemFunction u;
  StepStats stats;
};

ImplicitStepResult implicit_step(const FemFunction& u_prev, const SchemeConfig& config, int k);

struct KacanovIdentity {
  bool identical;
  double max_difference;
};

/// Compares the first Kacanov iterate of implicit step k with semi-implicit step k.
KacanovIdentity first_kacanov_equals_semi_implicit(const FemFunction& u_prev, const SchemeConfig& config,
                                                   int k = 1, double tolerance = 1e-12);

/// Runs k = 1..K.  A step failure is rethrown as SolverError carrying the step index.
/// Emits a warning when the lower-order coefficient is outside the convergence range.
Trajectory run_evolution(const FemFunction& u0, const SchemeConfig& config);

enum class InterpolantKind { Constant, Affine, Lagged };

/// Constant: u^k on (t_{k-1}, t_k].  Affine: linear between u^{k-1} and u^k.
/// Lagged: u^{k-1} on (t_{k-1}, t_k].  All return u^0 at t = 0.
FemFunction interpolant_eval(const Trajectory& trajectory, InterpolantKind kind, double t);

/// Index k with t in (t_{k-1}, t_k], 0 for t = 0.
int interval_index(const SchemeConfig& config, double t);

}  // namespace pflow

#endif  // PFLOW_SCHEMES_HPP
