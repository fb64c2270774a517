#include "pflow/schemes.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "pflow/errors.hpp"
#include "pflow/warnings.hpp"

namespace pflow {

void SchemeConfig::validate() const
{
  std::ostringstream msg;
  if (!(T > 0.0) || !std::isfinite(T)) msg << "final time T must be positive; ";
  if (K < 0) msg << "number of steps K must be >= 0; ";
  if (scheme == SchemeKind::SemiImplicit) {
    if (!(eps > 0.0 && eps < 1.0)) msg << "semi-implicit scheme requires eps in (0, 1), got " << eps << "; ";
  } else {
    if (!(eps >= 0.0 && eps < 1.0)) msg << "implicit scheme requires eps in [0, 1), got " << eps << "; ";
    if (eps == 0.0 && nf.delta() == 0.0 && nf.p() < 2.0)
      msg << "implicit scheme with eps = 0 requires delta > 0; ";
  }
  if (linear.kind == LinearSolverSettings::Kind::CG && (!(linear.tol_rel > 0.0) || linear.max_iter < 1))
    msg << "CG needs tol_rel > 0 and max_iter >= 1; ";
  if (!(nonlinear.tol_res > 0.0) || nonlinear.max_iter < 1)
    msg << "nonlinear solver needs tol_res > 0 and max_iter >= 1; ";
  const std::string problems = msg.str();
  if (!problems.empty()) throw DomainError("invalid scheme configuration: " + problems.substr(0, problems.size() - 2));
}

TimeStepper::TimeStepper(MeshPtr mesh, SchemeConfig config)
    : mesh_(std::move(mesh)), config_(std::move(config)), mass_(mass_matrix(*mesh_))
{
  config_.validate();
  if (config_.K == 0) return;
  const bool constant = config_.nf.p() == 2.0 && config_.coeff.is_zero() &&
                        config_.linear.kind == LinearSolverSettings::Kind::Cholesky;
  if (constant) {
    const SymSparse system = lagged_system(FemFunction::zero(mesh_));
    auto factor = std::make_shared<Eigen::SimplicialLLT<SymSparse>>(system);
    if (factor->info() == Eigen::Success) constant_factor_ = std::move(factor);
  }
}

Eigen::VectorXd TimeStepper::load(int k) const
{
  return load_vector(*mesh_, config_.source, config_.time(k));
}

SymSparse TimeStepper::lagged_system(const FemFunction& lag) const
{
  SymSparse system = mass_ / config_.tau();
  system += weighted_stiffness(lag, config_.nf, config_.eps, config_.regularization);
  if (!config_.coeff.is_zero()) system += weighted_mass(lag, config_.coeff);
  return system;
}

Eigen::VectorXd TimeStepper::residual(const FemFunction& u, const FemFunction& lag, const FemFunction& u_prev,
                                      int k) const
{
  const Eigen::VectorXd& x = u.coeffs();
  Eigen::VectorXd r = mass_ * (x - u_prev.coeffs()) / config_.tau();
  r += weighted_stiffness(lag, config_.nf, config_.eps, config_.regularization) * x;
  if (!config_.coeff.is_zero()) r += weighted_mass(lag, config_.coeff) * x;
  r -= load(k);
  return r;
}

Eigen::VectorXd TimeStepper::solve(const SymSparse& system, const Eigen::VectorXd& rhs) const
{
  if (config_.linear.kind == LinearSolverSettings::Kind::CG) {
    Eigen::ConjugateGradient<SymSparse, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(config_.linear.tol_rel);
    cg.setMaxIterations(config_.linear.max_iter);
    cg.compute(system);
    Eigen::VectorXd x = cg.solve(rhs);
    if (cg.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "CG did not reach tolerance " << config_.linear.tol_rel << " in " << cg.iterations()
          << " iterations (estimated error " << cg.error() << ")";
      throw SolverError(msg.str());
    }
    return x;
  }
  Eigen::SimplicialLLT<SymSparse> llt(system);
  if (llt.info() != Eigen::Success) {
    const Eigen::VectorXd diag = system.diagonal();
    const double estimate = diag.cwiseAbs().maxCoeff() / std::max(diag.cwiseAbs().minCoeff(), 1e-300);
    if (config_.coeff.c7() > 0.0)
      warn("semi-implicit system is not positive definite; with c7 > 0 solvability is conditional on tau");
    std::ostringstream msg;
    msg << "Cholesky factorization failed (diagonal ratio estimate of conditioning " << estimate << ")";
    throw SolverError(msg.str());
  }
  return llt.solve(rhs);
}

FemFunction TimeStepper::semi_implicit_step(const FemFunction& u_prev, int k, StepStats* stats) const
{
  const Eigen::VectorXd rhs = mass_ * u_prev.coeffs() / config_.tau() + load(k);
  SymSparse system;
  Eigen::VectorXd x;
  if (constant_factor_) {
    x = constant_factor_->solve(rhs);
  } else {
    system = lagged_system(u_prev);
    x = solve(system, rhs);
  }
  FemFunction u(mesh_, std::move(x));
  if (stats) {
    const double r = constant_factor_ ? residual(u, u_prev, u_prev, k).norm()
                                      : (system * u.coeffs() - rhs).norm();
    stats->iterations = 1;
    stats->residual = r;
    stats->history = {r};
  }
  return u;
}

FemFunction TimeStepper::kacanov(const FemFunction& u_prev, int k, StepStats& stats) const
{
  const Eigen::VectorXd force = load(k);
  const Eigen::VectorXd rhs = mass_ * u_prev.coeffs() / config_.tau() + force;
  const double target = config_.nonlinear.tol_res * (1.0 + force.norm());
  FemFunction v = u_prev;
  for (int j = 1; j <= config_.nonlinear.max_iter; ++j) {
    Eigen::VectorXd x = constant_factor_ ? Eigen::VectorXd(constant_factor_->solve(rhs)) : solve(lagged_system(v), rhs);
    v = FemFunction(mesh_, std::move(x));
    const double r = residual(v, v, u_prev, k).norm();
    stats.history.push_back(r);
    stats.iterations = j;
    stats.residual = r;
    if (r <= target) return v;
  }
  std::ostringstream msg;
  msg << "Kacanov iteration did not converge in " << config_.nonlinear.max_iter << " iterations (residual "
      << stats.residual << ", target " << target << ")";
  throw SolverError(msg.str(), stats.history);
}

SymSparse TimeStepper::newton_jacobian(const FemFunction& u) const
{
  const auto gradients = cell_gradients(u);
  std::vector<Eigen::Matrix2d> tensors(gradients.size());
  for (std::size_t c = 0; c < gradients.size(); ++c) {
    const double s = gradients[c].norm();
    const double w = regularized_weight(config_.nf, config_.eps, config_.regularization, s);
    if (!std::isfinite(w)) throw DegenerateWeightError("Newton Jacobian: degenerate flux weight");
    Eigen::Matrix2d tensor = w * Eigen::Matrix2d::Identity();
    if (s > 0.0) {
      const double dw = regularized_weight_derivative(config_.nf, config_.eps, config_.regularization, s);
      tensor += (dw / s) * gradients[c] * gradients[c].transpose();
    }
    tensors[c] = tensor;
  }
  SymSparse jacobian = mass_ / config_.tau();
  jacobian += cell_tensor_stiffness(*mesh_, tensors);
  if (!config_.coeff.is_zero()) jacobian += lower_order_jacobian(u, config_.coeff);
  return jacobian;
}

FemFunction TimeStepper::newton(const FemFunction& u_prev, int k, StepStats& stats) const
{
  const double target = config_.nonlinear.tol_res * (1.0 + load(k).norm());
  FemFunction u = u_prev;
  Eigen::VectorXd r = residual(u, u, u_prev, k);
  double norm = r.norm();
  stats.history.push_back(norm);
  stats.residual = norm;
  for (int j = 1; norm > target; ++j) {
    if (j > config_.nonlinear.max_iter) {
      std::ostringstream msg;
      msg << "damped Newton did not converge in " << config_.nonlinear.max_iter << " iterations (residual "
          << norm << ", target " << target << ")";
      throw SolverError(msg.str(), stats.history);
    }
    Eigen::SimplicialLDLT<SymSparse> ldlt(newton_jacobian(u));
    if (ldlt.info() != Eigen::Success) throw SolverError("Newton Jacobian factorization failed", stats.history);
    const Eigen::VectorXd direction = ldlt.solve(-r);

    // Armijo backtracking on the residual norm
    double lambda = 1.0;
    for (;;) {
      FemFunction trial(mesh_, u.coeffs() + lambda * direction);
      Eigen::VectorXd trial_r = residual(trial, trial, u_prev, k);
      const double trial_norm = trial_r.norm();
      if (trial_norm <= (1.0 - 1e-4 * lambda) * norm) {
        u = std::move(trial);
        r = std::move(trial_r);
        norm = trial_norm;
        break;
      }
      lambda *= 0.5;
      if (lambda < 1e-10) {
        // at the rounding floor the residual cannot decrease any further
        if (norm <= 1e3 * target) return u;
        throw SolverError("Newton line search failed to reduce the residual", stats.history);
      }
    }
    stats.history.push_back(norm);
    stats.iterations = j;
    stats.residual = norm;
  }
  return u;
}

FemFunction TimeStepper::implicit_step(const FemFunction& u_prev, int k, StepStats* stats) const
{
  StepStats local;
  FemFunction u = config_.nonlinear.kind == NonlinearSettings::Kind::Kacanov ? kacanov(u_prev, k, local)
                                                                               : newton(u_prev, k, local);
  if (stats) *stats = std::move(local);
  return u;
}

FemFunction TimeStepper::step(const FemFunction& u_prev, int k, StepStats* stats) const
{
  return config_.scheme == SchemeKind::SemiImplicit ? semi_implicit_step(u_prev, k, stats)
                                                    : implicit_step(u_prev, k, stats);
}

FemFunction semi_implicit_step(const FemFunction& u_prev, const SchemeConfig& config, int k)
{
  SchemeConfig cfg = config;
  cfg.scheme = SchemeKind::SemiImplicit;
  return TimeStepper(u_prev.mesh(), std::move(cfg)).semi_implicit_step(u_prev, k);
}

ImplicitStepResult implicit_step(const FemFunction& u_prev, const SchemeConfig& config, int k)
{
  SchemeConfig cfg = config;
  cfg.scheme = SchemeKind::Implicit;
  StepStats stats;
  FemFunction u = TimeStepper(u_prev.mesh(), std::move(cfg)).implicit_step(u_prev, k, &stats);
  return {std::move(u), std::move(stats)};
}

KacanovIdentity first_kacanov_equals_semi_implicit(const FemFunction& u_prev, const SchemeConfig& config, int k,
                                                   double tolerance)
{
  SchemeConfig semi = config;
  semi.scheme = SchemeKind::SemiImplicit;
  const FemFunction semi_step = TimeStepper(u_prev.mesh(), semi).semi_implicit_step(u_prev, k);

  SchemeConfig first = config;
  first.scheme = SchemeKind::Implicit;
  first.nonlinear.kind = NonlinearSettings::Kind::Kacanov;
  first.nonlinear.max_iter = 1;
  first.nonlinear.tol_res = std::numeric_limits<double>::max();
  const FemFunction kacanov_step = TimeStepper(u_prev.mesh(), first).implicit_step(u_prev, k);

  const double diff = (semi_step.coeffs() - kacanov_step.coeffs()).cwiseAbs().maxCoeff();
  return {diff <= tolerance, diff};
}

Trajectory run_evolution(const FemFunction& u0, const SchemeConfig& config)
{
  config.validate();
  if (!admissibility(config.coeff, config.nf.p(), config.scheme)) {
    warn("lower-order coefficient " + config.coeff.describe() + " is outside the convergence theory for the " +
         to_string(config.scheme) + " scheme at p = " + std::to_string(config.nf.p()));
  }
  Trajectory trajectory{config, {u0}, {}};
  if (config.K == 0) return trajectory;
  const TimeStepper stepper(u0.mesh(), config);
  trajectory.iterates.reserve(std::size_t(config.K) + 1);
  trajectory.stats.reserve(std::size_t(config.K));
  for (int k = 1; k <= config.K; ++k) {
    StepStats stats;
    try {
      trajectory.iterates.push_back(stepper.step(trajectory.iterates.back(), k, &stats));
    } catch (const SolverError& e) {
      throw SolverError("step " + std::to_string(k) + ": " + e.what(), e.residual_history(), k);
    } catch (const DegenerateWeightError& e) {
      throw DegenerateWeightError("step " + std::to_string(k) + ": " + e.what());
    }
    trajectory.stats.push_back(std::move(stats));
  }
  return trajectory;
}

int interval_index(const SchemeConfig& config, double t)
{
  if (!(t >= 0.0 && t <= config.T * (1.0 + 1e-12)))
    throw DomainError("interpolant time " + std::to_string(t) + " outside [0, T]");
  if (t == 0.0 || config.K == 0) return 0;
  const double s = t * config.K / config.T;
  const int k = int(std::ceil(s - 1e-9));
  return std::clamp(k, 1, config.K);
}

FemFunction interpolant_eval(const Trajectory& trajectory, InterpolantKind kind, double t)
{
  const int k = interval_index(trajectory.config, t);
  if (k == 0) return trajectory.iterates.front();
  switch (kind) {
    case InterpolantKind::Constant: return trajectory.iterates[std::size_t(k)];
    case InterpolantKind::Lagged: return trajectory.iterates[std::size_t(k - 1)];
    case InterpolantKind::Affine: {
      const double s = t / trajectory.tau();
      const double wk = s - (k - 1);
      const double wprev = double(k) - s;
      const auto& uk = trajectory.iterates[std::size_t(k)];
      const auto& uprev = trajectory.iterates[std::size_t(k - 1)];
      return FemFunction(uk.mesh(), wk * uk.coeffs() + wprev * uprev.coeffs());
    }
  }
  return trajectory.iterates.front();
}

}  // namespace pflow
