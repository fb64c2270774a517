#include "pflow/ledgers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

namespace pflow {

StepQuantities step_quantities(const Trajectory& trajectory)
{
  const SchemeConfig& cfg = trajectory.config;
  const MeshPtr& mesh = trajectory.mesh();
  const SymSparse mass = mass_matrix(*mesh);
  const bool semi = cfg.scheme == SchemeKind::SemiImplicit;
  const int K = trajectory.steps();
  const double tau = K > 0 ? cfg.tau() : 0.0;

  Eigen::SimplicialLLT<SymSparse> mass_factor;
  if (cfg.source && K > 0) mass_factor.compute(mass);

  StepQuantities q;
  for (const FemFunction& u : trajectory.iterates) {
    q.energy.push_back(energy(u, cfg.nf, cfg.eps, cfg.regularization));
    q.l2_squared.push_back(u.coeffs().dot(mass * u.coeffs()));
  }
  for (int k = 1; k <= K; ++k) {
    const FemFunction& prev = trajectory.iterates[std::size_t(k - 1)];
    const FemFunction& cur = trajectory.iterates[std::size_t(k)];
    const FemFunction dtau(mesh, (cur.coeffs() - prev.coeffs()) / tau);
    q.dtau_squared.push_back(dtau.coeffs().dot(mass * dtau.coeffs()));

    const Eigen::VectorXd lag_weights = flux_weights(prev, cfg.nf, cfg.eps, cfg.regularization);
    q.dissipation.push_back(weighted_dissipation(lag_weights, dtau));
    q.weighted_grad.push_back(
        semi ? weighted_dissipation(lag_weights, cur)
             : weighted_dissipation(flux_weights(cur, cfg.nf, cfg.eps, cfg.regularization), cur));

    if (cfg.source) {
      const Eigen::VectorXd F = load_vector(*mesh, cfg.source, cfg.time(k));
      q.source_squared.push_back(F.dot(mass_factor.solve(F)));
    } else {
      q.source_squared.push_back(0.0);
    }
    q.lower_order.push_back(cfg.coeff.is_zero() ? 0.0 : lower_order_square_norm(prev, cur, cfg.coeff));

    const double r = std::size_t(k - 1) < trajectory.stats.size() ? trajectory.stats[std::size_t(k - 1)].residual : 0.0;
    q.residual_energy.push_back(r * (cur.coeffs() - prev.coeffs()).norm());
    q.residual_apriori.push_back(tau * r * cur.coeffs().norm());
  }
  return q;
}

namespace {

// Accumulates lhs(l) <= rhs(l) + allowance(l) and keeps the tightest step.
class LedgerBuilder {
public:
  LedgerBuilder(std::string name, bool applicable, double rel_slack) : rel_slack_(rel_slack)
  {
    summary_.name = std::move(name);
    summary_.applicable = applicable;
  }

  void observe(int step, double lhs, double rhs, double solver_allowance)
  {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::min()});
    const double allowance = rel_slack_ * std::max(std::abs(lhs), std::abs(rhs)) + solver_allowance;
    const double margin = (rhs + allowance - lhs) / scale;
    if (!(margin >= 0.0)) summary_.holds = false;
    if (first_ || margin < worst_margin_) {
      first_ = false;
      worst_margin_ = margin;
      summary_.worst_step = step;
      summary_.lhs = lhs;
      summary_.rhs = rhs;
      summary_.allowance = allowance;
      summary_.slack = rhs - lhs;
    }
  }

  LedgerSummary finish() const { return summary_; }

private:
  LedgerSummary summary_;
  double rel_slack_;
  double worst_margin_ = 0.0;
  bool first_ = true;
};

}  // namespace

std::vector<LedgerSummary> energy_ledgers(const Trajectory& trajectory, double rel_slack)
{
  return energy_ledgers(trajectory, step_quantities(trajectory), rel_slack);
}

std::vector<LedgerSummary> energy_ledgers(const Trajectory& trajectory, const StepQuantities& q, double rel_slack)
{
  const SchemeConfig& cfg = trajectory.config;
  const bool semi = cfg.scheme == SchemeKind::SemiImplicit;
  const bool pure = !cfg.source && cfg.coeff.is_zero();
  const int K = trajectory.steps();
  const double tau = K > 0 ? cfg.tau() : 0.0;
  const double c7 = cfg.coeff.c7();

  LedgerBuilder stability("energy-stability", semi && pure, rel_slack);
  LedgerBuilder bound("energy-bound", semi, rel_slack);
  LedgerBuilder apriori("apriori", semi, rel_slack);
  LedgerBuilder energy_implicit("energy-implicit", !semi && pure, rel_slack);
  LedgerBuilder apriori_implicit("apriori-implicit", !semi, rel_slack);

  double sum_dtau = 0.0, sum_dissipation = 0.0, sum_weighted = 0.0, sum_l2 = 0.0;
  double sum_source = 0.0, sum_lower = 0.0, sum_res_energy = 0.0, sum_res_apriori = 0.0;
  // l = 0 is an identity in every ledger
  for (int l = 1; l <= K; ++l) {
    const std::size_t i = std::size_t(l - 1);
    sum_dtau += tau * q.dtau_squared[i];
    sum_dissipation += tau * tau * q.dissipation[i];
    sum_weighted += tau * q.weighted_grad[i];
    sum_l2 += tau * q.l2_squared[std::size_t(l)];
    sum_source += tau * q.source_squared[i];
    sum_lower += tau * q.lower_order[i];
    sum_res_energy += q.residual_energy[i];
    sum_res_apriori += q.residual_apriori[i];
    const double E = q.energy[std::size_t(l)];
    const double E0 = q.energy.front();
    const double half_l2 = 0.5 * q.l2_squared[std::size_t(l)];
    const double half_l2_0 = 0.5 * q.l2_squared.front();
    if (semi) {
      if (pure) stability.observe(l, E + sum_dtau + 0.5 * sum_dissipation, E0, sum_res_energy);
      bound.observe(l, E + 0.5 * sum_dtau + 0.5 * sum_dissipation, E0 + sum_source + sum_lower, sum_res_energy);
      apriori.observe(l, half_l2 + sum_weighted, half_l2_0 + (c7 + 1.0) * sum_l2 + sum_source, sum_res_apriori);
    } else {
      if (pure) energy_implicit.observe(l, E + sum_dtau, E0, sum_res_energy);
      apriori_implicit.observe(l, half_l2 + sum_weighted, half_l2_0 + (c7 + 0.5) * sum_l2 + 0.5 * sum_source,
                               sum_res_apriori);
    }
  }
  return {stability.finish(), bound.finish(), apriori.finish(), energy_implicit.finish(), apriori_implicit.finish()};
}

bool ledgers_hold(const std::vector<LedgerSummary>& ledgers)
{
  return std::all_of(ledgers.begin(), ledgers.end(),
                     [](const LedgerSummary& l) { return !l.applicable || l.holds; });
}

}  // namespace pflow
