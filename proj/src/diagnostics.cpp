#include "pflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pflow/certification.hpp"
#include "pflow/errors.hpp"

namespace pflow {

namespace {

void require_semi_implicit(const Trajectory& trajectory, const char* what)
{
  if (trajectory.config.scheme != SchemeKind::SemiImplicit)
    throw DomainError(std::string(what) + ": requires a semi-implicit trajectory");
}

// (1 - kappa0) phi'(eps) and the balancing scale (delta + eps)^{p-2} = phi'(eps) / eps.
double consistency_bound(const SchemeConfig& cfg)
{
  return (1.0 - cfg.nf.kappa0()) * cfg.nf.derivative(cfg.eps);
}

double balance_scale(const SchemeConfig& cfg)
{
  return std::pow(cfg.nf.delta() + cfg.eps, cfg.nf.p() - 2.0);
}

double default_alpha(const Trajectory& trajectory, const DiscrepancyOptions& options)
{
  if (options.alpha) {
    if (!(*options.alpha > 0.0)) throw DomainError("discrepancy: alpha override must be positive");
    return *options.alpha;
  }
  return std::sqrt(trajectory.tau() * balance_scale(trajectory.config));
}

}  // namespace

DiscrepancyRecord discrepancy_terms(const Trajectory& trajectory, int k, const DiscrepancyOptions& options)
{
  require_semi_implicit(trajectory, "discrepancy_terms");
  if (k < 1 || k > trajectory.steps()) throw DomainError("discrepancy_terms: step index outside 1..K");
  const SchemeConfig& cfg = trajectory.config;
  const TriMesh& mesh = *trajectory.mesh();

  const auto current = cell_gradients(trajectory.iterates[std::size_t(k)]);
  const auto previous = cell_gradients(trajectory.iterates[std::size_t(k - 1)]);
  const ElementGradientTable table = element_gradients(mesh);

  DiscrepancyRecord record;
  record.k = k;
  record.E_cell_bound = consistency_bound(cfg);
  record.E_bound = record.E_cell_bound * mesh.total_area();
  record.alpha_eps = default_alpha(trajectory, options);

  Eigen::VectorXd pairing = Eigen::VectorXd::Zero(Eigen::Index(mesh.num_dofs()));
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Vec2d& a = current[c];
    const Vec2d regularized = regularized_flux(cfg.nf, cfg.eps, cfg.regularization, a);
    const double e = (op_A(cfg.nf, 0.0, a) - regularized).norm();
    record.E_norm_L1 += table.areas[c] * e;
    record.E_max = std::max(record.E_max, e);

    const double lag_weight = regularized_weight(cfg.nf, cfg.eps, cfg.regularization, previous[c].norm());
    const Vec2d f = regularized - lag_weight * a;
    const Cell& cell = mesh.cells()[c];
    for (int v = 0; v < 3; ++v) {
      const int dof = mesh.dof_of_node(cell[v]);
      if (dof >= 0) pairing[dof] += table.areas[c] * f.dot(table.gradients[c][std::size_t(v)]);
    }
  }
  const Eigen::VectorXd norms = (mass_matrix(mesh).diagonal() + stiffness_matrix(mesh).diagonal()).cwiseSqrt();
  for (Eigen::Index i = 0; i < pairing.size(); ++i)
    record.F_dual_norm = std::max(record.F_dual_norm, std::abs(pairing[i]) / norms[i]);
  record.within_bound = record.E_max <= record.E_cell_bound * (1.0 + 1e-10) + 1e-14;
  return record;
}

DiscrepancyBreakdown discrepancy_breakdown(const Trajectory& trajectory, const DiscrepancyOptions& options)
{
  require_semi_implicit(trajectory, "discrepancy_total");
  const SchemeConfig& cfg = trajectory.config;
  DiscrepancyBreakdown b;
  b.lipschitz = options.lipschitz ? *options.lipschitz : regularized_lipschitz_constant(cfg.nf.p());
  if (trajectory.steps() == 0) {
    b.consistency_term = consistency_bound(cfg);
    b.total = b.consistency_term;
    return b;
  }
  b.alpha = default_alpha(trajectory, options);
  const double tau = trajectory.tau();
  for (int k = 1; k <= trajectory.steps(); ++k) {
    const FemFunction& prev = trajectory.iterates[std::size_t(k - 1)];
    const FemFunction& cur = trajectory.iterates[std::size_t(k)];
    const FemFunction dtau(cur.mesh(), (cur.coeffs() - prev.coeffs()) / tau);
    b.dissipation += tau * tau * weighted_dissipation(flux_weights(prev, cfg.nf, cfg.eps, cfg.regularization), dtau);
  }
  b.consistency_term = consistency_bound(cfg);
  b.dissipation_term = b.lipschitz * b.lipschitz * b.alpha * b.dissipation;
  b.balance_term = tau * balance_scale(cfg) / (2.0 * b.alpha);
  b.total = b.consistency_term + b.dissipation_term + b.balance_term;
  return b;
}

double discrepancy_total(const Trajectory& trajectory, const DiscrepancyOptions& options)
{
  return discrepancy_breakdown(trajectory, options).total;
}

namespace {

// Subintervals of the union of two uniform grids on [0, T], as (length, fine index, coarse index).
struct UnionPiece {
  double length;
  int fine;
  int coarse;
};

std::vector<UnionPiece> union_grid(const Trajectory& fine, const Trajectory& coarse)
{
  const double T = fine.config.T;
  if (std::abs(T - coarse.config.T) > 1e-12 * T) throw MismatchError("trajectories cover different time spans");
  std::vector<double> breaks;
  for (int k = 0; k <= fine.steps(); ++k) breaks.push_back(fine.config.time(k));
  for (int k = 0; k <= coarse.steps(); ++k) breaks.push_back(coarse.config.time(k));
  std::sort(breaks.begin(), breaks.end());
  std::vector<UnionPiece> pieces;
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    const double length = breaks[i] - breaks[i - 1];
    if (length <= 1e-12 * T) continue;
    const double mid = 0.5 * (breaks[i] + breaks[i - 1]);
    pieces.push_back({length, interval_index(fine.config, mid), interval_index(coarse.config, mid)});
  }
  return pieces;
}

std::vector<FemFunction> lift(const Trajectory& coarse, const MeshPtr& target)
{
  std::vector<FemFunction> lifted;
  lifted.reserve(coarse.iterates.size());
  for (const FemFunction& u : coarse.iterates) {
    if (u.mesh()->id() == target->id())
      lifted.push_back(u);
    else
      lifted.push_back(prolong(u, target));
  }
  return lifted;
}

}  // namespace

double cauchy_linf_l2(const Trajectory& fine, const Trajectory& coarse)
{
  const auto lifted = lift(coarse, fine.mesh());
  double worst = 0.0;
  for (const UnionPiece& piece : union_grid(fine, coarse)) {
    const FemFunction diff(fine.mesh(), fine.iterates[std::size_t(piece.fine)].coeffs() -
                                            lifted[std::size_t(piece.coarse)].coeffs());
    worst = std::max(worst, norm_L2(diff));
  }
  return worst;
}

double cauchy_lp_w1p(const Trajectory& fine, const Trajectory& coarse, double p)
{
  const auto lifted = lift(coarse, fine.mesh());
  double sum = 0.0;
  for (const UnionPiece& piece : union_grid(fine, coarse)) {
    const FemFunction diff(fine.mesh(), fine.iterates[std::size_t(piece.fine)].coeffs() -
                                            lifted[std::size_t(piece.coarse)].coeffs());
    sum += piece.length * std::pow(seminorm_W1p(diff, p), p);
  }
  return std::pow(sum, 1.0 / p);
}

double trajectory_gap(const Trajectory& a, const Trajectory& b)
{
  if (a.steps() != b.steps()) throw MismatchError("trajectory_gap: different step counts");
  double gap = 0.0;
  for (std::size_t k = 0; k < a.iterates.size(); ++k) {
    const FemFunction diff(a.mesh(), a.iterates[k].coeffs() - b.iterates[k].coeffs());
    gap = std::max(gap, norm_L2(diff));
  }
  return gap;
}

void StudyConfig::validate() const
{
  if (levels < 1) throw DomainError("study: levels must be >= 1");
  if (base_n < 1) throw DomainError("study: base_n must be >= 1");
  if (base.K < 1) throw DomainError("study: base K must be >= 1");
  base.validate();
}

SchemeConfig level_config(const StudyConfig& study, int level)
{
  const SchemeConfig& base = study.base;
  SchemeConfig cfg = base;
  cfg.eps = base.eps * std::ldexp(1.0, -level);
  if (study.coupling == StudyConfig::Coupling::Default) {
    const double exponent = 2.0 - base.nf.p();
    const double c = base.tau() / std::pow(base.eps, exponent);
    const double tau = c * std::pow(cfg.eps, exponent) * std::pow(2.0, -0.5 * level);
    cfg.K = std::max(1, int(std::lround(base.T / tau)));
  }
  return cfg;
}

namespace {

bool strictly_decreasing(const std::vector<double>& values)
{
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] < values[i - 1])) return false;
  return true;
}

struct LevelRun {
  StudyLevel level;
  std::optional<Trajectory> semi;
};

LevelRun run_level(const StudyConfig& study, int index, const FemFunction& u0, double max_initial_energy)
{
  LevelRun run;
  StudyLevel& L = run.level;
  SchemeConfig cfg = level_config(study, index);
  L.level = index;
  L.n = study.base_n << index;
  L.h = u0.mesh()->mesh_size();
  L.eps = cfg.eps;
  L.K = cfg.K;
  L.tau = cfg.tau();
  L.coupling_product = L.tau * cfg.nf.second_derivative(cfg.eps);
  try {
    cfg.scheme = SchemeKind::SemiImplicit;
    Trajectory semi = run_evolution(u0, cfg);
    SchemeConfig implicit_cfg = cfg;
    implicit_cfg.scheme = SchemeKind::Implicit;
    const Trajectory implicit = run_evolution(u0, implicit_cfg);
    for (const StepStats& s : implicit.stats) L.implicit_iterations += s.iterations;

    for (const FemFunction& u : semi.iterates) {
      L.max_l2 = std::max(L.max_l2, norm_L2(u));
      L.max_w1p = std::max(L.max_w1p, seminorm_W1p(u, cfg.nf.p()));
    }
    L.final_energy = energy(semi.iterates.back(), cfg.nf, cfg.eps, cfg.regularization);
    L.gap = trajectory_gap(semi, implicit);
    L.discrepancy = discrepancy_breakdown(semi, study.discrepancy);
    for (int k = 1; k <= semi.steps(); ++k) {
      const DiscrepancyRecord record = discrepancy_terms(semi, k, study.discrepancy);
      const double ratio = record.E_cell_bound > 0.0 ? record.E_max / record.E_cell_bound : 0.0;
      L.E_max_ratio = std::max(L.E_max_ratio, ratio);
      L.E_within_bound = L.E_within_bound && record.within_bound;
    }

    const StepQuantities q = step_quantities(semi);
    double data = 0.0;
    for (int k = 0; k < semi.steps(); ++k) data += L.tau * (q.source_squared[std::size_t(k)] + q.lower_order[std::size_t(k)]);
    L.dissipation_bound = 2.0 * (max_initial_energy + data);
    L.semi_ledgers = energy_ledgers(semi, q);
    L.implicit_ledgers = energy_ledgers(implicit);
    L.ledgers_hold = ledgers_hold(L.semi_ledgers) && ledgers_hold(L.implicit_ledgers);
    run.semi = std::move(semi);
  } catch (const std::exception& e) {
    L.failed = true;
    L.failure = e.what();
  }
  return run;
}

struct SeriesResult {
  std::vector<StudyLevel> levels;
  std::vector<double> linf_l2;
  std::vector<double> lp_w1p;
};

SeriesResult run_series(const StudyConfig& study)
{
  std::vector<MeshPtr> meshes{unit_square_mesh(study.base_n)};
  for (int n = 1; n < study.levels; ++n) meshes.push_back(refine_red(*meshes.back()));
  std::vector<FemFunction> initial{interpolate_nodal(study.initial, meshes.front())};
  for (int n = 1; n < study.levels; ++n) initial.push_back(prolong(initial.back(), meshes[std::size_t(n)]));

  double max_initial_energy = 0.0;
  for (int n = 0; n < study.levels; ++n) {
    const SchemeConfig cfg = level_config(study, n);
    max_initial_energy =
        std::max(max_initial_energy, energy(initial[std::size_t(n)], cfg.nf, cfg.eps, cfg.regularization));
  }

  SeriesResult result;
  std::optional<Trajectory> previous;
  for (int n = 0; n < study.levels; ++n) {
    LevelRun run = run_level(study, n, initial[std::size_t(n)], max_initial_energy);
    if (n > 0) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      const bool both = previous && run.semi;
      result.linf_l2.push_back(both ? cauchy_linf_l2(*run.semi, *previous) : nan);
      result.lp_w1p.push_back(both ? cauchy_lp_w1p(*run.semi, *previous, study.base.nf.p()) : nan);
    }
    previous = std::move(run.semi);
    result.levels.push_back(std::move(run.level));
  }
  return result;
}

}  // namespace

StudyReport run_study(const StudyConfig& study)
{
  study.validate();
  if (!study.initial) throw DomainError("study: initial field missing");
  StudyReport report;
  report.p = study.base.nf.p();
  report.coupling = study.coupling;

  SeriesResult main = run_series(study);
  report.levels = std::move(main.levels);
  report.cauchy_linf_l2 = std::move(main.linf_l2);
  report.cauchy_lp_w1p = std::move(main.lp_w1p);

  std::vector<double> products, gaps, totals;
  StudyChecks& checks = report.checks;
  bool gaps_coincide = true;
  for (const StudyLevel& L : report.levels) {
    products.push_back(L.coupling_product);
    gaps.push_back(L.gap);
    totals.push_back(L.discrepancy.total);
    gaps_coincide = gaps_coincide && L.gap <= kSchemeCoincidence;
    checks.no_failures = checks.no_failures && !L.failed;
    checks.E_bound = checks.E_bound && !L.failed && L.E_within_bound;
    checks.ledgers = checks.ledgers && !L.failed && L.ledgers_hold;
    checks.dissipation_uniform = checks.dissipation_uniform && !L.failed &&
                                 L.discrepancy.dissipation <= L.dissipation_bound * (1.0 + 1e-9);
  }
  // at p = 2 tau phi''(eps) = tau, so the coupling reduces to tau -> 0
  checks.coupling_product_decreasing = strictly_decreasing(products);
  checks.cauchy_decreasing = strictly_decreasing(report.cauchy_linf_l2);
  checks.gap_decreasing = gaps_coincide || strictly_decreasing(gaps);
  checks.discrepancy_decreasing = strictly_decreasing(totals);

  if (study.negative_control) {
    StudyConfig control = study;
    control.coupling = StudyConfig::Coupling::FixedTau;
    control.negative_control = false;
    SeriesResult series = run_series(control);
    report.has_control = true;
    std::vector<double> control_gaps, control_totals;
    bool failed = false;
    for (const StudyLevel& L : series.levels) {
      control_gaps.push_back(L.gap);
      control_totals.push_back(L.discrepancy.total);
      failed = failed || L.failed;
    }
    report.control_levels = std::move(series.levels);
    report.control_behaves = !failed && (!strictly_decreasing(control_totals) || !strictly_decreasing(control_gaps));
  }
  return report;
}

HeatErrorResult heat_manufactured_error(const SchemeConfig& config, int n)
{
  if (config.nf.p() != 2.0) throw DomainError("heat_manufactured_error: requires p = 2");
  if (!config.coeff.is_zero()) throw DomainError("heat_manufactured_error: requires a zero lower-order term");
  SchemeConfig cfg = config;
  cfg.source = nullptr;
  cfg.validate();

  constexpr double pi = std::numbers::pi;
  const double lambda = 2.0 * pi * pi;
  auto exact_at = [&](double t) {
    return [t, lambda](double x, double y) { return std::exp(-lambda * t) * std::sin(pi * x) * std::sin(pi * y); };
  };

  const MeshPtr mesh = unit_square_mesh(n);
  FemFunction u = interpolate_nodal(exact_at(0.0), mesh);
  HeatErrorResult result;
  result.errors.push_back(l2_error(u, exact_at(0.0)));
  if (cfg.K > 0) {
    const TimeStepper stepper(mesh, cfg);
    for (int k = 1; k <= cfg.K; ++k) {
      u = stepper.step(u, k);
      result.errors.push_back(l2_error(u, exact_at(cfg.time(k))));
    }
  }
  result.max_error = *std::max_element(result.errors.begin(), result.errors.end());
  return result;
}

}  // namespace pflow
