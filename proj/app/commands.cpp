#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <json.hpp>

#include "config.hpp"
#include "pflow/certification.hpp"
#include "pflow/errors.hpp"
#include "pflow/export.hpp"
#include "pflow/ledgers.hpp"

namespace pflow::app {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::ofstream open_output(const fs::path& path)
{
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

// nlohmann writes non-finite numbers as null; keep them distinguishable.
Json number(double value)
{
  if (std::isfinite(value)) return value;
  return format_double(value);
}

Json scheme_json(const SchemeConfig& s)
{
  return Json{
      {"p", s.nf.p()},
      {"delta", s.nf.delta()},
      {"eps", s.eps},
      {"regularization", to_string(s.regularization)},
      {"T", s.T},
      {"K", s.K},
      {"tau", s.K > 0 ? number(s.tau()) : Json(nullptr)},
      {"lower_order", s.coeff.describe()},
      {"scheme", to_string(s.scheme)},
      {"linear_solver", s.linear.kind == LinearSolverSettings::Kind::CG ? "cg" : "cholesky"},
      {"nonlinear", s.nonlinear.kind == NonlinearSettings::Kind::Kacanov ? "kacanov" : "newton"},
      {"tol_res", s.nonlinear.tol_res},
  };
}

Json field_json(const FieldSpec& spec)
{
  Json params = Json::object();
  for (const auto& [key, value] : spec.params) params[key] = value;
  return Json{{"name", spec.name}, {"params", params}};
}

Json ledger_json(const std::vector<LedgerSummary>& ledgers)
{
  Json out = Json::array();
  for (const LedgerSummary& l : ledgers) {
    if (!l.applicable) continue;
    out.push_back(Json{{"name", l.name},
                       {"holds", l.holds},
                       {"worst_step", l.worst_step},
                       {"lhs", number(l.lhs)},
                       {"rhs", number(l.rhs)},
                       {"allowance", number(l.allowance)},
                       {"slack", number(l.slack)}});
  }
  return out;
}

Json breakdown_json(const DiscrepancyBreakdown& b)
{
  return Json{{"alpha", number(b.alpha)},
              {"lipschitz", number(b.lipschitz)},
              {"dissipation", number(b.dissipation)},
              {"consistency_term", number(b.consistency_term)},
              {"dissipation_term", number(b.dissipation_term)},
              {"balance_term", number(b.balance_term)},
              {"total", number(b.total)}};
}

Json level_json(const StudyLevel& L)
{
  return Json{{"level", L.level},
              {"n", L.n},
              {"h", number(L.h)},
              {"eps", number(L.eps)},
              {"tau", number(L.tau)},
              {"K", L.K},
              {"tau_phi2", number(L.coupling_product)},
              {"failed", L.failed},
              {"failure", L.failure},
              {"max_L2", number(L.max_l2)},
              {"max_W1p", number(L.max_w1p)},
              {"final_energy", number(L.final_energy)},
              {"gap", number(L.gap)},
              {"discrepancy", breakdown_json(L.discrepancy)},
              {"E_ratio", number(L.E_max_ratio)},
              {"E_within_bound", L.E_within_bound},
              {"dissipation_bound", number(L.dissipation_bound)},
              {"implicit_iterations", L.implicit_iterations},
              {"semi_implicit_ledgers", ledger_json(L.semi_ledgers)},
              {"implicit_ledgers", ledger_json(L.implicit_ledgers)},
              {"ledgers_hold", L.ledgers_hold}};
}

Json numbers(const std::vector<double>& values)
{
  Json out = Json::array();
  for (double v : values) out.push_back(number(v));
  return out;
}

void write_json(const fs::path& path, const Json& json)
{
  std::ofstream out = open_output(path);
  out << json.dump(2) << '\n';
}

}  // namespace

int cmd_run(const std::string& config_path, const std::optional<std::string>& output_dir, std::ostream& log)
{
  try {
    const RunConfig config = load_config(config_path);
    const fs::path dir = output_dir ? fs::path(*output_dir) : fs::path(config.output_directory);
    const MeshPtr mesh = build_mesh(config);
    const FemFunction u0 = build_initial(config, mesh);
    const Trajectory trajectory = run_evolution(u0, config.scheme);
    const SchemeConfig& cfg = trajectory.config;

    {
      std::ofstream out = open_output(dir / "trajectory.csv");
      write_trajectory_csv(out, trajectory);
    }
    if (config.snapshots > 0) {
      for (int k = 0; k <= trajectory.steps(); k += config.snapshots) {
        std::ostringstream name;
        name << "u_" << std::setw(6) << std::setfill('0') << k << ".csv";
        std::ofstream out = open_output(dir / "snapshots" / name.str());
        write_function_csv(out, trajectory.iterates[std::size_t(k)]);
      }
    }

    const StepQuantities q = step_quantities(trajectory);
    const auto ledgers = energy_ledgers(trajectory, q);
    const bool semi = cfg.scheme == SchemeKind::SemiImplicit;
    bool bound_ok = true;

    Json steps = Json::array();
    for (int k = 0; k <= trajectory.steps(); ++k) {
      Json row{{"k", k},
               {"t", k == 0 ? 0.0 : cfg.time(k)},
               {"energy", number(q.energy[std::size_t(k)])},
               {"L2_norm", number(std::sqrt(q.l2_squared[std::size_t(k)]))}};
      if (k > 0) {
        row["solver_iterations"] = trajectory.stats[std::size_t(k - 1)].iterations;
        row["residual"] = number(trajectory.stats[std::size_t(k - 1)].residual);
        if (semi) {
          const DiscrepancyRecord d = discrepancy_terms(trajectory, k);
          bound_ok = bound_ok && d.within_bound;
          row["discrepancy"] = Json{{"E_norm_L1", number(d.E_norm_L1)},
                                    {"E_max", number(d.E_max)},
                                    {"E_cell_bound", number(d.E_cell_bound)},
                                    {"E_bound", number(d.E_bound)},
                                    {"F_dual_norm", number(d.F_dual_norm)},
                                    {"alpha_eps", number(d.alpha_eps)},
                                    {"within_bound", d.within_bound}};
        }
      }
      steps.push_back(std::move(row));
    }

    const bool ok = ledgers_hold(ledgers) && bound_ok;
    Json report{{"schema", "pflow.run.v1"},
                {"config", Json{{"mesh", Json{{"n", config.n}, {"refinements", config.refinements}}},
                                {"scheme", scheme_json(cfg)},
                                {"initial", field_json(config.initial)},
                                {"source", field_json(config.source)},
                                {"seed", config.seed}}},
                {"mesh", Json{{"nodes", mesh->num_nodes()},
                              {"cells", mesh->num_cells()},
                              {"dofs", mesh->num_dofs()},
                              {"h", mesh->mesh_size()}}},
                {"steps", steps},
                {"ledgers", ledger_json(ledgers)}};
    if (semi && trajectory.steps() > 0) report["discrepancy_total"] = breakdown_json(discrepancy_breakdown(trajectory));
    report["status"] = ok ? "ok" : "violation";
    write_json(dir / "diagnostics.json", report);

    log << "run: " << trajectory.steps() << " steps of the " << to_string(cfg.scheme) << " scheme, p = " << cfg.nf.p()
        << ", eps = " << cfg.eps << '\n';
    for (const LedgerSummary& l : ledgers)
      if (l.applicable) log << "  ledger " << l.name << ": " << (l.holds ? "holds" : "VIOLATED") << '\n';
    if (!bound_ok) log << "  discrepancy bound: VIOLATED\n";
    log << "  output: " << dir.string() << '\n';
    return ok ? kSuccess : kViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_study(const std::string& config_path, const std::optional<std::string>& output_dir, std::ostream& log)
{
  try {
    const RunConfig config = load_config(config_path);
    const StudyConfig study = build_study(config);
    const fs::path dir = output_dir ? fs::path(*output_dir) : fs::path(config.output_directory);
    const StudyReport report = run_study(study);

    Json levels = Json::array();
    for (const StudyLevel& L : report.levels) levels.push_back(level_json(L));
    const StudyChecks& c = report.checks;
    Json json{{"schema", "pflow.study.v1"},
              {"config", Json{{"base_n", study.base_n},
                              {"levels", study.levels},
                              {"coupling", study.coupling == StudyConfig::Coupling::Default ? "default" : "fixed-tau"},
                              {"scheme", scheme_json(study.base)},
                              {"initial", field_json(config.initial)},
                              {"source", field_json(config.source)}}},
              {"levels", levels},
              {"cauchy_Linf_L2", numbers(report.cauchy_linf_l2)},
              {"cauchy_Lp_W1p", numbers(report.cauchy_lp_w1p)},
              {"checks", Json{{"coupling_product_decreasing", c.coupling_product_decreasing},
                              {"cauchy_decreasing", c.cauchy_decreasing},
                              {"gap_decreasing", c.gap_decreasing},
                              {"discrepancy_decreasing", c.discrepancy_decreasing},
                              {"E_bound", c.E_bound},
                              {"ledgers", c.ledgers},
                              {"dissipation_uniform", c.dissipation_uniform},
                              {"no_failures", c.no_failures}}}};
    if (report.has_control) {
      Json control = Json::array();
      for (const StudyLevel& L : report.control_levels) control.push_back(level_json(L));
      json["negative_control"] = Json{{"levels", control}, {"behaves", report.control_behaves}};
    }
    json["passed"] = report.passed();
    write_json(dir / "study.json", json);
    {
      std::ofstream out = open_output(dir / "study.csv");
      write_study_csv(out, report);
    }

    log << "study: p = " << report.p << ", " << report.levels.size() << " levels\n";
    log << "  level      n        eps        tau      K          gap   discrepancy       cauchy\n";
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
      const StudyLevel& L = report.levels[i];
      log << "  " << std::setw(5) << L.level << std::setw(7) << L.n << std::setw(11) << std::setprecision(4) << L.eps
          << std::setw(11) << L.tau << std::setw(7) << L.K << std::setw(13) << L.gap << std::setw(14)
          << L.discrepancy.total << std::setw(13)
          << (i > 0 ? format_double(report.cauchy_linf_l2[i - 1]).substr(0, 10) : std::string("-"))
          << (L.failed ? "  FAILED: " + L.failure : "") << '\n';
    }
    auto flag = [&log](const char* name, bool value) { log << "  " << name << ": " << (value ? "ok" : "FAIL") << '\n'; };
    flag("tau phi''(eps) decreasing", c.coupling_product_decreasing);
    flag("Cauchy differences decreasing", c.cauchy_decreasing);
    flag("scheme gap decreasing", c.gap_decreasing);
    flag("discrepancy total decreasing", c.discrepancy_decreasing);
    flag("per-cell discrepancy bound", c.E_bound);
    flag("energy ledgers", c.ledgers);
    flag("dissipation uniformly bounded", c.dissipation_uniform);
    flag("all levels solved", c.no_failures);
    if (report.has_control) flag("negative control fails to decrease", report.control_behaves);
    log << "  output: " << dir.string() << '\n';

    if (report.passed()) return kSuccess;
    return c.no_failures ? kViolation : kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_check_lemmas(std::uint64_t seed, std::size_t samples, const std::optional<std::string>& output_file,
                     std::ostream& log)
{
  try {
    if (samples < 1) throw ConfigError("check-lemmas: samples must be >= 1");
    const CertificationReport report = certify_lemmas(seed, samples);
    log << "check-lemmas: seed " << seed << ", " << samples << " samples per row\n";
    log << std::left << "  " << std::setw(34) << "row" << std::setw(10) << "kind" << std::right << std::setw(10)
        << "samples" << std::setw(12) << "violations" << std::setw(15) << "min" << std::setw(15) << "max" << '\n';
    Json rows = Json::array();
    for (const CertificationRow& row : report.rows) {
      log << std::left << "  " << std::setw(34) << row.name << std::setw(10) << (row.measured ? "measured" : "bound")
          << std::right << std::setw(10) << row.samples << std::setw(12) << row.violations << std::setw(15)
          << std::setprecision(6) << row.min_value << std::setw(15) << row.max_value << '\n';
      rows.push_back(Json{{"name", row.name},
                          {"kind", row.measured ? "measured" : "bound"},
                          {"samples", row.samples},
                          {"violations", row.violations},
                          {"min", number(row.min_value)},
                          {"max", number(row.max_value)}});
    }
    log << "  total violations: " << report.total_violations() << '\n';
    if (output_file) {
      write_json(*output_file, Json{{"schema", "pflow.lemmas.v1"},
                                    {"seed", seed},
                                    {"samples", samples},
                                    {"rows", rows},
                                    {"total_violations", report.total_violations()},
                                    {"passed", report.passed()}});
    }
    return report.passed() ? kSuccess : kViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_export_mesh(int n, int refinements, const std::string& output_file, std::ostream& log)
{
  try {
    if (n < 1) throw ConfigError("export-mesh: n must be >= 1");
    if (refinements < 0 || refinements > 8) throw ConfigError("export-mesh: refinements must lie in [0, 8]");
    const MeshPtr mesh = refine_red(unit_square_mesh(n), refinements);
    std::ofstream out = open_output(output_file);
    write_vtk(out, *mesh);
    log << "export-mesh: " << mesh->num_nodes() << " nodes, " << mesh->num_cells() << " cells -> " << output_file
        << '\n';
    return kSuccess;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace pflow::app
