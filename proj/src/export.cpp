#include "pflow/export.hpp"

#include <cmath>
#include <cstdio>

namespace pflow {

std::string format_double(double value)
{
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_vtk(std::ostream& out, const TriMesh& mesh, const FemFunction* field, const std::string& field_name)
{
  out << "# vtk DataFile Version 3.0\n"
      << "pflow mesh level " << mesh.level() << "\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n"
      << "POINTS " << mesh.num_nodes() << " double\n";
  for (const Point& x : mesh.nodes()) out << format_double(x.x()) << ' ' << format_double(x.y()) << " 0\n";
  out << "CELLS " << mesh.num_cells() << ' ' << 4 * mesh.num_cells() << '\n';
  for (const Cell& c : mesh.cells()) out << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) out << "5\n";
  if (field) {
    const Eigen::VectorXd values = field->nodal_values();
    out << "POINT_DATA " << mesh.num_nodes() << '\n'
        << "SCALARS " << field_name << " double 1\n"
        << "LOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < values.size(); ++i) out << format_double(values[i]) << '\n';
  }
}

void write_function_csv(std::ostream& out, const FemFunction& u)
{
  const TriMesh& mesh = *u.mesh();
  const Eigen::VectorXd values = u.nodal_values();
  out << "node_x,node_y,value\n";
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const Point& x = mesh.nodes()[i];
    out << format_double(x.x()) << ',' << format_double(x.y()) << ',' << format_double(values[Eigen::Index(i)])
        << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory)
{
  const SchemeConfig& cfg = trajectory.config;
  out << "k,t_k,L2_norm,W1p_seminorm,energy_eps,dtau_L2,solver_iters,residual\n";
  for (int k = 0; k <= trajectory.steps(); ++k) {
    const FemFunction& u = trajectory.iterates[std::size_t(k)];
    double dtau = 0.0;
    int iterations = 0;
    double residual = 0.0;
    if (k > 0) {
      const FemFunction d(u.mesh(), (u.coeffs() - trajectory.iterates[std::size_t(k - 1)].coeffs()) / cfg.tau());
      dtau = norm_L2(d);
      iterations = trajectory.stats[std::size_t(k - 1)].iterations;
      residual = trajectory.stats[std::size_t(k - 1)].residual;
    }
    out << k << ',' << format_double(k == 0 ? 0.0 : cfg.time(k)) << ',' << format_double(norm_L2(u)) << ','
        << format_double(seminorm_W1p(u, cfg.nf.p())) << ','
        << format_double(energy(u, cfg.nf, cfg.eps, cfg.regularization)) << ',' << format_double(dtau) << ','
        << iterations << ',' << format_double(residual) << '\n';
  }
}

namespace {

void write_level_rows(std::ostream& out, const char* run, const std::vector<StudyLevel>& levels,
                      const std::vector<double>* cauchy_l2, const std::vector<double>* cauchy_w1p)
{
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const StudyLevel& L = levels[i];
    const bool has_cauchy = cauchy_l2 && i > 0 && i - 1 < cauchy_l2->size();
    out << run << ',' << L.level << ',' << L.n << ',' << format_double(L.h) << ',' << format_double(L.eps) << ','
        << format_double(L.tau) << ',' << L.K << ',' << format_double(L.coupling_product) << ','
        << format_double(L.max_l2) << ',' << format_double(L.max_w1p) << ',' << format_double(L.gap) << ','
        << format_double(L.discrepancy.total) << ',' << format_double(L.E_max_ratio) << ','
        << (has_cauchy ? format_double((*cauchy_l2)[i - 1]) : "") << ','
        << (has_cauchy ? format_double((*cauchy_w1p)[i - 1]) : "") << ',' << (L.ledgers_hold ? 1 : 0) << ','
        << (L.failed ? 1 : 0) << '\n';
  }
}

}  // namespace

void write_study_csv(std::ostream& out, const StudyReport& report)
{
  out << "run,level,n,h,eps,tau,K,tau_phi2,max_L2,max_W1p,gap,discrepancy_total,E_ratio,cauchy_Linf_L2,"
         "cauchy_Lp_W1p,ledgers_hold,failed\n";
  write_level_rows(out, "main", report.levels, &report.cauchy_linf_l2, &report.cauchy_lp_w1p);
  if (report.has_control) write_level_rows(out, "control", report.control_levels, nullptr, nullptr);
}

}  // namespace pflow
