#ifndef PFLOW_EXPORT_HPP
#define PFLOW_EXPORT_HPP

#include <optional>
#include <ostream>
#include <string>

#include "pflow/diagnostics.hpp"
#include "pflow/mesh.hpp"
#include "pflow/schemes.hpp"

namespace pflow {

/// Shortest round-trip text for a double (printf %.17g); nan and inf spelled out.
std::string format_double(double value);

/// Legacy ASCII VTK unstructured grid (triangles, cell type 5), optionally
/// with one point-data field of nodal values (boundary nodes carry 0).
void write_vtk(std::ostream& out, const TriMesh& mesh, const FemFunction* field = nullptr,
               const std::string& field_name = "u");

/// node_x,node_y,value for every mesh node.
void write_function_csv(std::ostream& out, const FemFunction& u);

/// k,t_k,L2_norm,W1p_seminorm,energy_eps,dtau_L2,solver_iters,residual; one row per iterate.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

/// One row per level of the study (and of its control run, marked in the `run` column).
void write_study_csv(std::ostream& out, const StudyReport& report);

}  // namespace pflow

#endif  // PFLOW_EXPORT_HPP
