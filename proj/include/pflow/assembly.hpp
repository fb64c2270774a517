#ifndef PFLOW_ASSEMBLY_HPP
#define PFLOW_ASSEMBLY_HPP

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "pflow/lower_order.hpp"
#include "pflow/mesh.hpp"
#include "pflow/orlicz.hpp"

namespace pflow {

/// Symmetric sparse matrix; both triangles are stored.
using SymSparse = Eigen::SparseMatrix<double>;

/// Scalar field f(x, y, t).
using SpaceTimeField = std::function<double(double, double, double)>;

/// Matrices and vectors are indexed by the interior DOFs unless All is requested,
/// in which case they are indexed by mesh node.
enum class DofSelection { Interior, All };

/// Per-cell constant gradients of the three local hat functions and the cell area.
struct ElementGradientTable {
  std::vector<std::array<Vec2d, 3>> gradients;
  std::vector<double> areas;
};

ElementGradientTable element_gradients(const TriMesh& mesh);

/// Consistent P1 mass matrix, element matrix (area / 12) [[2,1,1],[1,2,1],[1,1,2]].
SymSparse mass_matrix(const TriMesh& mesh, DofSelection dofs = DofSelection::Interior);

/// Laplace stiffness matrix (weight 1).
SymSparse stiffness_matrix(const TriMesh& mesh, DofSelection dofs = DofSelection::Interior);

/// int weight psi_i psi_j with the three-point edge-midpoint rule (exact for quadratics).
SymSparse quadrature_mass_matrix(const TriMesh& mesh, const ScalarField& weight,
                                 DofSelection dofs = DofSelection::Interior);

/// int omega_T grad psi_i . grad psi_j for given per-cell weights.
SymSparse cell_weighted_stiffness(const TriMesh& mesh, const Eigen::VectorXd& cell_weights);

/// int grad psi_i . C_T grad psi_j for per-cell symmetric 2x2 tensors C_T.
SymSparse cell_tensor_stiffness(const TriMesh& mesh, const std::vector<Eigen::Matrix2d>& tensors);

/// Cellwise gradients of a P1 function.
std::vector<Vec2d> cell_gradients(const FemFunction& u);

/// omega_T = w_eps(|grad w|_T), the flux weight of the regularized density.
/// Throws DegenerateWeightError if a weight is infinite (eps = delta = 0, p < 2).
Eigen::VectorXd flux_weights(const FemFunction& w, const NFunctionPD& nf, double eps, Regularization kind);

/// int omega_T grad psi_i . grad psi_j with omega_T evaluated at the cell gradient of w.
SymSparse weighted_stiffness(const FemFunction& w, const NFunctionPD& nf, double eps,
                             Regularization kind = Regularization::AdditiveShift);

/// int d(w) psi_i psi_j, with d(w) sampled at the edge midpoints.
SymSparse weighted_mass(const FemFunction& w, const LowerOrderCoeff& coeff);

/// Jacobian of u -> int g(u) psi_i, i.e. int g'(u) psi_i psi_j at the edge midpoints.
SymSparse lower_order_jacobian(const FemFunction& u, const LowerOrderCoeff& coeff);

/// int f(., t) psi_i with the edge-midpoint rule.
Eigen::VectorXd load_vector(const TriMesh& mesh, const SpaceTimeField& f, double t,
                            DofSelection dofs = DofSelection::Interior);

/// Regularized energy, exact for P1:
///   QuadraticNorm:  sum_T area_T phi(|grad u|_eps)   (= (1/p) int |grad u|_eps^p for delta = 0)
///   AdditiveShift:  sum_T area_T phi_eps(|grad u|_T)
double energy(const FemFunction& u, const NFunctionPD& nf, double eps, Regularization kind);

double norm_L2(const FemFunction& u);
double seminorm_W1p(const FemFunction& u, double p);

/// int omega |grad v|^2 for per-cell weights omega.
double weighted_dissipation(const Eigen::VectorXd& cell_weights, const FemFunction& v);

/// int |d(w)|^2 |u|^2 with the edge-midpoint rule.
double lower_order_square_norm(const FemFunction& w, const FemFunction& u, const LowerOrderCoeff& coeff);

/// ||u - exact||_{L^2} by a degree-5 seven-point rule on every cell.
double l2_error(const FemFunction& u, const ScalarField& exact);

}  // namespace pflow

#endif  // PFLOW_ASSEMBLY_HPP
