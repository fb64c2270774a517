#ifndef PFLOW_TESTS_SUPPORT_HPP
#define PFLOW_TESTS_SUPPORT_HPP

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pflow/mesh.hpp"
#include "pflow/warnings.hpp"

namespace pflow::testing {

/// Value of a P1 function at an arbitrary point by brute-force cell search.
inline double evaluate_at(const FemFunction& u, const Point& x)
{
  const TriMesh& mesh = *u.mesh();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Cell& cell = mesh.cells()[c];
    const Point& a = mesh.nodes()[cell[0]];
    Eigen::Matrix2d J;
    J.col(0) = mesh.nodes()[cell[1]] - a;
    J.col(1) = mesh.nodes()[cell[2]] - a;
    const Eigen::Vector2d st = J.partialPivLu().solve(x - a);
    const double l0 = 1.0 - st[0] - st[1];
    if (st[0] >= -1e-12 && st[1] >= -1e-12 && l0 >= -1e-12)
      return l0 * u.node_value(cell[0]) + st[0] * u.node_value(cell[1]) + st[1] * u.node_value(cell[2]);
  }
  throw std::out_of_range("evaluate_at: point outside the mesh");
}

/// Dense copy of a sparse matrix.
template <typename Sparse>
Eigen::MatrixXd dense(const Sparse& m)
{
  return Eigen::MatrixXd(m);
}

inline double min_eigenvalue(const Eigen::MatrixXd& m)
{
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
}

/// Interior-DOF mass matrix and per-cell weighted stiffness, assembled densely
/// from node coordinates without the library's assembly routines.
struct DenseP1 {
  Eigen::MatrixXd mass;
  std::vector<std::array<Eigen::Vector2d, 3>> grads;  // hat gradients per cell
  std::vector<double> areas;
};

inline DenseP1 dense_p1(const TriMesh& mesh)
{
  const auto n = Eigen::Index(mesh.num_dofs());
  DenseP1 out{Eigen::MatrixXd::Zero(n, n), {}, {}};
  for (const Cell& cell : mesh.cells()) {
    const Point& a = mesh.nodes()[cell[0]];
    const Point& b = mesh.nodes()[cell[1]];
    const Point& c = mesh.nodes()[cell[2]];
    const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    const double area = 0.5 * det;
    // grad lambda_i = rot90(opposite edge) / det
    std::array<Eigen::Vector2d, 3> g;
    const Point* v[3] = {&a, &b, &c};
    for (int i = 0; i < 3; ++i) {
      const Point e = *v[(i + 2) % 3] - *v[(i + 1) % 3];
      g[i] = Eigen::Vector2d(-e.y(), e.x()) / det;
    }
    out.grads.push_back(g);
    out.areas.push_back(area);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int di = mesh.dof_of_node(cell[i]), dj = mesh.dof_of_node(cell[j]);
        if (di < 0 || dj < 0) continue;
        out.mass(di, dj) += area * (i == j ? 2.0 : 1.0) / 12.0;
      }
  }
  return out;
}

inline Eigen::MatrixXd dense_stiffness(const TriMesh& mesh, const DenseP1& p1, const std::vector<double>& weights)
{
  const auto n = Eigen::Index(mesh.num_dofs());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Cell& cell = mesh.cells()[c];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int di = mesh.dof_of_node(cell[i]), dj = mesh.dof_of_node(cell[j]);
        if (di < 0 || dj < 0) continue;
        K(di, dj) += weights[c] * p1.areas[c] * p1.grads[c][i].dot(p1.grads[c][j]);
      }
  }
  return K;
}

inline Eigen::Vector2d cell_gradient(const FemFunction& u, const DenseP1& p1, std::size_t c)
{
  const Cell& cell = u.mesh()->cells()[c];
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (int i = 0; i < 3; ++i) g += u.node_value(cell[i]) * p1.grads[c][i];
  return g;
}

/// Collects warnings for the lifetime of the object.
class WarningCapture {
public:
  WarningCapture()
  {
    previous_ = set_warning_handler([this](const std::string& m) { messages.push_back(m); });
  }
  ~WarningCapture() { set_warning_handler(previous_); }
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  std::vector<std::string> messages;

private:
  WarningHandler previous_;
};

}  // namespace pflow::testing

#endif  // PFLOW_TESTS_SUPPORT_HPP
