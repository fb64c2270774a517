#include "pflow/assembly.hpp"

#include <cmath>
#include <sstream>

#include "pflow/errors.hpp"

namespace pflow {

namespace {

using Local = Eigen::Matrix3d;

int global_index(const TriMesh& mesh, int node, DofSelection dofs)
{
  return dofs == DofSelection::All ? node : mesh.dof_of_node(node);
}

Eigen::Index system_size(const TriMesh& mesh, DofSelection dofs)
{
  return Eigen::Index(dofs == DofSelection::All ? mesh.num_nodes() : mesh.num_dofs());
}

template <typename LocalMatrix>
SymSparse assemble(const TriMesh& mesh, DofSelection dofs, LocalMatrix&& local)
{
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Cell& cell = mesh.cells()[c];
    const Local element = local(int(c));
    for (int a = 0; a < 3; ++a) {
      const int i = global_index(mesh, cell[a], dofs);
      if (i < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int j = global_index(mesh, cell[b], dofs);
        if (j < 0) continue;
        triplets.emplace_back(i, j, element(a, b));
      }
    }
  }
  SymSparse matrix(system_size(mesh, dofs), system_size(mesh, dofs));
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  return matrix;
}

std::array<Vec2d, 3> hat_gradients(const TriMesh& mesh, int cell)
{
  const Cell& c = mesh.cells()[cell];
  const Point& x0 = mesh.nodes()[c[0]];
  const Point& x1 = mesh.nodes()[c[1]];
  const Point& x2 = mesh.nodes()[c[2]];
  const double twice_area = 2.0 * mesh.area(cell);
  // grad lambda_i = rot90(x_{i+2} - x_{i+1}) / (2 |T|)
  auto grad = [twice_area](const Point& from, const Point& to) -> Vec2d {
    return Vec2d(from.y() - to.y(), to.x() - from.x()) / twice_area;
  };
  return {grad(x1, x2), grad(x2, x0), grad(x0, x1)};
}

// Edge midpoints of a cell in barycentric form: midpoint m lies opposite vertex m.
constexpr double midpoint_bary[3][3] = {{0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}};

Point midpoint(const TriMesh& mesh, const Cell& c, int m)
{
  Point x = Point::Zero();
  for (int v = 0; v < 3; ++v) x += midpoint_bary[m][v] * mesh.nodes()[c[v]];
  return x;
}

double value_at_midpoint(const FemFunction& u, const Cell& c, int m)
{
  double value = 0.0;
  for (int v = 0; v < 3; ++v) value += midpoint_bary[m][v] * u.node_value(c[v]);
  return value;
}

template <typename MidpointWeight>
SymSparse midpoint_mass(const TriMesh& mesh, DofSelection dofs, MidpointWeight&& weight)
{
  return assemble(mesh, dofs, [&](int cell) {
    const Cell& c = mesh.cells()[cell];
    const double w = mesh.area(cell) / 3.0;
    Local element = Local::Zero();
    for (int m = 0; m < 3; ++m) {
      const double coefficient = w * weight(c, m);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) element(a, b) += coefficient * midpoint_bary[m][a] * midpoint_bary[m][b];
    }
    return element;
  });
}

void require_same_mesh(const FemFunction& a, const FemFunction& b)
{
  if (a.mesh() != b.mesh() && a.mesh()->id() != b.mesh()->id())
    throw MismatchError("functions live on different meshes");
}

}  // namespace

ElementGradientTable element_gradients(const TriMesh& mesh)
{
  ElementGradientTable table;
  table.gradients.reserve(mesh.num_cells());
  table.areas.reserve(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    table.gradients.push_back(hat_gradients(mesh, int(c)));
    table.areas.push_back(mesh.area(int(c)));
  }
  return table;
}

SymSparse mass_matrix(const TriMesh& mesh, DofSelection dofs)
{
  Local reference;
  reference << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  return assemble(mesh, dofs, [&](int cell) -> Local { return (mesh.area(cell) / 12.0) * reference; });
}

SymSparse stiffness_matrix(const TriMesh& mesh, DofSelection dofs)
{
  return assemble(mesh, dofs, [&](int cell) {
    const auto g = hat_gradients(mesh, cell);
    Local element;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) element(a, b) = mesh.area(cell) * g[a].dot(g[b]);
    return element;
  });
}

SymSparse quadrature_mass_matrix(const TriMesh& mesh, const ScalarField& weight, DofSelection dofs)
{
  return midpoint_mass(mesh, dofs, [&](const Cell& c, int m) {
    const Point x = midpoint(mesh, c, m);
    return weight(x.x(), x.y());
  });
}

SymSparse cell_weighted_stiffness(const TriMesh& mesh, const Eigen::VectorXd& cell_weights)
{
  if (std::size_t(cell_weights.size()) != mesh.num_cells())
    throw MismatchError("cell_weighted_stiffness: one weight per cell required");
  return assemble(mesh, DofSelection::Interior, [&](int cell) {
    const auto g = hat_gradients(mesh, cell);
    const double scale = mesh.area(cell) * cell_weights[cell];
    Local element;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) element(a, b) = scale * g[a].dot(g[b]);
    return element;
  });
}

SymSparse cell_tensor_stiffness(const TriMesh& mesh, const std::vector<Eigen::Matrix2d>& tensors)
{
  if (tensors.size() != mesh.num_cells())
    throw MismatchError("cell_tensor_stiffness: one tensor per cell required");
  return assemble(mesh, DofSelection::Interior, [&](int cell) {
    const auto g = hat_gradients(mesh, cell);
    const Eigen::Matrix2d& tensor = tensors[std::size_t(cell)];
    Local element;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) element(a, b) = mesh.area(cell) * g[a].dot(tensor * g[b]);
    return element;
  });
}

std::vector<Vec2d> cell_gradients(const FemFunction& u)
{
  const TriMesh& mesh = *u.mesh();
  std::vector<Vec2d> gradients(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Cell& cell = mesh.cells()[c];
    const auto g = hat_gradients(mesh, int(c));
    Vec2d sum = Vec2d::Zero();
    for (int v = 0; v < 3; ++v) sum += u.node_value(cell[v]) * g[v];
    gradients[c] = sum;
  }
  return gradients;
}

Eigen::VectorXd flux_weights(const FemFunction& w, const NFunctionPD& nf, double eps, Regularization kind)
{
  if (!(eps >= 0.0)) throw DomainError("flux_weights: eps must be >= 0");
  const auto gradients = cell_gradients(w);
  Eigen::VectorXd weights(Eigen::Index(gradients.size()));
  for (std::size_t c = 0; c < gradients.size(); ++c) {
    const double weight = regularized_weight(nf, eps, kind, gradients[c].norm());
    if (!std::isfinite(weight)) {
      std::ostringstream msg;
      msg << "degenerate flux weight in cell " << c << ": eps = delta = 0 with vanishing gradient";
      throw DegenerateWeightError(msg.str());
    }
    weights[Eigen::Index(c)] = weight;
  }
  return weights;
}

SymSparse weighted_stiffness(const FemFunction& w, const NFunctionPD& nf, double eps, Regularization kind)
{
  return cell_weighted_stiffness(*w.mesh(), flux_weights(w, nf, eps, kind));
}

SymSparse weighted_mass(const FemFunction& w, const LowerOrderCoeff& coeff)
{
  const TriMesh& mesh = *w.mesh();
  if (coeff.is_zero()) return SymSparse(Eigen::Index(mesh.num_dofs()), Eigen::Index(mesh.num_dofs()));
  return midpoint_mass(mesh, DofSelection::Interior,
                       [&](const Cell& c, int m) { return coeff.d(value_at_midpoint(w, c, m)); });
}

SymSparse lower_order_jacobian(const FemFunction& u, const LowerOrderCoeff& coeff)
{
  const TriMesh& mesh = *u.mesh();
  if (coeff.is_zero()) return SymSparse(Eigen::Index(mesh.num_dofs()), Eigen::Index(mesh.num_dofs()));
  return midpoint_mass(mesh, DofSelection::Interior,
                       [&](const Cell& c, int m) { return coeff.g_derivative(value_at_midpoint(u, c, m)); });
}

Eigen::VectorXd load_vector(const TriMesh& mesh, const SpaceTimeField& f, double t, DofSelection dofs)
{
  Eigen::VectorXd load = Eigen::VectorXd::Zero(system_size(mesh, dofs));
  if (!f) return load;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Cell& cell = mesh.cells()[c];
    const double w = mesh.area(int(c)) / 3.0;
    for (int m = 0; m < 3; ++m) {
      const Point x = midpoint(mesh, cell, m);
      const double value = w * f(x.x(), x.y(), t);
      for (int a = 0; a < 3; ++a) {
        const int i = global_index(mesh, cell[a], dofs);
        if (i >= 0) load[i] += value * midpoint_bary[m][a];
      }
    }
  }
  return load;
}

double energy(const FemFunction& u, const NFunctionPD& nf, double eps, Regularization kind)
{
  if (!(eps >= 0.0)) throw DomainError("energy: eps must be >= 0");
  const TriMesh& mesh = *u.mesh();
  const auto gradients = cell_gradients(u);
  double sum = 0.0;
  for (std::size_t c = 0; c < gradients.size(); ++c)
    sum += mesh.area(int(c)) * regularized_density(nf, eps, kind, gradients[c].norm());
  return sum;
}

double norm_L2(const FemFunction& u)
{
  const TriMesh& mesh = *u.mesh();
  double sum = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Cell& cell = mesh.cells()[c];
    const double a = u.node_value(cell[0]), b = u.node_value(cell[1]), d = u.node_value(cell[2]);
    // element mass matrix applied to (a, b, d)
    sum += mesh.area(int(c)) / 12.0 * (2.0 * (a * a + b * b + d * d) + 2.0 * (a * b + b * d + d * a));
  }
  return std::sqrt(std::max(sum, 0.0));
}

double seminorm_W1p(const FemFunction& u, double p)
{
  if (!(p >= 1.0)) throw DomainError("seminorm_W1p: p must be >= 1");
  const TriMesh& mesh = *u.mesh();
  const auto gradients = cell_gradients(u);
  double sum = 0.0;
  for (std::size_t c = 0; c < gradients.size(); ++c) sum += mesh.area(int(c)) * std::pow(gradients[c].norm(), p);
  return std::pow(sum, 1.0 / p);
}

double weighted_dissipation(const Eigen::VectorXd& cell_weights, const FemFunction& v)
{
  const TriMesh& mesh = *v.mesh();
  const auto gradients = cell_gradients(v);
  double sum = 0.0;
  for (std::size_t c = 0; c < gradients.size(); ++c)
    sum += mesh.area(int(c)) * cell_weights[Eigen::Index(c)] * gradients[c].squaredNorm();
  return sum;
}

double lower_order_square_norm(const FemFunction& w, const FemFunction& u, const LowerOrderCoeff& coeff)
{
  require_same_mesh(w, u);
  if (coeff.is_zero()) return 0.0;
  const TriMesh& mesh = *u.mesh();
  double sum = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Cell& cell = mesh.cells()[c];
    for (int m = 0; m < 3; ++m) {
      const double dv = coeff.d(value_at_midpoint(w, cell, m)) * value_at_midpoint(u, cell, m);
      sum += mesh.area(int(c)) / 3.0 * dv * dv;
    }
  }
  return sum;
}

double l2_error(const FemFunction& u, const ScalarField& exact)
{
  // Dunavant degree-5 rule: centroid plus two orbits of three points
  const double s15 = std::sqrt(15.0);
  const double a1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
  const double a2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
  const std::array<std::array<double, 4>, 7> rule{{
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
      {a1, a1, 1.0 - 2.0 * a1, w1},
      {a1, 1.0 - 2.0 * a1, a1, w1},
      {1.0 - 2.0 * a1, a1, a1, w1},
      {a2, a2, 1.0 - 2.0 * a2, w2},
      {a2, 1.0 - 2.0 * a2, a2, w2},
      {1.0 - 2.0 * a2, a2, a2, w2},
  }};
  const TriMesh& mesh = *u.mesh();
  double sum = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Cell& cell = mesh.cells()[c];
    double local = 0.0;
    for (const auto& q : rule) {
      Point x = Point::Zero();
      double uh = 0.0;
      for (int v = 0; v < 3; ++v) {
        x += q[v] * mesh.nodes()[cell[v]];
        uh += q[v] * u.node_value(cell[v]);
      }
      const double e = uh - exact(x.x(), x.y());
      local += q[3] * e * e;
    }
    sum += mesh.area(int(c)) * local;
  }
  return std::sqrt(sum);
}

}  // namespace pflow
