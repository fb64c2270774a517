#include "pflow/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>

#include "pflow/errors.hpp"
#include "pflow/warnings.hpp"

namespace pflow {

namespace {

std::atomic<std::uint64_t> next_mesh_id{1};

using Edge = std::pair<int, int>;

Edge make_edge(int a, int b)
{
  return a < b ? Edge{a, b} : Edge{b, a};
}

double signed_area(const Point& a, const Point& b, const Point& c)
{
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

}  // namespace

TriMesh::TriMesh(std::vector<Point> nodes, std::vector<Cell> cells)
    : nodes_(std::move(nodes)), cells_(std::move(cells)), id_(next_mesh_id++)
{
  std::map<Edge, int> edge_count;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const Cell& cell = cells_[c];
    for (int v : cell)
      if (v < 0 || std::size_t(v) >= nodes_.size()) throw DomainError("TriMesh: cell references missing node");
    if (!(signed_area(nodes_[cell[0]], nodes_[cell[1]], nodes_[cell[2]]) > 0.0)) {
      std::ostringstream msg;
      msg << "TriMesh: cell " << c << " is degenerate or clockwise";
      throw DomainError(msg.str());
    }
    for (int k = 0; k < 3; ++k) ++edge_count[make_edge(cell[k], cell[(k + 1) % 3])];
  }
  num_edges_ = edge_count.size();

  boundary_.assign(nodes_.size(), false);
  for (const auto& [edge, count] : edge_count) {
    if (count > 2) throw DomainError("TriMesh: edge shared by more than two cells");
    if (count == 1) boundary_[edge.first] = boundary_[edge.second] = true;
  }

  dof_of_node_.assign(nodes_.size(), -1);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (boundary_[i]) continue;
    dof_of_node_[i] = int(node_of_dof_.size());
    node_of_dof_.push_back(int(i));
  }
}

double TriMesh::area(int cell) const
{
  const Cell& c = cells_[cell];
  return signed_area(nodes_[c[0]], nodes_[c[1]], nodes_[c[2]]);
}

double TriMesh::total_area() const
{
  double sum = 0.0;
  for (std::size_t c = 0; c < cells_.size(); ++c) sum += area(int(c));
  return sum;
}

double TriMesh::mesh_size() const
{
  double h = 0.0;
  for (const Cell& c : cells_)
    for (int k = 0; k < 3; ++k) h = std::max(h, (nodes_[c[k]] - nodes_[c[(k + 1) % 3]]).norm());
  return h;
}

double TriMesh::shape_regularity() const
{
  double worst = 0.0;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const Cell& cell = cells_[c];
    const double a = (nodes_[cell[1]] - nodes_[cell[2]]).norm();
    const double b = (nodes_[cell[2]] - nodes_[cell[0]]).norm();
    const double e = (nodes_[cell[0]] - nodes_[cell[1]]).norm();
    const double A = area(int(c));
    const double circumradius = a * b * e / (4.0 * A);
    const double inradius = 2.0 * A / (a + b + e);
    worst = std::max(worst, circumradius / inradius);
  }
  return worst;
}

MeshPtr unit_square_mesh(int n)
{
  if (n < 1) throw DomainError("unit_square_mesh: n must be >= 1");
  std::vector<Point> nodes;
  nodes.reserve(std::size_t(n + 1) * std::size_t(n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) nodes.emplace_back(double(i) / n, double(j) / n);

  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<Cell> cells;
  cells.reserve(2 * std::size_t(n) * std::size_t(n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      if ((i + j) % 2 == 0) {
        cells.push_back({v00, v10, v11});
        cells.push_back({v00, v11, v01});
      } else {
        cells.push_back({v00, v10, v01});
        cells.push_back({v10, v11, v01});
      }
    }
  }
  return std::make_shared<const TriMesh>(std::move(nodes), std::move(cells));
}

MeshPtr refine_red(const TriMesh& mesh)
{
  std::vector<Point> nodes = mesh.nodes();
  std::vector<std::array<int, 2>> origin;
  origin.reserve(nodes.size() + mesh.num_edges());
  for (std::size_t i = 0; i < nodes.size(); ++i) origin.push_back({int(i), int(i)});

  std::map<Edge, int> midpoint;
  auto midpoint_of = [&](int a, int b) {
    const Edge e = make_edge(a, b);
    auto it = midpoint.find(e);
    if (it != midpoint.end()) return it->second;
    const int index = int(nodes.size());
    nodes.push_back(0.5 * (mesh.nodes()[a] + mesh.nodes()[b]));
    origin.push_back({e.first, e.second});
    midpoint.emplace(e, index);
    return index;
  };

  std::vector<Cell> cells;
  cells.reserve(4 * mesh.num_cells());
  for (const Cell& c : mesh.cells()) {
    const int ab = midpoint_of(c[0], c[1]);
    const int bc = midpoint_of(c[1], c[2]);
    const int ca = midpoint_of(c[2], c[0]);
    cells.push_back({c[0], ab, ca});
    cells.push_back({ab, c[1], bc});
    cells.push_back({ca, bc, c[2]});
    cells.push_back({ab, bc, ca});
  }

  auto child = std::make_shared<TriMesh>(std::move(nodes), std::move(cells));
  child->level_ = mesh.level() + 1;
  child->parent_id_ = mesh.id();
  child->parent_map_.resize(mesh.num_nodes());
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) child->parent_map_[i] = int(i);
  child->node_origin_ = std::move(origin);
  return child;
}

MeshPtr refine_red(const MeshPtr& mesh, int times)
{
  MeshPtr current = mesh;
  for (int i = 0; i < times; ++i) current = refine_red(*current);
  return current;
}

FemFunction::FemFunction(MeshPtr mesh, Eigen::VectorXd coeffs) : mesh_(std::move(mesh)), coeffs_(std::move(coeffs))
{
  if (!mesh_) throw DomainError("FemFunction: null mesh");
  if (std::size_t(coeffs_.size()) != mesh_->num_dofs())
    throw MismatchError("FemFunction: coefficient count does not match the interior node count");
}

FemFunction FemFunction::zero(MeshPtr mesh)
{
  const auto n = Eigen::Index(mesh->num_dofs());
  return FemFunction(std::move(mesh), Eigen::VectorXd::Zero(n));
}

double FemFunction::node_value(int node) const
{
  const int dof = mesh_->dof_of_node(node);
  return dof < 0 ? 0.0 : coeffs_[dof];
}

Eigen::VectorXd FemFunction::nodal_values() const
{
  Eigen::VectorXd values = Eigen::VectorXd::Zero(Eigen::Index(mesh_->num_nodes()));
  for (std::size_t d = 0; d < mesh_->num_dofs(); ++d) values[mesh_->node_of_dof(int(d))] = coeffs_[Eigen::Index(d)];
  return values;
}

FemFunction prolong(const FemFunction& u, const MeshPtr& target)
{
  if (!target || target->parent_id() != u.mesh()->id())
    throw MismatchError("prolong: target is not the red refinement of the function's mesh");
  Eigen::VectorXd coeffs(Eigen::Index(target->num_dofs()));
  const auto& origin = target->node_origin();
  for (std::size_t d = 0; d < target->num_dofs(); ++d) {
    const auto& [a, b] = origin[target->node_of_dof(int(d))];
    coeffs[Eigen::Index(d)] = 0.5 * (u.node_value(a) + u.node_value(b));
  }
  return FemFunction(target, std::move(coeffs));
}

FemFunction interpolate_nodal(const ScalarField& expr, const MeshPtr& mesh)
{
  Eigen::VectorXd coeffs(Eigen::Index(mesh->num_dofs()));
  double boundary_max = 0.0;
  for (std::size_t i = 0; i < mesh->num_nodes(); ++i) {
    const Point& x = mesh->nodes()[i];
    const double value = expr(x.x(), x.y());
    const int dof = mesh->dof_of_node(int(i));
    if (dof >= 0)
      coeffs[dof] = value;
    else
      boundary_max = std::max(boundary_max, std::abs(value));
  }
  if (boundary_max > 1e-12) {
    std::ostringstream msg;
    msg << "interpolate_nodal: discarding nonzero boundary values (max |value| = " << boundary_max << ")";
    warn(msg.str());
  }
  return FemFunction(mesh, std::move(coeffs));
}

}  // namespace pflow
