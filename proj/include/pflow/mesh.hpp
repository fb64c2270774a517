#ifndef PFLOW_MESH_HPP
#define PFLOW_MESH_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace pflow {

using Point = Eigen::Vector2d;
using Cell = std::array<int, 3>;

/// Scalar field f(x, y).
using ScalarField = std::function<double(double, double)>;

/// Conforming triangulation of a polygonal domain.
///
/// Immutable after construction.  Cells are counterclockwise.  A mesh
/// produced by refine_red() remembers its parent: parent node i is child
/// node parent_map()[i], and every child node is either a parent node or
/// the midpoint of the parent edge stored in node_origin().
class TriMesh {
public:
  TriMesh(std::vector<Point> nodes, std::vector<Cell> cells);

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_edges() const { return num_edges_; }

  bool is_boundary(int node) const { return boundary_[node]; }
  const std::vector<bool>& boundary_flags() const { return boundary_; }

  /// Free degrees of freedom are the interior nodes, numbered in node order.
  std::size_t num_dofs() const { return node_of_dof_.size(); }
  int dof_of_node(int node) const { return dof_of_node_[node]; }
  int node_of_dof(int dof) const { return node_of_dof_[dof]; }

  int level() const { return level_; }
  std::uint64_t id() const { return id_; }
  std::uint64_t parent_id() const { return parent_id_; }
  const std::vector<int>& parent_map() const { return parent_map_; }
  /// For a refined mesh: the two parent nodes whose average gives each child node
  /// (equal entries for inherited nodes).
  const std::vector<std::array<int, 2>>& node_origin() const { return node_origin_; }

  double area(int cell) const;
  double total_area() const;
  /// Longest edge over all cells.
  double mesh_size() const;
  /// max over cells of circumradius / inradius.
  double shape_regularity() const;

  friend std::shared_ptr<const TriMesh> refine_red(const TriMesh& mesh);

private:
  std::vector<Point> nodes_;
  std::vector<Cell> cells_;
  std::vector<bool> boundary_;
  std::vector<int> dof_of_node_;
  std::vector<int> node_of_dof_;
  std::size_t num_edges_ = 0;
  int level_ = 0;
  std::uint64_t id_;
  std::uint64_t parent_id_ = 0;
  std::vector<int> parent_map_;
  std::vector<std::array<int, 2>> node_origin_;
};

using MeshPtr = std::shared_ptr<const TriMesh>;

/// Structured union-jack triangulation of (0,1)^2 with n cells per side:
/// (n+1)^2 nodes and 2 n^2 right triangles.  The diagonal of square (i, j)
/// runs from (i, j) to (i+1, j+1) when i + j is even and the other way when
/// it is odd, so for even n every diagonal meets the centre node.
MeshPtr unit_square_mesh(int n);

/// Uniform red refinement: each triangle is split into four congruent
/// children through its edge midpoints.  Parent nodes keep their indices.
MeshPtr refine_red(const TriMesh& mesh);

/// Applies refine_red `times` times.
MeshPtr refine_red(const MeshPtr& mesh, int times);

/// Continuous piecewise affine function vanishing on the boundary,
/// stored by its values at the interior nodes of `mesh`.
class FemFunction {
public:
  FemFunction(MeshPtr mesh, Eigen::VectorXd coeffs);
  static FemFunction zero(MeshPtr mesh);

  const MeshPtr& mesh() const { return mesh_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

  /// Value at a node (zero on the boundary).
  double node_value(int node) const;
  /// All nodal values including the boundary zeros.
  Eigen::VectorXd nodal_values() const;

private:
  MeshPtr mesh_;
  Eigen::VectorXd coeffs_;
};

/// Nodal interpolation of `u` onto its red refinement `target`.  Exact: the
/// result equals u as a function on the whole domain.
FemFunction prolong(const FemFunction& u, const MeshPtr& target);

/// Nodal interpolant of `expr`.  Nonzero boundary values are dropped with a warning.
FemFunction interpolate_nodal(const ScalarField& expr, const MeshPtr& mesh);

}  // namespace pflow

#endif  // PFLOW_MESH_HPP
