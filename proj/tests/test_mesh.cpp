#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include <gtest/gtest.h>

#include "pflow/assembly.hpp"
#include "pflow/errors.hpp"
#include "pflow/fields.hpp"
#include "pflow/mesh.hpp"
#include "pflow/random.hpp"
#include "support.hpp"

using namespace pflow;
using pflow::testing::evaluate_at;
using pflow::testing::WarningCapture;

namespace {

std::set<std::pair<double, double>> node_set(const TriMesh& mesh)
{
  std::set<std::pair<double, double>> out;
  for (const Point& x : mesh.nodes()) out.emplace(x.x(), x.y());
  return out;
}

}  // namespace

TEST(Mesh, UnitSquareCounts)
{
  const int expected[][4] = {{1, 4, 2, 0}, {2, 9, 8, 1}, {4, 25, 32, 9}, {7, 64, 98, 36}};
  for (const auto& e : expected) {
    const MeshPtr mesh = unit_square_mesh(e[0]);
    EXPECT_EQ(mesh->num_nodes(), std::size_t(e[1]));
    EXPECT_EQ(mesh->num_cells(), std::size_t(e[2]));
    EXPECT_EQ(mesh->num_dofs(), std::size_t(e[3]));
    EXPECT_EQ(int(mesh->num_nodes()) - int(mesh->num_edges()) + int(mesh->num_cells()), 1);
    EXPECT_NEAR(mesh->mesh_size(), std::sqrt(2.0) / e[0], 1e-15);
    EXPECT_NEAR(mesh->total_area(), 1.0, 1e-14);
    EXPECT_EQ(mesh->level(), 0);
  }
  EXPECT_THROW(unit_square_mesh(0), DomainError);
}

TEST(Mesh, CellsAreCounterclockwiseAndBoundaryFlagsMatchGeometry)
{
  const MeshPtr mesh = unit_square_mesh(5);
  for (std::size_t c = 0; c < mesh->num_cells(); ++c) EXPECT_GT(mesh->area(int(c)), 0.0);
  for (std::size_t i = 0; i < mesh->num_nodes(); ++i) {
    const Point& x = mesh->nodes()[i];
    const bool on_boundary = x.x() == 0.0 || x.x() == 1.0 || x.y() == 0.0 || x.y() == 1.0;
    EXPECT_EQ(mesh->is_boundary(int(i)), on_boundary);
    if (!on_boundary) {
      EXPECT_EQ(mesh->node_of_dof(mesh->dof_of_node(int(i))), int(i));
    }
  }
}

TEST(Mesh, RejectsInvalidCells)
{
  std::vector<Point> nodes{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(TriMesh(nodes, {{0, 2, 1}}), DomainError);
  EXPECT_THROW(TriMesh(nodes, {{0, 1, 3}}), DomainError);
  EXPECT_THROW(TriMesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}), DomainError);
}

TEST(Mesh, RefineOnceFromSingleSquare)
{
  const MeshPtr coarse = unit_square_mesh(1);
  const MeshPtr fine = refine_red(*coarse);
  EXPECT_EQ(fine->num_nodes(), 9u);
  EXPECT_EQ(fine->num_cells(), 8u);
  EXPECT_EQ(fine->num_dofs(), 1u);
  EXPECT_EQ(node_set(*fine), node_set(*unit_square_mesh(2)));
  EXPECT_EQ(fine->level(), 1);
  EXPECT_EQ(fine->parent_id(), coarse->id());
}

TEST(Mesh, RefinementPreservesAreasAndShape)
{
  const MeshPtr coarse = unit_square_mesh(3);
  const MeshPtr fine = refine_red(*coarse);
  for (std::size_t c = 0; c < coarse->num_cells(); ++c)
    for (int child = 0; child < 4; ++child)
      EXPECT_NEAR(fine->area(int(4 * c + child)), coarse->area(int(c)) / 4.0, 1e-16);
  EXPECT_NEAR(fine->shape_regularity(), coarse->shape_regularity(), 1e-12);
  EXPECT_NEAR(fine->total_area(), 1.0, 1e-14);
}

TEST(Mesh, RepeatedRefinementCounts)
{
  const MeshPtr base = unit_square_mesh(2);
  for (int k = 0; k <= 3; ++k) {
    const MeshPtr mesh = refine_red(base, k);
    const std::size_t side = std::size_t(2) << k;
    EXPECT_EQ(mesh->num_nodes(), (side + 1) * (side + 1));
    EXPECT_EQ(mesh->num_cells(), 2 * side * side);
    EXPECT_NEAR(mesh->mesh_size(), base->mesh_size() / double(1 << k), 1e-15);
    EXPECT_EQ(mesh->level(), k);
  }
}

TEST(Mesh, ParentMapIsInjectiveAndCoordinatePreserving)
{
  const MeshPtr coarse = unit_square_mesh(3);
  const MeshPtr fine = refine_red(*coarse);
  std::set<int> images;
  for (std::size_t i = 0; i < coarse->num_nodes(); ++i) {
    const int child = fine->parent_map()[i];
    EXPECT_EQ(fine->nodes()[child], coarse->nodes()[i]);
    images.insert(child);
  }
  EXPECT_EQ(images.size(), coarse->num_nodes());
  for (std::size_t i = 0; i < fine->num_nodes(); ++i) {
    const auto& [a, b] = fine->node_origin()[i];
    EXPECT_EQ(fine->nodes()[i], 0.5 * (coarse->nodes()[a] + coarse->nodes()[b]));
  }
}

TEST(Mesh, ProlongIsExactPointwise)
{
  const MeshPtr coarse = unit_square_mesh(3);
  const MeshPtr fine = refine_red(*coarse);
  const FemFunction u = random_field(coarse, 17);
  const FemFunction v = prolong(u, fine);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Point x(rng.uniform(), rng.uniform());
    EXPECT_NEAR(evaluate_at(v, x), evaluate_at(u, x), 1e-14);
  }
  EXPECT_NEAR(norm_L2(v), norm_L2(u), 1e-12 * norm_L2(u));
  for (double p : {1.3, 2.0}) EXPECT_NEAR(seminorm_W1p(v, p), seminorm_W1p(u, p), 1e-12 * seminorm_W1p(u, p));
}

TEST(Mesh, ProlongExamples)
{
  const MeshPtr coarse = unit_square_mesh(2);
  const MeshPtr fine = refine_red(*coarse);
  EXPECT_EQ(prolong(FemFunction::zero(coarse), fine).coeffs().norm(), 0.0);
  // single hat: every midpoint takes the average of its edge end values
  const FemFunction hat(coarse, Eigen::VectorXd::Ones(1));
  const FemFunction v = prolong(hat, fine);
  for (std::size_t i = 0; i < fine->num_nodes(); ++i) {
    const auto& [a, b] = fine->node_origin()[i];
    EXPECT_DOUBLE_EQ(v.node_value(int(i)), 0.5 * (hat.node_value(a) + hat.node_value(b)));
  }
  EXPECT_THROW(prolong(hat, unit_square_mesh(4)), MismatchError);
  EXPECT_THROW(prolong(hat, refine_red(*fine)), MismatchError);
}

TEST(Mesh, ProlongComposesLikeDirectInterpolation)
{
  const MeshPtr m0 = unit_square_mesh(2);
  const MeshPtr m1 = refine_red(*m0);
  const MeshPtr m2 = refine_red(*m1);
  const FemFunction u = random_field(m0, 5);
  const FemFunction twice = prolong(prolong(u, m1), m2);
  const FemFunction direct = interpolate_nodal([&](double x, double y) { return evaluate_at(u, Point(x, y)); }, m2);
  EXPECT_LT((twice.coeffs() - direct.coeffs()).lpNorm<Eigen::Infinity>(), 1e-15);
}

TEST(Mesh, InterpolateExamples)
{
  EXPECT_EQ(interpolate_nodal([](double, double) { return 0.0; }, unit_square_mesh(3)).coeffs().norm(), 0.0);
  const FemFunction s =
      interpolate_nodal([](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y); }, unit_square_mesh(2));
  ASSERT_EQ(s.coeffs().size(), 1);
  EXPECT_NEAR(s.coeffs()[0], 1.0, 1e-15);

  const MeshPtr m4 = unit_square_mesh(4);
  const FemFunction b = interpolate_nodal([](double x, double y) { return x * (1 - x) * y * (1 - y); }, m4);
  int found = 0;
  for (std::size_t d = 0; d < m4->num_dofs(); ++d) {
    if (m4->nodes()[m4->node_of_dof(int(d))] != Point(0.25, 0.5)) continue;
    EXPECT_DOUBLE_EQ(b.coeffs()[Eigen::Index(d)], 0.046875);
    ++found;
  }
  EXPECT_EQ(found, 1);
}

TEST(Mesh, InterpolateWarnsOnNonzeroBoundaryValues)
{
  WarningCapture capture;
  interpolate_nodal([](double, double) { return 1.0; }, unit_square_mesh(2));
  ASSERT_EQ(capture.messages.size(), 1u);
  EXPECT_NE(capture.messages[0].find("boundary"), std::string::npos);
  interpolate_nodal([](double x, double) { return x * (1 - x) * 1e-13; }, unit_square_mesh(2));
  EXPECT_EQ(capture.messages.size(), 1u);
}

TEST(Mesh, FemFunctionRejectsWrongLength)
{
  EXPECT_THROW(FemFunction(unit_square_mesh(3), Eigen::VectorXd::Zero(3)), MismatchError);
  EXPECT_THROW(FemFunction(nullptr, Eigen::VectorXd()), DomainError);
}
