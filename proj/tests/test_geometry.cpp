#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "brittle/region.hpp"
#include "brittle/vector_field.hpp"
#include "fixtures.hpp"

using namespace brittle;
using fixtures::left_crack;
using fixtures::mid_crack;

namespace {

constexpr double kPi = std::numbers::pi;

TEST(RectMesh, CountsAtResolutionFour) {
  auto mesh = build_rect_mesh(1.0, 1.0, 4);
  EXPECT_EQ(mesh->num_nodes(), 25u);
  EXPECT_EQ(mesh->num_elements(), 32u);
  double area = 0.0;
  for (std::size_t e = 0; e < mesh->num_elements(); ++e) area += mesh->element_measure(static_cast<int>(e));
  EXPECT_NEAR(area, 1.0, 1e-14);
}

TEST(RectMesh, WideRectangleNodeCount) {
  auto mesh = build_rect_mesh(2.0, 1.0, 4);
  EXPECT_EQ(mesh->num_nodes(), 45u);
}

TEST(RectMesh, RefusesResolutionWithoutInteriorNode) {
  EXPECT_THROW(build_rect_mesh(1.0, 1.0, 1), GeometryError);
  auto smallest = build_rect_mesh(1.0, 1.0, 2);
  int interior = 0;
  for (std::size_t n = 0; n < smallest->num_nodes(); ++n)
    if (!smallest->is_boundary_node(static_cast<int>(n))) ++interior;
  EXPECT_GE(interior, 1);
}

TEST(RectMesh, TrianglesAreCounterClockwise) {
  for (auto pattern : {DiagonalPattern::union_jack, DiagonalPattern::uniform}) {
    auto mesh = build_rect_mesh(1.0, 1.0, 6, Point(0.0, 0.0), pattern);
    for (std::size_t e = 0; e < mesh->num_elements(); ++e) EXPECT_GT(mesh->element_measure(static_cast<int>(e)), 0.0);
  }
}

TEST(RectMesh, MeshSizeIsLongestEdge) {
  EXPECT_NEAR(build_rect_mesh(1.0, 1.0, 8)->mesh_size(), std::sqrt(2.0) / 8, 1e-14);
}

TEST(DiskMesh, AreaApproachesDiskAndSlitIsAnEdgePath) {
  auto disk = build_disk_mesh(1.0, 1.0 / 16);
  double area = 0.0;
  for (std::size_t e = 0; e < disk->num_elements(); ++e) area += disk->element_measure(static_cast<int>(e));
  EXPECT_NEAR(area, kPi, 0.02);
  const auto path = disk_slit_path(*disk);
  ASSERT_GE(path.size(), 2u);
  EXPECT_NO_THROW(crack_from_path(disk, path));
}

TEST(Mesh, RejectsDegenerateTriangle) {
  std::vector<Point> nodes{Point(0, 0), Point(1, 0), Point(2, 0)};
  EXPECT_THROW(Mesh(2, nodes, {Element{0, 1, 2}}), GeometryError);
}

TEST(Mesh, TextRoundTrip) {
  auto mesh = build_rect_mesh(1.0, 1.0, 4);
  std::stringstream ss;
  write_mesh(ss, *mesh);
  auto back = read_mesh(ss);
  ASSERT_EQ(back->num_nodes(), mesh->num_nodes());
  ASSERT_EQ(back->num_elements(), mesh->num_elements());
  for (std::size_t n = 0; n < mesh->num_nodes(); ++n)
    EXPECT_EQ((back->node(static_cast<int>(n)) - mesh->node(static_cast<int>(n))).norm(), 0.0);
  EXPECT_EQ(back->boundary().size(), mesh->boundary().size());
}

TEST(PointLocator, FindsContainingCell) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  PointLocator loc(mesh);
  const Point p(0.31, 0.77);
  const int e = loc.locate(p);
  ASSERT_GE(e, 0);
  const auto b = loc.barycentric(e, p);
  for (double x : b) EXPECT_GE(x, -1e-12);
  EXPECT_NEAR(b[0] + b[1] + b[2], 1.0, 1e-12);
  EXPECT_EQ(loc.locate(Point(1.5, 0.5)), -1);
}

TEST(Crack, BoundaryPathHasOneTip) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  const auto K = left_crack(mesh, 8, 2);
  ASSERT_EQ(K.tips().size(), 1u);
  EXPECT_EQ(K.tips().front(), rect_node_id(*mesh, 2, 4));
  EXPECT_NEAR(K.length(), 0.25, 1e-14);
}

TEST(Crack, InteriorPathHasTwoTips) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  const auto K = mid_crack(mesh, 8, 3, 5);
  EXPECT_EQ(K.tips(), (std::vector<int>{rect_node_id(*mesh, 3, 4), rect_node_id(*mesh, 5, 4)}));
}

TEST(Crack, JunctionIsNotATip) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  auto id = [&](int i, int j) { return rect_node_id(*mesh, i, j); };
  const CrackSet K(mesh, {{id(2, 4), id(3, 4), id(4, 4)}, {id(3, 4), id(3, 5), id(3, 6)}});
  // Endpoint classification by counting incident path edges directly.
  std::map<int, int> degree;
  for (const auto& c : K.components())
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      ++degree[c[i]];
      ++degree[c[i + 1]];
    }
  std::vector<int> expected;
  for (auto [n, d] : degree)
    if (d == 1 && !mesh->is_boundary_node(n)) expected.push_back(n);
  EXPECT_EQ(K.tips(), expected);
  EXPECT_EQ(K.tips_by_degree(), expected);
  EXPECT_FALSE(std::binary_search(K.tips().begin(), K.tips().end(), id(3, 4)));
  EXPECT_EQ(K.degree(id(3, 4)), 3);
}

TEST(Crack, PathErrors) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  auto id = [&](int i, int j) { return rect_node_id(*mesh, i, j); };
  EXPECT_THROW(crack_from_path(mesh, {id(1, 4), id(3, 4)}), GeometryError);
  EXPECT_THROW(crack_from_path(mesh, {id(1, 4), id(2, 4), id(1, 4)}), GeometryError);
}

TEST(Crack, OneDimensionalCuts) {
  auto bar = build_interval_mesh(1.0, 8);
  const auto K = crack_from_path(bar, {4});
  EXPECT_EQ(K.cut_nodes(), std::vector<int>{4});
  EXPECT_DOUBLE_EQ(K.length(), 1.0);
}

TEST(Region, SaturatesAndEmpties) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  const auto K = mid_crack(mesh, 8, 3, 4);
  const auto whole = whole_region(mesh);
  EXPECT_EQ(tubular_region(K, whole, 10.0).size(), mesh->num_elements());
  EXPECT_TRUE(tubular_region(K, whole, 1e-9).empty());
}

TEST(Region, EmptyRestrictionGivesEmptyRegion) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  const auto K = left_crack(mesh, 8, 4);
  const auto far = ball_region(mesh, Point(0.9, 0.9), 0.05);
  EXPECT_TRUE(tubular_region(K, far, 0.3).empty());
}

TEST(Region, TipBallAreaMatchesDisk) {
  const int res = 16;
  auto mesh = build_rect_mesh(1.0, 1.0, res);
  const auto K = left_crack(mesh, res, 8);
  const double r = 0.25, h = mesh->mesh_size();
  const auto D = tubular_region(K, whole_region(mesh), r);
  EXPECT_NEAR(D.area(), kPi * r * r, 2 * h * 2 * kPi * r);
  // Exact ball fractions are far tighter than barycenter selection.
  double exact = 0.0;
  for (const auto& cf : ball_cell_fractions(*mesh, {Point(0.5, 0.5)}, r))
    exact += cf.fraction * mesh->element_measure(cf.cell);
  EXPECT_NEAR(exact, kPi * r * r, 1e-4);
}

TEST(Region, OneDimensionalBallFractions) {
  auto bar = build_interval_mesh(1.0, 10);
  double len = 0.0;
  for (const auto& cf : ball_cell_fractions(*bar, {Point(0.5, 0.0)}, 0.23))
    len += cf.fraction * bar->element_measure(cf.cell);
  EXPECT_NEAR(len, 0.46, 1e-12);
}

TEST(Dilate, IdentityAndScaling) {
  const std::vector<Point> pts{Point(0.1, 0.2), Point(0.7, -0.3)};
  const auto same = dilate(pts, Point(0.4, 0.4), 1.0);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NEAR((same[i] - pts[i]).norm(), 0.0, 1e-15);
  const auto scaled = dilate(pts, Point(-2.0, 5.0), 0.3);
  EXPECT_NEAR((scaled[1] - scaled[0]).norm(), 0.3 * (pts[1] - pts[0]).norm(), 1e-14);
  const auto sq = dilate({Point(0, 0), Point(1, 0), Point(0, 1), Point(1, 1)}, Point(0, 0), 2.0);
  EXPECT_EQ(sq[3], Point(2, 2));
  EXPECT_EQ(sq[1], Point(2, 0));
  EXPECT_EQ(sq[2], Point(0, 2));
}

TEST(Clip, PolylineAgainstSquare) {
  auto mesh = build_rect_mesh(1.0, 1.0, 4);
  EXPECT_NEAR(clipped_length({Point(-0.5, 0.5), Point(0.5, 0.5)}, *mesh), 0.5, 1e-12);
  EXPECT_NEAR(clipped_length({Point(0.2, 0.2), Point(0.8, 0.2), Point(0.8, 0.9)}, *mesh), 1.3, 1e-12);
  EXPECT_NEAR(clipped_length({Point(2, 2), Point(3, 3)}, *mesh), 0.0, 1e-15);
}

TEST(OffsetBoundary, CircleAndStadiumPerimeters) {
  auto mesh = build_rect_mesh(1.0, 1.0, 4);
  auto total = [](const std::vector<CurveSample>& s) {
    double L = 0.0;
    for (const auto& c : s) L += c.weight;
    return L;
  };
  EXPECT_NEAR(total(offset_boundary({{Point(0.5, 0.5)}}, 0.2, *mesh)), 2 * kPi * 0.2, 1e-5);
  EXPECT_NEAR(total(offset_boundary({{Point(0.3, 0.5), Point(0.7, 0.5)}}, 0.1, *mesh)), 0.8 + 2 * kPi * 0.1, 1e-5);
  // Half of the circle lies outside the square.
  EXPECT_NEAR(total(offset_boundary({{Point(0.0, 0.5)}}, 0.2, *mesh)), kPi * 0.2, 1e-5);
}

TEST(Plateau, RampValues) {
  EXPECT_EQ(plateau(0.1, 0.2, 0.5), 1.0);
  EXPECT_EQ(plateau(0.6, 0.2, 0.5), 0.0);
  EXPECT_NEAR(plateau(0.35, 0.2, 0.5), 0.5, 1e-14);
}

TEST(Flow, ZeroFieldIsIdentity) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  const auto flow = integrate_flow(VectorField::zero(mesh), 0.7);
  for (std::size_t n = 0; n < mesh->num_nodes(); ++n)
    EXPECT_EQ((flow.positions[n] - mesh->node(static_cast<int>(n))).norm(), 0.0);
}

TEST(Flow, PlateauTranslatesTip) {
  auto mesh = build_rect_mesh(1.0, 1.0, 16);
  const Point tip(0.5, 0.5);
  const auto f = VectorField::tip_extension(mesh, tip, Vec2(1, 0), 0.1, 0.3);
  const double t = 0.01;
  const auto moved = flow_points(f, {tip}, t, 8);
  EXPECT_NEAR((moved[0] - (tip + t * Vec2(1, 0))).norm(), 0.0, 1e-12);
}

TEST(Flow, ForwardThenBackward) {
  auto mesh = build_rect_mesh(1.0, 1.0, 16);
  const auto f = VectorField::tip_extension(mesh, Point(0.5, 0.5), Vec2(0.6, 0.8), 0.05, 0.3);
  const std::vector<Point> pts{Point(0.4, 0.45), Point(0.6, 0.62), Point(0.52, 0.33)};
  const auto back = flow_points(f, flow_points(f, pts, 0.05, 32), -0.05, 32);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NEAR((back[i] - pts[i]).norm(), 0.0, 1e-8);
}

TEST(Flow, InversionIsReported) {
  auto mesh = build_rect_mesh(1.0, 1.0, 16);
  const auto f = VectorField::tip_extension(mesh, Point(0.5, 0.5), Vec2(1, 0), 0.0, 0.07);
  try {
    integrate_flow(f, 1.0, 4);
    FAIL() << "expected an inversion";
  } catch (const FlowError& e) {
    EXPECT_NE(std::string(e.what()).find("element"), std::string::npos);
  }
}

TEST(Admissibility, ZeroFieldPasses) {
  auto mesh = build_rect_mesh(1.0, 1.0, 16);
  const auto S = left_crack(mesh, 16, 8);
  EXPECT_TRUE(is_admissible_variation(VectorField::zero(mesh), S, S).admissible);
}

TEST(Admissibility, TangentialTipFieldPasses) {
  auto mesh = build_rect_mesh(1.0, 1.0, 16);
  const auto S = left_crack(mesh, 16, 8);
  const int tip = S.tips().front();
  const double h = mesh->mesh_size();
  const auto f = tip_fan_field(S, tip, S.outward_tangent(tip), 2 * h, 5 * h);
  EXPECT_TRUE(is_admissible_variation(f, CrackSet(mesh), S).admissible);
}

TEST(Admissibility, NormalFieldRejected) {
  auto mesh = build_rect_mesh(1.0, 1.0, 16);
  const auto S = left_crack(mesh, 16, 8);
  const double h = mesh->mesh_size();
  const auto f = VectorField::tip_extension(mesh, mesh->node(S.tips().front()), Vec2(0, 1), 2 * h, 5 * h);
  const auto r = is_admissible_variation(f, CrackSet(mesh), S);
  EXPECT_FALSE(r.admissible);
  ASSERT_FALSE(r.reasons.empty());
  EXPECT_NE(r.reasons.front().find("not tangential"), std::string::npos);
}

TEST(Admissibility, RetractionAndBoundaryRejected) {
  auto mesh = build_rect_mesh(1.0, 1.0, 16);
  const auto S = left_crack(mesh, 16, 8);
  const int tip = S.tips().front();
  const double h = mesh->mesh_size();
  const auto back = tip_fan_field(S, tip, -S.outward_tangent(tip), 2 * h, 5 * h);
  EXPECT_FALSE(is_admissible_variation(back, CrackSet(mesh), S).admissible);
  const auto big = VectorField::tip_extension(mesh, mesh->node(tip), Vec2(1, 0), 0.6, 0.8);
  EXPECT_FALSE(is_admissible_variation(big, CrackSet(mesh), S).admissible);
  // Sliding the crack where it lies in K is not allowed.
  const auto slide = tip_fan_field(S, tip, S.outward_tangent(tip), 2 * h, 5 * h);
  EXPECT_FALSE(is_admissible_variation(slide, S, S).admissible);
}

TEST(VectorField, CombinationIsLinear) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  const auto a = VectorField::tip_extension(mesh, Point(0.5, 0.5), Vec2(1, 0), 0.1, 0.3);
  const auto b = VectorField::tip_extension(mesh, Point(0.5, 0.5), Vec2(0, 1), 0.1, 0.3);
  const auto c = a.combined(0.25, b, 0.5);
  for (std::size_t n = 0; n < mesh->num_nodes(); ++n) {
    const Vec2 want = 0.25 * a.nodal_values()[n] + 0.5 * b.nodal_values()[n];
    EXPECT_NEAR((c.nodal_values()[n] - want).norm(), 0.0, 1e-15);
  }
}

}  // namespace
