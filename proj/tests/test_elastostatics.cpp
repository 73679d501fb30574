#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "brittle/config_measures.hpp"
#include "brittle/oracles.hpp"
#include "brittle/states.hpp"
#include "fixtures.hpp"

using namespace brittle;
using fixtures::left_crack;
using fixtures::mu1;

namespace {

const SurfaceEnergy kG1 = SurfaceEnergy::griffith(1.0);

TEST(CrackedSpace, DuplicatesCrackNodesButNotTips) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  const auto K = left_crack(mesh, 8, 4);
  const auto space = make_space(mesh, K);
  // Mouth and three interior path nodes split, the tip does not.
  EXPECT_EQ(space->num_dofs(), static_cast<int>(mesh->num_nodes()) + 4);
  EXPECT_EQ(space->node_dofs(rect_node_id(*mesh, 0, 4)).size(), 2u);
  EXPECT_EQ(space->node_dofs(rect_node_id(*mesh, 2, 4)).size(), 2u);
  EXPECT_EQ(space->node_dofs(K.tips().front()).size(), 1u);
  // The mouth dofs sit on the crack, so they are free.
  for (int d : space->node_dofs(rect_node_id(*mesh, 0, 4))) EXPECT_FALSE(space->is_dirichlet(d));
  EXPECT_EQ(space->num_components(), 1);
}

TEST(CrackedSpace, OneDimensionalCutSplitsNode) {
  auto bar = build_interval_mesh(1.0, 4);
  const auto space = make_space(bar, crack_from_path(bar, {2}));
  EXPECT_EQ(space->num_dofs(), 6);
  EXPECT_EQ(space->num_components(), 2);
}

TEST(Solve, OneDimensionalLinear) {
  auto bar = build_interval_mesh(1.0, 8);
  const double t = 1.3;
  const auto st = solve_crack(bar, CrackSet(bar), mu1(), kG1, fixtures::bar_load(t));
  for (std::size_t n = 0; n < bar->num_nodes(); ++n)
    EXPECT_NEAR(st.node_value(static_cast<int>(n)), t * bar->node(static_cast<int>(n)).x(), 1e-12);
}

TEST(Solve, OneDimensionalCutAtMidpoint) {
  auto bar = build_interval_mesh(1.0, 8);
  const double t = 0.9;
  const auto st = solve_crack(bar, crack_from_path(bar, {4}), mu1(), kG1, fixtures::bar_load(t));
  const auto& space = *st.space();
  for (int d = 0; d < space.num_dofs(); ++d) {
    const int n = space.dof_node(d);
    const bool left = n < 4 || (n == 4 && space.dof_elements(d).front() == 3);
    EXPECT_NEAR(st.displacement()[d], left ? 0.0 : t, 1e-12) << "dof " << d;
  }
  EXPECT_NEAR(st.energy().elastic, 0.0, 1e-20);
}

TEST(Solve, PatchTestReproducesLinearField) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  const auto st = solve_crack(mesh, CrackSet(mesh), mu1(), kG1, linear_displacement(Vec2(1, 0)));
  for (std::size_t n = 0; n < mesh->num_nodes(); ++n)
    EXPECT_NEAR(st.node_value(static_cast<int>(n)), mesh->node(static_cast<int>(n)).x(), 1e-9);
  EXPECT_NEAR(st.energy().elastic, 0.5, 1e-9);
  EXPECT_LE(residual_report(st, mu1()).divergence_residual, 1e-8);
}

TEST(Solve, SlitFacesCarryDifferentValues) {
  auto mesh = build_rect_mesh(1.0, 1.0, 16);
  const auto K = left_crack(mesh, 16, 8);
  const auto st = solve_crack(mesh, K, mu1(), kG1, linear_displacement(Vec2(0, 1)));
  const auto& dofs = st.space()->node_dofs(rect_node_id(*mesh, 2, 8));
  ASSERT_EQ(dofs.size(), 2u);
  EXPECT_GT(std::abs(st.displacement()[dofs[0]] - st.displacement()[dofs[1]]), 0.05);
  const auto rep = residual_report(st, mu1());
  EXPECT_LE(rep.divergence_residual, 1e-8);
  EXPECT_LE(rep.traction_residual, 1e-8);
}

TEST(Solve, FloatingIslandIsGaugedAndFlagged) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  auto id = [&](int i, int j) { return rect_node_id(*mesh, i, j); };
  const CrackSet loop(mesh, {{id(3, 3), id(4, 3), id(5, 3), id(5, 4), id(5, 5)},
                             {id(3, 3), id(3, 4), id(3, 5), id(4, 5), id(5, 5)}});
  const auto st = solve_crack(mesh, loop, mu1(), kG1, linear_displacement(Vec2(1, 1)));
  EXPECT_EQ(st.diagnostics().floating_components, 1);
  EXPECT_EQ(st.space()->num_components(), 2);
  // The island is unloaded, so its displacement is the zero constant.
  const int inner = id(4, 4);
  EXPECT_NEAR(st.node_value(inner), 0.0, 1e-12);
}

TEST(Residual, TruncatedAndNoisyStates) {
  auto mesh = build_rect_mesh(1.0, 1.0, 16);
  const auto K = left_crack(mesh, 16, 8);
  SolverOptions cut;
  cut.max_iterations = 2;
  cut.allow_unconverged = true;
  const auto rough = solve_crack(mesh, K, mu1(), kG1, linear_displacement(Vec2(0, 1)), cut);
  EXPECT_FALSE(rough.diagnostics().converged);
  EXPECT_GT(residual_report(rough, mu1()).divergence_residual, 1e-4);

  const auto good = solve_crack(mesh, K, mu1(), kG1, linear_displacement(Vec2(0, 1)));
  Eigen::VectorXd u = good.displacement();
  std::mt19937 rng(11);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int d = 0; d < u.size(); ++d)
    if (!good.space()->is_dirichlet(d)) u[d] += noise(rng);
  const auto noisy = good.with_displacement(u, mu1(), kG1);
  EXPECT_GT(residual_report(noisy, mu1()).divergence_residual, 0.05);
}

TEST(Solve, UnconvergedThrowsWithHistory) {
  auto mesh = build_rect_mesh(1.0, 1.0, 16);
  SolverOptions cut;
  cut.max_iterations = 2;
  try {
    solve_crack(mesh, left_crack(mesh, 16, 8), mu1(), kG1, linear_displacement(Vec2(0, 1)), cut);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_FALSE(e.history().empty());
  }
}

TEST(Solve, NewtonMatchesQuadraticForUserDensity) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  const auto K = left_crack(mesh, 8, 4);
  const auto user = Material::user([](const Vec2& g) { return 0.5 * g.squaredNorm(); }, "quadratic-as-user");
  const auto u0 = linear_displacement(Vec2(0.3, 1.0));
  const auto a = solve_crack(mesh, K, mu1(), kG1, u0);
  const auto b = solve_crack(mesh, K, user, kG1, u0);
  EXPECT_NEAR(a.energy().elastic, b.energy().elastic, 1e-8);
}

TEST(Continuity, LinearDataIsContinuous) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  EXPECT_TRUE(check_boundary_continuity(linear_displacement(Vec2(1, 2)), *mesh).continuous);
}

TEST(Continuity, TipFieldJumpsUnlessDeclared) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  auto u0 = mode3_displacement(1.0, Point(0.5, 0.5));
  EXPECT_FALSE(check_boundary_continuity(u0, *mesh).continuous);
  u0.break_points.push_back(Point(0.0, 0.5));
  EXPECT_TRUE(check_boundary_continuity(u0, *mesh).continuous);
}

TEST(Pushforward, IdentityAndZeroFieldKeepEnergies) {
  auto mesh = build_rect_mesh(1.0, 1.0, 16);
  const auto K = left_crack(mesh, 16, 8);
  const auto u0 = linear_displacement(Vec2(0, 1));
  const auto st = solve_crack(mesh, K, mu1(), kG1, u0);
  FlowMap id{VectorField::zero(mesh), 0.0, 1, mesh->nodes()};
  const auto same = pushforward_state(st, id, mu1(), kG1, u0);
  EXPECT_DOUBLE_EQ(same.energy().total, st.energy().total);
  const auto zero = pushforward_state(st, integrate_flow(VectorField::zero(mesh), 0.3), mu1(), kG1, u0);
  EXPECT_DOUBLE_EQ(zero.energy().total, st.energy().total);
}

TEST(Pushforward, TipFieldChangesEnergyAtReleaseRate) {
  auto disk = build_disk_mesh(1.0, 1.0 / 32);
  const auto mf = manufactured_state(disk, 1.0, 1.0);
  const double h = disk->mesh_size();
  const auto field = tip_fan_field(mf.state.crack(), mf.tip, mf.state.crack().outward_tangent(mf.tip), 4 * h, 12 * h);
  const double er = energy_release_rate(mf.state, mu1(), field, CrackSet(disk)).value;
  const double t = 1e-3;
  const auto moved = pushforward_state(mf.state, integrate_flow(field, t), mu1(), kG1, mode3_displacement(1.0, Point::Zero()));
  const double dq = -(moved.energy().elastic - mf.state.energy().elastic) / t;
  EXPECT_NEAR(dq, er, 0.02 * er);
  // Surface side: the tip advances at unit rate.
  EXPECT_NEAR((moved.energy().surface - mf.state.energy().surface) / t, 1.0, 1e-6);
}

TEST(Pushforward, InversionRaises) {
  auto mesh = build_rect_mesh(1.0, 1.0, 8);
  const auto u0 = linear_displacement(Vec2(0, 1));
  const auto st = solve_crack(mesh, CrackSet(mesh), mu1(), kG1, u0);
  FlowMap bad{VectorField::zero(mesh), 1.0, 1, mesh->nodes()};
  std::swap(bad.positions[static_cast<std::size_t>(rect_node_id(*mesh, 4, 4))],
            bad.positions[static_cast<std::size_t>(rect_node_id(*mesh, 5, 4))]);
  EXPECT_THROW(pushforward_state(st, bad, mu1(), kG1, u0), FlowError);
}

}  // namespace
