#include <cmath>

#include <gtest/gtest.h>

#include "brittle/quasistatic.hpp"
#include "fixtures.hpp"

using namespace brittle;
using fixtures::left_crack;
using fixtures::mu1;

namespace {

const SurfaceEnergy kG1 = SurfaceEnergy::griffith(1.0);

SearchOptions depth(int d) {
  SearchOptions o;
  o.depth = d;
  return o;
}

LoadSchedule bar_schedule(std::vector<double> times) {
  return LoadSchedule{std::move(times), linear_displacement(Vec2(1, 0))};
}

TEST(Schedule, Validation) {
  EXPECT_THROW(bar_schedule({}).validate(), std::invalid_argument);
  EXPECT_THROW(bar_schedule({1.0, 1.0}).validate(), std::invalid_argument);
  EXPECT_NO_THROW(bar_schedule({0.5, 1.0}).validate());
}

TEST(Minimal, BarJumpsAtFirstLoadAboveThreshold) {
  auto bar = build_interval_mesh(1.0, 8);
  const auto traj = evolve_minimal(bar, CrackSet(bar), bar_schedule({1.0, 1.2, 1.4, 1.5, 1.7}), mu1(), kG1, depth(1));
  ASSERT_EQ(traj.steps.size(), 5u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(traj.steps[i].state.crack().empty()) << i;
  EXPECT_EQ(traj.steps[3].state.crack().cut_nodes().size(), 1u);
  EXPECT_NEAR(traj.steps[3].state.energy().total, 1.0, 1e-10);
  EXPECT_EQ(traj.steps[4].state.crack(), traj.steps[3].state.crack());
  EXPECT_TRUE(audit_axioms(traj, mu1(), kG1).ok());
}

TEST(Minimal, BelowThresholdKeepsK) {
  auto bar = build_interval_mesh(1.0, 8);
  const auto traj = evolve_minimal(bar, CrackSet(bar), bar_schedule({0.2, 0.6, 1.0, 1.4}), mu1(), kG1, depth(1));
  for (const auto& s : traj.steps) EXPECT_TRUE(s.state.crack().empty());
}

TEST(Minimal, ConstantLoadGivesConstantTrajectory) {
  auto bar = build_interval_mesh(1.0, 8);
  BoundaryDisplacement fixed;
  fixed.fn = [](const Point& x, double) { return 1.8 * x.x(); };
  const auto traj = evolve_minimal(bar, CrackSet(bar), LoadSchedule{{0.0, 1.0, 2.0, 3.0}, fixed}, mu1(), kG1, depth(1));
  for (std::size_t i = 1; i < traj.steps.size(); ++i) {
    EXPECT_EQ(traj.steps[i].state.crack(), traj.steps[0].state.crack());
    EXPECT_DOUBLE_EQ(traj.steps[i].state.energy().total, traj.steps[0].state.energy().total);
  }
}

TEST(Minimal, BudgetExhaustionKeepsPartialTrajectory) {
  auto mesh = build_rect_mesh(1.0, 1.0, 16);
  SearchOptions o = depth(1);
  o.budget = 3;
  const LoadSchedule sched{{0.5, 3.0}, linear_displacement(Vec2(0, 1))};
  try {
    evolve_minimal(mesh, left_crack(mesh, 16, 8), sched, mu1(), kG1, o);
    FAIL() << "expected EvolutionError";
  } catch (const EvolutionError& e) {
    EXPECT_TRUE(e.partial().steps.empty());
    EXPECT_NE(std::string(e.what()).find("t = 0.5"), std::string::npos);
  }
}

TEST(Equilibrium, BarMatchesMinimal) {
  auto bar = build_interval_mesh(1.0, 8);
  const auto sched = bar_schedule({1.0, 1.3, 1.45, 1.8});
  const auto a = evolve_minimal(bar, CrackSet(bar), sched, mu1(), kG1, depth(1));
  const auto b = evolve_equilibrium(bar, CrackSet(bar), sched, mu1(), kG1, depth(1));
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].state.crack(), b.steps[i].state.crack());
    EXPECT_NEAR(a.steps[i].state.energy().total, b.steps[i].state.energy().total, 1e-12);
  }
  EXPECT_EQ(b.steps[2].hops.size(), 1u);
  EXPECT_TRUE(audit_axioms(b, mu1(), kG1).ok());
}

TEST(Equilibrium, HopsStopAtAnEquilibrium) {
  auto mesh = build_rect_mesh(1.0, 1.0, 16);
  const auto K = left_crack(mesh, 16, 4);
  const LoadSchedule sched{{0.8, 1.6}, linear_displacement(Vec2(0, 1))};
  const auto traj = evolve_equilibrium(mesh, K, sched, mu1(), SurfaceEnergy::griffith(0.5), depth(1));
  for (const auto& s : traj.steps) EXPECT_TRUE(s.certificate.equilibrium);
  EXPECT_TRUE(traj.steps.back().state.crack().contains(K));
  EXPECT_TRUE(audit_axioms(traj, mu1(), SurfaceEnergy::griffith(0.5)).a4);
}

Trajectory hand_built(const MeshPtr& bar, const std::vector<std::pair<double, CrackSet>>& steps) {
  Trajectory traj;
  traj.mode = EvolutionMode::minimal;
  traj.mesh = bar;
  traj.K = CrackSet(bar);
  traj.schedule = bar_schedule({});
  for (const auto& [t, S] : steps) {
    traj.schedule.times.push_back(t);
    traj.steps.push_back({t, solve_crack(bar, S, mu1(), kG1, traj.schedule.at(t)), {}, {}});
  }
  return traj;
}

TEST(Audit, ShrinkingCrackViolatesIrreversibility) {
  auto bar = build_interval_mesh(1.0, 8);
  const auto cut = crack_from_path(bar, {3});
  const auto audit = audit_axioms(hand_built(bar, {{2.0, cut}, {2.1, CrackSet(bar)}}), mu1(), kG1);
  EXPECT_FALSE(audit.a4);
  ASSERT_FALSE(audit.violations.empty());
  EXPECT_EQ(audit.violations.front().axiom, "A4");
}

TEST(Audit, EarlyOvercrackingViolatesSelection) {
  auto bar = build_interval_mesh(1.0, 8);
  const auto cut = crack_from_path(bar, {3});
  const auto audit = audit_axioms(hand_built(bar, {{0.5, CrackSet(bar)}, {1.0, cut}}), mu1(), kG1);
  EXPECT_TRUE(audit.a4);
  EXPECT_FALSE(audit.a5);
  bool found = false;
  for (const auto& v : audit.violations)
    if (v.axiom == "A5" && v.i == 0 && v.j == 1) {
      found = true;
      EXPECT_NEAR(v.gap, 0.5 - 1.0, 1e-10);
    }
  EXPECT_TRUE(found);
}

TEST(Audit, ManipulatedBoundaryData) {
  auto bar = build_interval_mesh(1.0, 8);
  auto traj = hand_built(bar, {{1.0, CrackSet(bar)}});
  Eigen::VectorXd u = traj.steps[0].state.displacement();
  u[u.size() - 1] += 0.1;
  traj.steps[0].state = traj.steps[0].state.with_displacement(u, mu1(), kG1);
  EXPECT_FALSE(audit_axioms(traj, mu1(), kG1).a2);
}

TEST(CriticalLoad, BarThresholdAndScaling) {
  auto bar = build_interval_mesh(1.0, 8);
  const auto family = linear_displacement(Vec2(1, 0));
  const auto one = critical_load_bisection(bar, CrackSet(bar), mu1(), kG1, family, 0.5, 3.0, 1e-8, depth(1));
  EXPECT_NEAR(one.t_star, std::sqrt(2.0), 1e-6);
  const auto two =
      critical_load_bisection(bar, CrackSet(bar), mu1(), SurfaceEnergy::griffith(2.0), family, 0.5, 3.0, 1e-8, depth(1));
  EXPECT_NEAR(two.t_star / one.t_star, std::sqrt(2.0), 1e-6);
}

TEST(CriticalLoad, BracketMustStraddle) {
  auto bar = build_interval_mesh(1.0, 8);
  const auto family = linear_displacement(Vec2(1, 0));
  EXPECT_THROW(critical_load_bisection(bar, CrackSet(bar), mu1(), kG1, family, 0.1, 1.0, 1e-8, depth(1)),
               std::invalid_argument);
  EXPECT_THROW(critical_load_bisection(bar, CrackSet(bar), mu1(), kG1, family, 2.0, 3.0, 1e-8, depth(1)),
               std::invalid_argument);
}

TEST(CriticalLoad, TangentialReleaseRateNearToughness) {
  const int res = 16;
  auto mesh = build_rect_mesh(1.0, 1.0, res);
  const auto K = left_crack(mesh, res, 8);
  const auto family = mode3_displacement(1.0, mesh->node(K.tips().front()));
  const auto cl = critical_load_bisection(mesh, K, mu1(), kG1, family, 0.5, 3.0, 1e-6, depth(1));
  ASSERT_EQ(cl.tangential_er.size(), 1u);
  EXPECT_NEAR(cl.tangential_er[0] / cl.griffith[0], 1.0, 0.1);
}

class Chain : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    mesh_ = build_rect_mesh(1.0, 1.0, 32);
    const auto K = left_crack(mesh_, 32, 16);
    const LoadSchedule sched{{0.4, 0.8, 1.2, 1.4}, mode3_displacement(1.0, mesh_->node(K.tips().front()))};
    traj_ = new Trajectory(evolve_minimal(mesh_, K, sched, mu1(), kG1, depth(1)));
  }
  static void TearDownTestSuite() {
    delete traj_;
    traj_ = nullptr;
  }
  static std::vector<std::pair<std::string, RegionBuilder>> regions() {
    return {{"whole", [](const State& s) { return whole_region(s.space()->mesh()); }},
            {"corner", [](const State& s) { return ball_region(s.space()->mesh(), Point(0.85, 0.15), 0.1); }}};
  }
  // Radii and plateaus that stay well inside the domain at this resolution.
  static MeasureSettings settings() {
    MeasureSettings m;
    m.concentration_radii = {6.0, 4.5, 3.5, 2.5};
    m.family.plateaus = {{3.0, 6.0}, {2.0, 4.5}};
    return m;
  }
  static inline MeshPtr mesh_;
  static inline Trajectory* traj_ = nullptr;
};

TEST_F(Chain, InequalitiesHoldAndTipFreeRegionIsZero) {
  const auto rep = verify_equality_chain(*traj_, mu1(), kG1, regions(), settings());
  EXPECT_TRUE(rep.precondition_ok) << rep.precondition;
  EXPECT_TRUE(rep.inequalities_hold);
  ASSERT_EQ(rep.rows.size(), 2 * traj_->steps.size());
  bool propagates = false;
  for (const auto& row : rep.rows) {
    propagates = propagates || row.propagating;
    EXPECT_TRUE(row.er_le_ce && row.ce_le_cf) << row.step << " " << row.region << " ER " << row.er.value << " +- " << row.er.error << " CE " << row.ce.value << " +- " << row.ce.error << " CF " << row.cf.value;
    if (row.region == "corner") {
      EXPECT_EQ(row.er.value, 0.0);
      EXPECT_EQ(row.ce.value, 0.0);
      EXPECT_EQ(row.cf.value, 0.0);
    }
  }
  EXPECT_TRUE(propagates);
}

TEST_F(Chain, EquilibriumTrajectoryFailsPrecondition) {
  Trajectory copy = *traj_;
  copy.mode = EvolutionMode::equilibrium;
  EXPECT_FALSE(verify_equality_chain(copy, mu1(), kG1, regions()).precondition_ok);
}

}  // namespace
