#include "brittle/quasistatic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace brittle {

void LoadSchedule::validate() const {
  if (times.empty()) throw std::invalid_argument("load schedule is empty");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("load schedule times must be strictly increasing");
  if (!base.fn) throw std::invalid_argument("load schedule has no boundary displacement");
}

namespace {

const char* kReading =
    "equilibrium read as: no enumerated extension of S_t lowers the total energy at load u0(t)";

}  // namespace

Trajectory evolve_minimal(MeshPtr mesh, const CrackSet& K, const LoadSchedule& schedule, const Material& m,
                          const SurfaceEnergy& F, const SearchOptions& options) {
  schedule.validate();
  auto traj = std::make_shared<Trajectory>();
  traj->mode = EvolutionMode::minimal;
  traj->mesh = mesh;
  traj->K = K.mesh() ? K : CrackSet(mesh);
  traj->schedule = schedule;
  traj->reading = kReading;
  CrackSet current = traj->K;
  for (double t : schedule.times) {
    try {
      auto res = find_absolute_minimum(mesh, current, schedule.at(t), m, F, options);
      current = res.state.crack();
      traj->steps.push_back({t, std::move(res.state), std::move(res.certificate), {}});
    } catch (const BudgetError& e) {
      std::ostringstream os;
      os << "minimal evolution stopped at t = " << t << ": " << e.what();
      throw EvolutionError(os.str(), traj);
    }
  }
  return std::move(*traj);
}

Trajectory evolve_equilibrium(MeshPtr mesh, const CrackSet& K, const LoadSchedule& schedule, const Material& m,
                              const SurfaceEnergy& F, const SearchOptions& options) {
  schedule.validate();
  auto traj = std::make_shared<Trajectory>();
  traj->mode = EvolutionMode::equilibrium;
  traj->mesh = mesh;
  traj->K = K.mesh() ? K : CrackSet(mesh);
  traj->schedule = schedule;
  traj->reading = kReading;
  CrackSet current = traj->K;
  for (double t : schedule.times) {
    const auto u0 = schedule.at(t);
    try {
      State state = solve_crack(mesh, current, m, F, u0, options.solver);
      std::vector<std::string> hops;
      for (int hop = 0;; ++hop) {
        auto check = is_equilibrium(state, traj->K, u0, m, F, options);
        if (check.certificate.equilibrium) {
          current = state.crack();
          traj->steps.push_back({t, std::move(state), std::move(check.certificate), std::move(hops)});
          break;
        }
        if (!check.witness) throw EvolutionError("no admissible extension of a non-equilibrium state", traj);
        if (hop > 10000) throw EvolutionError("equilibrium hops did not terminate", traj);
        state = *check.witness;
        hops.push_back(state.crack().key());
      }
    } catch (const BudgetError& e) {
      std::ostringstream os;
      os << "equilibrium evolution stopped at t = " << t << ": " << e.what();
      throw EvolutionError(os.str(), traj);
    }
  }
  return std::move(*traj);
}

AxiomAudit audit_axioms(const Trajectory& trajectory, const Material& m, const SurfaceEnergy& F, double rel_tol) {
  AxiomAudit audit;
  const auto& steps = trajectory.steps;
  if (steps.empty()) return audit;
  if (trajectory.K.mesh() && !steps[0].state.crack().contains(trajectory.K)) {
    audit.a1 = false;
    audit.violations.push_back({"A1", 0, 0, 0.0, "initial crack does not contain K"});
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto rep = is_admissible(steps[i].state, trajectory.K, trajectory.schedule.at(steps[i].t));
    if (!rep.dirichlet_ok) {
      audit.a2 = false;
      audit.violations.push_back({"A2", static_cast<int>(i), static_cast<int>(i), 0.0, rep.detail});
    }
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    for (std::size_t j = i + 1; j < steps.size(); ++j) {
      if (!steps[j].state.crack().contains(steps[i].state.crack())) {
        audit.a4 = false;
        audit.violations.push_back({"A4", static_cast<int>(i), static_cast<int>(j), 0.0, "crack shrinks"});
      }
    }
  }
  const MeshPtr mesh = trajectory.mesh ? trajectory.mesh : steps[0].state.space()->mesh();
  for (std::size_t j = 0; j < steps.size(); ++j) {
    const auto u0 = trajectory.schedule.at(steps[j].t);
    const double ej = steps[j].state.energy().total;
    const double tol = rel_tol * (1.0 + std::abs(ej));
    for (std::size_t i = 0; i <= j; ++i) {
      const double ev = solve_crack(mesh, steps[i].state.crack(), m, F, u0).energy().total;
      if (ev < ej - tol) {
        audit.a5 = false;
        std::ostringstream os;
        os << "E(v, S_" << i << ") at t_" << j << " = " << ev << " < " << ej;
        audit.violations.push_back({"A5", static_cast<int>(i), static_cast<int>(j), ev - ej, os.str()});
      }
    }
  }
  return audit;
}

CriticalLoad critical_load_bisection(MeshPtr mesh, const CrackSet& K, const Material& m, const SurfaceEnergy& F,
                                     const BoundaryDisplacement& family, double lo, double hi, double tol,
                                     const SearchOptions& options) {
  if (!(lo < hi)) throw std::invalid_argument("bisection bracket must satisfy lo < hi");
  const CrackSet base = K.mesh() ? K : CrackSet(mesh);
  auto cracked = [&](double t) {
    const auto res = find_absolute_minimum(mesh, base, family.at(t), m, F, options);
    return !(res.state.crack() == base);
  };
  if (cracked(lo) || !cracked(hi)) throw std::invalid_argument("bisection bracket does not straddle the transition");
  CriticalLoad out;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (cracked(mid) ? hi : lo) = mid;
    ++out.iterations;
  }
  out.lo = lo;
  out.hi = hi;
  out.t_star = 0.5 * (lo + hi);
  if (mesh->dimension() == 2) {
    const State at = solve_crack(mesh, base, m, F, family.at(out.t_star), options.solver);
    const double h = mesh->mesh_size();
    const auto [a, b] = FamilyOptions{}.plateaus.back();
    for (int tip : base.tips()) {
      const auto f = tip_fan_field(base, tip, base.outward_tangent(tip), a * h, b * h);
      out.tangential_er.push_back(energy_release_rate(at, m, f, CrackSet(mesh)).value);
      out.griffith.push_back(F.density_at(mesh->node(tip)));
    }
  }
  return out;
}

std::vector<double> MeasureSettings::absolute_radii(const Mesh& mesh) const {
  std::vector<double> r;
  for (double k : concentration_radii) r.push_back(k * mesh.mesh_size());
  return r;
}

EqualityChainReport verify_equality_chain(const Trajectory& trajectory, const Material& m, const SurfaceEnergy& F,
                                   const std::vector<std::pair<std::string, RegionBuilder>>& regions,
                                   const MeasureSettings& settings) {
  EqualityChainReport rep;
  rep.precondition_ok = trajectory.mode == EvolutionMode::minimal;
  if (!rep.precondition_ok) rep.precondition = "requires a minimal trajectory";
  for (const auto& step : trajectory.steps) {
    for (int n : step.state.crack().nodes()) {
      if (step.state.crack().degree(n) > 2) {
        rep.precondition_ok = false;
        rep.precondition = "crack branches at node " + std::to_string(n);
      }
    }
  }
  if (rep.precondition_ok) rep.precondition = "single-path growth";
  for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
    const auto& st = trajectory.steps[i];
    const State& s = st.state;
    if (s.mesh().dimension() != 2) continue;
    const bool propagating = i > 0 && !(s.crack() == trajectory.steps[i - 1].state.crack());
    const auto radii = settings.absolute_radii(s.mesh());
    const CrackSet none(s.space()->mesh());
    for (const auto& [name, build] : regions) {
      const Region D = build(s);
      EqualityChainRow row;
      row.step = static_cast<int>(i);
      row.t = st.t;
      row.region = name;
      row.propagating = propagating;
      row.er = er_total_variation(s, m, D, none, settings.family);
      row.ce = elastic_concentration(s, m, D, radii);
      row.cf = surface_concentration(F, s.crack(), D, radii);
      row.er_le_ce = row.er.value <= row.ce.value + row.er.error + row.ce.error;
      row.ce_le_cf = row.ce.value <= row.cf.value + row.ce.error + row.cf.error;
      row.er_minus_ce = row.er.value - row.ce.value;
      row.ce_minus_cf = row.ce.value - row.cf.value;
      row.ce_minus_cf_per_tip = row.ce.value - row.cf.value / (2.0 * std::numbers::pi);
      rep.inequalities_hold = rep.inequalities_hold && row.er_le_ce && row.ce_le_cf;
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

}  // namespace brittle
