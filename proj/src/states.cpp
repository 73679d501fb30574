#include "brittle/states.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "brittle/parallel.hpp"

namespace brittle {

AdmissibilityReport is_admissible(const State& state, const CrackSet& K, const BoundaryDisplacement& u0) {
  AdmissibilityReport rep;
  const Mesh& mesh = state.mesh();
  const CrackSet& S = state.crack();
  rep.dirichlet_ok = true;
  for (std::size_t ni = 0; ni < mesh.num_nodes() && rep.dirichlet_ok; ++ni) {
    const int n = static_cast<int>(ni);
    if (!mesh.is_boundary_node(n) || S.has_node(n)) continue;
    const double target = u0(mesh.node(n));
    for (int d : state.space()->node_dofs(n)) {
      if (std::abs(state.displacement()[d] - target) > 1e-12 * (1.0 + std::abs(target))) {
        rep.dirichlet_ok = false;
        rep.detail = "boundary node " + std::to_string(n) + " differs from u0";
      }
    }
  }
  rep.contains_K_ok = !K.mesh() || S.contains(K);
  if (!rep.contains_K_ok) rep.detail += (rep.detail.empty() ? "" : "; ") + std::string("crack does not contain K");
  rep.verdict = rep.dirichlet_ok && rep.contains_K_ok;
  return rep;
}

OrderWitness leq(const State& candidate, const State& reference, double tol) {
  if (candidate.space()->mesh() != reference.space()->mesh())
    throw std::invalid_argument("states compared in the order must share the base mesh");
  OrderWitness w;
  const CrackSet& L = candidate.crack();
  const CrackSet& S = reference.crack();
  w.subset_ok = !S.mesh() || S.empty() || L.contains(S);
  const Mesh& mesh = candidate.mesh();
  w.boundary_match_ok = true;
  for (std::size_t ni = 0; ni < mesh.num_nodes(); ++ni) {
    const int n = static_cast<int>(ni);
    if (!mesh.is_boundary_node(n) || L.has_node(n)) continue;
    const double a = candidate.node_value(n);
    const double b = reference.node_value(n);
    if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(b))) {
      w.boundary_match_ok = false;
      break;
    }
  }
  w.energy_gap = candidate.energy().total - reference.energy().total;
  w.energy_ok = w.energy_gap <= tol;
  w.verdict = w.subset_ok && w.boundary_match_ok && w.energy_ok;
  return w;
}

namespace {

void check_budget(std::size_t count, std::size_t budget) {
  if (count > budget) {
    std::ostringstream os;
    os << "candidate enumeration exceeds the budget of " << budget << " crack sets; use greedy mode or lower the depth";
    throw BudgetError(os.str());
  }
}

// Simple edge paths from a tip, each at most `depth` edges long.
void tip_paths(const CrackSet& S, int tip, int depth, std::vector<std::vector<int>>& out) {
  const Mesh& mesh = *S.mesh();
  std::vector<int> path{tip};
  std::function<void()> grow = [&] {
    const int cur = path.back();
    for (int nb : mesh.node_neighbors(cur)) {
      if (mesh.is_boundary_edge(cur, nb) || S.has_edge(cur, nb)) continue;
      if (std::find(path.begin(), path.end(), nb) != path.end()) continue;
      path.push_back(nb);
      out.push_back(path);
      const bool stops = S.has_node(nb) || mesh.is_boundary_node(nb);
      if (!stops && static_cast<int>(path.size()) - 1 < depth) grow();
      path.pop_back();
    }
  };
  grow();
}

}  // namespace

std::vector<CrackSet> candidate_extensions(const CrackSet& S, int depth, bool nucleation, std::size_t budget) {
  if (depth < 1) throw std::invalid_argument("extension depth must be at least 1");
  if (!S.mesh()) throw std::invalid_argument("crack set has no mesh");
  const Mesh& mesh = *S.mesh();
  std::vector<CrackSet> out;
  std::set<std::string> seen;
  auto add = [&](CrackSet c) {
    if (seen.insert(c.key()).second) {
      out.push_back(std::move(c));
      check_budget(out.size(), budget);
    }
  };

  if (mesh.dimension() == 1) {
    std::vector<int> free_nodes;
    for (std::size_t n = 0; n < mesh.num_nodes(); ++n)
      if (!mesh.is_boundary_node(static_cast<int>(n)) && !S.has_node(static_cast<int>(n)))
        free_nodes.push_back(static_cast<int>(n));
    std::sort(free_nodes.begin(), free_nodes.end());
    std::vector<int> chosen;
    std::function<void(std::size_t)> pick = [&](std::size_t from) {
      if (!chosen.empty()) {
        CrackSet c = S;
        for (int n : chosen) c = c.with_path({n});
        add(std::move(c));
      }
      if (static_cast<int>(chosen.size()) == depth) return;
      for (std::size_t i = from; i < free_nodes.size(); ++i) {
        chosen.push_back(free_nodes[i]);
        pick(i + 1);
        chosen.pop_back();
      }
    };
    pick(0);
    return out;
  }

  const auto& tips = S.tips();
  std::vector<std::vector<std::vector<int>>> per_tip(tips.size());
  for (std::size_t i = 0; i < tips.size(); ++i) tip_paths(S, tips[i], depth, per_tip[i]);

  std::vector<const std::vector<int>*> chosen;
  std::set<int> used;
  // Tips are reserved so that paths from different tips stay node-disjoint.
  for (int t : tips) used.insert(t);
  std::function<void(std::size_t, int)> start = [&](std::size_t ti, int remaining) {
    if (ti == tips.size()) {
      if (chosen.empty()) return;
      CrackSet c = S;
      for (const auto* p : chosen) c = c.with_path(*p);
      add(std::move(c));
      return;
    }
    start(ti + 1, remaining);
    for (const auto& p : per_tip[ti]) {
      const int len = static_cast<int>(p.size()) - 1;
      if (len > remaining) continue;
      bool clash = false;
      for (std::size_t k = 1; k < p.size(); ++k) clash = clash || used.count(p[k]) != 0;
      if (clash) continue;
      for (std::size_t k = 1; k < p.size(); ++k) used.insert(p[k]);
      chosen.push_back(&p);
      start(ti + 1, remaining - len);
      chosen.pop_back();
      for (std::size_t k = 1; k < p.size(); ++k) used.erase(p[k]);
    }
  };
  start(0, depth);

  if (nucleation && S.empty()) {
    for (EdgeKey k : mesh.edges()) {
      const int a = edge_first(k), b = edge_second(k);
      if (mesh.is_boundary_edge(a, b)) continue;
      add(S.with_path({a, b}));
    }
  }
  return out;
}

State solve_crack(MeshPtr mesh, const CrackSet& S, const Material& m, const SurfaceEnergy& F,
                  const BoundaryDisplacement& u0, const SolverOptions& solver) {
  return solve_displacement(make_space(std::move(mesh), S), m, F, u0, solver);
}

int select_minimum(const std::vector<CrackSet>& cracks, const std::vector<EnergyBreakdown>& energies, double rel_tol) {
  if (energies.empty()) return -1;
  double emin = energies[0].total;
  for (const auto& e : energies) emin = std::min(emin, e.total);
  const double tol = rel_tol * (1.0 + std::abs(emin));
  int best = -1;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (energies[i].total > emin + tol) continue;
    if (best < 0) {
      best = static_cast<int>(i);
      continue;
    }
    const auto& a = cracks[i];
    const auto& b = cracks[static_cast<std::size_t>(best)];
    const double la = a.length(), lb = b.length();
    if (la < lb - 1e-12 * (1.0 + lb)) {
      best = static_cast<int>(i);
    } else if (std::abs(la - lb) <= 1e-12 * (1.0 + lb)) {
      if (std::tie(a.cut_nodes(), a.edges()) < std::tie(b.cut_nodes(), b.edges())) best = static_cast<int>(i);
    }
  }
  return best;
}

namespace {

std::vector<std::optional<State>> solve_all(const MeshPtr& mesh, const std::vector<CrackSet>& family,
                                            const BoundaryDisplacement& u0, const Material& m,
                                            const SurfaceEnergy& F, const SolverOptions& solver) {
  std::vector<std::optional<State>> out(family.size());
  parallel_for(family.size(), [&](std::size_t i) { out[i].emplace(solve_crack(mesh, family[i], m, F, u0, solver)); });
  return out;
}

}  // namespace

SearchResult is_equilibrium_over(const State& state, const std::vector<CrackSet>& family,
                                 const BoundaryDisplacement& u0, const Material& m, const SurfaceEnergy& F,
                                 const SearchOptions& options) {
  const MeshPtr& mesh = state.space()->mesh();
  const auto states = solve_all(mesh, family, u0, m, F, options.solver);
  SearchCertificate cert;
  cert.kind = "exhaustive-to-depth(" + std::to_string(options.depth) + ")";
  cert.candidate_count = family.size();
  cert.note = "finite-family check: only the enumerated extensions were compared";
  const double e0 = state.energy().total;
  const double tol = options.rel_tol * (1.0 + std::abs(e0));
  double best_gap = 0.0;
  std::optional<State> witness;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const State& c = *states[i];
    const auto w = leq(c, state, 0.0);
    CandidateRecord rec{family[i].key(), family[i].length(), c.energy(), false};
    rec.dominates = w.subset_ok && w.boundary_match_ok && w.energy_gap < -tol;
    if (rec.dominates && (cert.witness < 0 || w.energy_gap < best_gap)) {
      cert.witness = static_cast<int>(i);
      best_gap = w.energy_gap;
      witness = c;
    }
    cert.table.push_back(std::move(rec));
  }
  cert.best = cert.witness;
  cert.equilibrium = cert.witness < 0;
  return {state, std::move(cert), std::move(witness)};
}

SearchResult is_equilibrium(const State& state, const CrackSet& K, const BoundaryDisplacement& u0, const Material& m,
                            const SurfaceEnergy& F, const SearchOptions& options) {
  (void)K;
  std::vector<CrackSet> family{state.crack()};
  for (auto& c : candidate_extensions(state.crack(), options.depth, options.nucleation, options.budget))
    family.push_back(std::move(c));
  return is_equilibrium_over(state, family, u0, m, F, options);
}

SearchResult find_absolute_minimum(MeshPtr mesh, const CrackSet& K, const BoundaryDisplacement& u0,
                                   const Material& m, const SurfaceEnergy& F, const SearchOptions& options) {
  const CrackSet base = K.mesh() ? K : CrackSet(mesh);
  if (options.greedy) {
    SearchCertificate cert;
    cert.kind = "greedy";
    cert.note = "greedy descent by single-edge extensions; not an exhaustive minimum";
    State current = solve_crack(mesh, base, m, F, u0, options.solver);
    cert.table.push_back({base.key(), base.length(), current.energy(), false});
    for (;;) {
      auto family = candidate_extensions(current.crack(), 1, options.nucleation, options.budget);
      if (family.empty()) break;
      const auto states = solve_all(mesh, family, u0, m, F, options.solver);
      std::vector<EnergyBreakdown> energies;
      for (const auto& s : states) energies.push_back(s->energy());
      const int b = select_minimum(family, energies, options.rel_tol);
      cert.candidate_count += family.size();
      const double tol = options.rel_tol * (1.0 + std::abs(current.energy().total));
      if (energies[static_cast<std::size_t>(b)].total >= current.energy().total - tol) break;
      current = *states[static_cast<std::size_t>(b)];
      cert.table.push_back({family[static_cast<std::size_t>(b)].key(), family[static_cast<std::size_t>(b)].length(),
                            current.energy(), false});
    }
    cert.best = static_cast<int>(cert.table.size()) - 1;
    cert.equilibrium = true;
    return {current, std::move(cert), std::nullopt};
  }

  std::vector<CrackSet> family{base};
  for (auto& c : candidate_extensions(base, options.depth, options.nucleation, options.budget))
    family.push_back(std::move(c));
  const auto states = solve_all(mesh, family, u0, m, F, options.solver);
  std::vector<EnergyBreakdown> energies;
  for (const auto& s : states) energies.push_back(s->energy());
  const int best = select_minimum(family, energies, options.rel_tol);

  SearchCertificate cert;
  cert.kind = "exhaustive-to-depth(" + std::to_string(options.depth) + ")";
  cert.candidate_count = family.size();
  cert.best = best;
  cert.note = "minimum over the enumerated family only";
  const State& chosen = *states[static_cast<std::size_t>(best)];
  const double tol = options.rel_tol * (1.0 + std::abs(chosen.energy().total));
  cert.equilibrium = true;
  for (std::size_t i = 0; i < family.size(); ++i) {
    CandidateRecord rec{family[i].key(), family[i].length(), energies[i], false};
    if (family[i].contains(chosen.crack()) && energies[i].total < chosen.energy().total - tol) {
      rec.dominates = true;
      cert.equilibrium = false;
    }
    cert.table.push_back(std::move(rec));
  }
  return {chosen, std::move(cert), std::nullopt};
}

}  // namespace brittle
