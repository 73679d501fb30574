#include "brittle/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <queue>
#include <set>

#include "brittle/parallel.hpp"
#include "brittle/states.hpp"

namespace brittle {

Oracle1DResult oracle_1d(double k, double G, double L, double t) {
  Oracle1DResult r;
  r.t_star = std::sqrt(2.0 * G * L / k);
  r.unbroken = 0.5 * k * t * t / L;
  r.broken = G;
  r.tie = std::abs(r.unbroken - r.broken) <= 1e-9 * (1.0 + std::min(r.unbroken, r.broken));
  r.minimizer = (r.tie || r.unbroken < r.broken) ? "unbroken" : "broken";
  return r;
}

double manufactured_displacement(double amplitude, const Point& x, const Point& center) {
  const Vec2 d = x - center;
  return amplitude * std::sqrt(d.norm()) * std::sin(0.5 * std::atan2(d.y(), d.x()));
}

double manufactured_ball_energy(double amplitude, double mu, double R) {
  return mu * amplitude * amplitude * std::numbers::pi * R / 4.0;
}

ManufacturedTipField manufactured_state(MeshPtr disk, double amplitude, double mu, Point center,
                                        const SurfaceEnergy& F) {
  const auto path = disk_slit_path(*disk, center);
  auto space = make_space(disk, crack_from_path(disk, path));
  const Mesh& mesh = *disk;
  Eigen::VectorXd u(space->num_dofs());
  for (int d = 0; d < space->num_dofs(); ++d) {
    const int n = space->dof_node(d);
    const Point x = mesh.node(n);
    const double r = (x - center).norm();
    if (space->node_dofs(n).size() > 1) {
      // Slit face: the side is read off the elements carrying this dof.
      double y = 0.0;
      for (int e : space->dof_elements(d)) y += mesh.barycenter(e).y() - center.y();
      const double theta = y > 0 ? std::numbers::pi : -std::numbers::pi;
      u[d] = amplitude * std::sqrt(r) * std::sin(0.5 * theta);
    } else {
      u[d] = manufactured_displacement(amplitude, x, center);
    }
  }
  const Material m = Material::quadratic(mu);
  State base(space, Eigen::VectorXd::Zero(space->num_dofs()), {}, {}, SolverDiagnostics{"interpolated", 0, 0.0, {}, true, 0});
  State s = base.with_displacement(std::move(u), m, F);
  const double exact = mu * amplitude * amplitude * std::numbers::pi / 4.0;
  return {std::move(s), path.back(), amplitude, mu, exact, exact};
}

namespace {

bool valid_extension(const Mesh& mesh, const CrackSet& K, const std::vector<EdgeKey>& added) {
  std::map<int, std::vector<int>> adj;
  for (EdgeKey k : added) {
    adj[edge_first(k)].push_back(edge_second(k));
    adj[edge_second(k)].push_back(edge_first(k));
  }
  const auto& tips = K.tips();
  auto is_tip = [&](int n) { return std::binary_search(tips.begin(), tips.end(), n); };
  std::set<int> visited;
  for (const auto& [start, _] : adj) {
    if (visited.count(start)) continue;
    // Collect the component.
    std::vector<int> nodes;
    std::queue<int> q;
    q.push(start);
    visited.insert(start);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      nodes.push_back(v);
      for (int w : adj[v])
        if (visited.insert(w).second) q.push(w);
    }
    std::size_t edges = 0;
    std::vector<int> ends;
    for (int v : nodes) {
      const auto deg = adj[v].size();
      edges += deg;
      if (deg > 2) return false;
      if (deg == 1) ends.push_back(v);
      if (deg == 2 && (K.has_node(v) || mesh.is_boundary_node(v))) return false;
    }
    edges /= 2;
    if (edges + 1 != nodes.size() || ends.size() != 2) return false;
    if (!is_tip(ends[0]) && !is_tip(ends[1])) return false;
  }
  return true;
}

}  // namespace

BruteForceTable brute_force_absmin(MeshPtr mesh, const CrackSet& K, const BoundaryDisplacement& u0,
                                   const Material& m, const SurfaceEnergy& F, int cap, std::size_t max_family,
                                   double rel_tol) {
  BruteForceTable table;
  const CrackSet base = K.mesh() ? K : CrackSet(mesh);
  table.cracks.push_back(base);
  const Mesh& msh = *mesh;

  if (msh.dimension() == 1) {
    std::vector<int> pool;
    for (std::size_t n = 0; n < msh.num_nodes(); ++n)
      if (!msh.is_boundary_node(static_cast<int>(n)) && !base.has_node(static_cast<int>(n))) pool.push_back(static_cast<int>(n));
    std::vector<int> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
      if (!pick.empty()) {
        std::vector<std::vector<int>> comps = base.components();
        for (int n : pick) comps.push_back({n});
        table.cracks.emplace_back(mesh, comps);
      }
      if (static_cast<int>(pick.size()) == cap) return;
      for (std::size_t i = from; i < pool.size(); ++i) {
        pick.push_back(pool[i]);
        rec(i + 1);
        pick.pop_back();
      }
    };
    rec(0);
  } else if (!base.tips().empty()) {
    // Graph distance from the tips bounds every reachable path edge.
    std::vector<int> dist(msh.num_nodes(), -1);
    std::queue<int> q;
    for (int t : base.tips()) {
      dist[static_cast<std::size_t>(t)] = 0;
      q.push(t);
    }
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      if (dist[static_cast<std::size_t>(v)] >= cap) continue;
      for (int w : msh.node_neighbors(v)) {
        if (dist[static_cast<std::size_t>(w)] >= 0) continue;
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        q.push(w);
      }
    }
    std::vector<EdgeKey> pool;
    for (EdgeKey k : msh.edges()) {
      const int a = edge_first(k), b = edge_second(k);
      if (msh.is_boundary_edge(a, b) || base.has_edge(a, b)) continue;
      if (dist[static_cast<std::size_t>(a)] < 0 || dist[static_cast<std::size_t>(b)] < 0) continue;
      pool.push_back(k);
    }
    std::vector<EdgeKey> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
      if (!pick.empty() && valid_extension(msh, base, pick)) {
        std::vector<std::vector<int>> comps = base.components();
        for (EdgeKey k : pick) comps.push_back({edge_first(k), edge_second(k)});
        table.cracks.emplace_back(mesh, comps);
        if (table.cracks.size() > max_family) throw BudgetError("brute-force family exceeds its size cap");
      }
      if (static_cast<int>(pick.size()) == cap) return;
      for (std::size_t i = from; i < pool.size(); ++i) {
        pick.push_back(pool[i]);
        rec(i + 1);
        pick.pop_back();
      }
    };
    rec(0);
  }
  if (table.cracks.size() > max_family) throw BudgetError("brute-force family exceeds its size cap");

  table.energies.resize(table.cracks.size());
  parallel_for(table.cracks.size(), [&](std::size_t i) {
    table.energies[i] = solve_crack(mesh, table.cracks[i], m, F, u0).energy();
  });
  table.best = select_minimum(table.cracks, table.energies, rel_tol);
  return table;
}

}  // namespace brittle
