#include "brittle/elastostatics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Sparse>

namespace brittle {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

bool element_has_node(const Element& el, int n, int npe) {
  for (int k = 0; k < npe; ++k)
    if (el[static_cast<std::size_t>(k)] == n) return true;
  return false;
}

}  // namespace

CrackedSpace::CrackedSpace(MeshPtr mesh, CrackSet crack) : mesh_(std::move(mesh)), crack_(std::move(crack)) {
  if (crack_.mesh() && crack_.mesh() != mesh_) throw GeometryError("crack set lives on a different mesh");
  const Mesh& m = *mesh_;
  const int npe = m.nodes_per_element();
  const auto crack_nodes = crack_.nodes();
  std::vector<char> on_crack(m.num_nodes(), 0);
  for (int n : crack_nodes) on_crack[static_cast<std::size_t>(n)] = 1;

  element_dofs_.assign(m.num_elements(), {-1, -1, -1});
  node_dofs_.assign(m.num_nodes(), {});
  for (std::size_t ni = 0; ni < m.num_nodes(); ++ni) {
    const int n = static_cast<int>(ni);
    const auto& star = m.node_elements(n);
    std::vector<int> group(star.size(), 0);
    if (on_crack[ni]) {
      // Sectors of the star separated by crack edges (or by the cut in 1D).
      UnionFind uf(star.size());
      if (m.dimension() == 2) {
        for (std::size_t a = 0; a < star.size(); ++a) {
          for (std::size_t b = a + 1; b < star.size(); ++b) {
            const auto& ea = m.element(star[a]);
            const auto& eb = m.element(star[b]);
            for (int k = 0; k < npe; ++k) {
              const int o = ea[static_cast<std::size_t>(k)];
              if (o == n || !element_has_node(eb, o, npe)) continue;
              if (!crack_.has_edge(n, o)) uf.unite(static_cast<int>(a), static_cast<int>(b));
            }
          }
        }
      }
      for (std::size_t a = 0; a < star.size(); ++a) group[a] = uf.find(static_cast<int>(a));
    }
    std::vector<int> group_dof(star.size(), -1);
    for (std::size_t a = 0; a < star.size(); ++a) {
      auto& gd = group_dof[static_cast<std::size_t>(group[a])];
      if (gd < 0) {
        gd = static_cast<int>(dof_node_.size());
        dof_node_.push_back(n);
        dof_elements_.emplace_back();
        node_dofs_[ni].push_back(gd);
        dirichlet_.push_back(m.is_boundary_node(n) && !on_crack[ni] ? 1 : 0);
      }
      const int e = star[a];
      dof_elements_[static_cast<std::size_t>(gd)].push_back(e);
      const auto& el = m.element(e);
      for (int k = 0; k < npe; ++k)
        if (el[static_cast<std::size_t>(k)] == n) element_dofs_[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)] = gd;
    }
    if (star.empty()) {
      node_dofs_[ni].push_back(static_cast<int>(dof_node_.size()));
      dof_node_.push_back(n);
      dof_elements_.emplace_back();
      dirichlet_.push_back(m.is_boundary_node(n) ? 1 : 0);
    }
  }

  UnionFind uf(dof_node_.size());
  for (const auto& ed : element_dofs_)
    for (int k = 1; k < npe; ++k) uf.unite(ed[0], ed[static_cast<std::size_t>(k)]);
  component_.assign(dof_node_.size(), -1);
  std::vector<int> root_id(dof_node_.size(), -1);
  for (std::size_t d = 0; d < dof_node_.size(); ++d) {
    auto& id = root_id[static_cast<std::size_t>(uf.find(static_cast<int>(d)))];
    if (id < 0) id = num_components_++;
    component_[d] = id;
  }
}

SpacePtr make_space(MeshPtr mesh, CrackSet crack) {
  return std::make_shared<const CrackedSpace>(std::move(mesh), std::move(crack));
}

BoundaryDisplacement BoundaryDisplacement::at(double time) const {
  BoundaryDisplacement b = *this;
  b.t = time;
  return b;
}

BoundaryDisplacement linear_displacement(Vec2 gradient, double offset) {
  BoundaryDisplacement b;
  b.fn = [gradient, offset](const Point& x, double t) { return t * (offset + gradient.dot(x)); };
  std::ostringstream os;
  os << "t * (" << offset << " + " << gradient.x() << " x + " << gradient.y() << " y)";
  b.description = os.str();
  return b;
}

BoundaryDisplacement mode3_displacement(double amplitude, Point center, double angle) {
  BoundaryDisplacement b;
  const double c = std::cos(angle), s = std::sin(angle);
  b.fn = [=](const Point& x, double t) {
    const Vec2 d = x - center;
    const double lx = c * d.x() + s * d.y();
    const double ly = -s * d.x() + c * d.y();
    const double r = std::hypot(lx, ly);
    const double th = std::atan2(ly, lx);
    return t * amplitude * std::sqrt(r) * std::sin(0.5 * th);
  };
  std::ostringstream os;
  os << "t * " << amplitude << " sqrt(r) sin(theta/2) about (" << center.x() << ", " << center.y() << ")";
  b.description = os.str();
  return b;
}

ContinuityReport check_boundary_continuity(const BoundaryDisplacement& u0, const Mesh& mesh, int samples) {
  ContinuityReport rep;
  double scale = 0.0;
  for (std::size_t n = 0; n < mesh.num_nodes(); ++n)
    if (mesh.is_boundary_node(static_cast<int>(n))) scale = std::max(scale, std::abs(u0(mesh.node(static_cast<int>(n)))));
  const double h = mesh.mesh_size();
  const auto& facets = mesh.boundary();
  for (std::size_t f = 0; f < facets.size(); ++f) {
    if (facets[f].nodes[1] < 0) continue;
    const Point a = mesh.node(facets[f].nodes[0]);
    const Point b = mesh.node(facets[f].nodes[1]);
    bool skip = false;
    for (const auto& bp : u0.break_points) {
      const Vec2 ab = b - a;
      const double s = std::clamp((bp - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      if ((bp - (a + s * ab)).norm() < 1e-9 * (1.0 + h)) skip = true;
    }
    if (skip) continue;
    // A continuous trace has consecutive-sample jumps that shrink under refinement.
    auto max_jump = [&](int n) {
      double j = 0.0;
      double prev = u0(a);
      for (int k = 1; k <= n; ++k) {
        const double v = u0(a + (static_cast<double>(k) / n) * (b - a));
        j = std::max(j, std::abs(v - prev));
        prev = v;
      }
      return j;
    };
    const double j1 = max_jump(samples);
    const double j2 = max_jump(4 * samples);
    if (j2 > 0.75 * j1 && j2 > 1e-8 * (1.0 + scale)) {
      rep.continuous = false;
      if (j2 > rep.max_jump) {
        rep.max_jump = j2;
        rep.worst_facet = static_cast<int>(f);
      }
    }
  }
  return rep;
}

State::State(SpacePtr space, Eigen::VectorXd u, std::vector<Point> positions, EnergyBreakdown energy,
             SolverDiagnostics diagnostics)
    : space_(std::move(space)),
      u_(std::move(u)),
      positions_(std::move(positions)),
      energy_(energy),
      diagnostics_(std::move(diagnostics)) {
  if (u_.size() != space_->num_dofs()) throw std::invalid_argument("displacement size does not match the space");
  if (positions_.empty()) positions_ = space_->mesh()->nodes();
}

Vec2 State::gradient(int e) const {
  const Mesh& m = mesh();
  const auto grads = shape_gradients(m, e, positions_);
  const auto& dofs = space_->element_dofs(e);
  Vec2 g = Vec2::Zero();
  for (int k = 0; k < m.nodes_per_element(); ++k)
    g += u_[dofs[static_cast<std::size_t>(k)]] * grads[static_cast<std::size_t>(k)];
  return g;
}

double State::node_value(int n) const { return u_[space_->node_dofs(n).front()]; }

State State::with_displacement(Eigen::VectorXd u, const Material& m, const SurfaceEnergy& F) const {
  State s(space_, std::move(u), positions_, {}, diagnostics_);
  s.energy_ = total_energy(m, F, s);
  return s;
}

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct PcgResult {
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
};

// Jacobi-preconditioned conjugate gradients on an SPD matrix.
PcgResult pcg(const SpMat& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol, int max_it,
              std::vector<double>& history) {
  PcgResult res;
  const double bnorm = b.norm();
  x.setZero(b.size());
  if (bnorm == 0.0) {
    res.converged = true;
    history.push_back(0.0);
    return res;
  }
  Eigen::VectorXd inv_diag = A.diagonal();
  for (Eigen::Index i = 0; i < inv_diag.size(); ++i) inv_diag[i] = inv_diag[i] > 0 ? 1.0 / inv_diag[i] : 1.0;
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_it; ++it) {
    const Eigen::VectorXd Ap = A * p;
    const double alpha = rz / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    res.iterations = it;
    res.residual = r.norm() / bnorm;
    history.push_back(res.residual);
    if (res.residual <= tol) {
      res.converged = true;
      return res;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return res;
}

struct Assembly {
  double energy = 0.0;
  Eigen::VectorXd gradient;
  SpMat hessian;  // free x free
};

Assembly assemble(const CrackedSpace& space, const Material& m, std::span<const Point> positions,
                  const Eigen::VectorXd& u, const std::vector<int>& free_index, int num_free, bool want_hessian) {
  const Mesh& mesh = *space.mesh();
  const int npe = mesh.nodes_per_element();
  Assembly out;
  out.gradient = Eigen::VectorXd::Zero(space.num_dofs());
  std::vector<Eigen::Triplet<double>> trip;
  if (want_hessian) trip.reserve(mesh.num_elements() * static_cast<std::size_t>(npe * npe));
  for (std::size_t ei = 0; ei < mesh.num_elements(); ++ei) {
    const int e = static_cast<int>(ei);
    const auto grads = shape_gradients(mesh, e, positions);
    const double area = mesh.element_measure(e, positions);
    const auto& dofs = space.element_dofs(e);
    Vec2 g = Vec2::Zero();
    for (int k = 0; k < npe; ++k) g += u[dofs[static_cast<std::size_t>(k)]] * grads[static_cast<std::size_t>(k)];
    out.energy += density(m, g) * area;
    const Vec2 s = stress(m, g);
    for (int k = 0; k < npe; ++k) out.gradient[dofs[static_cast<std::size_t>(k)]] += area * s.dot(grads[static_cast<std::size_t>(k)]);
    if (!want_hessian) continue;
    const Eigen::Matrix2d C = tangent(m, g);
    for (int a = 0; a < npe; ++a) {
      const int fa = free_index[static_cast<std::size_t>(dofs[static_cast<std::size_t>(a)])];
      if (fa < 0) continue;
      for (int b = 0; b < npe; ++b) {
        const int fb = free_index[static_cast<std::size_t>(dofs[static_cast<std::size_t>(b)])];
        if (fb < 0) continue;
        trip.emplace_back(fa, fb, area * grads[static_cast<std::size_t>(a)].dot(C * grads[static_cast<std::size_t>(b)]));
      }
    }
  }
  if (want_hessian) {
    out.hessian.resize(num_free, num_free);
    out.hessian.setFromTriplets(trip.begin(), trip.end());
  }
  return out;
}

}  // namespace

State solve_displacement(SpacePtr space, const Material& m, const SurfaceEnergy& F, const BoundaryDisplacement& u0,
                         const SolverOptions& options, std::vector<Point> positions) {
  const Mesh& mesh = *space->mesh();
  if (positions.empty()) positions = mesh.nodes();
  const int nd = space->num_dofs();

  std::vector<char> anchored(static_cast<std::size_t>(space->num_components()), 0);
  for (int d = 0; d < nd; ++d)
    if (space->is_dirichlet(d)) anchored[static_cast<std::size_t>(space->components()[static_cast<std::size_t>(d)])] = 1;

  SolverDiagnostics diag;
  diag.floating_components = static_cast<int>(std::count(anchored.begin(), anchored.end(), 0));
  Eigen::VectorXd u = Eigen::VectorXd::Zero(nd);
  std::vector<int> free_index(static_cast<std::size_t>(nd), -1);
  int nf = 0;
  for (int d = 0; d < nd; ++d) {
    if (space->is_dirichlet(d)) {
      u[d] = u0(mesh.node(space->dof_node(d)));
    } else if (anchored[static_cast<std::size_t>(space->components()[static_cast<std::size_t>(d)])]) {
      free_index[static_cast<std::size_t>(d)] = nf++;
    }
  }
  const int max_it = options.max_iterations > 0 ? options.max_iterations : std::max(1000, 10 * nf);

  auto free_part = [&](const Eigen::VectorXd& full) {
    Eigen::VectorXd v(nf);
    for (int d = 0; d < nd; ++d)
      if (free_index[static_cast<std::size_t>(d)] >= 0) v[free_index[static_cast<std::size_t>(d)]] = full[d];
    return v;
  };
  auto add_free = [&](Eigen::VectorXd& full, const Eigen::VectorXd& delta, double step) {
    for (int d = 0; d < nd; ++d)
      if (free_index[static_cast<std::size_t>(d)] >= 0) full[d] += step * delta[free_index[static_cast<std::size_t>(d)]];
  };

  if (nf > 0) {
    if (m.is_quadratic()) {
      diag.method = "pcg-jacobi";
      auto as = assemble(*space, m, positions, u, free_index, nf, true);
      Eigen::VectorXd delta;
      const auto res = pcg(as.hessian, -free_part(as.gradient), delta, options.tolerance, max_it, diag.history);
      diag.iterations = res.iterations;
      diag.residual = res.residual;
      diag.converged = res.converged;
      add_free(u, delta, 1.0);
    } else {
      diag.method = "newton-pcg";
      auto as = assemble(*space, m, positions, u, free_index, nf, true);
      const double g0 = std::max(free_part(as.gradient).norm(), 1e-300);
      diag.converged = false;
      for (int it = 0; it < options.max_newton_iterations; ++it) {
        const Eigen::VectorXd gf = free_part(as.gradient);
        diag.residual = gf.norm() / g0;
        diag.history.push_back(diag.residual);
        if (diag.residual <= options.tolerance || gf.norm() == 0.0) {
          diag.converged = true;
          break;
        }
        Eigen::VectorXd delta;
        std::vector<double> inner;
        const auto res = pcg(as.hessian, -gf, delta, 1e-12, max_it, inner);
        diag.iterations += res.iterations;
        double step = 1.0;
        Eigen::VectorXd trial = u;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
          trial = u;
          add_free(trial, delta, step);
          const auto ts = assemble(*space, m, positions, trial, free_index, nf, false);
          if (ts.energy <= as.energy + 1e-4 * step * gf.dot(delta) + 1e-15 * std::abs(as.energy)) {
            accepted = true;
            break;
          }
          step *= 0.5;
        }
        if (!accepted) break;
        u = trial;
        as = assemble(*space, m, positions, u, free_index, nf, true);
      }
    }
    if (!diag.converged && !options.allow_unconverged) {
      std::ostringstream os;
      os << "displacement solve did not converge (" << diag.method << ", relative residual " << diag.residual
         << " after " << diag.history.size() << " steps)";
      throw SolverError(os.str(), diag.history);
    }
  }
  State s(std::move(space), std::move(u), std::move(positions), {}, std::move(diag));
  return s.with_displacement(s.displacement(), m, F);
}

ResidualReport residual_report(const State& state, const Material& m) {
  const CrackedSpace& space = *state.space();
  const Mesh& mesh = state.mesh();
  const int npe = mesh.nodes_per_element();
  const int nd = space.num_dofs();
  Eigen::VectorXd force = Eigen::VectorXd::Zero(nd);
  Eigen::VectorXd scale = Eigen::VectorXd::Zero(nd);
  for (std::size_t ei = 0; ei < mesh.num_elements(); ++ei) {
    const int e = static_cast<int>(ei);
    const auto grads = shape_gradients(mesh, e, state.positions());
    const double area = mesh.element_measure(e, state.positions());
    const Vec2 s = stress(m, state.gradient(e));
    const auto& dofs = space.element_dofs(e);
    for (int k = 0; k < npe; ++k) {
      const auto& gk = grads[static_cast<std::size_t>(k)];
      force[dofs[static_cast<std::size_t>(k)]] += area * s.dot(gk);
      scale[dofs[static_cast<std::size_t>(k)]] += area * s.norm() * gk.norm();
    }
  }
  ResidualReport rep;
  rep.scale = scale.size() ? scale.maxCoeff() : 0.0;
  if (rep.scale == 0.0) return rep;
  std::vector<char> anchored(static_cast<std::size_t>(space.num_components()), 0);
  for (int d = 0; d < nd; ++d)
    if (space.is_dirichlet(d)) anchored[static_cast<std::size_t>(space.components()[static_cast<std::size_t>(d)])] = 1;
  double worst = -1.0;
  for (int d = 0; d < nd; ++d) {
    if (space.is_dirichlet(d) || !anchored[static_cast<std::size_t>(space.components()[static_cast<std::size_t>(d)])])
      continue;
    const double r = std::abs(force[d]) / rep.scale;
    if (space.crack().has_node(space.dof_node(d)))
      rep.traction_residual = std::max(rep.traction_residual, r);
    else
      rep.divergence_residual = std::max(rep.divergence_residual, r);
    if (r > worst) {
      worst = r;
      rep.worst_dof = d;
    }
  }
  return rep;
}

State pushforward_state(const State& state, const FlowMap& flow, const Material& m, const SurfaceEnergy& F,
                        const BoundaryDisplacement& u0, bool resolve) {
  const Mesh& mesh = state.mesh();
  if (flow.positions.size() != mesh.num_nodes()) throw GeometryError("flow map does not match the state mesh");
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    if (mesh.element_measure(static_cast<int>(e), flow.positions) <= 0.0) {
      std::ostringstream os;
      os << "pushforward inverts element " << e << " at t = " << flow.t;
      throw FlowError(os.str());
    }
  }
  if (resolve) return solve_displacement(state.space(), m, F, u0, {}, flow.positions);
  State moved(state.space(), state.displacement(), flow.positions, {}, state.diagnostics());
  return moved.with_displacement(state.displacement(), m, F);
}

}  // namespace brittle
