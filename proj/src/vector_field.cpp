#include "brittle/vector_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace brittle {

double plateau(double r, double inner, double outer) {
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  const double s = (r - inner) / (outer - inner);
  return 1.0 - 3.0 * s * s + 2.0 * s * s * s;
}

VectorField VectorField::zero(MeshPtr mesh) {
  VectorField f;
  f.kind_ = FieldKind::zero;
  f.values_.assign(mesh->num_nodes(), Vec2::Zero());
  f.mesh_ = std::move(mesh);
  f.bound_ = 1.0;
  f.label_ = "zero";
  return f;
}

VectorField VectorField::tip_extension(MeshPtr mesh, Point tip, Vec2 direction, double inner, double outer) {
  if (!(inner >= 0.0) || !(outer > inner)) throw GeometryError("plateau radii must satisfy 0 <= inner < outer");
  VectorField f;
  f.kind_ = FieldKind::tip_extension;
  f.tip_ = tip;
  f.direction_ = direction;
  f.inner_ = inner;
  f.outer_ = outer;
  f.values_.resize(mesh->num_nodes());
  for (std::size_t i = 0; i < f.values_.size(); ++i)
    f.values_[i] = plateau((mesh->node(static_cast<int>(i)) - tip).norm(), inner, outer) * direction;
  f.mesh_ = std::move(mesh);
  f.bound_ = std::max(direction.norm(), 1e-300);
  std::ostringstream os;
  os << "tip_extension(" << tip.x() << "," << tip.y() << "; dir " << direction.x() << "," << direction.y() << "; a "
     << inner << ", b " << outer << ")";
  f.label_ = os.str();
  return f;
}

VectorField VectorField::nodal(MeshPtr mesh, std::vector<Vec2> values, std::string label,
                               std::shared_ptr<const PointLocator> locator) {
  if (values.size() != mesh->num_nodes()) throw GeometryError("nodal field size does not match mesh");
  VectorField f;
  f.kind_ = FieldKind::nodal;
  f.locator_ = locator ? std::move(locator) : std::make_shared<const PointLocator>(mesh);
  f.values_ = std::move(values);
  f.mesh_ = std::move(mesh);
  f.bound_ = std::max(f.max_norm(), 1e-300);
  f.label_ = std::move(label);
  return f;
}

double VectorField::max_norm() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, v.norm());
  return m;
}

Vec2 VectorField::operator()(const Point& x) const {
  switch (kind_) {
    case FieldKind::zero:
      return Vec2::Zero();
    case FieldKind::tip_extension:
      return plateau((x - tip_).norm(), inner_, outer_) * direction_;
    case FieldKind::nodal:
      break;
  }
  const int e = locator_->locate(x);
  if (e < 0) return Vec2::Zero();
  const auto l = locator_->barycentric(e, x);
  const auto& el = mesh_->element(e);
  Vec2 v = Vec2::Zero();
  for (int k = 0; k < mesh_->nodes_per_element(); ++k)
    v += l[static_cast<std::size_t>(k)] * values_[static_cast<std::size_t>(el[static_cast<std::size_t>(k)])];
  return v;
}

VectorField VectorField::combined(double a, const VectorField& other, double b) const {
  if (mesh_ != other.mesh_) throw GeometryError("fields live on different meshes");
  std::vector<Vec2> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * values_[i] + b * other.values_[i];
  std::ostringstream os;
  os << a << "*[" << label_ << "] + " << b << "*[" << other.label_ << "]";
  return nodal(mesh_, std::move(v), os.str(), locator_);
}

namespace {

// Unit tangent shared by all crack edges at a node, or zero if they disagree.
Vec2 crack_tangent_at(const CrackSet& crack, int node) {
  const Mesh& mesh = *crack.mesh();
  Vec2 tau = Vec2::Zero();
  for (EdgeKey k : crack.incident_edges(node)) {
    const int other = edge_first(k) == node ? edge_second(k) : edge_first(k);
    const Vec2 d = (mesh.node(other) - mesh.node(node)).normalized();
    if (tau.isZero()) {
      tau = d;
    } else if (std::abs(tau.x() * d.y() - tau.y() * d.x()) > 1e-12) {
      return Vec2::Zero();
    }
  }
  return tau;
}

}  // namespace

VectorField tip_fan_field(const CrackSet& crack, int tip, Vec2 direction, double inner, double outer) {
  const MeshPtr& mesh = crack.mesh();
  const Point x0 = mesh->node(tip);
  std::vector<Vec2> values(mesh->num_nodes(), Vec2::Zero());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int n = static_cast<int>(i);
    if (mesh->is_boundary_node(n)) continue;
    values[i] = plateau((mesh->node(n) - x0).norm(), inner, outer) * direction;
  }
  for (int n : crack.nodes()) {
    if (n == tip) continue;
    auto& v = values[static_cast<std::size_t>(n)];
    const Vec2 tau = crack_tangent_at(crack, n);
    v = tau.dot(v) * tau;
  }
  std::ostringstream os;
  os << "tip_fan(node " << tip << "; dir " << direction.x() << "," << direction.y() << "; a " << inner << ", b "
     << outer << ")";
  auto f = VectorField::nodal(mesh, std::move(values), os.str());
  f.set_bound(std::max(direction.norm(), f.max_norm()));
  return f;
}

std::vector<Point> flow_points(const VectorField& field, std::vector<Point> points, double t, int steps) {
  if (steps < 1) throw FlowError("flow integration needs at least one step");
  if (field.kind() == FieldKind::zero || t == 0.0) return points;
  const double dt = t / steps;
  for (auto& x : points) {
    for (int s = 0; s < steps; ++s) {
      const Vec2 k1 = field(x);
      const Vec2 k2 = field(x + 0.5 * dt * k1);
      const Vec2 k3 = field(x + 0.5 * dt * k2);
      const Vec2 k4 = field(x + dt * k3);
      x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return points;
}

FlowMap integrate_flow(const VectorField& field, double t, int steps) {
  const Mesh& mesh = *field.mesh();
  FlowMap map{field, t, steps, flow_points(field, mesh.nodes(), t, steps)};
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    if (mesh.element_measure(static_cast<int>(e), map.positions) <= 0.0) {
      std::ostringstream os;
      os << "flow inverts element " << e << " at t = " << t;
      throw FlowError(os.str());
    }
  }
  return map;
}

AdmissibilityResult is_admissible_variation(const VectorField& field, const CrackSet& K, const CrackSet& S) {
  AdmissibilityResult res;
  const Mesh& mesh = *field.mesh();
  const auto& v = field.nodal_values();
  const double bound = field.bound() > 0 ? field.bound() : 1.0;
  const double tol = 1e-12 * bound;
  auto fail = [&](std::string why) {
    res.admissible = false;
    res.reasons.push_back(std::move(why));
  };
  auto at = [&](int n) -> const Vec2& { return v[static_cast<std::size_t>(n)]; };

  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const int n = static_cast<int>(i);
    if (mesh.is_boundary_node(n) && at(n).norm() > tol) {
      fail("support reaches the domain boundary at node " + std::to_string(n));
      break;
    }
  }
  for (int n : K.nodes()) {
    if (at(n).norm() > tol) {
      fail("support meets K at node " + std::to_string(n));
      break;
    }
  }

  const auto& tips = S.tips();
  auto is_tip = [&](int n) { return std::binary_search(tips.begin(), tips.end(), n); };
  if (mesh.dimension() == 2) {
    for (int n : S.nodes()) {
      if (is_tip(n) || K.has_node(n)) continue;
      bool ok = true;
      for (EdgeKey k : S.incident_edges(n)) {
        const Vec2 d = (mesh.node(edge_second(k)) - mesh.node(edge_first(k))).normalized();
        const Vec2 nrm(-d.y(), d.x());
        if (std::abs(at(n).dot(nrm)) > tol) ok = false;
      }
      if (!ok) {
        fail("not tangential on S at node " + std::to_string(n));
        break;
      }
    }
    for (EdgeKey k : S.edges()) {
      const int a = edge_first(k), b = edge_second(k);
      if (is_tip(a) || is_tip(b) || K.has_edge(a, b)) continue;
      const Vec2 d = (mesh.node(b) - mesh.node(a)).normalized();
      const Vec2 nrm(-d.y(), d.x());
      if (std::abs((0.5 * (at(a) + at(b))).dot(nrm)) > tol) {
        fail("not tangential on S along edge " + std::to_string(a) + "-" + std::to_string(b));
        break;
      }
    }
    for (int tip : tips) {
      if (K.has_node(tip)) continue;
      if (at(tip).dot(S.outward_tangent(tip)) < -tol) fail("retracts S at tip " + std::to_string(tip));
    }
  } else {
    // In 1D a crack point cannot slide; the field must fix every cut point.
    for (int n : S.cut_nodes())
      if (!K.has_node(n) && at(n).norm() > tol) fail("moves cut point " + std::to_string(n));
  }
  if (field.max_norm() > bound * (1.0 + 1e-12)) fail("pointwise norm exceeds the declared bound");
  return res;
}

}  // namespace brittle
