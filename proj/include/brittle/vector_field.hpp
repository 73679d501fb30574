#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "brittle/crack.hpp"
#include "brittle/mesh.hpp"

namespace brittle {

/// Radially C1 cubic ramp: 1 for r <= inner, 0 for r >= outer.
double plateau(double r, double inner, double outer);

enum class FieldKind { zero, tip_extension, nodal };

/// A virtual-extension vector field eta with compact support.
///
/// Tip-extension fields are plateau(|x - tip|) * direction and are evaluated
/// in closed form. Nodal fields are P1 interpolants on the reference mesh.
/// All quadratures that use eta work with its nodal interpolant.
class VectorField {
 public:
  static VectorField zero(MeshPtr mesh);
  static VectorField tip_extension(MeshPtr mesh, Point tip, Vec2 direction, double inner, double outer);
  static VectorField nodal(MeshPtr mesh, std::vector<Vec2> values, std::string label = "nodal",
                           std::shared_ptr<const PointLocator> locator = nullptr);

  FieldKind kind() const { return kind_; }
  const MeshPtr& mesh() const { return mesh_; }
  Vec2 operator()(const Point& x) const;
  /// Values at the reference mesh nodes.
  const std::vector<Vec2>& nodal_values() const { return values_; }
  /// Declared normalisation bound (max pointwise norm).
  double bound() const { return bound_; }
  void set_bound(double b) { bound_ = b; }
  double max_norm() const;

  const std::string& label() const { return label_; }
  const Point& tip() const { return tip_; }
  const Vec2& direction() const { return direction_; }
  double inner() const { return inner_; }
  double outer() const { return outer_; }

  /// a * this + b * other as a nodal field.
  VectorField combined(double a, const VectorField& other, double b) const;

 private:
  FieldKind kind_ = FieldKind::zero;
  MeshPtr mesh_;
  std::shared_ptr<const PointLocator> locator_;
  std::vector<Vec2> values_;
  Point tip_ = Point::Zero();
  Vec2 direction_ = Vec2::Zero();
  double inner_ = 0.0, outer_ = 0.0;
  double bound_ = 0.0;
  std::string label_;
};

/// Tip field whose tip value is `direction` and which is projected onto the
/// crack tangent at the other crack nodes, so that it slides S along itself.
VectorField tip_fan_field(const CrackSet& crack, int tip, Vec2 direction, double inner, double outer);

class FlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time-t map of the flow generated by a field, sampled at the mesh nodes.
struct FlowMap {
  VectorField field;
  double t = 0.0;
  int steps = 0;
  std::vector<Point> positions;
};

/// Classical RK4 integration of x' = eta(x) for arbitrary points.
std::vector<Point> flow_points(const VectorField& field, std::vector<Point> points, double t, int steps);

/// Moves every mesh node along the flow and checks that no cell inverts.
/// Throws FlowError naming the first inverted cell and t.
FlowMap integrate_flow(const VectorField& field, double t, int steps = 16);

struct AdmissibilityResult {
  bool admissible = true;
  std::vector<std::string> reasons;
};

/// Checks membership in V(K, S): support inside the domain and away from K,
/// tangential on S \ K, non-retracting at every tip, bounded by the declared bound.
AdmissibilityResult is_admissible_variation(const VectorField& field, const CrackSet& K, const CrackSet& S);

}  // namespace brittle
