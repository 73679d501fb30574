#include "brittle/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace brittle {

namespace {

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

Region::Region(MeshPtr mesh, RegionKind kind, std::vector<Point> centers, double radius, std::vector<char> mask)
    : mesh_(std::move(mesh)), kind_(kind), centers_(std::move(centers)), radius_(radius), mask_(std::move(mask)) {
  if (mask_.size() != mesh_->num_elements()) throw GeometryError("region mask size does not match mesh");
}

std::vector<int> Region::cells() const {
  std::vector<int> out;
  for (std::size_t e = 0; e < mask_.size(); ++e)
    if (mask_[e]) out.push_back(static_cast<int>(e));
  return out;
}

std::size_t Region::size() const { return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1)); }

double Region::area() const {
  double a = 0.0;
  for (std::size_t e = 0; e < mask_.size(); ++e)
    if (mask_[e]) a += mesh_->element_measure(static_cast<int>(e));
  return a;
}

bool Region::contains_point(const Point& p) const {
  switch (kind_) {
    case RegionKind::whole:
      return mesh_->contains(p);
    case RegionKind::ball:
    case RegionKind::tubular:
      for (const auto& c : centers_)
        if ((p - c).norm() < radius_) return true;
      return false;
    case RegionKind::cells:
      break;
  }
  const double eps = 1e-10;
  for (std::size_t e = 0; e < mask_.size(); ++e) {
    if (!mask_[e]) continue;
    const auto& el = mesh_->element(static_cast<int>(e));
    if (mesh_->dimension() == 1) {
      const double x0 = mesh_->node(el[0]).x(), x1 = mesh_->node(el[1]).x();
      if (p.x() >= x0 - eps && p.x() <= x1 + eps) return true;
      continue;
    }
    const Point& a = mesh_->node(el[0]);
    const Point& b = mesh_->node(el[1]);
    const Point& c = mesh_->node(el[2]);
    const double det = cross(b - a, c - a);
    const double l1 = cross(p - a, c - a) / det;
    const double l2 = cross(b - a, p - a) / det;
    if (l1 >= -eps && l2 >= -eps && 1.0 - l1 - l2 >= -eps) return true;
  }
  return false;
}

bool Region::covers_ball(const Point& c, double r) const {
  for (std::size_t e = 0; e < mask_.size(); ++e) {
    if (mask_[e]) continue;
    const auto& el = mesh_->element(static_cast<int>(e));
    // Distance from c to the cell: zero if inside, else distance to its sides.
    double d = std::numeric_limits<double>::infinity();
    const int npe = mesh_->nodes_per_element();
    for (int k = 0; k < npe; ++k)
      d = std::min(d, point_segment_distance(c, mesh_->node(el[k]), mesh_->node(el[(k + 1) % npe])));
    if (mesh_->dimension() == 2) {
      const Point& a = mesh_->node(el[0]);
      const Point& b = mesh_->node(el[1]);
      const Point& q = mesh_->node(el[2]);
      const double det = cross(b - a, q - a);
      const double l1 = cross(c - a, q - a) / det;
      const double l2 = cross(b - a, c - a) / det;
      if (l1 >= 0 && l2 >= 0 && l1 + l2 <= 1) d = 0.0;
    }
    if (d <= r) return false;
  }
  return true;
}

bool Region::subset_of(const Region& other) const {
  for (std::size_t e = 0; e < mask_.size(); ++e)
    if (mask_[e] && !other.mask_[e]) return false;
  return true;
}

Region whole_region(MeshPtr mesh) {
  std::vector<char> mask(mesh->num_elements(), 1);
  return Region(std::move(mesh), RegionKind::whole, {}, 0.0, std::move(mask));
}

Region ball_region(MeshPtr mesh, Point center, double r) {
  std::vector<char> mask(mesh->num_elements(), 0);
  for (std::size_t e = 0; e < mask.size(); ++e)
    if ((mesh->barycenter(static_cast<int>(e)) - center).norm() < r) mask[e] = 1;
  return Region(std::move(mesh), RegionKind::ball, {center}, r, std::move(mask));
}

Region cell_region(MeshPtr mesh, const std::vector<int>& cells) {
  std::vector<char> mask(mesh->num_elements(), 0);
  for (int e : cells) {
    if (e < 0 || e >= static_cast<int>(mask.size())) throw GeometryError("region cell out of range");
    mask[static_cast<std::size_t>(e)] = 1;
  }
  return Region(std::move(mesh), RegionKind::cells, {}, 0.0, std::move(mask));
}

Region tubular_region(MeshPtr mesh, const std::vector<Point>& centers, double r) {
  if (!(r > 0)) throw GeometryError("tubular region radius must be positive");
  std::vector<char> mask(mesh->num_elements(), 0);
  for (std::size_t e = 0; e < mask.size(); ++e) {
    const Point b = mesh->barycenter(static_cast<int>(e));
    for (const auto& c : centers) {
      if ((b - c).norm() < r) {
        mask[e] = 1;
        break;
      }
    }
  }
  return Region(std::move(mesh), RegionKind::tubular, centers, r, std::move(mask));
}

namespace {

double min_distance(const Point& p, const std::vector<Point>& centers) {
  double d = 1e300;
  for (const auto& c : centers) d = std::min(d, (p - c).norm());
  return d;
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Vec2 ab = b - a;
  const double s = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

// Area fraction of triangle (a, b, c) inside the union of balls.
double triangle_fraction(const Point& a, const Point& b, const Point& c, const std::vector<Point>& centers, double r,
                         int depth) {
  for (const auto& x : centers) {
    if ((a - x).norm() <= r && (b - x).norm() <= r && (c - x).norm() <= r) return 1.0;
  }
  bool far = true;
  for (const auto& x : centers) {
    const double d = std::min({segment_distance(x, a, b), segment_distance(x, b, c), segment_distance(x, c, a)});
    const bool inside = cross(b - a, x - a) >= 0 && cross(c - b, x - b) >= 0 && cross(a - c, x - c) >= 0;
    if (inside || d < r) {
      far = false;
      break;
    }
  }
  if (far) return 0.0;
  if (depth == 0) return min_distance((a + b + c) / 3.0, centers) < r ? 1.0 : 0.0;
  const Point ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  return 0.25 * (triangle_fraction(a, ab, ca, centers, r, depth - 1) +
                 triangle_fraction(ab, b, bc, centers, r, depth - 1) +
                 triangle_fraction(ca, bc, c, centers, r, depth - 1) +
                 triangle_fraction(ab, bc, ca, centers, r, depth - 1));
}

}  // namespace

std::vector<CellFraction> ball_cell_fractions(const Mesh& mesh, const std::vector<Point>& centers, double r,
                                              int depth) {
  if (!(r > 0)) throw GeometryError("ball radius must be positive");
  std::vector<CellFraction> out;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.element(static_cast<int>(e));
    double f = 0.0;
    if (mesh.dimension() == 1) {
      const double x0 = std::min(mesh.node(el[0]).x(), mesh.node(el[1]).x());
      const double x1 = std::max(mesh.node(el[0]).x(), mesh.node(el[1]).x());
      // Union of intervals clipped to the cell, merged in order.
      std::vector<std::pair<double, double>> iv;
      for (const auto& c : centers) {
        const double lo = std::max(x0, c.x() - r), hi = std::min(x1, c.x() + r);
        if (hi > lo) iv.emplace_back(lo, hi);
      }
      std::sort(iv.begin(), iv.end());
      double covered = 0.0, reach = x0;
      for (const auto& [lo, hi] : iv) {
        if (hi <= reach) continue;
        covered += hi - std::max(lo, reach);
        reach = hi;
      }
      f = covered / (x1 - x0);
    } else {
      f = triangle_fraction(mesh.node(el[0]), mesh.node(el[1]), mesh.node(el[2]), centers, r, depth);
    }
    if (f > 0.0) out.push_back({static_cast<int>(e), f});
  }
  return out;
}

std::vector<int> tips_in(const CrackSet& crack, const Region& region) {
  std::vector<int> out;
  for (int t : crack.tips())
    if (region.contains_point(crack.mesh()->node(t))) out.push_back(t);
  return out;
}

Region tubular_region(const CrackSet& crack, const Region& restrict_to, double r) {
  std::vector<Point> centers;
  for (int t : tips_in(crack, restrict_to)) centers.push_back(crack.mesh()->node(t));
  return tubular_region(restrict_to.mesh(), centers, r);
}

std::vector<Point> dilate(const std::vector<Point>& points, const Point& center, double ratio) {
  if (!(ratio > 0)) throw GeometryError("dilation ratio must be positive");
  std::vector<Point> out;
  out.reserve(points.size());
  for (const auto& y : points) out.push_back(center + ratio * (y - center));
  return out;
}

std::vector<std::pair<Point, Point>> clip_to_domain(const std::vector<Point>& polyline, const Mesh& domain) {
  if (domain.dimension() != 2) throw GeometryError("polyline clipping needs a 2D domain");
  const auto poly = domain.boundary_polygon();
  std::vector<std::pair<Point, Point>> out;
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const Point a = polyline[i - 1];
    const Point b = polyline[i];
    const Vec2 d = b - a;
    std::vector<double> params{0.0, 1.0};
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Point& p = poly[k];
      const Vec2 e = poly[(k + 1) % poly.size()] - p;
      const double den = cross(d, e);
      if (std::abs(den) < 1e-300) continue;
      const double s = cross(p - a, e) / den;
      const double u = cross(p - a, d) / den;
      if (s > 0 && s < 1 && u >= 0 && u <= 1) params.push_back(s);
    }
    std::sort(params.begin(), params.end());
    for (std::size_t k = 1; k < params.size(); ++k) {
      const double s0 = params[k - 1], s1 = params[k];
      if (s1 - s0 <= 0) continue;
      if (domain.contains(a + 0.5 * (s0 + s1) * d)) out.emplace_back(a + s0 * d, a + s1 * d);
    }
  }
  return out;
}

double clipped_length(const std::vector<Point>& polyline, const Mesh& domain) {
  double total = 0.0;
  for (const auto& [a, b] : clip_to_domain(polyline, domain)) total += (b - a).norm();
  return total;
}

double distance_to_sets(const Point& p, const std::vector<std::vector<Point>>& sets) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& s : sets) {
    if (s.size() == 1) d = std::min(d, (p - s[0]).norm());
    for (std::size_t i = 1; i < s.size(); ++i) d = std::min(d, point_segment_distance(p, s[i - 1], s[i]));
  }
  return d;
}

std::vector<CurveSample> offset_boundary(const std::vector<std::vector<Point>>& sets, double r, const Mesh& domain,
                                         int per_circle) {
  std::vector<CurveSample> out;
  if (!(r > 0)) return out;
  const double keep = r * (1.0 - 1e-9);
  auto consider = [&](const Point& m, double w) {
    if (distance_to_sets(m, sets) >= keep && domain.contains(m)) out.push_back({m, w});
  };
  const double arc = 2.0 * std::numbers::pi / per_circle;
  for (const auto& s : sets) {
    for (const auto& v : s) {
      for (int k = 0; k < per_circle; ++k) {
        const double th = (k + 0.5) * arc;
        consider(v + r * Vec2(std::cos(th), std::sin(th)), r * arc);
      }
    }
    for (std::size_t i = 1; i < s.size(); ++i) {
      const Vec2 d = s[i] - s[i - 1];
      const double len = d.norm();
      if (len == 0.0) continue;
      const Vec2 nu(-d.y() / len, d.x() / len);
      const int n = std::clamp(static_cast<int>(std::ceil(len / (r * arc))), 16, 200000);
      for (int side = -1; side <= 1; side += 2) {
        for (int k = 0; k < n; ++k) {
          const Point m = s[i - 1] + (k + 0.5) / n * d + side * r * nu;
          consider(m, len / n);
        }
      }
    }
  }
  return out;
}

}  // namespace brittle
