#pragma once

#include <utility>
#include <vector>

#include "brittle/crack.hpp"
#include "brittle/mesh.hpp"

namespace brittle {

enum class RegionKind { ball, tubular, whole, cells };

/// A subset of the domain realised as a set of mesh cells.
///
/// Ball and tubular regions hold exactly the cells whose barycenter lies at
/// distance < r from a center; the geometric predicate is kept alongside so
/// that point membership (e.g. "is this tip in D") is exact.
class Region {
 public:
  Region() = default;
  Region(MeshPtr mesh, RegionKind kind, std::vector<Point> centers, double radius, std::vector<char> mask);

  RegionKind kind() const { return kind_; }
  const MeshPtr& mesh() const { return mesh_; }
  const std::vector<Point>& centers() const { return centers_; }
  double radius() const { return radius_; }

  bool has_cell(int e) const { return mask_[static_cast<std::size_t>(e)] != 0; }
  std::vector<int> cells() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  /// Sum of cell measures.
  double area() const;
  bool contains_point(const Point& p) const;
  /// Every cell that touches the closed ball B(c, r) belongs to the region.
  bool covers_ball(const Point& c, double r) const;
  bool subset_of(const Region& other) const;

 private:
  MeshPtr mesh_;
  RegionKind kind_ = RegionKind::cells;
  std::vector<Point> centers_;
  double radius_ = 0.0;
  std::vector<char> mask_;
};

Region whole_region(MeshPtr mesh);
Region ball_region(MeshPtr mesh, Point center, double r);
Region cell_region(MeshPtr mesh, const std::vector<int>& cells);
/// Cells whose barycenter is within r of one of the centers.
Region tubular_region(MeshPtr mesh, const std::vector<Point>& centers, double r);
/// Tubular neighbourhood B(dK ∩ restrict, r) of the crack edge points inside `restrict`.
Region tubular_region(const CrackSet& crack, const Region& restrict_to, double r);

/// Fraction of each cell lying in the union of the balls B(c, r). Cells
/// cut by a ball boundary are refined recursively down to `depth` levels.
struct CellFraction {
  int cell = -1;
  double fraction = 0.0;
};
std::vector<CellFraction> ball_cell_fractions(const Mesh& mesh, const std::vector<Point>& centers, double r,
                                              int depth = 7);
/// Crack edge points of `crack` that lie in the region.
std::vector<int> tips_in(const CrackSet& crack, const Region& region);

/// Dilation y -> center + ratio (y - center).
std::vector<Point> dilate(const std::vector<Point>& points, const Point& center, double ratio);

/// Pieces of a polyline lying inside the closed domain.
std::vector<std::pair<Point, Point>> clip_to_domain(const std::vector<Point>& polyline, const Mesh& domain);
/// Length of a polyline clipped to the closed domain.
double clipped_length(const std::vector<Point>& polyline, const Mesh& domain);

/// Quadrature point on a curve: position and arc-length weight.
struct CurveSample {
  Point p;
  double weight = 0.0;
};

/// Quadrature of the level set {x : dist(x, A) = r} ∩ Ω, the boundary of the
/// tubular neighbourhood B(A, r). A is a union of polylines; single-point
/// polylines are isolated points. Circles and offset segments are sampled
/// with `per_circle` arcs per full turn.
std::vector<CurveSample> offset_boundary(const std::vector<std::vector<Point>>& sets, double r, const Mesh& domain,
                                         int per_circle = 2048);

double distance_to_sets(const Point& p, const std::vector<std::vector<Point>>& sets);

}  // namespace brittle
