#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace brittle {

using Point = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;

/// Raised for malformed geometry input (bad indices, degenerate cells, ...).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Element connectivity. Segments (n = 1) use the first two slots, the third is -1.
using Element = std::array<int, 3>;

/// Boundary facet: an edge in 2D, a single node in 1D (second slot -1).
struct BoundaryFacet {
  std::array<int, 2> nodes{-1, -1};
  int marker = 1;
};

/// Unordered node pair packed into one key, smaller id in the high word.
using EdgeKey = std::uint64_t;

inline EdgeKey edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(a < b ? a : b);
  const auto hi = static_cast<std::uint64_t>(a < b ? b : a);
  return (lo << 32) | hi;
}
inline int edge_first(EdgeKey k) { return static_cast<int>(k >> 32); }
inline int edge_second(EdgeKey k) { return static_cast<int>(k & 0xffffffffu); }

/// Conforming simplicial mesh of the reference configuration.
///
/// Immutable after construction. Triangles are stored counter-clockwise. The
/// constructor validates indices, rejects zero-measure cells and non-manifold
/// facets, and derives the topological boundary. If boundary facets are
/// supplied they must coincide with it.
class Mesh {
 public:
  Mesh(int dimension, std::vector<Point> nodes, std::vector<Element> elements,
       std::vector<BoundaryFacet> boundary = {});

  int dimension() const { return dim_; }
  int nodes_per_element() const { return dim_ + 1; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_elements() const { return elements_.size(); }

  const std::vector<Point>& nodes() const { return nodes_; }
  const Point& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const std::vector<Element>& elements() const { return elements_; }
  const Element& element(int e) const { return elements_[static_cast<std::size_t>(e)]; }
  const std::vector<BoundaryFacet>& boundary() const { return boundary_; }

  bool is_boundary_node(int i) const { return boundary_node_[static_cast<std::size_t>(i)] != 0; }
  bool is_boundary_edge(int a, int b) const;
  bool has_edge(int a, int b) const { return edge_elements_.count(edge_key(a, b)) != 0; }

  /// Elements sharing the edge (a, b); empty if not a mesh edge.
  const std::vector<int>& edge_elements(int a, int b) const;
  const std::vector<int>& node_elements(int i) const { return node_elements_[static_cast<std::size_t>(i)]; }
  /// Sorted neighbour ids in the edge graph.
  const std::vector<int>& node_neighbors(int i) const { return node_neighbors_[static_cast<std::size_t>(i)]; }
  const std::vector<EdgeKey>& edges() const { return edge_list_; }

  /// Signed measure of a cell for an arbitrary set of node positions.
  double element_measure(int e, std::span<const Point> positions) const;
  double element_measure(int e) const { return element_measure(e, nodes_); }
  Point barycenter(int e) const;

  /// Characteristic size: maximum edge length.
  double mesh_size() const { return h_max_; }
  double diameter() const;

  /// Boundary loop as a polygon (2D only; requires a single closed boundary loop).
  std::vector<Point> boundary_polygon() const;

  /// Is the point inside the closed domain (2D: point in boundary polygon, 1D: in interval)?
  bool contains(const Point& p, double eps = 1e-12) const;

 private:
  int dim_;
  std::vector<Point> nodes_;
  std::vector<Element> elements_;
  std::vector<BoundaryFacet> boundary_;
  std::vector<char> boundary_node_;
  std::unordered_map<EdgeKey, std::vector<int>> edge_elements_;
  std::vector<EdgeKey> edge_list_;
  std::vector<std::vector<int>> node_elements_;
  std::vector<std::vector<int>> node_neighbors_;
  std::vector<Point> polygon_;
  double h_max_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

enum class DiagonalPattern { union_jack, uniform };

/// Structured rectangle mesh. Node (i, j) has id j * (nx + 1) + i.
/// Markers: 1 bottom, 2 right, 3 top, 4 left.
/// Cell counts round(width * resolution), round(height * resolution) must be
/// even and at least 2 so that both mid-lines are edge paths.
MeshPtr build_rect_mesh(double width, double height, double resolution,
                        Point origin = Point(0.0, 0.0),
                        DiagonalPattern pattern = DiagonalPattern::union_jack);

/// Uniform 1D bar [0, length] with the given number of segments.
MeshPtr build_interval_mesh(double length, int elements);

/// Disk of the given radius built from concentric rings of spacing h. Every
/// ring carries nodes at angles 0 and pi, so the ray theta = pi from the
/// boundary to the center is an edge path.
MeshPtr build_disk_mesh(double radius, double h, Point center = Point(0.0, 0.0));

/// Node id on the ray theta = pi of a disk mesh at ring k (k = 0 is the center).
std::vector<int> disk_slit_path(const Mesh& mesh, Point center = Point(0.0, 0.0));

/// Rect mesh node id lookup.
int rect_node_id(const Mesh& mesh, int i, int j);

/// Plain-text mesh format: "dim n", "id x y", "id n1 n2 n3", "b n1 n2 marker".
void write_mesh(std::ostream& out, const Mesh& mesh);
MeshPtr read_mesh(std::istream& in);

/// Uniform bucket grid over element bounding boxes.
class PointLocator {
 public:
  explicit PointLocator(MeshPtr mesh);
  /// Element containing p (closed), or -1. Ties resolve to the smallest element id.
  int locate(const Point& p, double eps = 1e-10) const;
  /// Barycentric coordinates of p in element e.
  std::array<double, 3> barycentric(int e, const Point& p) const;
  const Mesh& mesh() const { return *mesh_; }

 private:
  MeshPtr mesh_;
  Point lo_, hi_;
  int nx_ = 1, ny_ = 1;
  double cell_x_ = 1.0, cell_y_ = 1.0;
  std::vector<std::vector<int>> buckets_;
};

/// P1 shape-function gradients of a triangle (or segment) at given positions.
std::array<Vec2, 3> shape_gradients(const Mesh& mesh, int e, std::span<const Point> positions);

}  // namespace brittle
