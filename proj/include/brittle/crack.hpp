#pragma once

#include <string>
#include <vector>

#include "brittle/mesh.hpp"

namespace brittle {

/// A crack set made of edge paths of a mesh.
///
/// In 2D each component is a simple node path along mesh edges. In 1D a crack
/// is a finite set of cut points and every component holds a single node.
/// The edge dK is the set of free path endpoints: nodes with exactly one
/// incident crack edge that do not lie on the domain boundary. Junctions are
/// never edge points.
class CrackSet {
 public:
  CrackSet() = default;
  explicit CrackSet(MeshPtr mesh) : mesh_(std::move(mesh)) {}
  CrackSet(MeshPtr mesh, std::vector<std::vector<int>> components);

  const MeshPtr& mesh() const { return mesh_; }
  const std::vector<std::vector<int>>& components() const { return components_; }
  /// Sorted unique crack edges (2D).
  const std::vector<EdgeKey>& edges() const { return edges_; }
  /// Sorted unique cut nodes (1D).
  const std::vector<int>& cut_nodes() const { return cuts_; }
  /// dK, sorted.
  const std::vector<int>& tips() const { return tips_; }
  /// dK recomputed by counting crack-edge degrees.
  std::vector<int> tips_by_degree() const;

  bool empty() const { return edges_.empty() && cuts_.empty(); }
  /// H^{n-1} measure: total edge length in 2D, number of cut points in 1D.
  double length() const;
  double length(std::span<const Point> positions) const;

  bool contains(const CrackSet& other) const;
  bool has_edge(int a, int b) const;
  bool has_node(int node) const;
  /// Number of distinct crack edges at a node.
  int degree(int node) const;
  /// All nodes touched by the crack, sorted.
  std::vector<int> nodes() const;
  /// Crack edges incident to a node.
  std::vector<EdgeKey> incident_edges(int node) const;

  /// Unit vector pointing out of the crack at a tip (from its crack neighbour to the tip).
  Vec2 outward_tangent(int tip) const;

  CrackSet with_path(std::vector<int> path) const;
  CrackSet united(const CrackSet& other) const;

  /// Canonical text key (edge list or cut list); equal keys mean equal sets.
  std::string key() const;
  /// Polylines of the components in reference coordinates.
  std::vector<std::vector<Point>> polylines() const;

  friend bool operator==(const CrackSet& a, const CrackSet& b) {
    return a.edges_ == b.edges_ && a.cuts_ == b.cuts_;
  }

 private:
  void rebuild();

  MeshPtr mesh_;
  std::vector<std::vector<int>> components_;
  std::vector<EdgeKey> edges_;
  std::vector<int> cuts_;
  std::vector<int> tips_;
};

/// Validates a node path and turns it into a one-component crack set.
/// Throws GeometryError on non-adjacent consecutive nodes or repeated nodes.
CrackSet crack_from_path(MeshPtr mesh, const std::vector<int>& path);

}  // namespace brittle
