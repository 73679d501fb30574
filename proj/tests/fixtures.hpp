#pragma once

#include <vector>

#include "brittle/crack.hpp"
#include "brittle/elastostatics.hpp"
#include "brittle/energetics.hpp"
#include "brittle/mesh.hpp"

namespace fixtures {

using namespace brittle;

inline const Material& mu1() {
  static const Material m = Material::quadratic(1.0);
  return m;
}

/// Crack along the horizontal mid-line of a rect mesh, from the left edge
/// to column `cells`.
inline CrackSet left_crack(const MeshPtr& mesh, int res, int cells) {
  std::vector<int> path;
  for (int i = 0; i <= cells; ++i) path.push_back(rect_node_id(*mesh, i, res / 2));
  return crack_from_path(mesh, path);
}

/// Horizontal mid-line crack from column `from` to column `to`.
inline CrackSet mid_crack(const MeshPtr& mesh, int res, int from, int to) {
  std::vector<int> path;
  for (int i = from; i <= to; ++i) path.push_back(rect_node_id(*mesh, i, res / 2));
  return crack_from_path(mesh, path);
}

inline BoundaryDisplacement bar_load(double t) { return linear_displacement(Vec2(1.0, 0.0)).at(t); }

}  // namespace fixtures
