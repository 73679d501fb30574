#include "brittle/crack.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace brittle {

namespace {

void validate_path(const Mesh& mesh, const std::vector<int>& path) {
  if (path.empty()) throw GeometryError("crack path is empty");
  const int nn = static_cast<int>(mesh.num_nodes());
  for (int v : path)
    if (v < 0 || v >= nn) throw GeometryError("crack path references invalid node " + std::to_string(v));
  if (mesh.dimension() == 1) {
    if (path.size() != 1) throw GeometryError("1D crack components are single cut nodes");
    return;
  }
  if (path.size() < 2) throw GeometryError("crack path needs at least two nodes");
  std::set<int> seen;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!seen.insert(path[i]).second)
      throw GeometryError("crack path repeats node " + std::to_string(path[i]));
    if (i > 0 && !mesh.has_edge(path[i - 1], path[i]))
      throw GeometryError("crack path nodes " + std::to_string(path[i - 1]) + " and " + std::to_string(path[i]) +
                          " are not adjacent");
  }
}

}  // namespace

CrackSet::CrackSet(MeshPtr mesh, std::vector<std::vector<int>> components)
    : mesh_(std::move(mesh)), components_(std::move(components)) {
  if (!mesh_) throw GeometryError("crack set needs a mesh");
  for (const auto& c : components_) validate_path(*mesh_, c);
  rebuild();
}

void CrackSet::rebuild() {
  edges_.clear();
  cuts_.clear();
  tips_.clear();
  if (!mesh_) return;
  if (mesh_->dimension() == 1) {
    for (const auto& c : components_) cuts_.push_back(c.front());
    std::sort(cuts_.begin(), cuts_.end());
    cuts_.erase(std::unique(cuts_.begin(), cuts_.end()), cuts_.end());
    return;
  }
  for (const auto& c : components_)
    for (std::size_t i = 1; i < c.size(); ++i) edges_.push_back(edge_key(c[i - 1], c[i]));
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  // Path-structure classification: an endpoint is free when every occurrence
  // of the node is as an endpoint attached through the same single edge.
  std::map<int, std::set<int>> attach;
  std::set<int> interior;
  for (const auto& c : components_) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i == 0) {
        attach[c[0]].insert(c[1]);
      } else if (i + 1 == c.size()) {
        attach[c[i]].insert(c[i - 1]);
      } else {
        interior.insert(c[i]);
      }
    }
  }
  for (const auto& [node, nbrs] : attach) {
    if (interior.count(node) || nbrs.size() != 1) continue;
    if (mesh_->is_boundary_node(node)) continue;
    tips_.push_back(node);
  }
}

std::vector<int> CrackSet::tips_by_degree() const {
  std::vector<int> out;
  if (!mesh_ || mesh_->dimension() == 1) return out;
  std::map<int, int> deg;
  for (EdgeKey k : edges_) {
    ++deg[edge_first(k)];
    ++deg[edge_second(k)];
  }
  for (const auto& [node, d] : deg)
    if (d == 1 && !mesh_->is_boundary_node(node)) out.push_back(node);
  return out;
}

double CrackSet::length() const { return mesh_ ? length(mesh_->nodes()) : 0.0; }

double CrackSet::length(std::span<const Point> pos) const {
  if (!mesh_) return 0.0;
  if (mesh_->dimension() == 1) return static_cast<double>(cuts_.size());
  double total = 0.0;
  for (EdgeKey k : edges_) total += (pos[edge_first(k)] - pos[edge_second(k)]).norm();
  return total;
}

bool CrackSet::contains(const CrackSet& other) const {
  return std::includes(edges_.begin(), edges_.end(), other.edges_.begin(), other.edges_.end()) &&
         std::includes(cuts_.begin(), cuts_.end(), other.cuts_.begin(), other.cuts_.end());
}

bool CrackSet::has_edge(int a, int b) const {
  return std::binary_search(edges_.begin(), edges_.end(), edge_key(a, b));
}

bool CrackSet::has_node(int node) const {
  if (std::binary_search(cuts_.begin(), cuts_.end(), node)) return true;
  for (EdgeKey k : edges_)
    if (edge_first(k) == node || edge_second(k) == node) return true;
  return false;
}

int CrackSet::degree(int node) const {
  int d = 0;
  for (EdgeKey k : edges_)
    if (edge_first(k) == node || edge_second(k) == node) ++d;
  return d;
}

std::vector<int> CrackSet::nodes() const {
  std::vector<int> out(cuts_);
  for (EdgeKey k : edges_) {
    out.push_back(edge_first(k));
    out.push_back(edge_second(k));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<EdgeKey> CrackSet::incident_edges(int node) const {
  std::vector<EdgeKey> out;
  for (EdgeKey k : edges_)
    if (edge_first(k) == node || edge_second(k) == node) out.push_back(k);
  return out;
}

Vec2 CrackSet::outward_tangent(int tip) const {
  auto inc = incident_edges(tip);
  if (inc.size() != 1) throw GeometryError("node " + std::to_string(tip) + " is not a crack tip");
  const int other = edge_first(inc[0]) == tip ? edge_second(inc[0]) : edge_first(inc[0]);
  return (mesh_->node(tip) - mesh_->node(other)).normalized();
}

CrackSet CrackSet::with_path(std::vector<int> path) const {
  validate_path(*mesh_, path);
  CrackSet out = *this;
  out.components_.push_back(std::move(path));
  out.rebuild();
  return out;
}

CrackSet CrackSet::united(const CrackSet& other) const {
  if (!mesh_) return other;
  if (!other.mesh_) return *this;
  if (mesh_ != other.mesh_) throw GeometryError("crack sets live on different meshes");
  CrackSet out = *this;
  for (const auto& c : other.components_) out.components_.push_back(c);
  out.rebuild();
  return out;
}

std::string CrackSet::key() const {
  std::ostringstream os;
  if (!cuts_.empty()) {
    os << "cuts:";
    for (int c : cuts_) os << ' ' << c;
  } else {
    os << "edges:";
    for (EdgeKey k : edges_) os << ' ' << edge_first(k) << '-' << edge_second(k);
  }
  return os.str();
}

std::vector<std::vector<Point>> CrackSet::polylines() const {
  std::vector<std::vector<Point>> out;
  for (const auto& c : components_) {
    std::vector<Point> line;
    for (int v : c) line.push_back(mesh_->node(v));
    out.push_back(std::move(line));
  }
  return out;
}

CrackSet crack_from_path(MeshPtr mesh, const std::vector<int>& path) {
  return CrackSet(std::move(mesh), {path});
}

}  // namespace brittle
