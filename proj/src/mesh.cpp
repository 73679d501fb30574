#include "brittle/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace brittle {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

}  // namespace

Mesh::Mesh(int dimension, std::vector<Point> nodes, std::vector<Element> elements,
           std::vector<BoundaryFacet> boundary)
    : dim_(dimension), nodes_(std::move(nodes)), elements_(std::move(elements)) {
  if (dim_ != 1 && dim_ != 2) throw GeometryError("mesh dimension must be 1 or 2");
  if (nodes_.empty() || elements_.empty()) throw GeometryError("mesh has no nodes or no elements");
  const int nn = static_cast<int>(nodes_.size());
  const int npe = dim_ + 1;

  double scale = 0.0;
  for (const auto& p : nodes_) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  scale = std::max(scale, 1.0);

  for (std::size_t e = 0; e < elements_.size(); ++e) {
    auto& el = elements_[e];
    for (int k = 0; k < npe; ++k) {
      if (el[k] < 0 || el[k] >= nn)
        throw GeometryError("element " + std::to_string(e) + " references invalid node " + std::to_string(el[k]));
    }
    if (dim_ == 1) {
      el[2] = -1;
      if (el[0] == el[1]) throw GeometryError("degenerate segment " + std::to_string(e));
      if (nodes_[el[1]].x() < nodes_[el[0]].x()) std::swap(el[0], el[1]);
      if (nodes_[el[1]].x() - nodes_[el[0]].x() <= 1e-14 * scale)
        throw GeometryError("zero-length segment " + std::to_string(e));
    } else {
      double a = cross(nodes_[el[1]] - nodes_[el[0]], nodes_[el[2]] - nodes_[el[0]]);
      if (std::abs(a) <= 1e-14 * scale * scale)
        throw GeometryError("zero-area triangle " + std::to_string(e));
      if (a < 0) std::swap(el[1], el[2]);
    }
  }

  node_elements_.assign(nodes_.size(), {});
  for (std::size_t e = 0; e < elements_.size(); ++e)
    for (int k = 0; k < npe; ++k) node_elements_[elements_[e][k]].push_back(static_cast<int>(e));

  // Edges: triangle sides in 2D, the segments themselves in 1D.
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const auto& el = elements_[e];
    if (dim_ == 1) {
      edge_elements_[edge_key(el[0], el[1])].push_back(static_cast<int>(e));
    } else {
      for (int k = 0; k < 3; ++k) edge_elements_[edge_key(el[k], el[(k + 1) % 3])].push_back(static_cast<int>(e));
    }
  }
  for (const auto& [key, els] : edge_elements_) {
    if (dim_ == 2 && els.size() > 2)
      throw GeometryError("non-conforming mesh: edge (" + std::to_string(edge_first(key)) + "," +
                          std::to_string(edge_second(key)) + ") shared by more than two triangles");
    if (dim_ == 1 && els.size() > 1) throw GeometryError("duplicate segment in 1D mesh");
    edge_list_.push_back(key);
  }
  std::sort(edge_list_.begin(), edge_list_.end());

  node_neighbors_.assign(nodes_.size(), {});
  for (EdgeKey k : edge_list_) {
    node_neighbors_[edge_first(k)].push_back(edge_second(k));
    node_neighbors_[edge_second(k)].push_back(edge_first(k));
    h_max_ = std::max(h_max_, (nodes_[edge_first(k)] - nodes_[edge_second(k)]).norm());
  }
  for (auto& nb : node_neighbors_) std::sort(nb.begin(), nb.end());

  // Topological boundary.
  std::vector<BoundaryFacet> topo;
  if (dim_ == 2) {
    for (EdgeKey k : edge_list_)
      if (edge_elements_.at(k).size() == 1) topo.push_back({{edge_first(k), edge_second(k)}, 1});
  } else {
    for (int i = 0; i < nn; ++i)
      if (node_elements_[i].size() == 1) topo.push_back({{i, -1}, 1});
  }
  if (boundary.empty()) {
    boundary_ = std::move(topo);
  } else {
    auto key_of = [&](const BoundaryFacet& f) {
      return dim_ == 2 ? edge_key(f.nodes[0], f.nodes[1]) : static_cast<EdgeKey>(f.nodes[0]);
    };
    std::set<EdgeKey> expected, given;
    for (const auto& f : topo) expected.insert(key_of(f));
    for (const auto& f : boundary) {
      if (!given.insert(key_of(f)).second) throw GeometryError("duplicate boundary facet");
    }
    if (expected != given) throw GeometryError("boundary facets do not match the topological boundary");
    boundary_ = std::move(boundary);
  }
  boundary_node_.assign(nodes_.size(), 0);
  for (const auto& f : boundary_) {
    boundary_node_[f.nodes[0]] = 1;
    if (f.nodes[1] >= 0) boundary_node_[f.nodes[1]] = 1;
  }

  if (dim_ == 2) {
    // Chain boundary edges into one loop when possible.
    std::map<int, std::vector<int>> adj;
    for (const auto& f : boundary_) {
      adj[f.nodes[0]].push_back(f.nodes[1]);
      adj[f.nodes[1]].push_back(f.nodes[0]);
    }
    bool simple = std::all_of(adj.begin(), adj.end(), [](const auto& kv) { return kv.second.size() == 2; });
    if (simple && !adj.empty()) {
      std::vector<int> loop{adj.begin()->first};
      int prev = -1, cur = loop.front();
      while (true) {
        const auto& nb = adj[cur];
        int next = nb[0] != prev ? nb[0] : nb[1];
        if (next == loop.front()) break;
        loop.push_back(next);
        prev = cur;
        cur = next;
        if (loop.size() > adj.size()) break;
      }
      if (loop.size() == adj.size()) {
        for (int i : loop) polygon_.push_back(nodes_[i]);
        double area = 0.0;
        for (std::size_t i = 0; i < polygon_.size(); ++i)
          area += cross(polygon_[i], polygon_[(i + 1) % polygon_.size()]);
        if (area < 0) std::reverse(polygon_.begin(), polygon_.end());
      }
    }
  }
}

bool Mesh::is_boundary_edge(int a, int b) const {
  auto it = edge_elements_.find(edge_key(a, b));
  return dim_ == 2 && it != edge_elements_.end() && it->second.size() == 1;
}

const std::vector<int>& Mesh::edge_elements(int a, int b) const {
  static const std::vector<int> empty;
  auto it = edge_elements_.find(edge_key(a, b));
  return it == edge_elements_.end() ? empty : it->second;
}

double Mesh::element_measure(int e, std::span<const Point> pos) const {
  const auto& el = elements_[static_cast<std::size_t>(e)];
  if (dim_ == 1) return pos[el[1]].x() - pos[el[0]].x();
  return 0.5 * cross(pos[el[1]] - pos[el[0]], pos[el[2]] - pos[el[0]]);
}

Point Mesh::barycenter(int e) const {
  const auto& el = elements_[static_cast<std::size_t>(e)];
  if (dim_ == 1) return 0.5 * (nodes_[el[0]] + nodes_[el[1]]);
  return (nodes_[el[0]] + nodes_[el[1]] + nodes_[el[2]]) / 3.0;
}

double Mesh::diameter() const {
  Point lo = nodes_.front(), hi = nodes_.front();
  for (const auto& p : nodes_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

std::vector<Point> Mesh::boundary_polygon() const {
  if (dim_ != 2 || polygon_.empty()) throw GeometryError("mesh boundary is not a single closed loop");
  return polygon_;
}

bool Mesh::contains(const Point& p, double eps) const {
  if (dim_ == 1) {
    double lo = nodes_.front().x(), hi = lo;
    for (const auto& q : nodes_) {
      lo = std::min(lo, q.x());
      hi = std::max(hi, q.x());
    }
    return p.x() >= lo - eps && p.x() <= hi + eps;
  }
  if (polygon_.empty()) {
    for (std::size_t e = 0; e < elements_.size(); ++e) {
      const auto& el = elements_[e];
      const double a = element_measure(static_cast<int>(e));
      double l0 = 0.5 * cross(nodes_[el[1]] - p, nodes_[el[2]] - p) / a;
      double l1 = 0.5 * cross(nodes_[el[2]] - p, nodes_[el[0]] - p) / a;
      if (l0 >= -eps && l1 >= -eps && 1.0 - l0 - l1 >= -eps) return true;
    }
    return false;
  }
  const std::size_t n = polygon_.size();
  for (std::size_t i = 0; i < n; ++i)
    if (segment_distance(p, polygon_[i], polygon_[(i + 1) % n]) <= eps) return true;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = polygon_[i];
    const Point& b = polygon_[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

MeshPtr build_rect_mesh(double width, double height, double resolution, Point origin, DiagonalPattern pattern) {
  if (!(width > 0) || !(height > 0) || !(resolution > 0))
    throw GeometryError("rect mesh: width, height and resolution must be positive");
  const int nx = static_cast<int>(std::lround(width * resolution));
  const int ny = static_cast<int>(std::lround(height * resolution));
  if (nx < 2 || ny < 2)
    throw GeometryError("rect mesh: resolution too small, need at least 2 cells per side to have an interior node");
  if (nx % 2 != 0 || ny % 2 != 0)
    throw GeometryError("rect mesh: cell counts must be even so mid-lines are edge paths (got " +
                        std::to_string(nx) + "x" + std::to_string(ny) + ")");
  std::vector<Point> nodes;
  nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      nodes.emplace_back(origin.x() + width * i / nx, origin.y() + height * j / ny);
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<Element> elements;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      const bool main_diag = pattern == DiagonalPattern::uniform || (i + j) % 2 == 0;
      if (main_diag) {
        elements.push_back({a, b, c});
        elements.push_back({a, c, d});
      } else {
        elements.push_back({a, b, d});
        elements.push_back({b, c, d});
      }
    }
  }
  std::vector<BoundaryFacet> boundary;
  for (int i = 0; i < nx; ++i) boundary.push_back({{id(i, 0), id(i + 1, 0)}, 1});
  for (int j = 0; j < ny; ++j) boundary.push_back({{id(nx, j), id(nx, j + 1)}, 2});
  for (int i = 0; i < nx; ++i) boundary.push_back({{id(i, ny), id(i + 1, ny)}, 3});
  for (int j = 0; j < ny; ++j) boundary.push_back({{id(0, j), id(0, j + 1)}, 4});
  return std::make_shared<const Mesh>(2, std::move(nodes), std::move(elements), std::move(boundary));
}

int rect_node_id(const Mesh& mesh, int i, int j) {
  // Recover nx from the first row: nodes with the same y as node 0.
  const double y0 = mesh.node(0).y();
  int nx1 = 0;
  while (nx1 < static_cast<int>(mesh.num_nodes()) && std::abs(mesh.node(nx1).y() - y0) < 1e-12) ++nx1;
  return j * nx1 + i;
}

MeshPtr build_interval_mesh(double length, int elements) {
  if (!(length > 0) || elements < 2) throw GeometryError("interval mesh: need length > 0 and at least 2 segments");
  std::vector<Point> nodes;
  for (int i = 0; i <= elements; ++i) nodes.emplace_back(length * i / elements, 0.0);
  std::vector<Element> els;
  for (int i = 0; i < elements; ++i) els.push_back({i, i + 1, -1});
  std::vector<BoundaryFacet> boundary{{{0, -1}, 1}, {{elements, -1}, 2}};
  return std::make_shared<const Mesh>(1, std::move(nodes), std::move(els), std::move(boundary));
}

MeshPtr build_disk_mesh(double radius, double h, Point center) {
  if (!(radius > 0) || !(h > 0)) throw GeometryError("disk mesh: radius and h must be positive");
  const int rings = std::max(2, static_cast<int>(std::lround(radius / h)));
  std::vector<Point> nodes{center};
  std::vector<std::vector<int>> ring_ids{{0}};
  std::vector<std::vector<double>> ring_angles{{0.0}};
  for (int k = 1; k <= rings; ++k) {
    const double r = radius * k / rings;
    int m = 2 * static_cast<int>(std::lround(std::numbers::pi * r / (radius / rings)));
    m = std::max(m, 6);
    std::vector<int> ids;
    std::vector<double> angles;
    for (int j = 0; j < m; ++j) {
      const double th = 2.0 * std::numbers::pi * j / m;
      // Exact placement on the axis keeps the slit ray straight.
      Point p = j == m / 2 ? Point(center.x() - r, center.y())
                           : Point(center.x() + r * std::cos(th), center.y() + r * std::sin(th));
      if (j == 0) p = Point(center.x() + r, center.y());
      ids.push_back(static_cast<int>(nodes.size()));
      angles.push_back(th);
      nodes.push_back(p);
    }
    ring_ids.push_back(std::move(ids));
    ring_angles.push_back(std::move(angles));
  }
  std::vector<Element> elements;
  {
    const auto& r1 = ring_ids[1];
    for (std::size_t j = 0; j < r1.size(); ++j) elements.push_back({0, r1[j], r1[(j + 1) % r1.size()]});
  }
  for (int k = 1; k < rings; ++k) {
    const auto& in = ring_ids[k];
    const auto& out = ring_ids[k + 1];
    const auto& ain = ring_angles[k];
    const auto& aout = ring_angles[k + 1];
    const std::size_t m = in.size(), n = out.size();
    std::size_t i = 0, j = 0;
    auto ang = [](const std::vector<double>& a, std::size_t idx) {
      return idx == a.size() ? 2.0 * std::numbers::pi : a[idx];
    };
    while (i < m || j < n) {
      const bool advance_inner = j == n || (i < m && ang(ain, i + 1) <= ang(aout, j + 1));
      if (advance_inner) {
        elements.push_back({in[i % m], out[j % n], in[(i + 1) % m]});
        ++i;
      } else {
        elements.push_back({in[i % m], out[j % n], out[(j + 1) % n]});
        ++j;
      }
    }
  }
  std::vector<BoundaryFacet> boundary;
  const auto& outer = ring_ids.back();
  for (std::size_t j = 0; j < outer.size(); ++j) boundary.push_back({{outer[j], outer[(j + 1) % outer.size()]}, 1});
  return std::make_shared<const Mesh>(2, std::move(nodes), std::move(elements), std::move(boundary));
}

std::vector<int> disk_slit_path(const Mesh& mesh, Point center) {
  std::vector<std::pair<double, int>> on_ray;
  const double tol = 1e-9 * std::max(1.0, mesh.diameter());
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const Point& p = mesh.node(static_cast<int>(i));
    if (std::abs(p.y() - center.y()) < tol && p.x() < center.x() - tol)
      on_ray.emplace_back(center.x() - p.x(), static_cast<int>(i));
  }
  std::sort(on_ray.begin(), on_ray.end(), std::greater<>());
  std::vector<int> path;
  for (const auto& [d, id] : on_ray) path.push_back(id);
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
    if ((mesh.node(static_cast<int>(i)) - center).norm() < tol) path.push_back(static_cast<int>(i));
  return path;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out.precision(17);
  out << "dim " << mesh.dimension() << "\n";
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const Point& p = mesh.node(static_cast<int>(i));
    out << i << ' ' << p.x();
    if (mesh.dimension() == 2) out << ' ' << p.y();
    out << "\n";
  }
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.element(static_cast<int>(e));
    out << e << ' ' << el[0] << ' ' << el[1];
    if (mesh.dimension() == 2) out << ' ' << el[2];
    out << "\n";
  }
  for (const auto& f : mesh.boundary()) {
    out << "b " << f.nodes[0];
    if (mesh.dimension() == 2) out << ' ' << f.nodes[1];
    out << ' ' << f.marker << "\n";
  }
}

MeshPtr read_mesh(std::istream& in) {
  int dim = 2;
  std::map<long, Point> nodes;
  std::map<long, Element> elements;
  std::vector<BoundaryFacet> boundary;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw GeometryError("mesh line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    try {
      if (tok[0] == "dim") {
        if (tok.size() != 2) fail("expected 'dim n'");
        dim = std::stoi(tok[1]);
        if (dim != 1 && dim != 2) fail("dimension must be 1 or 2");
      } else if (tok[0] == "b") {
        BoundaryFacet f;
        if (dim == 2) {
          if (tok.size() != 4) fail("expected 'b n1 n2 marker'");
          f.nodes = {std::stoi(tok[1]), std::stoi(tok[2])};
          f.marker = std::stoi(tok[3]);
        } else {
          if (tok.size() != 3) fail("expected 'b n marker'");
          f.nodes = {std::stoi(tok[1]), -1};
          f.marker = std::stoi(tok[2]);
        }
        boundary.push_back(f);
      } else if (static_cast<int>(tok.size()) == dim + 1) {
        Point p(std::stod(tok[1]), dim == 2 ? std::stod(tok[2]) : 0.0);
        if (!nodes.emplace(std::stol(tok[0]), p).second) fail("duplicate node id");
      } else if (static_cast<int>(tok.size()) == dim + 2) {
        Element el{std::stoi(tok[1]), std::stoi(tok[2]), dim == 2 ? std::stoi(tok[3]) : -1};
        if (!elements.emplace(std::stol(tok[0]), el).second) fail("duplicate element id");
      } else {
        fail("unrecognised record");
      }
    } catch (const std::invalid_argument&) {
      fail("malformed number");
    } catch (const std::out_of_range&) {
      fail("number out of range");
    }
  }
  std::vector<Point> nv;
  long expect = 0;
  for (const auto& [id, p] : nodes) {
    if (id != expect++) throw GeometryError("node ids must be contiguous from 0");
    nv.push_back(p);
  }
  std::vector<Element> ev;
  for (const auto& [id, el] : elements) ev.push_back(el);
  return std::make_shared<const Mesh>(dim, std::move(nv), std::move(ev), std::move(boundary));
}

PointLocator::PointLocator(MeshPtr mesh) : mesh_(std::move(mesh)) {
  const auto& nodes = mesh_->nodes();
  lo_ = hi_ = nodes.front();
  for (const auto& p : nodes) {
    lo_ = lo_.cwiseMin(p);
    hi_ = hi_.cwiseMax(p);
  }
  const double pad = 1e-9 * std::max(1.0, (hi_ - lo_).norm());
  lo_.array() -= pad;
  hi_.array() += pad;
  const auto ne = static_cast<double>(mesh_->num_elements());
  const int n = std::max(1, static_cast<int>(std::sqrt(ne / 2.0)));
  nx_ = n;
  ny_ = mesh_->dimension() == 2 ? n : 1;
  cell_x_ = (hi_.x() - lo_.x()) / nx_;
  cell_y_ = std::max((hi_.y() - lo_.y()) / ny_, 1e-300);
  buckets_.assign(static_cast<std::size_t>(nx_ * ny_), {});
  for (std::size_t e = 0; e < mesh_->num_elements(); ++e) {
    const auto& el = mesh_->element(static_cast<int>(e));
    Point a = mesh_->node(el[0]), b = a;
    for (int k = 1; k < mesh_->nodes_per_element(); ++k) {
      a = a.cwiseMin(mesh_->node(el[k]));
      b = b.cwiseMax(mesh_->node(el[k]));
    }
    const int i0 = std::clamp(static_cast<int>((a.x() - lo_.x()) / cell_x_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((b.x() - lo_.x()) / cell_x_), 0, nx_ - 1);
    const int j0 = ny_ == 1 ? 0 : std::clamp(static_cast<int>((a.y() - lo_.y()) / cell_y_), 0, ny_ - 1);
    const int j1 = ny_ == 1 ? 0 : std::clamp(static_cast<int>((b.y() - lo_.y()) / cell_y_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j * nx_ + i)].push_back(static_cast<int>(e));
  }
}

std::array<double, 3> PointLocator::barycentric(int e, const Point& p) const {
  const auto& el = mesh_->element(e);
  if (mesh_->dimension() == 1) {
    const double x0 = mesh_->node(el[0]).x(), x1 = mesh_->node(el[1]).x();
    const double s = (p.x() - x0) / (x1 - x0);
    return {1.0 - s, s, 0.0};
  }
  const Point& a = mesh_->node(el[0]);
  const Point& b = mesh_->node(el[1]);
  const Point& c = mesh_->node(el[2]);
  const double det = cross(b - a, c - a);
  const double l1 = cross(p - a, c - a) / det;
  const double l2 = cross(b - a, p - a) / det;
  return {1.0 - l1 - l2, l1, l2};
}

int PointLocator::locate(const Point& p, double eps) const {
  const int i = static_cast<int>((p.x() - lo_.x()) / cell_x_);
  const int j = ny_ == 1 ? 0 : static_cast<int>((p.y() - lo_.y()) / cell_y_);
  if (i < 0 || i >= nx_ || j < 0 || j >= ny_) return -1;
  const int npe = mesh_->nodes_per_element();
  for (int e : buckets_[static_cast<std::size_t>(j * nx_ + i)]) {
    auto l = barycentric(e, p);
    bool in = true;
    for (int k = 0; k < npe; ++k) in = in && l[static_cast<std::size_t>(k)] >= -eps;
    if (in) return e;
  }
  return -1;
}

std::array<Vec2, 3> shape_gradients(const Mesh& mesh, int e, std::span<const Point> pos) {
  const auto& el = mesh.element(e);
  if (mesh.dimension() == 1) {
    const double len = pos[el[1]].x() - pos[el[0]].x();
    return {Vec2(-1.0 / len, 0.0), Vec2(1.0 / len, 0.0), Vec2::Zero()};
  }
  const Point& p0 = pos[el[0]];
  const Point& p1 = pos[el[1]];
  const Point& p2 = pos[el[2]];
  const double det = cross(p1 - p0, p2 - p0);
  return {Vec2(p1.y() - p2.y(), p2.x() - p1.x()) / det, Vec2(p2.y() - p0.y(), p0.x() - p2.x()) / det,
          Vec2(p0.y() - p1.y(), p1.x() - p0.x()) / det};
}

}  // namespace brittle
