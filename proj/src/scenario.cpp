#include "brittle/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <openssl/evp.h>

namespace brittle {

using json = nlohmann::ordered_json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError(join(path, key), "unknown key");
  }
}

const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const json& need(const json& j, const char* key, const std::string& path) {
  const json* v = find(j, key);
  if (!v) throw ConfigError(join(path, key), "missing required field");
  return *v;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  return x;
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<int>();
}

double number(const json& j, const char* key, const std::string& path, std::optional<double> fallback = {}) {
  const json* v = find(j, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(join(path, key), "missing required field");
  }
  return as_number(*v, join(path, key));
}

int integer(const json& j, const char* key, const std::string& path, std::optional<int> fallback = {}) {
  const json* v = find(j, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(join(path, key), "missing required field");
  }
  return as_int(*v, join(path, key));
}

bool boolean(const json& j, const char* key, const std::string& path, bool fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  return v->get<bool>();
}

std::string string(const json& j, const char* key, const std::string& path,
                   std::optional<std::string> fallback = {}) {
  const json* v = find(j, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(join(path, key), "missing required field");
  }
  if (!v->is_string()) throw ConfigError(join(path, key), "expected a string");
  return v->get<std::string>();
}

Point point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(path, "expected [x, y]");
  return {as_number(v[0], index_path(path, 0)), as_number(v[1], index_path(path, 1))};
}

Point point(const json& j, const char* key, const std::string& path, Point fallback) {
  const json* v = find(j, key);
  return v ? point(*v, join(path, key)) : fallback;
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], index_path(path, i)));
  return out;
}

void require_positive(double x, const std::string& path) {
  if (!(x > 0)) throw ConfigError(path, "must be positive");
}

void require_decreasing(const std::vector<double>& r, const std::string& path) {
  if (r.empty()) throw ConfigError(path, "radius list is empty");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0)) throw ConfigError(index_path(path, i), "radius must be positive");
    if (i > 0 && !(r[i] < r[i - 1])) throw ConfigError(index_path(path, i), "radii must be strictly decreasing");
  }
}

MeshPtr parse_mesh(const json& j, const std::string& path, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  const std::string kind = string(j, "kind", path);
  try {
    if (kind == "rect") {
      require_object(j, path, {"kind", "width", "height", "resolution", "origin", "pattern"});
      const std::string pattern = string(j, "pattern", path, std::string("union_jack"));
      if (pattern != "union_jack" && pattern != "uniform")
        throw ConfigError(join(path, "pattern"), "expected \"union_jack\" or \"uniform\"");
      return build_rect_mesh(number(j, "width", path, 1.0), number(j, "height", path, 1.0),
                             number(j, "resolution", path), point(j, "origin", path, Point::Zero()),
                             pattern == "uniform" ? DiagonalPattern::uniform : DiagonalPattern::union_jack);
    }
    if (kind == "interval") {
      require_object(j, path, {"kind", "length", "elements"});
      return build_interval_mesh(number(j, "length", path, 1.0), integer(j, "elements", path));
    }
    if (kind == "disk") {
      require_object(j, path, {"kind", "radius", "h", "center"});
      return build_disk_mesh(number(j, "radius", path, 1.0), number(j, "h", path),
                             point(j, "center", path, Point::Zero()));
    }
    if (kind == "file") {
      require_object(j, path, {"kind", "path"});
      std::string file = string(j, "path", path);
      if (!file.empty() && file.front() != '/' && !base_dir.empty()) file = base_dir + "/" + file;
      std::ifstream in(file);
      if (!in) throw ConfigError(join(path, "path"), "cannot open mesh file " + file);
      return read_mesh(in);
    }
  } catch (const GeometryError& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(join(path, "kind"), "unknown mesh kind \"" + kind + "\"");
}

CrackSet parse_crack(const json* j, const std::string& path, const MeshPtr& mesh) {
  if (!j) return CrackSet(mesh);
  require_object(*j, path, {"paths", "grid_paths", "cuts", "disk_slit"});
  std::vector<std::vector<int>> comps;
  auto node_id = [&](const json& v, const std::string& p) {
    const int n = as_int(v, p);
    if (n < 0 || static_cast<std::size_t>(n) >= mesh->num_nodes()) throw ConfigError(p, "node id out of range");
    return n;
  };
  if (const json* paths = find(*j, "paths")) {
    const std::string p = join(path, "paths");
    if (!paths->is_array()) throw ConfigError(p, "expected a list of node paths");
    for (std::size_t i = 0; i < paths->size(); ++i) {
      const json& one = (*paths)[i];
      if (!one.is_array()) throw ConfigError(index_path(p, i), "expected a list of node ids");
      std::vector<int> nodes;
      for (std::size_t k = 0; k < one.size(); ++k) nodes.push_back(node_id(one[k], index_path(index_path(p, i), k)));
      comps.push_back(std::move(nodes));
    }
  }
  if (const json* grid = find(*j, "grid_paths")) {
    const std::string p = join(path, "grid_paths");
    if (!grid->is_array()) throw ConfigError(p, "expected a list of [i, j] paths");
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const json& one = (*grid)[i];
      if (!one.is_array()) throw ConfigError(index_path(p, i), "expected a list of [i, j] pairs");
      std::vector<int> nodes;
      for (std::size_t k = 0; k < one.size(); ++k) {
        const std::string q = index_path(index_path(p, i), k);
        const json& ij = one[k];
        if (!ij.is_array() || ij.size() != 2) throw ConfigError(q, "expected [i, j]");
        try {
          nodes.push_back(rect_node_id(*mesh, as_int(ij[0], q), as_int(ij[1], q)));
        } catch (const GeometryError& e) {
          throw ConfigError(q, e.what());
        }
      }
      comps.push_back(std::move(nodes));
    }
  }
  if (const json* cuts = find(*j, "cuts")) {
    const std::string p = join(path, "cuts");
    if (!cuts->is_array()) throw ConfigError(p, "expected a list of node ids");
    for (std::size_t k = 0; k < cuts->size(); ++k) comps.push_back({node_id((*cuts)[k], index_path(p, k))});
  }
  if (boolean(*j, "disk_slit", path, false)) {
    try {
      comps.push_back(disk_slit_path(*mesh));
    } catch (const GeometryError& e) {
      throw ConfigError(join(path, "disk_slit"), e.what());
    }
  }
  if (comps.empty()) return CrackSet(mesh);
  try {
    return CrackSet(mesh, std::move(comps));
  } catch (const GeometryError& e) {
    throw ConfigError(path, e.what());
  }
}

SurfaceEnergy parse_surface(const json* j, const std::string& path) {
  if (!j) return SurfaceEnergy::griffith(1.0);
  const std::string kind = string(*j, "kind", path, std::string("griffith"));
  if (kind == "griffith") {
    require_object(*j, path, {"kind", "G"});
    const double G = number(*j, "G", path, 1.0);
    require_positive(G, join(path, "G"));
    return SurfaceEnergy::griffith(G);
  }
  if (kind == "weighted") {
    require_object(*j, path, {"kind", "G", "barriers"});
    const double G = number(*j, "G", path, 1.0);
    require_positive(G, join(path, "G"));
    std::vector<Barrier> barriers;
    if (const json* b = find(*j, "barriers")) {
      const std::string p = join(path, "barriers");
      if (!b->is_array()) throw ConfigError(p, "expected a list");
      for (std::size_t i = 0; i < b->size(); ++i) {
        const std::string q = index_path(p, i);
        require_object((*b)[i], q, {"center", "radius", "value"});
        Barrier bar{point(need((*b)[i], "center", q), join(q, "center")), number((*b)[i], "radius", q),
                    number((*b)[i], "value", q)};
        require_positive(bar.radius, join(q, "radius"));
        if (bar.value < 0) throw ConfigError(join(q, "value"), "must be non-negative");
        barriers.push_back(bar);
      }
    }
    return SurfaceEnergy::weighted(G, std::move(barriers));
  }
  throw ConfigError(join(path, "kind"), "unknown surface energy kind \"" + kind + "\"");
}

// Points where the cut ray theta = +-pi of a tip field leaves the domain.
std::vector<Point> cut_ray_crossings(const Mesh& mesh, const Point& center, double angle) {
  std::vector<Point> out;
  if (mesh.dimension() != 2) return out;
  const Vec2 d(-std::cos(angle), -std::sin(angle));
  for (const auto& f : mesh.boundary()) {
    const Point a = mesh.node(f.nodes[0]), b = mesh.node(f.nodes[1]);
    const Vec2 e = b - a;
    const double den = d.x() * e.y() - d.y() * e.x();
    if (std::abs(den) < 1e-14) continue;
    const Vec2 w = a - center;
    const double s = (w.x() * e.y() - w.y() * e.x()) / den;  // along the ray
    const double u = (w.x() * d.y() - w.y() * d.x()) / den;  // along the facet
    if (s > 0 && u >= -1e-12 && u <= 1 + 1e-12) out.push_back(center + s * d);
  }
  return out;
}

BoundaryDisplacement parse_boundary(const json& j, const std::string& path, const Mesh& mesh) {
  const std::string kind = string(j, "kind", path);
  BoundaryDisplacement b;
  if (kind == "linear") {
    require_object(j, path, {"kind", "gradient", "offset", "t"});
    b = linear_displacement(point(j, "gradient", path, Point(1.0, 0.0)), number(j, "offset", path, 0.0));
  } else if (kind == "mode3") {
    require_object(j, path, {"kind", "amplitude", "center", "angle", "t"});
    const Point center = point(j, "center", path, Point::Zero());
    const double angle = number(j, "angle", path, 0.0);
    b = mode3_displacement(number(j, "amplitude", path, 1.0), center, angle);
    b.break_points = cut_ray_crossings(mesh, center, angle);
  } else {
    throw ConfigError(join(path, "kind"), "unknown boundary displacement kind \"" + kind + "\"");
  }
  return b.at(number(j, "t", path, 1.0));
}

std::vector<double> parse_times(const json& j, const std::string& path) {
  std::vector<double> times;
  if (const json* t = find(j, "times")) {
    require_object(j, path, {"times"});
    times = numbers(*t, join(path, "times"));
  } else {
    require_object(j, path, {"start", "stop", "count"});
    const double a = number(j, "start", path), b = number(j, "stop", path);
    const int n = integer(j, "count", path);
    if (n < 1) throw ConfigError(join(path, "count"), "must be at least 1");
    for (int i = 0; i < n; ++i) times.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  }
  if (times.empty()) throw ConfigError(path, "schedule is empty");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw ConfigError(join(path, "times"), "times must be strictly increasing");
  return times;
}

SearchOptions parse_search(const json* j, const json* solver, const std::string& path) {
  SearchOptions s;
  if (j) {
    require_object(*j, path, {"depth", "budget", "nucleation", "rel_tol", "greedy"});
    s.depth = integer(*j, "depth", path, s.depth);
    if (s.depth < 1) throw ConfigError(join(path, "depth"), "must be at least 1");
    const int budget = integer(*j, "budget", path, static_cast<int>(s.budget));
    if (budget < 1) throw ConfigError(join(path, "budget"), "must be at least 1");
    s.budget = static_cast<std::size_t>(budget);
    s.nucleation = boolean(*j, "nucleation", path, s.nucleation);
    s.rel_tol = number(*j, "rel_tol", path, s.rel_tol);
    s.greedy = boolean(*j, "greedy", path, s.greedy);
  }
  if (solver) {
    require_object(*solver, "solver", {"tolerance", "max_iterations"});
    s.solver.tolerance = number(*solver, "tolerance", "solver", s.solver.tolerance);
    require_positive(s.solver.tolerance, "solver.tolerance");
    s.solver.max_iterations = integer(*solver, "max_iterations", "solver", 0);
  }
  return s;
}

RegionSpec parse_region(const json& j, const std::string& path) {
  require_object(j, path, {"name", "kind", "center", "radius"});
  RegionSpec r;
  const std::string kind = string(j, "kind", path, std::string("whole"));
  r.name = string(j, "name", path, kind);
  if (kind == "whole") {
    r.kind = RegionSpecKind::whole;
  } else if (kind == "ball") {
    r.kind = RegionSpecKind::ball;
    r.center = point(need(j, "center", path), join(path, "center"));
    r.radius = number(j, "radius", path);
  } else if (kind == "tip_ball") {
    r.kind = RegionSpecKind::tip_ball;
    r.radius = number(j, "radius", path);
  } else if (kind == "away_from_tips") {
    r.kind = RegionSpecKind::away_from_tips;
    r.radius = number(j, "radius", path);
  } else {
    throw ConfigError(join(path, "kind"), "unknown region kind \"" + kind + "\"");
  }
  if (r.kind != RegionSpecKind::whole) require_positive(r.radius, join(path, "radius"));
  return r;
}

MeasureConfig parse_measures(const json* j, const std::string& path) {
  MeasureConfig m;
  if (!j) return m;
  require_object(*j, path, {"radii", "contour_radii", "fan", "plateaus", "regions", "state", "amplitude", "mu"});
  if (const json* r = find(*j, "radii")) {
    m.radii = numbers(*r, join(path, "radii"));
    require_decreasing(m.radii, join(path, "radii"));
  }
  if (const json* r = find(*j, "contour_radii")) {
    m.contour_radii = numbers(*r, join(path, "contour_radii"));
    require_decreasing(m.contour_radii, join(path, "contour_radii"));
  }
  m.family.fan = integer(*j, "fan", path, m.family.fan);
  if (m.family.fan < 1) throw ConfigError(join(path, "fan"), "must be at least 1");
  if (const json* p = find(*j, "plateaus")) {
    const std::string q = join(path, "plateaus");
    if (!p->is_array() || p->empty()) throw ConfigError(q, "expected a non-empty list of [inner, outer]");
    m.family.plateaus.clear();
    for (std::size_t i = 0; i < p->size(); ++i) {
      const Point ab = point((*p)[i], index_path(q, i));
      if (!(ab.x() > 0 && ab.y() > ab.x())) throw ConfigError(index_path(q, i), "need 0 < inner < outer");
      m.family.plateaus.emplace_back(ab.x(), ab.y());
    }
  }
  if (const json* r = find(*j, "regions")) {
    const std::string q = join(path, "regions");
    if (!r->is_array() || r->empty()) throw ConfigError(q, "expected a non-empty list of regions");
    m.regions.clear();
    for (std::size_t i = 0; i < r->size(); ++i) m.regions.push_back(parse_region((*r)[i], index_path(q, i)));
  }
  m.state = string(*j, "state", path, m.state);
  if (m.state != "solved" && m.state != "manufactured")
    throw ConfigError(join(path, "state"), "expected \"solved\" or \"manufactured\"");
  m.amplitude = number(*j, "amplitude", path, m.amplitude);
  m.mu = number(*j, "mu", path, m.mu);
  require_positive(m.mu, join(path, "mu"));
  return m;
}

EvolveConfig parse_evolve(const json* j, const std::string& path) {
  EvolveConfig e;
  if (!j) return e;
  require_object(*j, path, {"modes", "equilibrium_depth"});
  if (const json* modes = find(*j, "modes")) {
    const std::string q = join(path, "modes");
    if (!modes->is_array() || modes->empty()) throw ConfigError(q, "expected a non-empty list of modes");
    e.minimal = e.equilibrium = false;
    for (std::size_t i = 0; i < modes->size(); ++i) {
      const json& v = (*modes)[i];
      if (v == "minimal")
        e.minimal = true;
      else if (v == "equilibrium")
        e.equilibrium = true;
      else
        throw ConfigError(index_path(q, i), "expected \"minimal\" or \"equilibrium\"");
    }
  }
  if (find(*j, "equilibrium_depth")) {
    e.equilibrium_depth = integer(*j, "equilibrium_depth", path);
    if (*e.equilibrium_depth < 1) throw ConfigError(join(path, "equilibrium_depth"), "must be at least 1");
  }
  return e;
}

VerifyConfig parse_verify(const json* j, const std::string& path) {
  VerifyConfig v;
  if (!j) return v;
  require_object(*j, path,
                 {"loads", "equilibrium_depth", "inject_non_equilibrium", "critical", "hypothesis_cases", "chain",
                  "axioms"});
  if (const json* l = find(*j, "loads")) v.loads = numbers(*l, join(path, "loads"));
  v.equilibrium_depth = integer(*j, "equilibrium_depth", path, v.equilibrium_depth);
  if (v.equilibrium_depth < 1) throw ConfigError(join(path, "equilibrium_depth"), "must be at least 1");
  if (const json* inj = find(*j, "inject_non_equilibrium")) {
    const std::string q = join(path, "inject_non_equilibrium");
    require_object(*inj, q, {"t"});
    v.inject_non_equilibrium = number(*inj, "t", q);
  }
  if (const json* c = find(*j, "critical")) {
    const std::string q = join(path, "critical");
    require_object(*c, q, {"lo", "hi", "tol", "rel_tol"});
    CriticalConfig cc;
    cc.lo = number(*c, "lo", q);
    cc.hi = number(*c, "hi", q);
    if (!(cc.lo < cc.hi)) throw ConfigError(join(q, "hi"), "bracket must satisfy lo < hi");
    cc.tol = number(*c, "tol", q, cc.tol);
    require_positive(cc.tol, join(q, "tol"));
    cc.rel_tol = number(*c, "rel_tol", q, cc.rel_tol);
    v.critical = cc;
  }
  v.hypothesis_cases = integer(*j, "hypothesis_cases", path, v.hypothesis_cases);
  if (v.hypothesis_cases < 0) throw ConfigError(join(path, "hypothesis_cases"), "must be non-negative");
  v.chain = boolean(*j, "chain", path, v.chain);
  v.axioms = boolean(*j, "axioms", path, v.axioms);
  return v;
}

}  // namespace

Region RegionSpec::build(const State& state) const {
  const MeshPtr& mesh = state.space()->mesh();
  switch (kind) {
    case RegionSpecKind::whole:
      return whole_region(mesh);
    case RegionSpecKind::ball:
      return ball_region(mesh, center, radius);
    case RegionSpecKind::tip_ball: {
      std::vector<Point> centers;
      for (int t : state.crack().tips()) centers.push_back(mesh->node(t));
      return tubular_region(mesh, centers, radius);
    }
    case RegionSpecKind::away_from_tips: {
      std::vector<Point> centers;
      for (int t : state.crack().tips()) centers.push_back(mesh->node(t));
      std::vector<int> cells;
      for (std::size_t e = 0; e < mesh->num_elements(); ++e) {
        const Point b = mesh->barycenter(static_cast<int>(e));
        // Keep a full cell layer between the excluded ball and the region.
        const bool near = std::any_of(centers.begin(), centers.end(), [&](const Point& c) {
          return (b - c).norm() < radius + mesh->mesh_size();
        });
        if (!near) cells.push_back(static_cast<int>(e));
      }
      return cell_region(mesh, cells);
    }
  }
  return whole_region(mesh);
}

std::string git_blob_sha1(const std::string& bytes) {
  const std::string blob = "blob " + std::to_string(bytes.size()) + std::string(1, '\0') + bytes;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", source + ": syntax error: " + e.what());
  }
  require_object(j, "", {"schema_version", "mesh", "crack", "material", "surface", "boundary", "schedule", "search",
                         "solver", "measures", "evolve", "verify", "output"});
  Scenario s;
  s.source = source;
  s.hash = git_blob_sha1(text);
  s.echo = j;
  s.schema_version = integer(j, "schema_version", "");
  if (s.schema_version != 1) throw ConfigError("schema_version", "unsupported schema version");

  std::string base_dir;
  if (const auto slash = source.find_last_of('/'); slash != std::string::npos) base_dir = source.substr(0, slash);
  s.mesh = parse_mesh(need(j, "mesh", ""), "mesh", base_dir);
  s.K = parse_crack(find(j, "crack"), "crack", s.mesh);

  if (const json* m = find(j, "material")) {
    require_object(*m, "material", {"kind", "mu"});
    const std::string kind = string(*m, "kind", "material", std::string("quadratic"));
    if (kind != "quadratic") throw ConfigError("material.kind", "only \"quadratic\" is available from config");
    s.material = Material::quadratic(number(*m, "mu", "material", 1.0));
    require_positive(s.material.mu, "material.mu");
  } else {
    s.material = Material::quadratic(1.0);
  }
  s.surface = parse_surface(find(j, "surface"), "surface");
  s.boundary = parse_boundary(need(j, "boundary", ""), "boundary", *s.mesh);
  s.schedule.base = s.boundary;
  s.schedule.times = {s.boundary.t};
  if (const json* sch = find(j, "schedule")) s.schedule.times = parse_times(*sch, "schedule");
  s.search = parse_search(find(j, "search"), find(j, "solver"), "search");
  s.measures = parse_measures(find(j, "measures"), "measures");
  s.evolve = parse_evolve(find(j, "evolve"), "evolve");
  s.verify = parse_verify(find(j, "verify"), "verify");
  if (s.verify.loads.empty()) s.verify.loads = s.schedule.times;
  if (const json* out = find(j, "output")) {
    require_object(*out, "output", {"directory"});
    s.output_dir = string(*out, "directory", "output", s.output_dir);
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_scenario(os.str(), path);
}

}  // namespace brittle
