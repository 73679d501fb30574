#include "brittle/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <set>

#include "brittle/oracles.hpp"
#include "brittle/parallel.hpp"

namespace brittle {

using json = nlohmann::ordered_json;

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <typename... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double x) { return fmt(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  std::ofstream out_;
};

json energy_json(const EnergyBreakdown& e) {
  return {{"elastic", e.elastic}, {"surface", e.surface}, {"total", e.total}};
}

json estimate_json(const MeasureEstimate& est, const std::string& operation, json parameters = json::object()) {
  json j;
  j["operation"] = operation;
  j["parameters"] = std::move(parameters);
  j["value"] = est.value;
  j["error"] = est.error;
  j["fit_value"] = est.fit_value;
  j["method"] = est.method;
  json samples = json::array();
  for (const auto& [r, q] : est.samples) samples.push_back({r, q});
  j["samples"] = samples;
  for (const auto& [k, v] : est.extras) j["extras"][k] = v;
  j["family_size"] = est.family.size();
  if (!est.note.empty()) j["note"] = est.note;
  return j;
}

json certificate_json(const SearchCertificate& c) {
  constexpr std::size_t kMaxRows = 200;
  json j;
  j["kind"] = c.kind;
  j["candidate_count"] = c.candidate_count;
  j["best"] = c.best;
  j["equilibrium"] = c.equilibrium;
  j["witness"] = c.witness;
  if (!c.note.empty()) j["note"] = c.note;
  json rows = json::array();
  for (std::size_t i = 0; i < c.table.size() && i < kMaxRows; ++i) {
    const auto& r = c.table[i];
    rows.push_back({{"crack", r.key}, {"length", r.length}, {"energy", energy_json(r.energy)}, {"dominates", r.dominates}});
  }
  j["table"] = rows;
  j["table_truncated"] = c.table.size() > kMaxRows;
  return j;
}

json family_json(const FamilyOptions& f) {
  json p = json::array();
  for (const auto& [a, b] : f.plateaus) p.push_back({a, b});
  return {{"fan", f.fan}, {"plateaus_in_h", p}};
}

json radii_json(std::span<const double> r) { return json(std::vector<double>(r.begin(), r.end())); }

std::vector<double> concentration_radii(const Scenario& s) {
  if (!s.measures.radii.empty()) return s.measures.radii;
  return MeasureSettings{}.absolute_radii(*s.mesh);
}

MeasureSettings measure_settings(const Scenario& s) {
  MeasureSettings m;
  m.family = s.measures.family;
  if (!s.measures.radii.empty()) {
    m.concentration_radii.clear();
    for (double r : s.measures.radii) m.concentration_radii.push_back(r / s.mesh->mesh_size());
  }
  return m;
}

double distance_to_boundary(const Mesh& mesh, const Point& x) {
  const auto poly = mesh.boundary_polygon();
  double d = 1e300;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point a = poly[k], b = poly[(k + 1) % poly.size()];
    const Vec2 ab = b - a;
    const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    d = std::min(d, (x - (a + t * ab)).norm());
  }
  return d;
}

/// ER of the unit tangential tip field with the finest default plateau, per
/// tip; NaN where that field is not admissible.
std::vector<std::pair<int, double>> tangential_release(const State& st, const Material& m,
                                                       const FamilyOptions& family) {
  std::vector<std::pair<int, double>> out;
  if (st.mesh().dimension() != 2) return out;
  const double h = st.mesh().mesh_size();
  const auto [a, b] = family.plateaus.back();
  const CrackSet none(st.space()->mesh());
  for (int tip : st.crack().tips()) {
    double v = std::numeric_limits<double>::quiet_NaN();
    try {
      const auto f = tip_fan_field(st.crack(), tip, st.crack().outward_tangent(tip), a * h, b * h);
      v = energy_release_rate(st, m, f, none).value;
    } catch (const std::invalid_argument&) {
    }
    out.emplace_back(tip, v);
  }
  return out;
}

State base_state(const Scenario& s) {
  return solve_crack(s.mesh, s.K, s.material, s.surface, s.boundary, s.search.solver);
}

void write_trajectory(const Trajectory& traj, const Material& m, const FamilyOptions& family,
                      const std::filesystem::path& path) {
  CsvWriter csv(path, "t,crack_length,elastic,surface,total,tips,tangential_er");
  for (const auto& step : traj.steps) {
    const auto er = tangential_release(step.state, m, family);
    std::string tips, vals;
    for (std::size_t i = 0; i < er.size(); ++i) {
      tips += (i ? ";" : "") + std::to_string(er[i].first);
      vals += (i ? ";" : "") + (std::isnan(er[i].second) ? std::string("nan") : fmt(er[i].second));
    }
    const auto& e = step.state.energy();
    csv.row(step.t, step.state.crack().length(), e.elastic, e.surface, e.total, tips, vals);
  }
}

json audit_json(const AxiomAudit& a) {
  json v = json::array();
  for (const auto& x : a.violations)
    v.push_back({{"axiom", x.axiom}, {"i", x.i}, {"j", x.j}, {"gap", x.gap}, {"detail", x.detail}});
  return {{"A1", a.a1}, {"A2", a.a2}, {"A4", a.a4}, {"A5", a.a5}, {"passed", a.ok()}, {"violations", v}};
}

json trajectory_json(const Trajectory& traj) {
  json steps = json::array();
  for (const auto& st : traj.steps) {
    json j;
    j["t"] = st.t;
    j["crack"] = st.state.crack().key();
    j["crack_length"] = st.state.crack().length();
    j["energy"] = energy_json(st.state.energy());
    j["certificate"] = certificate_json(st.certificate);
    if (!st.hops.empty()) j["hops"] = st.hops;
    steps.push_back(std::move(j));
  }
  return {{"mode", traj.mode == EvolutionMode::minimal ? "minimal" : "equilibrium"},
          {"reading", traj.reading},
          {"steps", steps}};
}

SearchOptions equilibrium_options(const Scenario& s, std::optional<int> depth) {
  SearchOptions o = s.search;
  if (depth) o.depth = *depth;
  return o;
}

std::vector<std::pair<std::string, RegionBuilder>> region_builders(const Scenario& s) {
  std::vector<std::pair<std::string, RegionBuilder>> out;
  for (const auto& spec : s.measures.regions)
    out.emplace_back(spec.name, [spec](const State& st) { return spec.build(st); });
  return out;
}

json cf_normalization_json() {
  return {{"computed", "circle perimeter over r: 2 pi G per isolated tip"},
          {"alternative", "G per tip, the value used by the equality chain on minimal solutions"},
          {"ratio", 2.0 * std::numbers::pi},
          {"discrepancy_flagged", true}};
}

}  // namespace

CommandResult cmd_solve(const Scenario& s, const std::string& out_dir, const RunOptions&) {
  CommandResult r;
  const State st = base_state(s);
  const auto& d = st.diagnostics();
  const auto res = residual_report(st, s.material);
  const auto adm = is_admissible(st, s.K, s.boundary);
  const auto cont = check_boundary_continuity(s.boundary, *s.mesh);
  r.results["operation"] = "solve_displacement";
  r.results["crack"] = st.crack().key();
  r.results["crack_length"] = st.crack().length();
  r.results["t"] = s.boundary.t;
  r.results["energy"] = energy_json(st.energy());
  r.results["solver"] = {{"method", d.method},          {"iterations", d.iterations},
                         {"residual", d.residual},      {"converged", d.converged},
                         {"floating_components", d.floating_components}};
  r.results["residuals"] = {{"divergence", res.divergence_residual},
                            {"traction", res.traction_residual},
                            {"worst_dof", res.worst_dof},
                            {"scale", res.scale}};
  r.results["admissibility"] = {{"dirichlet", adm.dirichlet_ok}, {"contains_K", adm.contains_K_ok},
                                {"verdict", adm.verdict},        {"detail", adm.detail}};
  r.results["boundary_continuity"] = {{"continuous", cont.continuous}, {"max_jump", cont.max_jump}};
  {
    std::ofstream mesh_out(std::filesystem::path(out_dir) / "mesh.txt");
    write_mesh(mesh_out, *s.mesh);
  }
  CsvWriter csv(std::filesystem::path(out_dir) / "state.csv", "dof,node,x,y,u");
  for (int dof = 0; dof < st.space()->num_dofs(); ++dof) {
    const int n = st.space()->dof_node(dof);
    csv.row(dof, n, s.mesh->node(n).x(), s.mesh->node(n).y(), st.displacement()[dof]);
  }
  r.passed = d.converged && adm.verdict;
  return r;
}

CommandResult cmd_evolve(const Scenario& s, const std::string& out_dir, const RunOptions&) {
  CommandResult r;
  std::optional<Trajectory> minimal, equilibrium;
  const std::filesystem::path dir(out_dir);
  if (s.evolve.minimal) {
    minimal = evolve_minimal(s.mesh, s.K, s.schedule, s.material, s.surface, s.search);
    write_trajectory(*minimal, s.material, s.measures.family, dir / "trajectory_minimal.csv");
    const auto audit = audit_axioms(*minimal, s.material, s.surface, s.search.rel_tol);
    r.results["minimal"] = trajectory_json(*minimal);
    r.results["minimal"]["audit"] = audit_json(audit);
    r.passed = r.passed && audit.a4 && audit.a5;
  }
  if (s.evolve.equilibrium) {
    const auto opts = equilibrium_options(s, s.evolve.equilibrium_depth);
    equilibrium = evolve_equilibrium(s.mesh, s.K, s.schedule, s.material, s.surface, opts);
    write_trajectory(*equilibrium, s.material, s.measures.family, dir / "trajectory_equilibrium.csv");
    const auto audit = audit_axioms(*equilibrium, s.material, s.surface, s.search.rel_tol);
    r.results["equilibrium"] = trajectory_json(*equilibrium);
    r.results["equilibrium"]["search_depth"] = opts.depth;
    r.results["equilibrium"]["audit"] = audit_json(audit);
    r.passed = r.passed && audit.a4 && audit.a5;
  }
  if (minimal && equilibrium) {
    json div;
    div["diverged"] = false;
    bool dominance = true;
    json gaps = json::array();
    for (std::size_t i = 0; i < minimal->steps.size(); ++i) {
      const auto& a = minimal->steps[i].state;
      const auto& b = equilibrium->steps[i].state;
      const double gap = b.energy().total - a.energy().total;
      gaps.push_back(gap);
      dominance = dominance && gap >= -s.search.rel_tol * (1.0 + std::abs(b.energy().total));
      if (!div["diverged"].get<bool>() && !(a.crack() == b.crack())) {
        div["diverged"] = true;
        div["step"] = i;
        div["t"] = minimal->steps[i].t;
        div["energy_gap"] = gap;
        div["minimal_crack_length"] = a.crack().length();
        div["equilibrium_crack_length"] = b.crack().length();
      }
    }
    div["energy_gaps"] = gaps;
    div["minimal_below_equilibrium"] = dominance;
    r.results["divergence"] = div;
    r.passed = r.passed && dominance;
  }
  return r;
}

CommandResult cmd_measures(const Scenario& s, const std::string& out_dir, const RunOptions&) {
  CommandResult r;
  const Material m = s.measures.state == "manufactured" ? Material::quadratic(s.measures.mu) : s.material;
  std::optional<ManufacturedTipField> mf;
  if (s.measures.state == "manufactured") {
    if (s.mesh->dimension() != 2) throw ConfigError("measures.state", "manufactured state needs a disk mesh");
    mf = manufactured_state(s.mesh, s.measures.amplitude, s.measures.mu, Point::Zero(), s.surface);
  }
  const State st = mf ? mf->state : base_state(s);
  const auto radii = concentration_radii(s);
  const CrackSet none(s.mesh);
  const std::filesystem::path dir(out_dir);
  CsvWriter ce_csv(dir / "ce_sweep.csv", "region,radius,quotient");
  CsvWriter cf_csv(dir / "cf_sweep.csv", "region,radius,quotient");
  CsvWriter j_csv(dir / "j_sweep.csv", "tip,radius,j");

  r.results["state"] = {{"kind", s.measures.state}, {"crack", st.crack().key()}, {"energy", energy_json(st.energy())}};
  if (mf) r.results["state"]["exact"] = {{"J", mf->exact_J}, {"CE", mf->exact_CE}};
  json regions = json::array();
  for (const auto& spec : s.measures.regions) {
    const Region D = spec.build(st);
    json j;
    j["region"] = spec.name;
    j["tips"] = tips_in(st.crack(), D);
    const auto er = er_total_variation(st, m, D, none, s.measures.family);
    j["er_total_variation"] = estimate_json(er, "er_total_variation", family_json(s.measures.family));
    const auto ce = elastic_concentration(st, m, D, radii);
    j["elastic_concentration"] = estimate_json(ce, "elastic_concentration", {{"radii", radii_json(radii)}});
    const auto cf = surface_concentration(s.surface, st.crack(), D, radii);
    j["surface_concentration"] = estimate_json(cf, "surface_concentration", {{"radii", radii_json(radii)}});
    for (const auto& [rad, q] : ce.samples) ce_csv.row(spec.name, rad, q);
    for (const auto& [rad, q] : cf.samples) cf_csv.row(spec.name, rad, q);
    if (s.mesh->dimension() == 2) {
      std::vector<VectorField> fields;
      const double h = s.mesh->mesh_size();
      const auto [a, b] = s.measures.family.plateaus.back();
      for (int tip : tips_in(st.crack(), D)) {
        try {
          fields.push_back(tip_fan_field(st.crack(), tip, st.crack().outward_tangent(tip), a * h, b * h));
        } catch (const std::invalid_argument&) {
        }
      }
      if (!fields.empty()) {
        const auto ps = perimeter_sup(st.crack(), none, fields);
        j["perimeter_sup"] = estimate_json(ps, "perimeter_sup", {{"fields", "unit tangential tip fields"}});
      }
    }
    regions.push_back(std::move(j));
  }
  r.results["regions"] = regions;

  json rates = json::array();
  for (const auto& [tip, v] : tangential_release(st, m, s.measures.family))
    rates.push_back({{"operation", "energy_release_rate"}, {"tip", tip}, {"field", "unit tangential tip field"},
                     {"value", std::isnan(v) ? json(nullptr) : json(v)}});
  r.results["release_rates"] = rates;

  if (s.mesh->dimension() == 2) {
    json contours = json::array();
    for (int tip : st.crack().tips()) {
      std::vector<double> cr = s.measures.contour_radii;
      if (cr.empty()) {
        const double dist = distance_to_boundary(*s.mesh, s.mesh->node(tip));
        cr = {0.8 * dist, 0.65 * dist, 0.5 * dist, 0.35 * dist};
      }
      const auto jc = j_contour(st, m, tip, cr);
      for (const auto& [rad, q] : jc.samples) j_csv.row(tip, rad, q);
      json e = estimate_json(jc, "j_contour", {{"radii", radii_json(cr)}});
      e["tip"] = tip;
      contours.push_back(std::move(e));
    }
    r.results["j_contour"] = contours;
  }
  return r;
}

namespace {

CrackSet random_crack(const MeshPtr& mesh, std::mt19937_64& rng) {
  const Mesh& msh = *mesh;
  std::vector<int> interior;
  for (std::size_t n = 0; n < msh.num_nodes(); ++n)
    if (!msh.is_boundary_node(static_cast<int>(n))) interior.push_back(static_cast<int>(n));
  if (interior.empty()) return CrackSet(mesh);
  std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
  if (msh.dimension() == 1) {
    std::set<int> cuts;
    const int k = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int i = 0; i < k; ++i) cuts.insert(interior[pick(rng)]);
    std::vector<std::vector<int>> comps;
    for (int c : cuts) comps.push_back({c});
    return CrackSet(mesh, comps);
  }
  std::vector<int> path{interior[pick(rng)]};
  const int len = std::uniform_int_distribution<int>(1, 5)(rng);
  for (int i = 0; i < len; ++i) {
    std::vector<int> next;
    for (int w : msh.node_neighbors(path.back()))
      if (!msh.is_boundary_node(w) && std::find(path.begin(), path.end(), w) == path.end()) next.push_back(w);
    if (next.empty()) break;
    path.push_back(next[std::uniform_int_distribution<std::size_t>(0, next.size() - 1)(rng)]);
  }
  if (path.size() < 2) return CrackSet(mesh);
  return crack_from_path(mesh, path);
}

json hypotheses_json(const Scenario& s, std::uint64_t seed, bool& passed) {
  std::mt19937_64 rng(seed);
  const Mesh& mesh = *s.mesh;
  const int cases = s.verify.hypothesis_cases;
  int h1_fail = 0, h2_fail = 0;
  double h2_worst = 0.0;
  std::uniform_int_distribution<std::size_t> node(0, mesh.num_nodes() - 1);
  std::uniform_real_distribution<double> ratio(0.05, 1.0);
  for (int i = 0; i < cases; ++i) {
    const auto a = random_crack(s.mesh, rng);
    const auto b = random_crack(s.mesh, rng);
    if (!check_h1(s.surface, a, b).holds) ++h1_fail;
    std::vector<std::vector<Point>> sets;
    if (mesh.dimension() == 1) {
      for (int c : a.cut_nodes()) sets.push_back({mesh.node(c)});
    } else {
      sets = a.polylines();
    }
    const auto h2 = check_h2(s.surface, sets, mesh.node(static_cast<int>(node(rng))), ratio(rng), mesh);
    if (!h2.holds) ++h2_fail;
    if (h2.bound > 0) h2_worst = std::max(h2_worst, h2.f_dilated / h2.bound);
  }
  json j;
  j["cases"] = cases;
  j["seed"] = seed;
  j["h1"] = {{"failures", h1_fail}, {"passed", h1_fail == 0}};
  j["h2"] = {{"constant", 1.0}, {"failures", h2_fail}, {"worst_ratio", h2_worst}, {"passed", h2_fail == 0}};
  bool ok = h1_fail == 0 && h2_fail == 0;
  if (mesh.dimension() == 2) {
    const auto poly = mesh.boundary_polygon();
    Point c = Point::Zero();
    for (const auto& p : poly) c += p;
    c /= static_cast<double>(poly.size());
    const double h = mesh.mesh_size();
    const std::vector<double> radii{4 * h, 2 * h, h, 0.5 * h, 0.25 * h};
    const auto pts = check_h3(s.surface, {{c}}, radii, mesh);
    const auto seg = check_h3(s.surface, {{c - Vec2(2 * h, 0), c + Vec2(2 * h, 0)}}, radii, mesh);
    j["h3"] = {{"point", {{"sup", pts.sup}, {"bounded", pts.bounded}, {"verdict", pts.verdict}}},
               {"segment", {{"sup", seg.sup}, {"bounded", seg.bounded}, {"verdict", seg.verdict},
                            {"inverse_r_slope", seg.inverse_r_slope}}},
               {"passed", pts.bounded && !seg.bounded}};
    ok = ok && pts.bounded && !seg.bounded;
  } else {
    j["h3"] = {{"note", "not evaluated on a 1D mesh: crack edges are empty there"}, {"passed", true}};
  }
  j["passed"] = ok;
  passed = passed && ok;
  return j;
}

}  // namespace

CommandResult cmd_verify(const Scenario& s, const std::string&, const RunOptions& options) {
  CommandResult r;
  const CrackSet none(s.mesh);
  const auto radii = concentration_radii(s);
  const auto eq_opts = equilibrium_options(s, s.verify.equilibrium_depth);

  // |ER| <= CE and CE <= CF on the equilibrium battery.
  struct Entry {
    double t;
    bool injected;
  };
  std::vector<Entry> entries;
  for (double t : s.verify.loads) entries.push_back({t, false});
  if (s.verify.inject_non_equilibrium) entries.push_back({*s.verify.inject_non_equilibrium, true});
  json battery = json::array();
  bool battery_ok = true;
  for (const auto& entry : entries) {
    const auto u0 = s.boundary.at(entry.t);
    const State st = solve_crack(s.mesh, s.K, s.material, s.surface, u0, s.search.solver);
    const auto eq = is_equilibrium(st, s.K, u0, s.material, s.surface, eq_opts);
    json j;
    j["t"] = entry.t;
    j["injected"] = entry.injected;
    j["equilibrium"] = eq.certificate.equilibrium;
    j["equilibrium_search_depth"] = eq_opts.depth;
    if (!eq.certificate.equilibrium) {
      j["er_le_ce"] = {{"skipped", true}, {"reason", "precondition: equilibrium required"}};
      j["ce_le_cf"] = {{"skipped", true}, {"reason", "precondition: equilibrium required"}};
      battery.push_back(std::move(j));
      continue;
    }
    json regions = json::array();
    for (const auto& spec : s.measures.regions) {
      const Region D = spec.build(st);
      const auto er = er_total_variation(st, s.material, D, none, s.measures.family);
      const auto ce = elastic_concentration(st, s.material, D, radii);
      const auto cf = surface_concentration(s.surface, st.crack(), D, radii);
      const bool a = er.value <= ce.value + er.error + ce.error;
      const bool b = ce.value <= cf.value + ce.error + cf.error;
      battery_ok = battery_ok && a && b;
      regions.push_back({{"region", spec.name},
                         {"er", estimate_json(er, "er_total_variation", family_json(s.measures.family))},
                         {"ce", estimate_json(ce, "elastic_concentration", {{"radii", radii_json(radii)}})},
                         {"cf", estimate_json(cf, "surface_concentration", {{"radii", radii_json(radii)}})},
                         {"er_le_ce", a},
                         {"ce_le_cf", b}});
    }
    j["regions"] = regions;
    battery.push_back(std::move(j));
  }
  r.results["battery"] = {{"states", battery}, {"passed", battery_ok}};
  r.passed = r.passed && battery_ok;

  // Tangential equality at the critical load.
  if (s.verify.critical) {
    const auto& c = *s.verify.critical;
    const auto cl = critical_load_bisection(s.mesh, s.K, s.material, s.surface, s.boundary, c.lo, c.hi, c.tol, s.search);
    json tips = json::array();
    bool ok = true;
    for (std::size_t i = 0; i < cl.tangential_er.size(); ++i) {
      const double gap = std::abs(cl.tangential_er[i] - cl.griffith[i]) / cl.griffith[i];
      ok = ok && gap <= c.rel_tol;
      tips.push_back({{"tangential_er", cl.tangential_er[i]}, {"G", cl.griffith[i]}, {"relative_gap", gap}});
    }
    r.results["tangential_equality"] = {{"operation", "critical_load_bisection"},
                                        {"bracket", {c.lo, c.hi}},
                                        {"tol", c.tol},
                                        {"t_star", cl.t_star},
                                        {"iterations", cl.iterations},
                                        {"tips", tips},
                                        {"rel_tol", c.rel_tol},
                                        {"passed", ok}};
    r.passed = r.passed && ok;
  } else {
    r.results["tangential_equality"] = {{"skipped", true}, {"reason", "no critical bracket configured"}};
  }

  // Equality chain on the minimal trajectory, plus the axiom audits.
  std::optional<Trajectory> minimal;
  if (s.verify.chain || s.verify.axioms) minimal = evolve_minimal(s.mesh, s.K, s.schedule, s.material, s.surface, s.search);
  if (s.verify.chain) {
    const auto rep = verify_equality_chain(*minimal, s.material, s.surface, region_builders(s), measure_settings(s));
    json rows = json::array();
    for (const auto& row : rep.rows) {
      rows.push_back({{"step", row.step},
                      {"t", row.t},
                      {"region", row.region},
                      {"propagating", row.propagating},
                      {"er", row.er.value},
                      {"er_error", row.er.error},
                      {"ce", row.ce.value},
                      {"ce_error", row.ce.error},
                      {"cf", row.cf.value},
                      {"cf_per_tip", row.cf.value / (2.0 * std::numbers::pi)},
                      {"er_le_ce", row.er_le_ce},
                      {"ce_le_cf", row.ce_le_cf},
                      {"residual_er_minus_ce", row.er_minus_ce},
                      {"residual_ce_minus_cf", row.ce_minus_cf},
                      {"residual_ce_minus_cf_per_tip", row.ce_minus_cf_per_tip}});
    }
    const bool ok = !rep.precondition_ok || rep.inequalities_hold;
    r.results["equality_chain"] = {{"precondition", rep.precondition},
                                   {"precondition_ok", rep.precondition_ok},
                                   {"rows", rows},
                                   {"inequalities_hold", rep.inequalities_hold},
                                   {"equalities_asserted", false},
                                   {"cf_normalization", cf_normalization_json()},
                                   {"passed", ok}};
    r.passed = r.passed && ok;
  }
  r.results["cf_normalization"] = cf_normalization_json();

  r.results["hypotheses"] = hypotheses_json(s, options.seed, r.passed);

  if (s.verify.axioms) {
    json ax;
    const auto am = audit_axioms(*minimal, s.material, s.surface, s.search.rel_tol);
    ax["minimal"] = audit_json(am);
    bool ok = am.a4 && am.a5;
    if (s.evolve.equilibrium) {
      const auto te = evolve_equilibrium(s.mesh, s.K, s.schedule, s.material, s.surface,
                                         equilibrium_options(s, s.evolve.equilibrium_depth));
      const auto ae = audit_axioms(te, s.material, s.surface, s.search.rel_tol);
      ax["equilibrium"] = audit_json(ae);
      bool dom = true;
      for (std::size_t i = 0; i < te.steps.size(); ++i) {
        const double em = minimal->steps[i].state.energy().total, ee = te.steps[i].state.energy().total;
        dom = dom && em <= ee + s.search.rel_tol * (1.0 + std::abs(ee));
      }
      ax["minimal_below_equilibrium"] = dom;
      ok = ok && ae.a4 && ae.a5 && dom;
    }
    ax["passed"] = ok;
    r.results["axioms"] = ax;
    r.passed = r.passed && ok;
  }
  return r;
}

int run_command(const std::string& command, const std::string& config_path, const RunOptions& options,
                std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if (options.threads < 0) throw ConfigError("--threads", "must be non-negative");
    set_thread_count(options.threads);
    const Scenario s = load_scenario(config_path);
    const std::string out = options.out_dir.empty() ? s.output_dir : options.out_dir;
    std::filesystem::create_directories(out);
    CommandResult res;
    if (command == "solve")
      res = cmd_solve(s, out, options);
    else if (command == "evolve")
      res = cmd_evolve(s, out, options);
    else if (command == "measures")
      res = cmd_measures(s, out, options);
    else if (command == "verify")
      res = cmd_verify(s, out, options);
    else
      throw ConfigError("", "unknown command \"" + command + "\"");
    json report;
    report["tool"] = "brittle-lab";
    report["command"] = command;
    report["config"] = {{"source", s.source}, {"sha1", s.hash}, {"schema_version", s.schema_version}};
    report["seed"] = options.seed;
    report["scenario"] = s.echo;
    report["results"] = std::move(res.results);
    report["verdict"] = {{"passed", res.passed}};
    report["timing"] = {
        {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    std::ofstream(std::filesystem::path(out) / "report.json") << report.dump(2) << '\n';
    return res.passed ? 0 : 1;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 2;
}

}  // namespace brittle
