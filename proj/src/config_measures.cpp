#include "brittle/config_measures.hpp"

#include <algorithm>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace brittle {

namespace {

void require_decreasing(std::span<const double> radii, const char* what) {
  if (radii.empty()) throw std::invalid_argument(std::string(what) + " list is empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0)) throw std::invalid_argument(std::string(what) + " must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw std::invalid_argument(std::string(what) + " must be strictly decreasing");
  }
}

Eigen::Matrix2d field_gradient(const Mesh& mesh, int e, std::span<const Point> positions,
                               const std::vector<Vec2>& eta) {
  const auto grads = shape_gradients(mesh, e, positions);
  const auto& el = mesh.element(e);
  Eigen::Matrix2d D = Eigen::Matrix2d::Zero();
  for (int k = 0; k < mesh.nodes_per_element(); ++k)
    D += eta[static_cast<std::size_t>(el[static_cast<std::size_t>(k)])] * grads[static_cast<std::size_t>(k)].transpose();
  return D;
}

bool supported_in(const VectorField& f, const Region& D) {
  const Mesh& mesh = *f.mesh();
  const auto& v = f.nodal_values();
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    if (D.has_cell(static_cast<int>(e))) continue;
    const auto& el = mesh.element(static_cast<int>(e));
    for (int k = 0; k < mesh.nodes_per_element(); ++k)
      if (!v[static_cast<std::size_t>(el[static_cast<std::size_t>(k)])].isZero(0.0)) return false;
  }
  return true;
}

bool disjoint_supports(const VectorField& a, const VectorField& b) {
  const Mesh& mesh = *a.mesh();
  auto touched = [&](const VectorField& f) {
    std::vector<char> t(mesh.num_elements(), 0);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
      const auto& el = mesh.element(static_cast<int>(e));
      for (int k = 0; k < mesh.nodes_per_element(); ++k)
        if (!f.nodal_values()[static_cast<std::size_t>(el[static_cast<std::size_t>(k)])].isZero(0.0)) t[e] = 1;
    }
    return t;
  };
  const auto ta = touched(a), tb = touched(b);
  for (std::size_t e = 0; e < ta.size(); ++e)
    if (ta[e] && tb[e]) return false;
  return true;
}

}  // namespace

MeasureEstimate limsup_estimate(std::vector<std::pair<double, double>> samples, std::size_t tail) {
  MeasureEstimate est;
  est.method = "max-quotient";
  est.samples = std::move(samples);
  if (est.samples.empty()) return est;
  const std::size_t n = est.samples.size();
  const std::size_t from = n > tail ? n - tail : 0;
  double lo = est.samples[from].second, hi = lo;
  for (std::size_t i = from; i < n; ++i) {
    lo = std::min(lo, est.samples[i].second);
    hi = std::max(hi, est.samples[i].second);
  }
  est.value = hi;
  // Linear fit q = c0 + c1 r; the intercept is the r -> 0 cross-estimate.
  if (n >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [r, q] : est.samples) {
      sx += r;
      sy += q;
      sxx += r * r;
      sxy += r * q;
    }
    const double dn = static_cast<double>(n);
    const double den = dn * sxx - sx * sx;
    const double c1 = den != 0 ? (dn * sxy - sx * sy) / den : 0.0;
    est.fit_value = (sy - c1 * sx) / dn;
  } else {
    est.fit_value = est.value;
  }
  est.error = std::max({hi - lo, 0.5 * std::abs(est.fit_value - est.value),
                        0.5 * std::abs(est.value - est.samples.back().second)});
  return est;
}

MeasureEstimate concentration_estimate(std::vector<std::pair<double, double>> samples) {
  auto est = limsup_estimate(samples);
  const std::size_t n = samples.size();
  if (n < 4) return est;
  // P1 fields carry an O(h) energy excess in the tip cells, which shows up as
  // c / r in the quotient; the smooth part is a + b r. Diagnostic only.
  Eigen::MatrixXd A(static_cast<Eigen::Index>(n), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto [r, q] = samples[i];
    const auto row = static_cast<Eigen::Index>(i);
    A(row, 0) = 1.0;
    A(row, 1) = r;
    A(row, 2) = 1.0 / r;
    y[row] = q;
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  est.extras.emplace_back("inverse_r_fit", c[0]);
  est.extras.emplace_back("inverse_r_coefficient", c[2]);
  return est;
}

ReleaseRateValue energy_release_rate(const State& state, const Material& m, const VectorField& field,
                                     const CrackSet& K, bool waive_admissibility) {
  if (field.mesh() != state.space()->mesh()) throw std::invalid_argument("field and state use different meshes");
  if (!waive_admissibility) {
    const auto adm = is_admissible_variation(field, K, state.crack());
    if (!adm.admissible) {
      std::string msg = "vector field is not an admissible variation:";
      for (const auto& r : adm.reasons) msg += " " + r + ";";
      throw std::invalid_argument(msg);
    }
  }
  ReleaseRateValue out;
  out.field = field.label();
  if (field.kind() == FieldKind::zero) return out;
  const Mesh& mesh = state.mesh();
  const auto& eta = field.nodal_values();
  for (std::size_t ei = 0; ei < mesh.num_elements(); ++ei) {
    const int e = static_cast<int>(ei);
    const Eigen::Matrix2d D = field_gradient(mesh, e, state.positions(), eta);
    if (D.isZero(0.0)) continue;
    ++out.cells;
    const Vec2 g = state.gradient(e);
    const Vec2 s = stress(m, g);
    out.value += mesh.element_measure(e, state.positions()) * (g.dot(D * s) - density(m, g) * D.trace());
  }
  return out;
}

std::vector<TipFamily> default_er_family(const State& state, const Region& D, const CrackSet& K,
                                         const FamilyOptions& options) {
  std::vector<TipFamily> out;
  const CrackSet& S = state.crack();
  if (state.mesh().dimension() != 2) return out;
  const double h = state.mesh().mesh_size();
  for (int tip : tips_in(S, D)) {
    if (K.has_node(tip)) continue;
    TipFamily tf;
    tf.tip = tip;
    const Vec2 tau = S.outward_tangent(tip);
    const Vec2 nrm(-tau.y(), tau.x());
    std::vector<Vec2> dirs{tau};
    const int nf = std::max(options.fan, 2);
    for (int i = 0; i < nf; ++i) {
      const double th = -0.5 * std::numbers::pi + i * std::numbers::pi / (nf - 1);
      dirs.push_back(std::cos(th) * tau + std::sin(th) * nrm);
    }
    for (std::size_t p = 0; p < options.plateaus.size(); ++p) {
      const auto [a, b] = options.plateaus[p];
      for (const auto& d : dirs) {
        auto f = tip_fan_field(S, tip, d, a * h, b * h);
        if (!supported_in(f, D)) continue;
        if (!is_admissible_variation(f, K, S).admissible) continue;
        tf.fields.push_back(std::move(f));
        tf.plateau_index.push_back(static_cast<int>(p));
      }
    }
    out.push_back(std::move(tf));
  }
  return out;
}

MeasureEstimate er_total_variation(const State& state, const Material& m, const Region& D,
                                   const std::vector<VectorField>& family, const CrackSet& K) {
  if (family.empty()) throw std::invalid_argument("cannot estimate |ER| from an empty field family");
  MeasureEstimate est;
  est.method = "max-over-family";
  bool any = false;
  for (const auto& f : family) {
    if (f.max_norm() > 1.0 + 1e-12 || !supported_in(f, D)) continue;
    if (!is_admissible_variation(f, K, state.crack()).admissible) continue;
    const double v = energy_release_rate(state, m, f, K).value;
    est.family.push_back(f.label());
    if (!any || v > est.value) est.value = v;
    any = true;
  }
  if (!any) est.note = "no family member is admissible and supported in D";
  est.value = std::max(est.value, 0.0);
  est.fit_value = est.value;
  return est;
}

MeasureEstimate er_total_variation(const State& state, const Material& m, const Region& D, const CrackSet& K,
                                   const FamilyOptions& options) {
  MeasureEstimate est;
  est.method = "max-over-family";
  const auto families = default_er_family(state, D, K, options);
  if (families.empty()) {
    est.note = "no crack edge point of S \\ K in D";
    return est;
  }
  const std::size_t np = options.plateaus.size();
  std::vector<double> per_plateau(np, 0.0);
  std::vector<VectorField> best_fields;
  double spread = 0.0;
  for (const auto& tf : families) {
    if (tf.fields.empty()) {
      est.note += "tip " + std::to_string(tf.tip) + ": no admissible field supported in D; ";
      continue;
    }
    std::vector<double> values;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < tf.fields.size(); ++i) {
      values.push_back(energy_release_rate(state, m, tf.fields[i], K).value);
      est.family.push_back(tf.fields[i].label());
      if (values[i] > values[arg]) arg = i;
    }
    std::vector<double> tip_plateau(np, -1e300);
    for (std::size_t i = 0; i < values.size(); ++i) {
      auto& slot = tip_plateau[static_cast<std::size_t>(tf.plateau_index[i])];
      slot = std::max(slot, values[i]);
    }
    double lo = 1e300, hi = -1e300;
    for (std::size_t p = 0; p < np; ++p) {
      if (tip_plateau[p] < -1e299) continue;
      per_plateau[p] += std::max(tip_plateau[p], 0.0);
      lo = std::min(lo, tip_plateau[p]);
      hi = std::max(hi, tip_plateau[p]);
    }
    spread += hi - lo;
    best_fields.push_back(tf.fields[arg]);
  }
  for (const auto& f : best_fields) est.value = std::max(est.value, energy_release_rate(state, m, f, K).value);
  if (best_fields.size() > 1) {
    // The per-tip maximisers combine into one unit field when their supports are disjoint.
    bool disjoint = true;
    for (std::size_t i = 0; i < best_fields.size() && disjoint; ++i)
      for (std::size_t j = i + 1; j < best_fields.size() && disjoint; ++j)
        disjoint = disjoint_supports(best_fields[i], best_fields[j]);
    if (disjoint) {
      VectorField sum = best_fields[0];
      for (std::size_t i = 1; i < best_fields.size(); ++i) sum = sum.combined(1.0, best_fields[i], 1.0);
      sum.set_bound(1.0);
      if (sum.max_norm() <= 1.0 + 1e-12 && is_admissible_variation(sum, K, state.crack()).admissible) {
        est.value = std::max(est.value, energy_release_rate(state, m, sum, K).value);
        est.family.push_back(sum.label());
      }
    }
  }
  est.value = std::max(est.value, 0.0);
  const double h = state.mesh().mesh_size();
  for (std::size_t p = 0; p < np; ++p) est.samples.emplace_back(options.plateaus[p].second * h, per_plateau[p]);
  std::sort(est.samples.begin(), est.samples.end(), [](auto& a, auto& b) { return a.first > b.first; });
  est.error = spread;
  est.fit_value = est.value;
  return est;
}

MeasureEstimate elastic_concentration(const State& state, const Material& m, const Region& A,
                                      std::span<const double> radii) {
  require_decreasing(radii, "concentration radii");
  std::vector<Point> centers;
  for (int t : tips_in(state.crack(), A)) centers.push_back(state.mesh().node(t));
  std::vector<std::pair<double, double>> samples;
  for (double r : radii) {
    double q = 0.0;
    if (!centers.empty()) {
      for (const auto& [e, f] : ball_cell_fractions(state.mesh(), centers, r))
        q += f * density(m, state.gradient(e)) * state.mesh().element_measure(e, state.positions());
      q /= r;
    }
    samples.emplace_back(r, q);
  }
  auto est = concentration_estimate(std::move(samples));
  if (centers.empty()) est.note = "no crack edge point in A";
  return est;
}

MeasureEstimate surface_concentration(const SurfaceEnergy& F, const CrackSet& S, const Region& A,
                                      std::span<const double> radii) {
  require_decreasing(radii, "concentration radii");
  std::vector<std::vector<Point>> sets;
  for (int t : tips_in(S, A)) sets.push_back({S.mesh()->node(t)});
  std::vector<std::pair<double, double>> samples;
  const Mesh& domain = *S.mesh();
  for (double r : radii) {
    double f = 0.0;
    if (!sets.empty()) {
      if (domain.dimension() == 2) {
        for (const auto& s : offset_boundary(sets, r, domain)) f += s.weight * F.density_at(s.p);
      }
    }
    samples.emplace_back(r, f / r);
  }
  auto est = limsup_estimate(std::move(samples));
  est.extras.emplace_back("per_tip_normalized", est.value / (2.0 * std::numbers::pi));
  est.extras.emplace_back("tips", static_cast<double>(sets.size()));
  if (sets.empty()) est.note = "no crack edge point in A";
  return est;
}

MeasureEstimate j_contour(const State& state, const Material& m, int tip, std::span<const double> radii,
                          int samples_per_circle) {
  require_decreasing(radii, "contour radii");
  const Mesh& mesh = state.mesh();
  if (mesh.dimension() != 2) throw std::invalid_argument("contour integral needs a 2D state");
  const Point x0 = mesh.node(tip);
  // Off the crack (or at a node that is not a free end) the frame is the x axis.
  const Vec2 e1 = state.crack().degree(tip) == 1 ? state.crack().outward_tangent(tip) : Vec2(Vec2::UnitX());
  const Vec2 e2(-e1.y(), e1.x());
  const auto poly = mesh.boundary_polygon();
  double dist = 1e300;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point a = poly[k], b = poly[(k + 1) % poly.size()];
    const Vec2 ab = b - a;
    const double s = std::clamp((x0 - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    dist = std::min(dist, (x0 - (a + s * ab)).norm());
  }
  PointLocator locator(state.space()->mesh());
  std::vector<std::pair<double, double>> samples;
  const double dth = 2.0 * std::numbers::pi / samples_per_circle;
  for (double r : radii) {
    if (r >= dist) {
      std::ostringstream os;
      os << "contour radius " << r << " reaches the domain boundary (distance " << dist << ")";
      throw std::invalid_argument(os.str());
    }
    double J = 0.0;
    for (int k = 0; k < samples_per_circle; ++k) {
      const double th = (k + 0.5) * dth;
      const Vec2 n = std::cos(th) * e1 + std::sin(th) * e2;
      const int e = locator.locate(x0 + r * n);
      if (e < 0) continue;
      const Vec2 g = state.gradient(e);
      J += (density(m, g) * n.dot(e1) - stress(m, g).dot(n) * g.dot(e1)) * r * dth;
    }
    samples.emplace_back(r, J);
  }
  MeasureEstimate est;
  est.method = "mean-of-tail";
  est.samples = samples;
  const std::size_t from = samples.size() > 3 ? samples.size() - 3 : 0;
  double lo = 1e300, hi = -1e300, sum = 0.0;
  for (std::size_t i = from; i < samples.size(); ++i) {
    lo = std::min(lo, samples[i].second);
    hi = std::max(hi, samples[i].second);
    sum += samples[i].second;
  }
  est.value = sum / static_cast<double>(samples.size() - from);
  est.error = hi - lo;
  est.fit_value = est.value;
  return est;
}

MeasureEstimate perimeter_sup(const CrackSet& S, const CrackSet& K, const std::vector<VectorField>& family) {
  MeasureEstimate est;
  est.method = "max-over-family";
  if (!S.mesh() || S.mesh()->dimension() != 2) return est;
  const Mesh& mesh = *S.mesh();
  bool any = false;
  for (const auto& f : family) {
    if (f.max_norm() > 1.0 + 1e-12) continue;
    const auto& v = f.nodal_values();
    bool on_k = false;
    for (int n : K.nodes()) on_k = on_k || !v[static_cast<std::size_t>(n)].isZero(1e-14);
    if (on_k) continue;
    double total = 0.0;
    for (EdgeKey k : S.edges()) {
      const int a = edge_first(k), b = edge_second(k);
      if (K.has_edge(a, b)) continue;
      const Vec2 tau = (mesh.node(b) - mesh.node(a)).normalized();
      total += (v[static_cast<std::size_t>(b)] - v[static_cast<std::size_t>(a)]).dot(tau);
    }
    est.family.push_back(f.label());
    if (!any || total > est.value) est.value = total;
    any = true;
  }
  est.value = std::max(est.value, 0.0);
  est.fit_value = est.value;
  est.extras.emplace_back("exact_tip_count", 0.0);
  std::size_t tips = 0;
  for (int t : S.tips())
    if (!K.has_node(t)) ++tips;
  est.extras.back().second = static_cast<double>(tips);
  return est;
}

std::vector<CurvatureVertex> mean_curvature_residual(const State& state, const Material& m, double G) {
  std::vector<CurvatureVertex> out;
  const Mesh& mesh = state.mesh();
  const CrackSet& S = state.crack();
  if (mesh.dimension() != 2) return out;
  // w on the left and right face of an oriented crack edge.
  auto face_jump = [&](int a, int b) {
    const Vec2 d = mesh.node(b) - mesh.node(a);
    double wl = 0.0, wr = 0.0;
    for (int e : mesh.edge_elements(a, b)) {
      const auto& el = mesh.element(e);
      int c = -1;
      for (int k = 0; k < 3; ++k)
        if (el[static_cast<std::size_t>(k)] != a && el[static_cast<std::size_t>(k)] != b) c = el[static_cast<std::size_t>(k)];
      const Vec2 q = mesh.node(c) - mesh.node(a);
      const double w = density(m, state.gradient(e));
      if (d.x() * q.y() - d.y() * q.x() > 0)
        wl = w;
      else
        wr = w;
    }
    return wl - wr;
  };
  std::set<int> seen;
  for (const auto& path : S.components()) {
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
      const int a = path[i - 1], n = path[i], b = path[i + 1];
      if (S.degree(n) != 2 || mesh.is_boundary_node(n) || !seen.insert(n).second) continue;
      const Vec2 d1 = mesh.node(n) - mesh.node(a);
      const Vec2 d2 = mesh.node(b) - mesh.node(n);
      const double turn = std::atan2(d1.x() * d2.y() - d1.y() * d2.x(), d1.dot(d2));
      CurvatureVertex v;
      v.node = n;
      v.x = mesh.node(n);
      v.curvature = turn / (0.5 * (d1.norm() + d2.norm()));
      v.jump = 0.5 * (face_jump(a, n) + face_jump(n, b));
      v.residual = G * v.curvature + v.jump;
      out.push_back(v);
    }
  }
  return out;
}

DifferenceQuotientReport difference_quotient_er(const State& state, const Material& m, const SurfaceEnergy& F,
                                                const BoundaryDisplacement& u0, const VectorField& field,
                                                std::span<const double> ts, const CrackSet& K, int steps) {
  require_decreasing(ts, "flow times");
  DifferenceQuotientReport rep;
  rep.release_rate = energy_release_rate(state, m, field, K).value;
  const auto e0 = state.energy();
  std::vector<std::pair<double, double>> samples;
  for (double t : ts) {
    const auto flow = integrate_flow(field, t, steps);
    const auto moved = pushforward_state(state, flow, m, F, u0);
    samples.emplace_back(t, -(moved.energy().elastic - e0.elastic) / t);
    rep.surface.emplace_back(t, (moved.energy().surface - e0.surface) / t);
  }
  MeasureEstimate est;
  est.method = "linear-fit";
  est.samples = samples;
  const double n = static_cast<double>(samples.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [t, q] : samples) {
    sx += t;
    sy += q;
    sxx += t * t;
    sxy += t * q;
  }
  const double den = n * sxx - sx * sx;
  const double c1 = den != 0 ? (n * sxy - sx * sy) / den : 0.0;
  est.value = den != 0 ? (sy - c1 * sx) / n : samples.back().second;
  est.fit_value = est.value;
  est.error = std::abs(est.value - samples.back().second);
  rep.elastic = est;
  const double scale = std::max(std::abs(rep.release_rate), 1e-300);
  rep.relative_gap = std::abs(samples.back().second - rep.release_rate) / scale;
  // Slope of log |q(t) - ER| against log t.
  double lx = 0, ly = 0, lxx = 0, lxy = 0;
  int cnt = 0;
  for (const auto& [t, q] : samples) {
    const double gap = std::abs(q - rep.release_rate);
    if (gap <= 0) continue;
    const double x = std::log(t), y = std::log(gap);
    lx += x;
    ly += y;
    lxx += x * x;
    lxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) {
    const double d = cnt * lxx - lx * lx;
    rep.observed_order = d != 0 ? (cnt * lxy - lx * ly) / d : 0.0;
  }
  return rep;
}

}  // namespace brittle
