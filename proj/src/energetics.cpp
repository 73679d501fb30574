#include "brittle/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "brittle/elastostatics.hpp"
#include "brittle/region.hpp"

namespace brittle {

Material Material::quadratic(double mu) {
  if (!(mu > 0)) throw std::invalid_argument("shear modulus must be positive");
  Material m;
  m.kind = MaterialKind::quadratic_antiplane;
  m.mu = mu;
  m.name = "quadratic";
  return m;
}

Material Material::user(std::function<double(const Vec2&)> w, std::string name) {
  Material m;
  m.kind = MaterialKind::user_density;
  m.w = std::move(w);
  m.name = std::move(name);
  return m;
}

double density(const Material& m, const Vec2& g) {
  if (m.is_quadratic()) return 0.5 * m.mu * g.squaredNorm();
  return m.w(g);
}

Vec2 stress(const Material& m, const Vec2& g) {
  if (m.is_quadratic()) return m.mu * g;
  const double h = 1e-6 * (1.0 + g.norm());
  Vec2 s;
  for (int i = 0; i < 2; ++i) {
    Vec2 gp = g, gm = g;
    gp[i] += h;
    gm[i] -= h;
    s[i] = (m.w(gp) - m.w(gm)) / (2.0 * h);
  }
  return s;
}

Eigen::Matrix2d tangent(const Material& m, const Vec2& g) {
  if (m.is_quadratic()) return m.mu * Eigen::Matrix2d::Identity();
  const double h = 1e-4 * (1.0 + g.norm());
  Eigen::Matrix2d c;
  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      Vec2 ei = Vec2::Zero(), ej = Vec2::Zero();
      ei[i] = h;
      ej[j] = h;
      c(i, j) = (m.w(g + ei + ej) - m.w(g + ei - ej) - m.w(g - ei + ej) + m.w(g - ei - ej)) / (4.0 * h * h);
      c(j, i) = c(i, j);
    }
  }
  return c;
}

SurfaceEnergy SurfaceEnergy::griffith(double G) {
  if (!(G >= 0)) throw std::invalid_argument("Griffith constant must be non-negative");
  SurfaceEnergy F;
  F.kind = SurfaceKind::griffith;
  F.G = G;
  return F;
}

SurfaceEnergy SurfaceEnergy::weighted(double base, std::vector<Barrier> barriers) {
  if (!(base >= 0)) throw std::invalid_argument("surface density must be non-negative");
  for (const auto& b : barriers)
    if (!(b.value >= 0) || !(b.radius > 0)) throw std::invalid_argument("barrier needs radius > 0 and value >= 0");
  SurfaceEnergy F;
  F.kind = SurfaceKind::weighted;
  F.G = base;
  F.barriers = std::move(barriers);
  return F;
}

double SurfaceEnergy::density_at(const Point& x) const {
  if (kind == SurfaceKind::griffith) return G;
  for (const auto& b : barriers)
    if ((x - b.center).norm() < b.radius) return b.value;
  return G;
}

namespace {

// Two-point Gauss rule on a segment.
double segment_energy(const SurfaceEnergy& F, const Point& a, const Point& b) {
  const double len = (b - a).norm();
  if (F.kind == SurfaceKind::griffith || len == 0.0) return F.G * len;
  // The density is constant between crossings of the barrier circles.
  const Vec2 d = b - a;
  std::vector<double> cuts{0.0, 1.0};
  for (const auto& bar : F.barriers) {
    const Vec2 f = a - bar.center;
    const double A = d.squaredNorm(), B = 2.0 * f.dot(d), C = f.squaredNorm() - bar.radius * bar.radius;
    const double disc = B * B - 4.0 * A * C;
    if (disc <= 0.0) continue;
    for (double sgn : {-1.0, 1.0}) {
      const double s = (-B + sgn * std::sqrt(disc)) / (2.0 * A);
      if (s > 0.0 && s < 1.0) cuts.push_back(s);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += (cuts[i + 1] - cuts[i]) * len * F.density_at(a + 0.5 * (cuts[i] + cuts[i + 1]) * d);
  return total;
}

}  // namespace

double surface_energy(const SurfaceEnergy& F, const CrackSet& S, std::span<const Point> positions) {
  if (!S.mesh()) return 0.0;
  double total = 0.0;
  if (S.mesh()->dimension() == 1) {
    for (int c : S.cut_nodes()) total += F.density_at(positions[static_cast<std::size_t>(c)]);
    return total;
  }
  for (EdgeKey k : S.edges())
    total += segment_energy(F, positions[static_cast<std::size_t>(edge_first(k))],
                            positions[static_cast<std::size_t>(edge_second(k))]);
  return total;
}

double surface_energy(const SurfaceEnergy& F, const CrackSet& S) {
  if (!S.mesh()) return 0.0;
  return surface_energy(F, S, S.mesh()->nodes());
}

double surface_energy(const SurfaceEnergy& F, const std::vector<std::vector<Point>>& sets, const Mesh& domain) {
  double total = 0.0;
  for (const auto& s : sets) {
    if (s.size() == 1) {
      if (domain.contains(s[0])) total += F.density_at(s[0]);
      continue;
    }
    for (const auto& [a, b] : clip_to_domain(s, domain)) total += segment_energy(F, a, b);
  }
  return total;
}

double elastic_energy(const Material& m, const State& state) {
  const Mesh& mesh = state.mesh();
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const int ei = static_cast<int>(e);
    total += density(m, state.gradient(ei)) * mesh.element_measure(ei, state.positions());
  }
  return total;
}

double elastic_energy(const Material& m, const State& state, std::span<const int> cells) {
  double total = 0.0;
  for (int e : cells) total += density(m, state.gradient(e)) * state.mesh().element_measure(e, state.positions());
  return total;
}

EnergyBreakdown total_energy(const Material& m, const SurfaceEnergy& F, const State& state) {
  EnergyBreakdown b;
  b.elastic = elastic_energy(m, state);
  b.surface = surface_energy(F, state.crack(), state.positions());
  b.total = b.elastic + b.surface;
  return b;
}

H1Report check_h1(const SurfaceEnergy& F, const CrackSet& A, const CrackSet& B) {
  H1Report r;
  r.fa = surface_energy(F, A);
  r.fb = surface_energy(F, B);
  r.fab = surface_energy(F, A.united(B));
  r.holds = r.fab <= r.fa + r.fb + 1e-12 * (1.0 + r.fa + r.fb);
  return r;
}

H2Report check_h2(const SurfaceEnergy& F, const std::vector<std::vector<Point>>& A, const Point& x, double r,
                  const Mesh& domain) {
  H2Report rep;
  std::vector<std::vector<Point>> image;
  for (const auto& s : A) image.push_back(dilate(s, x, r));
  rep.f_original = surface_energy(F, A, domain);
  rep.f_dilated = surface_energy(F, image, domain);
  rep.bound = std::pow(r, domain.dimension() - 1);
  rep.ratio = rep.f_original > 0 ? rep.f_dilated / rep.f_original : 0.0;
  rep.holds = rep.f_dilated <= rep.bound * rep.f_original * (1.0 + 1e-12) + 1e-14;
  return rep;
}

H3Report check_h3(const SurfaceEnergy& F, const std::vector<std::vector<Point>>& A, std::span<const double> radii,
                  const Mesh& domain) {
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1])) throw std::invalid_argument("h3 radii must be strictly decreasing");
  H3Report rep;
  for (double r : radii) {
    double f = 0.0;
    if (domain.dimension() == 2) {
      for (const auto& s : offset_boundary(A, r, domain)) f += s.weight * F.density_at(s.p);
    } else {
      for (const auto& s : A) {
        for (double side : {-1.0, 1.0}) {
          const Point p = s[0] + side * r * Vec2::UnitX();
          if (distance_to_sets(p, A) >= r * (1.0 - 1e-9) && domain.contains(p)) f += F.density_at(p);
        }
      }
    }
    rep.samples.emplace_back(r, f / r);
    rep.sup = std::max(rep.sup, f / r);
  }
  // F(dB(A, r)) = q r = c + d r on the smallest radii: c > 0 means a
  // perimeter that does not shrink with r, so q grows like c / r.
  if (rep.samples.size() >= 2) {
    const std::size_t from = rep.samples.size() > 3 ? rep.samples.size() - 3 : 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t i = from; i < rep.samples.size(); ++i) {
      const auto [r, q] = rep.samples[i];
      sx += r;
      sy += q * r;
      sxx += r * r;
      sxy += r * q * r;
      n += 1;
    }
    const double den = n * sxx - sx * sx;
    if (den > 0) {
      rep.intercept = (n * sxy - sx * sy) / den;
      rep.inverse_r_slope = (sy - rep.intercept * sx) / n;
    }
    const auto& [rmin, qmin] = rep.samples.back();
    rep.bounded = !(rep.inverse_r_slope > 0.5 * qmin * rmin);
  }
  rep.verdict = rep.bounded ? "bounded" : "divergent: quotient grows like 1/r (positive-length set)";
  return rep;
}

}  // namespace brittle
