#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "brittle/crack.hpp"
#include "brittle/mesh.hpp"

namespace brittle {

class State;

enum class MaterialKind { quadratic_antiplane, user_density };

/// Elastic energy potential w and its stress sigma = dw/dg.
///
/// Gradients are always passed as 2-vectors; 1D problems use the x slot.
struct Material {
  MaterialKind kind = MaterialKind::quadratic_antiplane;
  double mu = 1.0;
  std::function<double(const Vec2&)> w;
  std::string name = "quadratic";

  static Material quadratic(double mu);
  static Material user(std::function<double(const Vec2&)> w, std::string name);
  bool is_quadratic() const { return kind == MaterialKind::quadratic_antiplane; }
};

double density(const Material& m, const Vec2& g);
Vec2 stress(const Material& m, const Vec2& g);
/// d sigma / d g. Exact for the quadratic kind, centered differences of stress otherwise.
Eigen::Matrix2d tangent(const Material& m, const Vec2& g);

/// A circular patch of modified surface energy density.
struct Barrier {
  Point center = Point::Zero();
  double radius = 0.0;
  double value = 0.0;
};

enum class SurfaceKind { griffith, weighted };

/// Surface energy F(S; u0). Griffith is G times H^{n-1}; weighted integrates
/// a density g(x) >= 0 over S. The weighted density here is G outside the
/// barrier patches and the patch value inside.
struct SurfaceEnergy {
  SurfaceKind kind = SurfaceKind::griffith;
  double G = 1.0;
  std::vector<Barrier> barriers;

  static SurfaceEnergy griffith(double G);
  static SurfaceEnergy weighted(double base, std::vector<Barrier> barriers);
  double density_at(const Point& x) const;
};

struct EnergyBreakdown {
  double elastic = 0.0;
  double surface = 0.0;
  double total = 0.0;
};

/// Crack energy with the crack carried by the given node positions.
double surface_energy(const SurfaceEnergy& F, const CrackSet& S, std::span<const Point> positions);
double surface_energy(const SurfaceEnergy& F, const CrackSet& S);
/// Energy of a union of polylines clipped to the closed domain (n = 2), or of
/// the points inside the domain (single-point polylines, n = 1).
double surface_energy(const SurfaceEnergy& F, const std::vector<std::vector<Point>>& sets, const Mesh& domain);

/// Elastic energy of a state on its current node positions.
double elastic_energy(const Material& m, const State& state);
/// Elastic energy restricted to the listed cells.
double elastic_energy(const Material& m, const State& state, std::span<const int> cells);
EnergyBreakdown total_energy(const Material& m, const SurfaceEnergy& F, const State& state);

struct H1Report {
  double fa = 0.0, fb = 0.0, fab = 0.0;
  bool holds = false;
};
/// F(A u B) <= F(A) + F(B).
H1Report check_h1(const SurfaceEnergy& F, const CrackSet& A, const CrackSet& B);

struct H2Report {
  double f_original = 0.0;
  double f_dilated = 0.0;
  double ratio = 0.0;
  double bound = 0.0;  ///< C r^{n-1}
  bool holds = false;
};
/// F(delta_r^x(A) n Omega) <= C r^{n-1} F(A) with C = 1.
H2Report check_h2(const SurfaceEnergy& F, const std::vector<std::vector<Point>>& A, const Point& x, double r,
                  const Mesh& domain);

struct H3Report {
  std::vector<std::pair<double, double>> samples;  ///< (r, F(dB(A,r))/r)
  double sup = 0.0;
  double inverse_r_slope = 0.0;  ///< c in q = c / r + d, fitted on the smallest radii
  double intercept = 0.0;        ///< d
  bool bounded = true;
  std::string verdict;
};
/// Quotients F(dB(A, r) n Omega)/r over a strictly decreasing radius list.
H3Report check_h3(const SurfaceEnergy& F, const std::vector<std::vector<Point>>& A, std::span<const double> radii,
                  const Mesh& domain);

}  // namespace brittle
