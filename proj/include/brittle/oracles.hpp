#pragma once

#include <string>
#include <vector>

#include "brittle/crack.hpp"
#include "brittle/elastostatics.hpp"
#include "brittle/energetics.hpp"

namespace brittle {

/// Closed-form bar of length L, stiffness k, toughness G, end displacement t.
struct Oracle1DResult {
  double t_star = 0.0;       ///< sqrt(2 G L / k)
  double unbroken = 0.0;     ///< k t^2 / (2 L)
  double broken = 0.0;       ///< G m with m = 1 break
  std::string minimizer;     ///< "unbroken" or "broken"; ties go to "unbroken"
  bool tie = false;
};
Oracle1DResult oracle_1d(double k, double G, double L, double t);

/// u = A sqrt(r) sin(theta/2) on a disk slit along theta = pi, interpolated at
/// the nodes of the cracked space (no solve).
struct ManufacturedTipField {
  State state;
  int tip = -1;
  double amplitude = 1.0;
  double mu = 1.0;
  double exact_J = 0.0;   ///< mu A^2 pi / 4
  double exact_CE = 0.0;  ///< mu A^2 pi / 4
};
ManufacturedTipField manufactured_state(MeshPtr disk, double amplitude, double mu, Point center = Point::Zero(),
                                        const SurfaceEnergy& F = SurfaceEnergy::griffith(1.0));
/// Exact elastic energy of the manufactured field in B(tip, R).
double manufactured_ball_energy(double amplitude, double mu, double R);
/// Exact manufactured displacement at a point (theta in (-pi, pi]).
double manufactured_displacement(double amplitude, const Point& x, const Point& center = Point::Zero());

struct BruteForceTable {
  std::vector<CrackSet> cracks;  ///< cracks[0] is K
  std::vector<EnergyBreakdown> energies;
  int best = -1;
};
/// Solves K and every crack obtained by adding a set of at most `cap` edges
/// (cut points in 1D) that forms node-disjoint simple paths starting at tips of
/// K. Built from raw edge subsets, independently of candidate_extensions.
BruteForceTable brute_force_absmin(MeshPtr mesh, const CrackSet& K, const BoundaryDisplacement& u0,
                                   const Material& m, const SurfaceEnergy& F, int cap,
                                   std::size_t max_family = 10000, double rel_tol = 1e-9);

}  // namespace brittle
