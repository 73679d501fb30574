#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "brittle/crack.hpp"
#include "brittle/elastostatics.hpp"
#include "brittle/energetics.hpp"
#include "brittle/region.hpp"
#include "brittle/vector_field.hpp"

namespace brittle {

struct MeasureEstimate {
  /// (radius or t, quotient) pairs, radius strictly decreasing.
  std::vector<std::pair<double, double>> samples;
  double value = 0.0;
  double error = 0.0;
  /// Linear-fit (r -> 0) cross-estimate where applicable.
  double fit_value = 0.0;
  std::string method;
  /// Labels of the generating fields for family suprema.
  std::vector<std::string> family;
  std::vector<std::pair<std::string, double>> extras;
  std::string note;
};

struct ReleaseRateValue {
  double value = 0.0;
  std::string field;
  std::size_t cells = 0;  ///< cells where the field gradient is non-zero
};

/// ER(u,S)(eta) = int sigma_j u_k eta_{k,j} - w div eta over the cells.
/// Throws std::invalid_argument listing failed clauses if eta is not in
/// V(K, S), unless `waive_admissibility` is set.
ReleaseRateValue energy_release_rate(const State& state, const Material& m, const VectorField& field,
                                     const CrackSet& K, bool waive_admissibility = false);

struct FamilyOptions {
  /// Directions spread over the half-cone around the outward tangent.
  int fan = 16;
  /// Plateau (inner, outer) radii in units of the mesh size.
  std::vector<std::pair<double, double>> plateaus{{8.0, 24.0}, {6.0, 18.0}, {4.0, 12.0}};
};

struct TipFamily {
  int tip = -1;
  std::vector<VectorField> fields;
  std::vector<int> plateau_index;
};

/// Tip fan fields for every tip of S in D that is not in K, restricted to
/// members supported in D and admissible for (K, S).
std::vector<TipFamily> default_er_family(const State& state, const Region& D, const CrackSet& K,
                                         const FamilyOptions& options = {});

/// Lower bound of |ER|(D) as the maximum of ER over an explicit family.
/// Members not supported in D, not unit-bounded or not admissible are skipped.
MeasureEstimate er_total_variation(const State& state, const Material& m, const Region& D,
                                   const std::vector<VectorField>& family, const CrackSet& K);
/// Same with the default tip-fan family; tips with disjoint supports add up.
MeasureEstimate er_total_variation(const State& state, const Material& m, const Region& D, const CrackSet& K,
                                   const FamilyOptions& options = {});

/// limsup_{r->0} (1/r) int_{B(dS n A, r)} w, with exact ball-cell overlap weights.
MeasureEstimate elastic_concentration(const State& state, const Material& m, const Region& A,
                                      std::span<const double> radii);
/// limsup_{r->0} F(dB(dS n A, r))/r. Also reports the value divided by 2 pi.
MeasureEstimate surface_concentration(const SurfaceEnergy& F, const CrackSet& S, const Region& A,
                                      std::span<const double> radii);

/// Rice contour integral around a tip in the frame whose x1 axis is the
/// outward crack tangent (the x axis at a node that is not a crack end).
MeasureEstimate j_contour(const State& state, const Material& m, int tip, std::span<const double> radii,
                          int samples_per_circle = 2048);

/// sup over the family of int_{S \ K} div_tan eta. Members with norm > 1 or
/// not vanishing on K are skipped.
MeasureEstimate perimeter_sup(const CrackSet& S, const CrackSet& K, const std::vector<VectorField>& family);

struct CurvatureVertex {
  int node = -1;
  Point x = Point::Zero();
  double curvature = 0.0;  ///< turning angle / mean incident edge length, positive for left turns
  double jump = 0.0;       ///< w(left face) - w(right face)
  double residual = 0.0;   ///< G H + [w]
};
std::vector<CurvatureVertex> mean_curvature_residual(const State& state, const Material& m, double G);

struct DifferenceQuotientReport {
  MeasureEstimate elastic;  ///< samples (t, -(E_el(t) - E_el(0))/t), value = linear extrapolation
  std::vector<std::pair<double, double>> surface;  ///< (t, (F(t) - F(0))/t)
  double release_rate = 0.0;
  double relative_gap = 0.0;   ///< at the smallest t
  double observed_order = 0.0;
};
DifferenceQuotientReport difference_quotient_er(const State& state, const Material& m, const SurfaceEnergy& F,
                                                const BoundaryDisplacement& u0, const VectorField& field,
                                                std::span<const double> ts, const CrackSet& K, int steps = 16);

/// Tail-maximum limsup estimate with a linear-fit cross-estimate.
MeasureEstimate limsup_estimate(std::vector<std::pair<double, double>> samples, std::size_t tail = 3);
/// limsup_estimate plus a diagnostic fit q = a + b r + c / r reported in the
/// extras as inverse_r_fit (a) and inverse_r_coefficient (c).
MeasureEstimate concentration_estimate(std::vector<std::pair<double, double>> samples);

}  // namespace brittle
