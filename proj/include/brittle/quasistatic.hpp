#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "brittle/config_measures.hpp"
#include "brittle/states.hpp"

namespace brittle {

/// Schedule points t_0 < ... < t_M with u0(t) = base.at(t).
struct LoadSchedule {
  std::vector<double> times;
  BoundaryDisplacement base;
  BoundaryDisplacement at(double t) const { return base.at(t); }
  void validate() const;
};

enum class EvolutionMode { minimal, equilibrium };

struct StepRecord {
  double t = 0.0;
  State state;
  SearchCertificate certificate;
  /// Crack keys visited by equilibrium hops at this step, in order.
  std::vector<std::string> hops;
};

struct Trajectory {
  EvolutionMode mode = EvolutionMode::minimal;
  MeshPtr mesh;
  CrackSet K;
  LoadSchedule schedule;
  std::vector<StepRecord> steps;
  std::string reading;
};

class EvolutionError : public std::runtime_error {
 public:
  EvolutionError(const std::string& what, std::shared_ptr<Trajectory> partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return *partial_; }

 private:
  std::shared_ptr<Trajectory> partial_;
};

/// Absolute minimum at every schedule point over extensions of the previous crack.
Trajectory evolve_minimal(MeshPtr mesh, const CrackSet& K, const LoadSchedule& schedule, const Material& m,
                          const SurfaceEnergy& F, const SearchOptions& options = {});
/// Keeps the previous crack while it is an equilibrium; otherwise hops to the
/// lowest-energy dominating extension until an equilibrium is reached.
Trajectory evolve_equilibrium(MeshPtr mesh, const CrackSet& K, const LoadSchedule& schedule, const Material& m,
                              const SurfaceEnergy& F, const SearchOptions& options = {});

struct AxiomViolation {
  std::string axiom;
  int i = -1, j = -1;
  double gap = 0.0;
  std::string detail;
};

struct AxiomAudit {
  bool a1 = true, a2 = true, a4 = true, a5 = true;
  std::vector<AxiomViolation> violations;
  bool ok() const { return a1 && a2 && a4 && a5; }
};
/// A1 (K in S_0), A2 (Dirichlet data), A4 (S_i in S_j for i <= j) and A5
/// (re-solved E(v, S_i) at u0(t_j) >= E(u_j, S_j) - tol for all i <= j).
AxiomAudit audit_axioms(const Trajectory& trajectory, const Material& m, const SurfaceEnergy& F,
                        double rel_tol = 1e-9);

struct CriticalLoad {
  double t_star = 0.0;
  double lo = 0.0, hi = 0.0;
  int iterations = 0;
  /// Tangential unit tip-field ER of the uncracked-extension state at t*, per tip of K.
  std::vector<double> tangential_er;
  std::vector<double> griffith;  ///< surface density at each tip
};
/// First load at which the absolute minimiser's crack strictly contains K.
CriticalLoad critical_load_bisection(MeshPtr mesh, const CrackSet& K, const Material& m, const SurfaceEnergy& F,
                                     const BoundaryDisplacement& family, double lo, double hi, double tol = 1e-8,
                                     const SearchOptions& options = {});

/// Radius and family settings shared by the measure suites, in units of the mesh size.
struct MeasureSettings {
  std::vector<double> concentration_radii{16.0, 12.0, 8.0, 6.0};
  FamilyOptions family;
  std::vector<double> absolute_radii(const Mesh& mesh) const;
};

using RegionBuilder = std::function<Region(const State&)>;

struct EqualityChainRow {
  int step = -1;
  double t = 0.0;
  std::string region;
  bool propagating = false;
  MeasureEstimate er, ce, cf;
  bool er_le_ce = true;
  bool ce_le_cf = true;
  double er_minus_ce = 0.0;
  double ce_minus_cf = 0.0;          ///< CF as circle perimeter / r
  double ce_minus_cf_per_tip = 0.0;  ///< CF divided by 2 pi (G per tip)
};

struct EqualityChainReport {
  bool precondition_ok = false;
  std::string precondition;
  std::vector<EqualityChainRow> rows;
  bool inequalities_hold = true;
};
/// Measures |ER| <= CE <= CF on a single-path minimal trajectory. Equality
/// residuals are reported in both CF normalisations and not asserted.
EqualityChainReport verify_equality_chain(const Trajectory& trajectory, const Material& m, const SurfaceEnergy& F,
                                   const std::vector<std::pair<std::string, RegionBuilder>>& regions,
                                   const MeasureSettings& settings = {});

}  // namespace brittle
