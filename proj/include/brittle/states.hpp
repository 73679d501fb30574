#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "brittle/crack.hpp"
#include "brittle/elastostatics.hpp"
#include "brittle/energetics.hpp"

namespace brittle {

struct AdmissibilityReport {
  bool dirichlet_ok = false;
  bool contains_K_ok = false;
  bool verdict = false;
  std::string detail;
};

/// (a) u = u0 at boundary nodes off S, (b) K is a subset of S.
AdmissibilityReport is_admissible(const State& state, const CrackSet& K, const BoundaryDisplacement& u0);

struct OrderWitness {
  bool subset_ok = false;
  bool boundary_match_ok = false;
  bool energy_ok = false;
  bool verdict = false;
  double energy_gap = 0.0;  ///< E(candidate) - E(reference)
};

/// Witness for candidate <= reference: S in L, v = u on the boundary off L,
/// E(v, L) <= E(u, S) + tol.
OrderWitness leq(const State& candidate, const State& reference, double tol = 0.0);

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SearchOptions {
  int depth = 3;
  std::size_t budget = 20000;
  bool nucleation = false;
  /// Energies closer than rel_tol (1 + |E|) are ties.
  double rel_tol = 1e-9;
  bool greedy = false;
  SolverOptions solver;
};

/// Crack sets obtained from S by appending node-disjoint edge paths at its
/// tips, at most `depth` new edges in total. Paths avoid boundary edges and
/// existing crack edges and stop when they reach the boundary or the crack.
/// In 1D, up to `depth` new interior cut points. With nucleation and S empty,
/// every single non-boundary edge is added as well.
std::vector<CrackSet> candidate_extensions(const CrackSet& S, int depth, bool nucleation = false,
                                           std::size_t budget = std::numeric_limits<std::size_t>::max());

struct CandidateRecord {
  std::string key;
  double length = 0.0;
  EnergyBreakdown energy;
  bool dominates = false;  ///< strictly below the reference in the order
};

struct SearchCertificate {
  std::string kind;  ///< "exhaustive-to-depth(d)" or "greedy"
  std::size_t candidate_count = 0;
  int best = -1;
  std::vector<CandidateRecord> table;
  bool equilibrium = false;
  int witness = -1;
  std::string note;
};

struct SearchResult {
  State state;
  SearchCertificate certificate;
  /// Lowest-energy strictly dominating candidate, when the check fails.
  std::optional<State> witness;
};

State solve_crack(MeshPtr mesh, const CrackSet& S, const Material& m, const SurfaceEnergy& F,
                  const BoundaryDisplacement& u0, const SolverOptions& solver = {});

/// Finite-family equilibrium check: re-solves S itself and every extension to
/// the configured depth, and reports whether any of them lies strictly below
/// the state in the partial order.
SearchResult is_equilibrium(const State& state, const CrackSet& K, const BoundaryDisplacement& u0, const Material& m,
                            const SurfaceEnergy& F, const SearchOptions& options = {});
/// Same check against an explicit candidate family.
SearchResult is_equilibrium_over(const State& state, const std::vector<CrackSet>& family,
                                 const BoundaryDisplacement& u0, const Material& m, const SurfaceEnergy& F,
                                 const SearchOptions& options = {});

/// Minimum total energy over K and its extensions, ties broken by smaller
/// crack length then lexicographic edge (or cut) ids.
SearchResult find_absolute_minimum(MeshPtr mesh, const CrackSet& K, const BoundaryDisplacement& u0,
                                   const Material& m, const SurfaceEnergy& F, const SearchOptions& options = {});

/// Index of the preferred entry of an energy table under the tie rule.
int select_minimum(const std::vector<CrackSet>& cracks, const std::vector<EnergyBreakdown>& energies, double rel_tol);

}  // namespace brittle
