#pragma once

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "brittle/crack.hpp"
#include "brittle/energetics.hpp"
#include "brittle/mesh.hpp"
#include "brittle/vector_field.hpp"

namespace brittle {

/// P1 space on the mesh cut along a crack.
///
/// Each node touched by the crack gets one dof per sector of its element star,
/// where sectors are separated by crack edges. A tip has a single sector, so
/// tips are never duplicated; a crack mouth on the boundary gets two dofs.
/// In 1D a cut node is split into a left and a right dof.
class CrackedSpace {
 public:
  CrackedSpace(MeshPtr mesh, CrackSet crack);

  const MeshPtr& mesh() const { return mesh_; }
  const CrackSet& crack() const { return crack_; }
  int num_dofs() const { return static_cast<int>(dof_node_.size()); }
  const std::array<int, 3>& element_dofs(int e) const { return element_dofs_[static_cast<std::size_t>(e)]; }
  int dof_node(int d) const { return dof_node_[static_cast<std::size_t>(d)]; }
  const std::vector<int>& node_dofs(int n) const { return node_dofs_[static_cast<std::size_t>(n)]; }
  /// Elements whose corner at the dof's node uses this dof.
  const std::vector<int>& dof_elements(int d) const { return dof_elements_[static_cast<std::size_t>(d)]; }
  /// Dirichlet dofs: nodes on the boundary that are not on the crack.
  bool is_dirichlet(int d) const { return dirichlet_[static_cast<std::size_t>(d)] != 0; }
  /// Connected component id of each dof (through shared elements).
  const std::vector<int>& components() const { return component_; }
  int num_components() const { return num_components_; }

 private:
  MeshPtr mesh_;
  CrackSet crack_;
  std::vector<std::array<int, 3>> element_dofs_;
  std::vector<int> dof_node_;
  std::vector<std::vector<int>> node_dofs_;
  std::vector<std::vector<int>> dof_elements_;
  std::vector<char> dirichlet_;
  std::vector<int> component_;
  int num_components_ = 0;
};

using SpacePtr = std::shared_ptr<const CrackedSpace>;
SpacePtr make_space(MeshPtr mesh, CrackSet crack);

/// Imposed boundary displacement u0(x, t) evaluated at a fixed time slot.
struct BoundaryDisplacement {
  std::function<double(const Point&, double)> fn;
  double t = 1.0;
  std::string description;
  /// Points where u0 may fail to be C1 along the boundary.
  std::vector<Point> break_points;

  double operator()(const Point& x) const { return fn(x, t); }
  BoundaryDisplacement at(double time) const;
};

/// u0(x, t) = t (offset + gradient . x).
BoundaryDisplacement linear_displacement(Vec2 gradient, double offset = 0.0);
/// u0(x, t) = t A sqrt(r) sin(theta / 2) in the frame centred at `center`, with
/// theta measured from `angle` and the cut at theta = +-pi.
BoundaryDisplacement mode3_displacement(double amplitude, Point center, double angle = 0.0);

struct ContinuityReport {
  bool continuous = true;
  double max_jump = 0.0;
  int worst_facet = -1;
};
/// Samples u0 along each boundary facet and compares values at shared facet
/// ends, skipping declared break points.
ContinuityReport check_boundary_continuity(const BoundaryDisplacement& u0, const Mesh& mesh, int samples = 8);

struct SolverOptions {
  double tolerance = 1e-10;
  /// 0 selects a size-dependent cap.
  int max_iterations = 0;
  /// Return the last iterate instead of throwing when the cap is hit.
  bool allow_unconverged = false;
  int max_newton_iterations = 60;
};

struct SolverDiagnostics {
  std::string method;
  int iterations = 0;
  double residual = 0.0;  ///< final relative residual
  std::vector<double> history;
  bool converged = true;
  int floating_components = 0;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// A displacement on a cracked space, together with cached energies.
/// Node positions default to the reference mesh and change under pushforward.
class State {
 public:
  State(SpacePtr space, Eigen::VectorXd u, std::vector<Point> positions, EnergyBreakdown energy,
        SolverDiagnostics diagnostics);

  const SpacePtr& space() const { return space_; }
  const Mesh& mesh() const { return *space_->mesh(); }
  const CrackSet& crack() const { return space_->crack(); }
  const Eigen::VectorXd& displacement() const { return u_; }
  const std::vector<Point>& positions() const { return positions_; }
  const EnergyBreakdown& energy() const { return energy_; }
  const SolverDiagnostics& diagnostics() const { return diagnostics_; }

  Vec2 gradient(int e) const;
  /// Value at a base node; for split nodes, the first dof.
  double node_value(int n) const;
  /// Same space and positions, different dofs; energies recomputed.
  State with_displacement(Eigen::VectorXd u, const Material& m, const SurfaceEnergy& F) const;

 private:
  SpacePtr space_;
  Eigen::VectorXd u_;
  std::vector<Point> positions_;
  EnergyBreakdown energy_;
  SolverDiagnostics diagnostics_;
};

/// Minimises the elastic energy with u = u0 on the boundary outside the crack.
/// Quadratic materials: Jacobi-preconditioned CG. User densities: Newton with
/// a numerical tangent and backtracking. Components without Dirichlet dofs are
/// fixed to zero (mean-zero gauge of a constant) and counted.
State solve_displacement(SpacePtr space, const Material& m, const SurfaceEnergy& F, const BoundaryDisplacement& u0,
                         const SolverOptions& options = {}, std::vector<Point> positions = {});

struct ResidualReport {
  double divergence_residual = 0.0;  ///< max |int sigma . grad phi| over free non-crack dofs, relative
  double traction_residual = 0.0;    ///< same over free dofs on crack faces
  int worst_dof = -1;
  double scale = 0.0;
};
ResidualReport residual_report(const State& state, const Material& m);

/// E(u o phi_t^-1, phi_t(S)): carries nodal values to moved nodes and
/// recomputes both energy terms. With `resolve`, re-solves on the moved mesh.
State pushforward_state(const State& state, const FlowMap& flow, const Material& m, const SurfaceEnergy& F,
                        const BoundaryDisplacement& u0, bool resolve = false);

}  // namespace brittle
