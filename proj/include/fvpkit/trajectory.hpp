#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fvpkit/gelfand_triple.hpp"
#include "fvpkit/source_term.hpp"
#include "fvpkit/types.hpp"

namespace fvpkit {

/// Cached pieces of the solution-space norm
///   ‖u‖_X² = ∫‖u‖² + sup|u|² + ∫‖u‖_*² + ∫‖u′‖_*²
/// together with the equivalent norm |||u|||² = ∫‖u‖² + ∫‖u′‖_*².
struct TrajectoryNorms {
  double l2_v_sq = 0.0;
  double sup_h_sq = 0.0;
  double l2_dual_sq = 0.0;
  double l2_dual_deriv_sq = 0.0;

  double x_norm() const {
    return std::sqrt(l2_v_sq + sup_h_sq + l2_dual_sq + l2_dual_deriv_sq);
  }
  double triple_norm() const { return std::sqrt(l2_v_sq + l2_dual_deriv_sq); }
};

/// A time-gridded solution u(t_i). Immutable; norms are computed once from
/// the grid values (trapezoidal rule in time, second-order differences for
/// u′). Trajectories produced by the solvers carry the source term they
/// solve against, plus the worst relative ODE residual as a diagnostic.
class Trajectory {
 public:
  Trajectory(RealVector grid, std::vector<Vector> values,
             const GelfandTriple& triple,
             std::optional<SourceTerm> source = std::nullopt,
             std::vector<std::string> warnings = {});

  const RealVector& grid() const { return grid_; }
  const std::vector<Vector>& values() const { return values_; }
  int node_count() const { return static_cast<int>(values_.size()); }
  const Vector& front() const { return values_.front(); }
  const Vector& back() const { return values_.back(); }
  double t_end() const { return grid_(grid_.size() - 1); }

  const TrajectoryNorms& norms() const { return norms_; }
  double x_norm() const { return norms_.x_norm(); }

  const std::optional<SourceTerm>& source() const { return source_; }
  double max_relative_residual() const { return max_relative_residual_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  friend Trajectory with_residual(Trajectory, double);

  RealVector grid_;
  std::vector<Vector> values_;
  TrajectoryNorms norms_;
  std::optional<SourceTerm> source_;
  double max_relative_residual_ = 0.0;
  std::vector<std::string> warnings_;
};

/// Returns the trajectory with its worst relative ODE defect recorded.
Trajectory with_residual(Trajectory t, double max_relative_residual);

/// Second-order finite differences on a (possibly nonuniform) grid; one-sided
/// at the endpoints.
std::vector<Vector> grid_derivative(const RealVector& grid,
                                    const std::vector<Vector>& values);

TrajectoryNorms compute_trajectory_norms(const RealVector& grid,
                                         const std::vector<Vector>& values,
                                         const GelfandTriple& triple);

/// X-norm of the difference of two trajectories on the same grid.
double x_norm_distance(const Trajectory& a, const Trajectory& b,
                       const GelfandTriple& triple);

/// RHS − LHS of sup|u|² ≤ (1 + C2²/(C1²T))∫‖u‖² + ∫‖u′‖_*².
double sobolev_margin(const Trajectory& traj, const GelfandTriple& triple);

}  // namespace fvpkit
