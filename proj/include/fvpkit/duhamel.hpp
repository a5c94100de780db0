#pragma once

#include "fvpkit/semigroup.hpp"
#include "fvpkit/source_term.hpp"
#include "fvpkit/trajectory.hpp"
#include "fvpkit/types.hpp"

namespace fvpkit {

/// Composite 4-point Gauss–Legendre controls. Panels split at the source
/// term's nodes, are graded dyadically (ratio 2, `panels` levels) toward the
/// evaluation endpoint where the kernel varies fastest, and are sub-split so
/// each piece resolves the local kernel stiffness.
struct QuadratureOptions {
  int panels = 24;
  double quad_tol = 1e-9;
};

/// ∫_a^b e^{−(b−s)A} f(s) ds.
Vector duhamel_integral(const SemigroupEvaluator& ev, const SourceTerm& f,
                        double a, double b, const QuadratureOptions& q = {});

struct YfResult {
  Vector value;
  bool converged = true;          // refinement doubling moved the value < quad_tol
  double refinement_delta = 0.0;  // relative change under doubling
};

/// Full yield y_f = ∫_0^T e^{−(T−t)A} f(t) dt, with a panel-doubling accuracy
/// check.
YfResult compute_yf(const SemigroupEvaluator& ev, const SourceTerm& f, double T,
                    const QuadratureOptions& q = {});

struct ForwardOptions {
  QuadratureOptions quad;
  double residual_tol = 5e-2;  // relative ODE defect accepted without warning
};

/// Forward Cauchy solution by Duhamel's formula
///   u(t) = e^{−tA}u0 + ∫_0^t e^{−(t−s)A}f(s) ds,
/// evaluated through the exact one-step recurrence
///   u(t_{i+1}) = e^{−Δt A}u(t_i) + ∫_{t_i}^{t_{i+1}} e^{−(t_{i+1}−s)A}f(s) ds.
/// The grid must be increasing and start at 0.
Trajectory solve_forward_duhamel(const SemigroupEvaluator& ev, const Vector& u0,
                                 const SourceTerm& f, RealVector grid,
                                 const ForwardOptions& opts = {});

enum class Scheme { ImplicitEuler, CrankNicolson };

/// Independent time-stepping oracle for u′ + Au = f on a uniform grid over
/// the source term's span.
Trajectory solve_forward_stepper(const CoerciveOperator& op, const Vector& u0,
                                 const SourceTerm& f, int steps, Scheme scheme);

/// Both sides of the energy estimate
///   ∫_0^t‖u‖² + sup_{s≤t}|u|² + ∫_0^t‖u′‖_*²
///     ≤ (2 + (2C3²+C4+1)/C4² e^{2kt}) (C4|u0|² + ∫_0^t‖f‖_*²)
/// evaluated at every grid node.
struct GronwallReport {
  RealVector grid;
  RealVector lhs;
  RealVector rhs;
  double min_margin = 0.0;  // min over the grid of RHS − LHS
  bool pass(double tol) const { return min_margin >= -tol; }
};

GronwallReport verify_gronwall_bound(const CoerciveOperator& op,
                                     const Vector& u0, const SourceTerm& f,
                                     const Trajectory& traj);

}  // namespace fvpkit
