#pragma once

#include <span>
#include <variant>
#include <vector>

#include "fvpkit/coercive_operator.hpp"
#include "fvpkit/source_term.hpp"
#include "fvpkit/types.hpp"

namespace fvpkit {

/// Cosine spectral model of the Neumann Laplacian −Δ_N on an interval or a
/// rectangle: λ0 = 0 with the constant eigenfunction, gram_V = diag(1+λ_j),
/// gram_H = I, Dirichlet-form constants (C3, C4, k) = (1, 1, 1).

struct Interval {
  double length;
};

struct Rectangle {
  double lx;
  double ly;
};

using Geometry = std::variant<Interval, Rectangle>;

/// Cosine mode label: (p, −1) on the interval, (p, q) on the rectangle.
struct ModeIndex {
  int p;
  int q;
};

class NeumannModel {
 public:
  NeumannModel(Geometry geometry, int n, RealVector eigenvalues,
               std::vector<ModeIndex> modes, CoerciveOperator op);

  const Geometry& geometry() const { return geometry_; }
  bool is_interval() const { return std::holds_alternative<Interval>(geometry_); }
  int truncation() const { return n_; }
  const RealVector& eigenvalues() const { return eigenvalues_; }
  const std::vector<ModeIndex>& modes() const { return modes_; }
  const CoerciveOperator& op() const { return op_; }
  const GelfandTriple& triple() const { return op_.triple(); }

 private:
  Geometry geometry_;
  int n_;
  RealVector eigenvalues_;
  std::vector<ModeIndex> modes_;
  CoerciveOperator op_;
};

/// Interval: λ_j = (jπ/L)². Rectangle: λ = (pπ/Lx)² + (qπ/Ly)², sorted with
/// ties broken lexicographically in (p,q). Requires N ≥ 2, positive lengths.
NeumannModel build_model(const Geometry& geometry, int n);

/// One-sided difference estimates of u′ at the interval ends for the
/// synthesized u(x) = Σ c_j cos(jπx/L); both vanish at rate O(1/mesh) for
/// finitely many modes. Interval geometry only, mesh ≥ 32.
struct BoundaryFlux {
  double left;
  double right;
};

BoundaryFlux check_neumann_bc(const NeumannModel& model, const Vector& coeffs,
                              int mesh);

/// Least-squares exponent α of λ_j ≈ C·j^α over the upper half of the
/// spectrum; the expected window is [1.9, 2.1] on the interval and
/// [0.85, 1.15] on the rectangle. Requires N ≥ 32.
struct WeylReport {
  double alpha = 0.0;
  double prefactor = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  bool in_window = false;
};

WeylReport weyl_check(const NeumannModel& model);

/// Growth table ‖u_j(0)‖ = e^{Tλ_j} for unit final data u_T = e_j, f = 0,
/// produced through the actual backward recovery. Modes with Tλ_j beyond the
/// floating range are reported as overflowed, not computed.
struct InstabilityRow {
  int mode;
  double lambda;
  double norm;  // e^{Tλ_j} when not overflowed
  bool overflowed;
};

std::vector<InstabilityRow> instability_experiment(const NeumannModel& model,
                                                   double T,
                                                   std::span<const int> modes);

/// Empirical Hölder fit over the samples: the modulus-of-continuity envelope
/// ω(Δt) = max_{|t−s|=Δt}|f(t)−f(s)| is fitted as C·Δt^σ in log-log least
/// squares. Requires ≥ 3 nodes.
struct HolderReport {
  bool passes = false;
  double sigma = 0.0;
  double constant = 0.0;
};

HolderReport holder_gate(const SourceTerm& f, double sigma_threshold = 0.0);

}  // namespace fvpkit
