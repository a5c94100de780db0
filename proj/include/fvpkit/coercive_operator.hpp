#pragma once

#include <cstdint>
#include <optional>

#include "fvpkit/gelfand_triple.hpp"
#include "fvpkit/types.hpp"

namespace fvpkit {

enum class Backend { Spectral, Matrix };

/// A finite-dimensional Lax–Milgram operator with its sesquilinear form
/// a(u,v) = ⟨Au, v⟩_H and the constants of
///
///   |a(u,v)| ≤ C3‖u‖‖v‖,    Re a(v,v) ≥ C4‖v‖² − k|v|².
///
/// Two backends: Spectral holds real eigenvalues λ_0 ≤ … ≤ λ_{N−1} of a
/// self-adjoint operator acting diagonally; Matrix holds a dense (possibly
/// nonnormal) coefficient table. The sector half-angle θ = arccot(C3/C4) is
/// kept as metadata.
class CoerciveOperator {
 public:
  static CoerciveOperator spectral(RealVector eigenvalues, GelfandTriple triple,
                                   double c3, double c4, double k);

  /// Spectral backend with the canonical triple (gram_V = diag(1+λ), gram_H =
  /// I) and constants estimated from the form.
  static CoerciveOperator spectral(RealVector eigenvalues);

  static CoerciveOperator matrix(Matrix table, GelfandTriple triple, double c3,
                                 double c4, double k);

  /// Dense backend with constants estimated from the form.
  static CoerciveOperator matrix(Matrix table, GelfandTriple triple);

  Backend backend() const { return backend_; }
  int dim() const { return triple_.dim(); }
  const GelfandTriple& triple() const { return triple_; }
  const RealVector& eigenvalues() const;
  const Matrix& matrix_table() const;

  double c3() const { return c3_; }
  double c4() const { return c4_; }
  double k() const { return k_; }
  double sector_angle() const { return theta_; }

  /// Av in coefficient space.
  Vector apply(const Vector& v) const;

  /// The form table S with a(u,v) = vᴴ S u (S = G_H A).
  Matrix form_matrix() const;

  /// a(u,v) = ⟨Au,v⟩_H.
  Complex form(const Vector& u, const Vector& v) const;

  /// Largest real part over the spectrum (spectral: λ_max); used as the
  /// stiffness scale of e^{−tA}.
  double spectral_abscissa_upper() const;
  double spectral_abscissa_lower() const;

 private:
  CoerciveOperator(Backend b, RealVector eigs, Matrix table,
                   GelfandTriple triple, double c3, double c4, double k);

  Backend backend_;
  RealVector eigenvalues_;
  Matrix table_;
  GelfandTriple triple_;
  double c3_, c4_, k_, theta_;
};

/// Outcome of sampling + eigensolve verification of the two inequalities.
/// Margins are normalized to unit V-norm arguments; negative values flag a
/// violation deeper than -tol.
struct CoercivityReport {
  bool bounded_pass = false;
  bool coercive_pass = false;
  double worst_sampled_bounded_margin = 0.0;   // min C3 − |a(u,v)|/(‖u‖‖v‖)
  double worst_sampled_coercive_margin = 0.0;  // min Re a − C4‖v‖² + k|v|², ‖v‖=1
  double extreme_bounded_margin = 0.0;         // C3 − σ_max of the form
  double extreme_coercive_margin = 0.0;        // λ_min of (sym S + kG_H − C4 G_V, G_V)
  bool pass() const { return bounded_pass && coercive_pass; }
};

CoercivityReport verify_coercivity(const CoerciveOperator& op, int samples,
                                   double tol, std::uint64_t seed = 0x9e3779b9);

/// Tightest constants for the form S over the given triple. (C4, k) is not
/// unique; the estimator fits the supporting line of the generalized spectrum
/// of (sym S, G_V) through its extreme points, which recovers the exact pair
/// whenever the form satisfies an identity Re a(v,v) = C4‖v‖² − k|v|².
struct EstimatedConstants {
  double c3 = 0.0;
  double c4 = 0.0;
  double k = 0.0;
  bool degenerate = false;  // zero form or no positive ellipticity found
};

EstimatedConstants estimate_constants(const Matrix& form,
                                      const GelfandTriple& triple);

}  // namespace fvpkit
