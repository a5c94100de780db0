#pragma once

#include <Eigen/Cholesky>
#include <optional>

#include "fvpkit/errors.hpp"
#include "fvpkit/types.hpp"

namespace fvpkit {

/// Finite-dimensional Gelfand triple V ⊂ H ⊂ V* realized by two Hermitian
/// positive definite Gram matrices on coefficient vectors.
///
/// ‖v‖  = (vᴴ G_V v)^{1/2}           V-norm
/// |v|  = (vᴴ G_H v)^{1/2}           H-norm
/// ‖v‖_* = sup_{‖w‖=1} |⟨v,w⟩_H|     dual norm through the H-pairing,
///                                    = |G_V^{-1/2} G_H v|_2
///
/// The embedding constants satisfy ‖v‖_* ≤ C1|v| ≤ C2‖v‖ for all v; the
/// tightest pair is computed from the generalized eigenvalues of (G_H, G_V)
/// when none is supplied.
class GelfandTriple {
 public:
  GelfandTriple(Matrix gram_V, Matrix gram_H,
                std::optional<double> c1 = std::nullopt,
                std::optional<double> c2 = std::nullopt);

  /// Diagonal Gram tables (weights must be strictly positive).
  static GelfandTriple diagonal(const RealVector& v_weights,
                                const RealVector& h_weights);

  /// The triple of a self-adjoint spectral model: gram_V = diag(1+λ_j),
  /// gram_H = I.
  static GelfandTriple spectral(const RealVector& eigenvalues);

  /// gram_V = gram_H = I.
  static GelfandTriple euclidean(int dim);

  int dim() const { return static_cast<int>(gram_v_.rows()); }
  const Matrix& gram_V() const { return gram_v_; }
  const Matrix& gram_H() const { return gram_h_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }

  double v_norm(const Vector& v) const;
  double h_norm(const Vector& v) const;
  double dual_norm(const Vector& v) const;

  /// ⟨u,v⟩_H = vᴴ G_H u (linear in u, antilinear in v).
  Complex h_inner(const Vector& u, const Vector& v) const;

  /// Solves G_V x = rhs.
  Vector solve_V(const Vector& rhs) const;

  /// Largest eigenvalue of the pencil (G_H, G_V), i.e. sup |v|²/‖v‖².
  double h_over_v_extreme() const { return mu_; }

 private:
  Matrix gram_v_;
  Matrix gram_h_;
  Eigen::LLT<Matrix> llt_v_;
  double c1_ = 1.0;
  double c2_ = 1.0;
  double mu_ = 1.0;
};

}  // namespace fvpkit
