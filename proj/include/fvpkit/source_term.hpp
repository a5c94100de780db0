#pragma once

#include <optional>
#include <vector>

#include "fvpkit/gelfand_triple.hpp"
#include "fvpkit/types.hpp"

namespace fvpkit {

enum class Interpolation { PiecewiseLinear, PiecewiseConstant };

struct HolderDeclaration {
  double sigma;     // exponent in (0,1]
  double constant;  // sup |f(t)−f(s)|·|t−s|^{−σ} over node pairs
};

/// The inhomogeneity f(t) as coefficient samples at strictly increasing time
/// nodes, with an interpolation contract between them. A declared Hölder pair
/// (σ, C) is validated against the samples at construction.
class SourceTerm {
 public:
  SourceTerm(RealVector nodes, std::vector<Vector> samples,
             Interpolation interp = Interpolation::PiecewiseLinear,
             std::optional<HolderDeclaration> holder = std::nullopt);

  static SourceTerm zero(int dim, double t_end);
  static SourceTerm constant(const Vector& value, double t_end);

  int dim() const { return static_cast<int>(samples_.front().size()); }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const RealVector& nodes() const { return nodes_; }
  const std::vector<Vector>& samples() const { return samples_; }
  Interpolation interpolation() const { return interp_; }
  const std::optional<HolderDeclaration>& holder() const { return holder_; }

  double t_begin() const { return nodes_(0); }
  double t_end() const { return nodes_(nodes_.size() - 1); }
  bool spans(double a, double b, double tol = 1e-12) const;

  Vector eval(double t) const;
  bool is_zero() const { return is_zero_; }

  /// ∫_a^b ‖f(t)‖_*² dt, exact per segment (the integrand is quadratic in t
  /// for piecewise-linear f, constant for piecewise-constant f).
  double dual_l2_sq(const GelfandTriple& triple, double a, double b) const;

 private:
  RealVector nodes_;
  std::vector<Vector> samples_;
  Interpolation interp_;
  std::optional<HolderDeclaration> holder_;
  bool is_zero_ = false;
};

}  // namespace fvpkit
