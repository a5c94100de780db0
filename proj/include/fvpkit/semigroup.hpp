#pragma once

#include <Eigen/LU>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fvpkit/coercive_operator.hpp"
#include "fvpkit/types.hpp"

namespace fvpkit {

enum class ExpmMethod { Auto, Eigendecomposition, ScalingSquaring };

enum class Verdict { InDomain, Diverging, Inconclusive };

/// Dense matrix exponential e^M. Eigendecomposition when M is diagonalizable
/// with a well-conditioned eigenvector basis, otherwise scaling-and-squaring
/// with the degree-13 rational approximant.
Matrix matrix_exponential(const Matrix& m, ExpmMethod method = ExpmMethod::Auto,
                          double cond_limit = 1e6);

/// Evaluates e^{−tA}, its unbounded inverse e^{tA} = (e^{−tA})^{−1}, and the
/// generator action. Immutable after construction; evaluation calls are pure.
class SemigroupEvaluator {
 public:
  explicit SemigroupEvaluator(CoerciveOperator op,
                              ExpmMethod method = ExpmMethod::Auto,
                              double expm_tol = 1e-13);

  const CoerciveOperator& op() const { return op_; }
  const GelfandTriple& triple() const { return op_.triple(); }
  int dim() const { return op_.dim(); }
  ExpmMethod method_used() const { return method_used_; }
  double expm_tol() const { return expm_tol_; }

  /// e^{−tA} x for t ≥ 0.
  Vector evolve(double t, const Vector& x) const;

  /// Dense e^{−tA}.
  Matrix evolve_matrix(double t) const;

  struct Inverse {
    Vector value;
    double kappa = 1.0;      // amplification of the retained modes (may be inf)
    double log_kappa = 0.0;  // finite surrogate
    std::vector<int> clipped_modes;
    bool cutoff_applied = false;
  };

  /// e^{tA} x, computed by exponentiating +tA, never by inverting e^{−tA}.
  /// An optional spectral cutoff zeroes modes with λ_j > cutoff; every use is
  /// reported in the result. Throws OverflowError when t·λ_j + log|x_j|
  /// leaves the double range on a retained mode.
  Inverse evolve_inverse(double t, const Vector& x,
                         std::optional<double> cutoff = std::nullopt) const;

  /// Amplification factor κ(t): e^{t(λmax−λmin)} for the spectral backend,
  /// the 2-norm condition number of e^{−tA} for the matrix backend.
  double kappa(double t) const;
  double log_kappa(double t) const;

  Vector apply_generator(const Vector& x) const { return op_.apply(x); }

 private:
  CoerciveOperator op_;
  ExpmMethod method_used_;
  double expm_tol_;

  // Matrix backend: cached eigendecomposition A = P diag(d) P^{-1}.
  bool eig_usable_ = false;
  Matrix eig_vectors_;
  Vector eig_values_;
  Eigen::PartialPivLU<Matrix> eig_lu_;
};

/// log(Σ exp(v_i)); −inf entries contribute nothing.
double log_sum_exp(std::span<const double> logs);

/// Classifies a truncation sequence of log graph norms: steps that settle
/// within settle_tol (and do not grow back) are in-domain, monotone growth by
/// more than growth_threshold per level is diverging, anything else is
/// inconclusive.
Verdict classify_log_graph_sequence(const std::vector<double>& log_norms,
                                    double settle_tol, double growth_threshold,
                                    bool overflowed);

/// Truncation study of a graph norm (|x|² + |e^{tA}x|²)^{1/2} across levels.
struct DomainDiagnostic {
  double t = 0.0;
  std::vector<int> truncation_levels;
  std::vector<double> graph_norms;      // may contain +inf
  std::vector<double> log_graph_norms;  // finite log-scale surrogate
  Verdict verdict = Verdict::Inconclusive;
  double condition_number = 1.0;  // κ(t) at the top level (may be inf)
  std::optional<int> overflow_mode;
};

/// Spectral family λ_j with per-mode probe coefficients in log scale,
/// log|c_j|; levels may exceed any fixed truncation.
struct SpectralGrowthRule {
  std::function<double(int)> lambda;
  std::function<double(int)> log_coeff_magnitude;
};

/// The canonical probe c_j = e^{−tλ_j}/(1+j).
SpectralGrowthRule default_domain_probe(std::function<double(int)> lambda,
                                        double t);

struct DomainProbeOptions {
  double domain_tol = 5e-2;        // relative step accepted as settled
  double growth_threshold = 10.0;  // per-level factor that flags divergence
};

/// Evaluates the probe's graph norms at levels for both times and classifies
/// each sequence. Requires t_prime > t ≥ 0.
std::pair<DomainDiagnostic, DomainDiagnostic> domain_chain_probe(
    const SpectralGrowthRule& rule, double t, double t_prime,
    std::span<const int> levels, const DomainProbeOptions& opts = {});

/// Bounded-spectrum variant (matrix backend): a single level, classified by
/// the conditioning of e^{−tA} against kappa_max.
std::pair<DomainDiagnostic, DomainDiagnostic> domain_chain_probe(
    const SemigroupEvaluator& ev, double t, double t_prime,
    double kappa_max = 1e12);

/// The height h(t) = |e^{−tA}u0| with its closed-form derivatives
///   h′ = −Re⟨Au,u⟩/|u|,
///   h″ = (Re⟨A²u,u⟩ + |Au|²)/|u| − (Re⟨Au,u⟩)²/|u|³,
/// and the minimum of (log h)″ = (h″h − h′²)/h² over the grid.
struct HeightProfile {
  RealVector grid;
  RealVector h;
  RealVector h1;
  RealVector h2;
  double logconv_margin = 0.0;
};

HeightProfile height_profile(const SemigroupEvaluator& ev, const Vector& u0,
                             std::span<const double> grid);

/// Re⟨A²x,x⟩|x|² + |Ax|²|x|² − 2(Re⟨Ax,x⟩)²; a nonnegative value certifies
/// log-convexity of the height at x.
double logconv_criterion(const CoerciveOperator& op, const Vector& x);

}  // namespace fvpkit
