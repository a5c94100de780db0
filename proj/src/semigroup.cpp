#include "fvpkit/semigroup.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fvpkit/errors.hpp"

namespace fvpkit {

namespace {

constexpr double kExpGuard = 700.0;  // natural-log scale of the double range

/// Scaling-and-squaring with the degree-13 rational approximant.
Matrix expm_pade13(Matrix a) {
  static const double b[] = {64764752532480000.0, 32382376266240000.0,
                             7771770303897600.0,  1187353796428800.0,
                             129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,
                             1323241920.0,        40840800.0,
                             960960.0,            16380.0,
                             182.0,               1.0};
  const double theta13 = 5.371920351148152;

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    a /= std::pow(2.0, squarings);
  }

  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;

  const Matrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
           b[3] * a2 + b[1] * id);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * id;

  Matrix f = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) f = f * f;
  return f;
}

}  // namespace

double log_sum_exp(std::span<const double> logs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : logs) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : logs) s += std::exp(v - m);
  return m + std::log(s);
}

Verdict classify_log_graph_sequence(const std::vector<double>& log_norms,
                                    double settle_tol, double growth_threshold,
                                    bool overflowed) {
  if (overflowed) return Verdict::Diverging;
  if (log_norms.size() < 2) return Verdict::Inconclusive;

  bool all_zero = true;
  for (double v : log_norms) {
    if (std::isfinite(v)) all_zero = false;
  }
  if (all_zero) return Verdict::InDomain;  // identically zero vector

  bool settled = true;
  bool growing = true;
  double prev_step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < log_norms.size(); ++i) {
    double step = log_norms[i] - log_norms[i - 1];
    if (!std::isfinite(log_norms[i - 1]) && !std::isfinite(log_norms[i])) {
      step = 0.0;  // 0 -> 0
    }
    if (!(std::abs(std::expm1(std::min(step, 700.0))) <= settle_tol &&
          step <= prev_step + settle_tol)) {
      settled = false;
    }
    if (!(step > std::log(growth_threshold))) growing = false;
    prev_step = step;
  }
  if (settled) return Verdict::InDomain;
  if (growing) return Verdict::Diverging;
  return Verdict::Inconclusive;
}

Matrix matrix_exponential(const Matrix& m, ExpmMethod method,
                          double cond_limit) {
  if (m.rows() != m.cols()) throw ValidationError("matrix_exponential: not square");
  if (method == ExpmMethod::ScalingSquaring) return expm_pade13(m);

  Eigen::ComplexEigenSolver<Matrix> ces(m);
  if (ces.info() == Eigen::Success) {
    const Matrix& p = ces.eigenvectors();
    Eigen::JacobiSVD<Matrix> svd(p);
    const double smin = svd.singularValues().minCoeff();
    const double cond = smin > 0 ? svd.singularValues().maxCoeff() / smin
                                 : std::numeric_limits<double>::infinity();
    if (cond < cond_limit) {
      const Vector ed = ces.eigenvalues().array().exp();
      return p * ed.asDiagonal() * p.partialPivLu().solve(Matrix::Identity(m.rows(), m.cols()));
    }
  }
  if (method == ExpmMethod::Eigendecomposition) {
    throw ValidationError(
        "eigendecomposition requested but the eigenvector basis is "
        "ill-conditioned");
  }
  return expm_pade13(m);
}

SemigroupEvaluator::SemigroupEvaluator(CoerciveOperator op, ExpmMethod method,
                                       double expm_tol)
    : op_(std::move(op)), method_used_(method), expm_tol_(expm_tol) {
  if (op_.backend() == Backend::Matrix &&
      method != ExpmMethod::ScalingSquaring) {
    Eigen::ComplexEigenSolver<Matrix> ces(op_.matrix_table());
    if (ces.info() == Eigen::Success) {
      Eigen::JacobiSVD<Matrix> svd(ces.eigenvectors());
      const double smin = svd.singularValues().minCoeff();
      const double cond = smin > 0 ? svd.singularValues().maxCoeff() / smin
                                   : std::numeric_limits<double>::infinity();
      if (cond < 1e6) {
        eig_usable_ = true;
        eig_vectors_ = ces.eigenvectors();
        eig_values_ = ces.eigenvalues();
        eig_lu_ = Eigen::PartialPivLU<Matrix>(eig_vectors_);
      }
    }
    if (method == ExpmMethod::Eigendecomposition && !eig_usable_) {
      throw ValidationError(
          "eigendecomposition requested but the eigenvector basis is "
          "ill-conditioned");
    }
  }
  method_used_ = (op_.backend() == Backend::Spectral || eig_usable_)
                     ? ExpmMethod::Eigendecomposition
                     : ExpmMethod::ScalingSquaring;
}

Vector SemigroupEvaluator::evolve(double t, const Vector& x) const {
  if (t < 0) throw ValidationError("evolve: t must be nonnegative");
  if (x.size() != dim()) throw ValidationError("evolve: dimension mismatch");
  if (op_.backend() == Backend::Spectral) {
    Vector y(x.size());
    const RealVector& lam = op_.eigenvalues();
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      y(j) = std::exp(-t * lam(j)) * x(j);
    }
    return y;
  }
  if (eig_usable_) {
    Vector z = eig_lu_.solve(x);
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      z(j) *= std::exp(-t * eig_values_(j));
    }
    return eig_vectors_ * z;
  }
  return expm_pade13(-t * op_.matrix_table()) * x;
}

Matrix SemigroupEvaluator::evolve_matrix(double t) const {
  if (t < 0) throw ValidationError("evolve_matrix: t must be nonnegative");
  if (op_.backend() == Backend::Spectral) {
    Vector d(dim());
    for (int j = 0; j < dim(); ++j) d(j) = std::exp(-t * op_.eigenvalues()(j));
    return d.asDiagonal();
  }
  if (eig_usable_) {
    Vector d(dim());
    for (int j = 0; j < dim(); ++j) d(j) = std::exp(-t * eig_values_(j));
    return eig_vectors_ * d.asDiagonal() *
           eig_lu_.solve(Matrix::Identity(dim(), dim()));
  }
  return expm_pade13(-t * op_.matrix_table());
}

SemigroupEvaluator::Inverse SemigroupEvaluator::evolve_inverse(
    double t, const Vector& x, std::optional<double> cutoff) const {
  if (t < 0) throw ValidationError("evolve_inverse: t must be nonnegative");
  if (x.size() != dim()) throw ValidationError("evolve_inverse: dimension mismatch");

  Inverse result;
  if (op_.backend() == Backend::Spectral) {
    const RealVector& lam = op_.eigenvalues();
    result.value = Vector::Zero(x.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      if (cutoff && lam(j) > *cutoff) {
        result.clipped_modes.push_back(static_cast<int>(j));
        result.cutoff_applied = true;
        continue;
      }
      lo = std::min(lo, lam(j));
      hi = std::max(hi, lam(j));
      if (x(j) == Complex(0.0, 0.0)) continue;  // zero stays zero at any λ
      const double exponent = t * lam(j) + std::log(std::abs(x(j)));
      if (exponent > kExpGuard) {
        throw OverflowError("evolve_inverse: mode " + std::to_string(j) +
                                " overflows: t*lambda + log|x| = " +
                                std::to_string(exponent),
                            static_cast<int>(j), exponent);
      }
      result.value(j) = std::exp(t * lam(j)) * x(j);
    }
    const double span = (hi >= lo) ? t * (hi - lo) : 0.0;
    result.log_kappa = span;
    result.kappa = std::exp(span);
    return result;
  }

  if (!eig_usable_) {
    const double abscissa = op_.spectral_abscissa_upper();
    if (t * abscissa > kExpGuard) {
      throw OverflowError("evolve_inverse: t * spectral abscissa exceeds range",
                          -1, t * abscissa);
    }
    result.value = expm_pade13(t * op_.matrix_table()) * x;
  } else {
    Vector z = eig_lu_.solve(x);
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      if (z(j) == Complex(0.0, 0.0)) continue;
      const double exponent =
          t * eig_values_(j).real() + std::log(std::abs(z(j)));
      if (exponent > kExpGuard) {
        throw OverflowError("evolve_inverse: eigen mode " + std::to_string(j) +
                                " overflows",
                            static_cast<int>(j), exponent);
      }
      z(j) *= std::exp(t * eig_values_(j));
    }
    result.value = eig_vectors_ * z;
  }
  result.log_kappa = log_kappa(t);
  result.kappa = std::exp(result.log_kappa);
  return result;
}

double SemigroupEvaluator::log_kappa(double t) const {
  if (op_.backend() == Backend::Spectral) {
    const RealVector& lam = op_.eigenvalues();
    return t * (lam(lam.size() - 1) - lam(0));
  }
  const Matrix e = evolve_matrix(t);
  Eigen::JacobiSVD<Matrix> svd(e);
  const double smin = svd.singularValues().minCoeff();
  if (smin <= 0) return std::numeric_limits<double>::infinity();
  return std::log(svd.singularValues().maxCoeff() / smin);
}

double SemigroupEvaluator::kappa(double t) const { return std::exp(log_kappa(t)); }

SpectralGrowthRule default_domain_probe(std::function<double(int)> lambda,
                                        double t) {
  SpectralGrowthRule rule;
  rule.lambda = lambda;
  rule.log_coeff_magnitude = [lambda, t](int j) {
    return -t * lambda(j) - std::log1p(static_cast<double>(j));
  };
  return rule;
}

namespace {

DomainDiagnostic probe_levels(const SpectralGrowthRule& rule, double s,
                              std::span<const int> levels,
                              const DomainProbeOptions& opts,
                              double lambda_span_top) {
  DomainDiagnostic diag;
  diag.t = s;
  bool overflowed = false;
  for (int n : levels) {
    std::vector<double> terms;
    terms.reserve(2 * n);
    for (int j = 0; j < n; ++j) {
      const double lc = rule.log_coeff_magnitude(j);
      terms.push_back(2.0 * lc);                       // |c_j|²
      terms.push_back(2.0 * (s * rule.lambda(j) + lc));  // |e^{sλ}c_j|²
    }
    const double log_g = 0.5 * log_sum_exp(terms);
    diag.truncation_levels.push_back(n);
    diag.log_graph_norms.push_back(log_g);
    diag.graph_norms.push_back(log_g > kExpGuard
                                   ? std::numeric_limits<double>::infinity()
                                   : std::exp(log_g));
    if (log_g > kExpGuard && !diag.overflow_mode) {
      overflowed = true;
      // first mode whose amplified term alone exceeds the range
      for (int j = 0; j < n; ++j) {
        if (s * rule.lambda(j) + rule.log_coeff_magnitude(j) > kExpGuard) {
          diag.overflow_mode = j;
          break;
        }
      }
    }
  }
  diag.verdict = classify_log_graph_sequence(
      diag.log_graph_norms, opts.domain_tol, opts.growth_threshold, overflowed);
  diag.condition_number =
      lambda_span_top > kExpGuard ? std::numeric_limits<double>::infinity()
                                  : std::exp(lambda_span_top);
  return diag;
}

}  // namespace

std::pair<DomainDiagnostic, DomainDiagnostic> domain_chain_probe(
    const SpectralGrowthRule& rule, double t, double t_prime,
    std::span<const int> levels, const DomainProbeOptions& opts) {
  if (!(t_prime > t)) throw ValidationError("domain_chain_probe: need t' > t");
  if (t < 0) throw ValidationError("domain_chain_probe: need t >= 0");
  if (levels.size() < 2) {
    throw ValidationError("domain_chain_probe: need at least two levels");
  }
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] <= levels[i - 1]) {
      throw ValidationError("domain_chain_probe: levels must increase");
    }
  }
  const int top = levels.back();
  double lam_lo = rule.lambda(0), lam_hi = rule.lambda(0);
  for (int j = 1; j < top; ++j) {
    lam_lo = std::min(lam_lo, rule.lambda(j));
    lam_hi = std::max(lam_hi, rule.lambda(j));
  }
  return {probe_levels(rule, t, levels, opts, t * (lam_hi - lam_lo)),
          probe_levels(rule, t_prime, levels, opts, t_prime * (lam_hi - lam_lo))};
}

std::pair<DomainDiagnostic, DomainDiagnostic> domain_chain_probe(
    const SemigroupEvaluator& ev, double t, double t_prime, double kappa_max) {
  if (!(t_prime > t)) throw ValidationError("domain_chain_probe: need t' > t");
  if (t < 0) throw ValidationError("domain_chain_probe: need t >= 0");

  auto single = [&](double s) {
    DomainDiagnostic diag;
    diag.t = s;
    diag.truncation_levels = {ev.dim()};
    const double lk = ev.log_kappa(s);
    diag.condition_number = lk > kExpGuard
                                ? std::numeric_limits<double>::infinity()
                                : std::exp(lk);
    diag.log_graph_norms = {lk};
    diag.graph_norms = {diag.condition_number};
    diag.verdict = (diag.condition_number <= kappa_max) ? Verdict::InDomain
                                                        : Verdict::Diverging;
    return diag;
  };
  return {single(t), single(t_prime)};
}

HeightProfile height_profile(const SemigroupEvaluator& ev, const Vector& u0,
                             std::span<const double> grid) {
  if (u0.size() != ev.dim()) throw ValidationError("height_profile: dimension mismatch");
  if (ev.triple().h_norm(u0) == 0.0) {
    throw ValidationError("height_profile: u0 must be nonzero");
  }
  const GelfandTriple& triple = ev.triple();

  HeightProfile prof;
  prof.grid = Eigen::Map<const RealVector>(grid.data(), grid.size());
  prof.h.resize(grid.size());
  prof.h1.resize(grid.size());
  prof.h2.resize(grid.size());
  prof.logconv_margin = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vector u = ev.evolve(grid[i], u0);
    const Vector au = ev.apply_generator(u);
    const Vector a2u = ev.apply_generator(au);
    const double h = triple.h_norm(u);
    if (h <= 0.0) {
      throw ValidationError("height_profile: |u(t)| vanished numerically");
    }
    const double re_au_u = std::real(triple.h_inner(au, u));
    const double re_a2u_u = std::real(triple.h_inner(a2u, u));
    const double au_sq = std::real(triple.h_inner(au, au));
    prof.h(i) = h;
    prof.h1(i) = -re_au_u / h;
    prof.h2(i) = (re_a2u_u + au_sq) / h - (re_au_u * re_au_u) / (h * h * h);
    const double logconv = (prof.h2(i) * h - prof.h1(i) * prof.h1(i)) / (h * h);
    prof.logconv_margin = std::min(prof.logconv_margin, logconv);
  }
  return prof;
}

double logconv_criterion(const CoerciveOperator& op, const Vector& x) {
  if (x.size() != op.dim()) throw ValidationError("logconv_criterion: dimension mismatch");
  const GelfandTriple& triple = op.triple();
  if (triple.h_norm(x) == 0.0) {
    throw ValidationError("logconv_criterion: x must be nonzero");
  }
  const Vector ax = op.apply(x);
  const Vector a2x = op.apply(ax);
  const double xx = std::real(triple.h_inner(x, x));
  const double re_ax_x = std::real(triple.h_inner(ax, x));
  const double re_a2x_x = std::real(triple.h_inner(a2x, x));
  const double ax_sq = std::real(triple.h_inner(ax, ax));
  return re_a2x_x * xx + ax_sq * xx - 2.0 * re_ax_x * re_ax_x;
}

}  // namespace fvpkit
