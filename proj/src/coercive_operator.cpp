#include "fvpkit/coercive_operator.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

namespace fvpkit {

namespace {

bool is_sorted_ascending(const RealVector& v) {
  for (Eigen::Index j = 1; j < v.size(); ++j) {
    if (v(j) < v(j - 1)) return false;
  }
  return true;
}

/// The form in V-geometry, L⁻¹ S L⁻ᴴ with G_V = LLᴴ.
Matrix v_geometry_form(const Matrix& s, const GelfandTriple& triple) {
  Eigen::LLT<Matrix> llt(triple.gram_V());
  const Matrix l = llt.matrixL();
  const Matrix tmp =
      l.triangularView<Eigen::Lower>().solve(s);  // L⁻¹ S
  return l.triangularView<Eigen::Lower>()
      .solve(tmp.adjoint())
      .adjoint();  // L⁻¹ S L⁻ᴴ
}

Vector random_unit_v(std::mt19937_64& rng, const GelfandTriple& triple) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(triple.dim());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    v(j) = Complex(gauss(rng), gauss(rng));
  }
  const double n = triple.v_norm(v);
  return n > 0 ? Vector(v / n) : v;
}

}  // namespace

CoerciveOperator::CoerciveOperator(Backend b, RealVector eigs, Matrix table,
                                   GelfandTriple triple, double c3, double c4,
                                   double k)
    : backend_(b),
      eigenvalues_(std::move(eigs)),
      table_(std::move(table)),
      triple_(std::move(triple)),
      c3_(c3),
      c4_(c4),
      k_(k),
      theta_(std::atan2(c4, c3)) {
  if (c3_ < 0 || c4_ < 0 || k_ < 0) {
    throw ValidationError("operator constants must be nonnegative");
  }
}

CoerciveOperator CoerciveOperator::spectral(RealVector eigenvalues,
                                            GelfandTriple triple, double c3,
                                            double c4, double k) {
  if (eigenvalues.size() != triple.dim()) {
    throw ValidationError("eigenvalue count does not match the triple dimension");
  }
  if (!is_sorted_ascending(eigenvalues)) {
    throw ValidationError("spectral backend expects eigenvalues sorted ascending");
  }
  return CoerciveOperator(Backend::Spectral, std::move(eigenvalues), Matrix(),
                          std::move(triple), c3, c4, k);
}

CoerciveOperator CoerciveOperator::spectral(RealVector eigenvalues) {
  GelfandTriple triple = GelfandTriple::spectral(eigenvalues);
  Matrix s = eigenvalues.cast<Complex>().asDiagonal();
  const EstimatedConstants est = estimate_constants(s, triple);
  return spectral(std::move(eigenvalues), std::move(triple), est.c3, est.c4,
                  est.k);
}

CoerciveOperator CoerciveOperator::matrix(Matrix table, GelfandTriple triple,
                                          double c3, double c4, double k) {
  if (table.rows() != table.cols() || table.rows() != triple.dim()) {
    throw ValidationError("operator table does not match the triple dimension");
  }
  if (!table.allFinite()) throw ValidationError("operator table must be finite");
  return CoerciveOperator(Backend::Matrix, RealVector(), std::move(table),
                          std::move(triple), c3, c4, k);
}

CoerciveOperator CoerciveOperator::matrix(Matrix table, GelfandTriple triple) {
  const Matrix s = triple.gram_H() * table;
  const EstimatedConstants est = estimate_constants(s, triple);
  return matrix(std::move(table), std::move(triple), est.c3, est.c4, est.k);
}

const RealVector& CoerciveOperator::eigenvalues() const {
  if (backend_ != Backend::Spectral) {
    throw ValidationError("eigenvalues() requires the spectral backend");
  }
  return eigenvalues_;
}

const Matrix& CoerciveOperator::matrix_table() const {
  if (backend_ != Backend::Matrix) {
    throw ValidationError("matrix_table() requires the matrix backend");
  }
  return table_;
}

Vector CoerciveOperator::apply(const Vector& v) const {
  if (v.size() != dim()) throw ValidationError("apply: dimension mismatch");
  if (backend_ == Backend::Spectral) {
    return eigenvalues_.cast<Complex>().cwiseProduct(v);
  }
  return table_ * v;
}

Matrix CoerciveOperator::form_matrix() const {
  if (backend_ == Backend::Spectral) {
    // G_H is the identity for the canonical spectral triple but is honored
    // in general.
    return triple_.gram_H() *
           Matrix(eigenvalues_.cast<Complex>().asDiagonal());
  }
  return triple_.gram_H() * table_;
}

Complex CoerciveOperator::form(const Vector& u, const Vector& v) const {
  return triple_.h_inner(apply(u), v);
}

double CoerciveOperator::spectral_abscissa_upper() const {
  if (backend_ == Backend::Spectral) {
    return eigenvalues_(eigenvalues_.size() - 1);
  }
  Eigen::ComplexEigenSolver<Matrix> ces(table_, false);
  return ces.eigenvalues().real().maxCoeff();
}

double CoerciveOperator::spectral_abscissa_lower() const {
  if (backend_ == Backend::Spectral) return eigenvalues_(0);
  Eigen::ComplexEigenSolver<Matrix> ces(table_, false);
  return ces.eigenvalues().real().minCoeff();
}

CoercivityReport verify_coercivity(const CoerciveOperator& op, int samples,
                                   double tol, std::uint64_t seed) {
  if (samples < 1) throw ValidationError("verify_coercivity: samples must be >= 1");

  const GelfandTriple& triple = op.triple();
  const Matrix s = op.form_matrix();
  const Matrix s_sym = ((s + s.adjoint()) / 2.0).eval();

  CoercivityReport rep;

  // Eigensolve extremes.
  const Matrix sv = v_geometry_form(s, triple);
  const double sigma_max =
      sv.cwiseAbs().maxCoeff() == 0.0
          ? 0.0
          : Eigen::JacobiSVD<Matrix>(sv).singularValues().maxCoeff();
  rep.extreme_bounded_margin = op.c3() - sigma_max;

  Matrix shifted = s_sym + op.k() * triple.gram_H() - op.c4() * triple.gram_V();
  shifted = ((shifted + shifted.adjoint()) / 2.0).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> pencil(
      shifted, triple.gram_V(), Eigen::EigenvaluesOnly);
  rep.extreme_coercive_margin = pencil.eigenvalues().minCoeff();

  // Random sampling on the unit V-sphere.
  std::mt19937_64 rng(seed);
  double worst_bounded = rep.extreme_bounded_margin;
  double worst_coercive = rep.extreme_coercive_margin;
  for (int i = 0; i < samples; ++i) {
    const Vector u = random_unit_v(rng, triple);
    const Vector v = random_unit_v(rng, triple);
    const double a_uv = std::abs(op.form(u, v));
    worst_bounded = std::min(worst_bounded, op.c3() - a_uv);

    const double re_avv = std::real(op.form(v, v));
    const double hv = triple.h_norm(v);
    worst_coercive =
        std::min(worst_coercive, re_avv - op.c4() + op.k() * hv * hv);
  }
  rep.worst_sampled_bounded_margin = worst_bounded;
  rep.worst_sampled_coercive_margin = worst_coercive;
  rep.bounded_pass = worst_bounded >= -tol;
  rep.coercive_pass = worst_coercive >= -tol;
  return rep;
}

EstimatedConstants estimate_constants(const Matrix& form,
                                      const GelfandTriple& triple) {
  if (form.rows() != form.cols() || form.rows() != triple.dim()) {
    throw ValidationError("estimate_constants: form does not match the triple");
  }

  EstimatedConstants est;
  const double scale = form.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    est.degenerate = true;  // zero form: no positive C4 exists for any k
    return est;
  }

  const Matrix sv = v_geometry_form(form, triple);
  est.c3 = Eigen::JacobiSVD<Matrix>(sv).singularValues().maxCoeff();

  const Matrix s_sym = ((form + form.adjoint()) / 2.0).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> pencil(s_sym,
                                                          triple.gram_V());
  const RealVector rho = pencil.eigenvalues();
  const Eigen::Index n = rho.size();

  const Vector w_lo = pencil.eigenvectors().col(0);
  const Vector w_hi = pencil.eigenvectors().col(n - 1);
  const double tau_lo = std::real(w_lo.dot(triple.gram_H() * w_lo)) /
                        std::real(w_lo.dot(triple.gram_V() * w_lo));
  const double tau_hi = std::real(w_hi.dot(triple.gram_H() * w_hi)) /
                        std::real(w_hi.dot(triple.gram_V() * w_hi));

  // Supporting line rho = C4 - k·tau through the extreme points of the
  // generalized spectrum; collapses to k = 0 when the extremes share tau.
  if (std::abs(tau_hi - tau_lo) < 1e-12 * std::max(tau_lo, tau_hi)) {
    est.k = 0.0;
    est.c4 = rho(0);
  } else {
    est.k = (rho(0) - rho(n - 1)) / (tau_hi - tau_lo);
    if (est.k < 0.0) est.k = 0.0;
    est.c4 = rho(0) + est.k * tau_lo;
  }

  // Admissibility: Re a(v,v) >= C4||v||^2 - k|v|^2 must hold for all v, not
  // just at the fitted extremes. Fall back to the exact ellipticity constant
  // of the shifted form when the fit overshoots.
  auto admissible_margin = [&](double c4, double k) {
    Matrix shifted = s_sym + k * triple.gram_H() - c4 * triple.gram_V();
    shifted = ((shifted + shifted.adjoint()) / 2.0).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> p(shifted, triple.gram_V(),
                                                       Eigen::EigenvaluesOnly);
    return p.eigenvalues().minCoeff();
  };
  if (admissible_margin(est.c4, est.k) < -1e-10 * std::max(1.0, scale)) {
    Matrix shifted = s_sym + est.k * triple.gram_H();
    shifted = ((shifted + shifted.adjoint()) / 2.0).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> p(shifted, triple.gram_V(),
                                                       Eigen::EigenvaluesOnly);
    est.c4 = p.eigenvalues().minCoeff();
  }

  if (!(est.c4 > 0.0)) est.degenerate = true;
  return est;
}

}  // namespace fvpkit
