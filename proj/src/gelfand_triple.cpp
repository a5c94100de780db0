#include "fvpkit/gelfand_triple.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace fvpkit {

namespace {

Matrix checked_hermitian_spd(Matrix g, const char* name) {
  if (g.rows() != g.cols() || g.rows() == 0) {
    throw ValidationError(std::string(name) + " must be square and nonempty");
  }
  const double scale = g.cwiseAbs().maxCoeff();
  if (!g.allFinite() || scale == 0.0) {
    throw ValidationError(std::string(name) + " must be finite and nonzero");
  }
  if ((g - g.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ValidationError(std::string(name) + " is not Hermitian");
  }
  g = ((g + g.adjoint()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw ValidationError(std::string(name) +
                          " is not positive definite (smallest eigenvalue <= 0)");
  }
  return g;
}

}  // namespace

GelfandTriple::GelfandTriple(Matrix gram_V, Matrix gram_H,
                             std::optional<double> c1, std::optional<double> c2)
    : gram_v_(checked_hermitian_spd(std::move(gram_V), "gram_V")),
      gram_h_(checked_hermitian_spd(std::move(gram_H), "gram_H")) {
  if (gram_v_.rows() != gram_h_.rows()) {
    throw ValidationError("gram_V and gram_H dimensions differ");
  }
  llt_v_ = Eigen::LLT<Matrix>(gram_v_);
  if (llt_v_.info() != Eigen::Success) {
    throw ValidationError("gram_V Cholesky factorization failed");
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> pencil(gram_h_, gram_v_,
                                                          Eigen::EigenvaluesOnly);
  mu_ = pencil.eigenvalues().maxCoeff();

  const double c1_tight = std::sqrt(mu_);
  const double slack = 1.0 + 1e-10;
  c1_ = c1.value_or(c1_tight);
  c2_ = c2.value_or(c1_ * c1_tight);
  if (!(c1_ > 0.0) || !(c2_ > 0.0)) {
    throw ValidationError("embedding constants must be positive");
  }
  if (c1_ * slack < c1_tight) {
    throw ValidationError("C1 too small: the chain ||v||_* <= C1|v| fails");
  }
  if (c2_ * slack < c1_ * c1_tight) {
    throw ValidationError("C2 too small: the chain C1|v| <= C2||v|| fails");
  }
}

GelfandTriple GelfandTriple::diagonal(const RealVector& v_weights,
                                      const RealVector& h_weights) {
  if (v_weights.size() != h_weights.size()) {
    throw ValidationError("weight vectors differ in length");
  }
  return GelfandTriple(v_weights.cast<Complex>().asDiagonal(),
                       h_weights.cast<Complex>().asDiagonal());
}

GelfandTriple GelfandTriple::spectral(const RealVector& eigenvalues) {
  return diagonal(RealVector::Ones(eigenvalues.size()) + eigenvalues,
                  RealVector::Ones(eigenvalues.size()));
}

GelfandTriple GelfandTriple::euclidean(int dim) {
  return diagonal(RealVector::Ones(dim), RealVector::Ones(dim));
}

double GelfandTriple::v_norm(const Vector& v) const {
  if (v.size() != gram_v_.rows()) throw ValidationError("v_norm: dimension mismatch");
  return std::sqrt(std::max(0.0, std::real(v.dot(gram_v_ * v))));
}

double GelfandTriple::h_norm(const Vector& v) const {
  if (v.size() != gram_h_.rows()) throw ValidationError("h_norm: dimension mismatch");
  return std::sqrt(std::max(0.0, std::real(v.dot(gram_h_ * v))));
}

double GelfandTriple::dual_norm(const Vector& v) const {
  if (v.size() != gram_v_.rows()) throw ValidationError("dual_norm: dimension mismatch");
  const Vector y = gram_h_ * v;
  const Vector x = llt_v_.solve(y);
  return std::sqrt(std::max(0.0, std::real(y.dot(x))));
}

Complex GelfandTriple::h_inner(const Vector& u, const Vector& v) const {
  if (u.size() != gram_h_.rows() || v.size() != gram_h_.rows()) {
    throw ValidationError("h_inner: dimension mismatch");
  }
  return v.dot(gram_h_ * u);
}

Vector GelfandTriple::solve_V(const Vector& rhs) const {
  return llt_v_.solve(rhs);
}

}  // namespace fvpkit
