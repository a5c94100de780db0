#include "fvpkit/source_term.hpp"

#include <algorithm>
#include <cmath>

namespace fvpkit {

SourceTerm::SourceTerm(RealVector nodes, std::vector<Vector> samples,
                       Interpolation interp,
                       std::optional<HolderDeclaration> holder)
    : nodes_(std::move(nodes)),
      samples_(std::move(samples)),
      interp_(interp),
      holder_(holder) {
  if (nodes_.size() < 2) {
    throw ValidationError("source term needs at least two time nodes");
  }
  if (static_cast<std::size_t>(nodes_.size()) != samples_.size()) {
    throw ValidationError("source term node/sample counts differ");
  }
  for (Eigen::Index i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_(i) > nodes_(i - 1))) {
      throw ValidationError("source term nodes must be strictly increasing");
    }
  }
  const Eigen::Index d = samples_.front().size();
  if (d == 0) throw ValidationError("source term samples are empty");
  is_zero_ = true;
  for (const Vector& s : samples_) {
    if (s.size() != d) throw ValidationError("source term sample dimensions differ");
    if (!s.allFinite()) throw ValidationError("source term samples must be finite");
    if (s.cwiseAbs().maxCoeff() != 0.0) is_zero_ = false;
  }

  if (holder_) {
    if (!(holder_->sigma > 0.0) || holder_->sigma > 1.0) {
      throw ValidationError("Hölder exponent must lie in (0,1]");
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < nodes_.size(); ++i) {
      for (Eigen::Index j = i + 1; j < nodes_.size(); ++j) {
        const double dt = nodes_(j) - nodes_(i);
        const double df = (samples_[j] - samples_[i]).norm();
        worst = std::max(worst, df / std::pow(dt, holder_->sigma));
      }
    }
    if (worst > holder_->constant * (1.0 + 1e-9)) {
      throw ValidationError(
          "declared Hölder constant is violated on the samples");
    }
  }
}

SourceTerm SourceTerm::zero(int dim, double t_end) {
  return constant(Vector::Zero(dim), t_end);
}

SourceTerm SourceTerm::constant(const Vector& value, double t_end) {
  if (!(t_end > 0)) throw ValidationError("source term span must be positive");
  RealVector nodes(2);
  nodes << 0.0, t_end;
  return SourceTerm(nodes, {value, value});
}

bool SourceTerm::spans(double a, double b, double tol) const {
  return t_begin() <= a + tol && t_end() >= b - tol;
}

Vector SourceTerm::eval(double t) const {
  const Eigen::Index n = nodes_.size();
  if (t <= nodes_(0)) return samples_.front();
  if (t >= nodes_(n - 1)) return samples_.back();
  // locate the segment [nodes_(i), nodes_(i+1)) containing t
  const double* begin = nodes_.data();
  const double* it = std::upper_bound(begin, begin + n, t);
  const Eigen::Index i = std::max<Eigen::Index>(1, it - begin) - 1;
  if (interp_ == Interpolation::PiecewiseConstant) return samples_[i];
  const double w = (t - nodes_(i)) / (nodes_(i + 1) - nodes_(i));
  return samples_[i] + w * (samples_[i + 1] - samples_[i]);
}

double SourceTerm::dual_l2_sq(const GelfandTriple& triple, double a,
                              double b) const {
  if (!(b >= a)) throw ValidationError("dual_l2_sq: b < a");
  if (!spans(a, b)) throw ValidationError("dual_l2_sq: [a,b] outside the span");

  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < nodes_.size(); ++i) {
    const double lo = std::max(a, nodes_(i));
    const double hi = std::min(b, nodes_(i + 1));
    if (hi <= lo) continue;
    if (interp_ == Interpolation::PiecewiseConstant) {
      const double g = triple.dual_norm(samples_[i]);
      total += (hi - lo) * g * g;
      continue;
    }
    // ||f(t)||_*^2 is quadratic on the segment: Simpson is exact.
    const Vector f_lo = eval(lo);
    const Vector f_hi = eval(hi);
    const Vector f_mid = eval((lo + hi) / 2.0);
    const double g_lo = triple.dual_norm(f_lo);
    const double g_mid = triple.dual_norm(f_mid);
    const double g_hi = triple.dual_norm(f_hi);
    total += (hi - lo) / 6.0 *
             (g_lo * g_lo + 4.0 * g_mid * g_mid + g_hi * g_hi);
  }
  return total;
}

}  // namespace fvpkit
