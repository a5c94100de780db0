#include "fvpkit/trajectory.hpp"

#include <algorithm>

#include "fvpkit/errors.hpp"

namespace fvpkit {

Trajectory::Trajectory(RealVector grid, std::vector<Vector> values,
                       const GelfandTriple& triple,
                       std::optional<SourceTerm> source,
                       std::vector<std::string> warnings)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      source_(std::move(source)),
      warnings_(std::move(warnings)) {
  if (grid_.size() < 2) throw ValidationError("trajectory needs >= 2 grid nodes");
  if (static_cast<std::size_t>(grid_.size()) != values_.size()) {
    throw ValidationError("trajectory grid/value counts differ");
  }
  for (Eigen::Index i = 1; i < grid_.size(); ++i) {
    if (!(grid_(i) > grid_(i - 1))) {
      throw ValidationError("trajectory grid must be strictly increasing");
    }
  }
  for (const Vector& v : values_) {
    if (v.size() != values_.front().size() || !v.allFinite()) {
      throw ValidationError("trajectory values malformed");
    }
  }
  norms_ = compute_trajectory_norms(grid_, values_, triple);
}

Trajectory with_residual(Trajectory t, double r) {
  t.max_relative_residual_ = r;
  return t;
}

std::vector<Vector> grid_derivative(const RealVector& grid,
                                    const std::vector<Vector>& values) {
  const Eigen::Index n = grid.size();
  if (n < 2) throw ValidationError("grid_derivative: need >= 2 nodes");
  std::vector<Vector> d(values.size());

  if (n == 2) {
    const double h = grid(1) - grid(0);
    d[0] = (values[1] - values[0]) / h;
    d[1] = d[0];
    return d;
  }

  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double hl = grid(i) - grid(i - 1);
    const double hr = grid(i + 1) - grid(i);
    // second-order three-point formula on a nonuniform grid
    d[i] = (-hr / (hl * (hl + hr))) * values[i - 1] +
           ((hr - hl) / (hl * hr)) * values[i] +
           (hl / (hr * (hl + hr))) * values[i + 1];
  }
  {
    const double h0 = grid(1) - grid(0);
    const double h1 = grid(2) - grid(1);
    d[0] = (-(2.0 * h0 + h1) / (h0 * (h0 + h1))) * values[0] +
           ((h0 + h1) / (h0 * h1)) * values[1] +
           (-h0 / (h1 * (h0 + h1))) * values[2];
    const double g1 = grid(n - 2) - grid(n - 3);
    const double g0 = grid(n - 1) - grid(n - 2);
    d[n - 1] = (g0 / (g1 * (g0 + g1))) * values[n - 3] +
               (-(g0 + g1) / (g0 * g1)) * values[n - 2] +
               ((2.0 * g0 + g1) / (g0 * (g0 + g1))) * values[n - 1];
  }
  return d;
}

TrajectoryNorms compute_trajectory_norms(const RealVector& grid,
                                         const std::vector<Vector>& values,
                                         const GelfandTriple& triple) {
  const Eigen::Index n = grid.size();
  const std::vector<Vector> deriv = grid_derivative(grid, values);

  RealVector v_sq(n), h_sq(n), dual_sq(n), dderiv_sq(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double vn = triple.v_norm(values[i]);
    const double hn = triple.h_norm(values[i]);
    const double dn = triple.dual_norm(values[i]);
    const double pn = triple.dual_norm(deriv[i]);
    v_sq(i) = vn * vn;
    h_sq(i) = hn * hn;
    dual_sq(i) = dn * dn;
    dderiv_sq(i) = pn * pn;
  }

  auto trapezoid = [&](const RealVector& y) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      s += 0.5 * (grid(i + 1) - grid(i)) * (y(i) + y(i + 1));
    }
    return s;
  };

  TrajectoryNorms norms;
  norms.l2_v_sq = trapezoid(v_sq);
  norms.sup_h_sq = h_sq.maxCoeff();
  norms.l2_dual_sq = trapezoid(dual_sq);
  norms.l2_dual_deriv_sq = trapezoid(dderiv_sq);
  return norms;
}

double x_norm_distance(const Trajectory& a, const Trajectory& b,
                       const GelfandTriple& triple) {
  if (a.grid().size() != b.grid().size() ||
      (a.grid() - b.grid()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ValidationError("x_norm_distance: trajectories live on different grids");
  }
  std::vector<Vector> diff(a.values().size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = a.values()[i] - b.values()[i];
  }
  return compute_trajectory_norms(a.grid(), diff, triple).x_norm();
}

double sobolev_margin(const Trajectory& traj, const GelfandTriple& triple) {
  const double t_span = traj.grid()(traj.grid().size() - 1) - traj.grid()(0);
  const TrajectoryNorms& n = traj.norms();
  const double c = 1.0 + (triple.c2() * triple.c2()) /
                             (triple.c1() * triple.c1() * t_span);
  return c * n.l2_v_sq + n.l2_dual_deriv_sq - n.sup_h_sq;
}

}  // namespace fvpkit
