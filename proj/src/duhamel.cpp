#include "fvpkit/duhamel.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <vector>

#include "fvpkit/errors.hpp"

namespace fvpkit {

namespace {

// 4-point Gauss–Legendre on [-1, 1].
constexpr double kGlNode[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
constexpr double kGlWeight[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};

struct Panel {
  double a;
  double b;
};

/// Panels for ∫_a^b e^{−(b−s)A}f(s) ds: split at the source's interior nodes,
/// grade the final segment dyadically toward b (`levels` pieces), then
/// sub-split every panel so each piece resolves the kernel stiffness
/// min(λmax, 8/distance-to-b).
std::vector<Panel> build_panels(double a, double b, const RealVector& f_nodes,
                                int levels, double lambda_max) {
  std::vector<double> breaks;
  breaks.push_back(a);
  for (Eigen::Index i = 0; i < f_nodes.size(); ++i) {
    if (f_nodes(i) > a + 1e-14 * (b - a) && f_nodes(i) < b - 1e-14 * (b - a)) {
      breaks.push_back(f_nodes(i));
    }
  }
  breaks.push_back(b);

  std::vector<Panel> coarse;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const bool final_segment = (i + 2 == breaks.size());
    if (!final_segment) {
      coarse.push_back({breaks[i], breaks[i + 1]});
      continue;
    }
    // dyadic grading toward b
    double left = breaks[i];
    const double len = breaks[i + 1] - left;
    for (int l = 1; l < levels; ++l) {
      const double right = b - len * std::ldexp(1.0, -l);
      if (right > left) {
        coarse.push_back({left, right});
        left = right;
      }
    }
    coarse.push_back({left, b});
  }

  std::vector<Panel> panels;
  const double positive_lambda = std::max(lambda_max, 0.0);
  for (const Panel& p : coarse) {
    const double w = p.b - p.a;
    const double dist = b - p.b;
    const double lam_eff =
        dist > 0 ? std::min(positive_lambda, 8.0 / dist) : positive_lambda;
    const int n_sub = std::clamp(static_cast<int>(std::ceil(w * lam_eff)), 1, 64);
    for (int s = 0; s < n_sub; ++s) {
      panels.push_back({p.a + w * s / n_sub, p.a + w * (s + 1) / n_sub});
    }
  }
  return panels;
}

Vector integrate(const SemigroupEvaluator& ev, const SourceTerm& f, double a,
                 double b, int levels) {
  Vector total = Vector::Zero(ev.dim());
  if (b <= a) return total;
  const double lambda_max = ev.op().spectral_abscissa_upper();
  for (const Panel& p : build_panels(a, b, f.nodes(), levels, lambda_max)) {
    const double mid = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    for (int g = 0; g < 4; ++g) {
      const double s = mid + half * kGlNode[g];
      total += (half * kGlWeight[g]) * ev.evolve(b - s, f.eval(s));
    }
  }
  return total;
}

}  // namespace

Vector duhamel_integral(const SemigroupEvaluator& ev, const SourceTerm& f,
                        double a, double b, const QuadratureOptions& q) {
  if (q.panels < 1) throw ValidationError("duhamel_integral: panels must be >= 1");
  if (b < a) throw ValidationError("duhamel_integral: b < a");
  if (f.dim() != ev.dim()) throw ValidationError("duhamel_integral: dimension mismatch");
  if (b > a && !f.spans(a, b)) {
    throw ValidationError("source term does not span the integration window");
  }
  return integrate(ev, f, a, b, q.panels);
}

YfResult compute_yf(const SemigroupEvaluator& ev, const SourceTerm& f, double T,
                    const QuadratureOptions& q) {
  if (!(T > 0)) throw ValidationError("compute_yf: T must be positive");
  if (!f.spans(0.0, T)) throw ValidationError("source term does not span [0, T]");

  YfResult result;
  if (f.is_zero()) {
    result.value = Vector::Zero(ev.dim());
    return result;
  }
  const Vector coarse = duhamel_integral(ev, f, 0.0, T, q);
  QuadratureOptions fine = q;
  fine.panels = 2 * q.panels;
  result.value = duhamel_integral(ev, f, 0.0, T, fine);
  result.refinement_delta =
      (result.value - coarse).norm() / (result.value.norm() + 1e-300);
  result.converged = result.refinement_delta < q.quad_tol;
  return result;
}

Trajectory solve_forward_duhamel(const SemigroupEvaluator& ev, const Vector& u0,
                                 const SourceTerm& f, RealVector grid,
                                 const ForwardOptions& opts) {
  if (u0.size() != ev.dim()) throw ValidationError("solve_forward_duhamel: u0 dimension");
  if (grid.size() < 2 || grid(0) != 0.0) {
    throw ValidationError("solve_forward_duhamel: grid must start at 0");
  }
  const double t_end = grid(grid.size() - 1);
  if (!f.spans(0.0, t_end)) {
    throw ValidationError("source term does not span the solution grid");
  }

  std::vector<Vector> values(grid.size());
  values[0] = u0;
  if (f.is_zero()) {
    for (Eigen::Index i = 1; i < grid.size(); ++i) {
      values[i] = ev.evolve(grid(i), u0);
    }
  } else {
    for (Eigen::Index i = 1; i < grid.size(); ++i) {
      const double dt = grid(i) - grid(i - 1);
      values[i] = ev.evolve(dt, values[i - 1]) +
                  duhamel_integral(ev, f, grid(i - 1), grid(i), opts.quad);
    }
  }

  std::vector<std::string> warnings;
  if (!f.is_zero()) {
    const YfResult yf = compute_yf(ev, f, t_end, opts.quad);
    if (!yf.converged) {
      warnings.push_back("duhamel quadrature did not meet quad_tol under "
                         "panel doubling");
    }
  }

  Trajectory traj(std::move(grid), std::move(values), ev.triple(), f,
                  std::move(warnings));

  // relative ODE defect ||u' + Au − f||_* at interior nodes
  const std::vector<Vector> deriv = grid_derivative(traj.grid(), traj.values());
  double worst = 0.0;
  for (Eigen::Index i = 1; i + 1 < traj.grid().size(); ++i) {
    const Vector au = ev.apply_generator(traj.values()[i]);
    const Vector ft = f.eval(traj.grid()(i));
    const double defect = ev.triple().dual_norm(deriv[i] + au - ft);
    const double scale = ev.triple().dual_norm(deriv[i]) +
                         ev.triple().dual_norm(au) +
                         ev.triple().dual_norm(ft) + 1e-300;
    worst = std::max(worst, defect / scale);
  }
  return with_residual(std::move(traj), worst);
}

Trajectory solve_forward_stepper(const CoerciveOperator& op, const Vector& u0,
                                 const SourceTerm& f, int steps, Scheme scheme) {
  if (steps < 1) throw ValidationError("solve_forward_stepper: steps must be >= 1");
  if (u0.size() != op.dim()) throw ValidationError("solve_forward_stepper: u0 dimension");
  if (f.t_begin() > 0.0) {
    throw ValidationError("solve_forward_stepper: source must span from t = 0");
  }
  const double T = f.t_end();
  const double dt = T / steps;
  if (dt * op.k() >= 1.0) {
    throw ValidationError(
        "solve_forward_stepper: dt*k >= 1, the implicit solve is not "
        "guaranteed nonsingular for a coercive operator");
  }

  RealVector grid(steps + 1);
  for (int i = 0; i <= steps; ++i) grid(i) = T * i / steps;

  const bool cn = scheme == Scheme::CrankNicolson;
  std::vector<Vector> values(steps + 1);
  values[0] = u0;

  if (op.backend() == Backend::Spectral) {
    const RealVector& lam = op.eigenvalues();
    for (int i = 0; i < steps; ++i) {
      const Vector fa = f.eval(grid(i));
      const Vector fb = f.eval(grid(i + 1));
      Vector next(op.dim());
      for (int j = 0; j < op.dim(); ++j) {
        if (cn) {
          const Complex rhs = (1.0 - 0.5 * dt * lam(j)) * values[i](j) +
                              0.5 * dt * (fa(j) + fb(j));
          next(j) = rhs / (1.0 + 0.5 * dt * lam(j));
        } else {
          next(j) = (values[i](j) + dt * fb(j)) / (1.0 + dt * lam(j));
        }
      }
      values[i + 1] = next;
    }
  } else {
    const Matrix& a = op.matrix_table();
    const Matrix id = Matrix::Identity(op.dim(), op.dim());
    Eigen::PartialPivLU<Matrix> lu(cn ? Matrix(id + 0.5 * dt * a)
                                      : Matrix(id + dt * a));
    const Matrix rhs_mat = cn ? Matrix(id - 0.5 * dt * a) : id;
    for (int i = 0; i < steps; ++i) {
      const Vector fa = f.eval(grid(i));
      const Vector fb = f.eval(grid(i + 1));
      const Vector rhs = cn ? Vector(rhs_mat * values[i] + 0.5 * dt * (fa + fb))
                            : Vector(values[i] + dt * fb);
      values[i + 1] = lu.solve(rhs);
    }
  }
  return Trajectory(std::move(grid), std::move(values), op.triple(), f);
}

GronwallReport verify_gronwall_bound(const CoerciveOperator& op,
                                     const Vector& u0, const SourceTerm& f,
                                     const Trajectory& traj) {
  const GelfandTriple& triple = op.triple();
  const RealVector& grid = traj.grid();
  const Eigen::Index n = grid.size();

  const std::vector<Vector> deriv = grid_derivative(grid, traj.values());
  RealVector v_sq(n), h_sq(n), dderiv_sq(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double vn = triple.v_norm(traj.values()[i]);
    const double hn = triple.h_norm(traj.values()[i]);
    const double pn = triple.dual_norm(deriv[i]);
    v_sq(i) = vn * vn;
    h_sq(i) = hn * hn;
    dderiv_sq(i) = pn * pn;
  }

  GronwallReport rep;
  rep.grid = grid;
  rep.lhs.resize(n);
  rep.rhs.resize(n);

  const double u0_h = triple.h_norm(u0);
  const double c3 = op.c3(), c4 = op.c4(), k = op.k();
  if (!(c4 > 0)) throw ValidationError("verify_gronwall_bound: needs C4 > 0");

  double int_v = 0.0, int_dd = 0.0, sup_h = h_sq(0);
  rep.lhs(0) = int_v + sup_h + int_dd;
  rep.rhs(0) = (2.0 + (2.0 * c3 * c3 + c4 + 1.0) / (c4 * c4)) *
               (c4 * u0_h * u0_h);
  rep.min_margin = rep.rhs(0) - rep.lhs(0);

  for (Eigen::Index i = 1; i < n; ++i) {
    const double h = grid(i) - grid(i - 1);
    int_v += 0.5 * h * (v_sq(i - 1) + v_sq(i));
    int_dd += 0.5 * h * (dderiv_sq(i - 1) + dderiv_sq(i));
    sup_h = std::max(sup_h, h_sq(i));
    rep.lhs(i) = int_v + sup_h + int_dd;

    const double t = grid(i);
    const double prefactor =
        2.0 + (2.0 * c3 * c3 + c4 + 1.0) / (c4 * c4) * std::exp(2.0 * k * t);
    rep.rhs(i) = prefactor *
                 (c4 * u0_h * u0_h + f.dual_l2_sq(triple, grid(0), t));
    rep.min_margin = std::min(rep.min_margin, rep.rhs(i) - rep.lhs(i));
  }
  return rep;
}

}  // namespace fvpkit
