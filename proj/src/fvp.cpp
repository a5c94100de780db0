#include "fvpkit/fvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fvpkit/errors.hpp"

namespace fvpkit {

namespace {

constexpr double kExpGuard = 700.0;

std::vector<int> default_levels(int dim) {
  std::vector<int> levels;
  for (int n : {dim / 4, dim / 2, dim}) {
    if (n >= 1 && (levels.empty() || n > levels.back())) levels.push_back(n);
  }
  if (levels.size() < 2) levels = {std::max(1, dim / 2), dim};
  return levels;
}

}  // namespace

void validate(const FvpData& data) {
  if (!(data.T > 0)) throw ValidationError("final value data: T must be positive");
  if (!data.u_T.allFinite()) throw ValidationError("final value data: u_T not finite");
  if (data.u_T.size() != data.f.dim()) {
    throw ValidationError("final value data: u_T and f dimensions differ");
  }
  if (!data.f.spans(0.0, data.T)) {
    throw ValidationError("final value data: f does not span [0, T]");
  }
}

CompatibilityReport check_compatibility(const SemigroupEvaluator& ev,
                                        const FvpData& data,
                                        const CompatibilityOptions& opts) {
  validate(data);
  if (data.u_T.size() != ev.dim()) {
    throw ValidationError("check_compatibility: dimension mismatch");
  }

  CompatibilityReport rep;
  const YfResult yf = compute_yf(ev, data.f, data.T, opts.quad);
  rep.yf_converged = yf.converged;
  rep.difference = data.u_T - yf.value;
  rep.log_kappa = ev.log_kappa(data.T);
  rep.kappa = std::exp(rep.log_kappa);

  const GelfandTriple& triple = ev.triple();

  if (ev.op().backend() == Backend::Spectral) {
    std::vector<int> levels =
        opts.levels.empty() ? default_levels(ev.dim()) : opts.levels;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i] < 1 || levels[i] > ev.dim() ||
          (i > 0 && levels[i] <= levels[i - 1])) {
        throw ValidationError(
            "check_compatibility: levels must increase and stay within the "
            "truncation");
      }
    }
    rep.levels = levels;

    const RealVector& lam = ev.op().eigenvalues();
    bool overflowed = false;
    for (int n : levels) {
      std::vector<double> terms;
      terms.reserve(2 * n);
      for (int j = 0; j < n; ++j) {
        const double mag = std::abs(rep.difference(j));
        if (mag == 0.0) continue;
        const double lc = std::log(mag);
        terms.push_back(2.0 * lc);
        const double amp = data.T * lam(j) + lc;
        terms.push_back(2.0 * amp);
        if (amp > kExpGuard && !rep.overflow_mode) {
          rep.overflow_mode = j;
          overflowed = true;
        }
      }
      const double log_g = terms.empty()
                               ? -std::numeric_limits<double>::infinity()
                               : 0.5 * log_sum_exp(terms);
      rep.log_graph_norms.push_back(log_g);
      rep.graph_norms.push_back(log_g > kExpGuard
                                    ? std::numeric_limits<double>::infinity()
                                    : std::exp(log_g));
    }
    rep.verdict = classify_log_graph_sequence(
        rep.log_graph_norms, opts.domain_tol, opts.growth_threshold, overflowed);
  } else {
    // Bounded-spectrum backend: a single level, gated by conditioning.
    rep.levels = {ev.dim()};
    try {
      const Vector amplified =
          ev.evolve_inverse(data.T, rep.difference).value;
      const double d_h = triple.h_norm(rep.difference);
      const double a_h = triple.h_norm(amplified);
      const double g = std::sqrt(d_h * d_h + a_h * a_h);
      rep.graph_norms = {g};
      rep.log_graph_norms = {g > 0 ? std::log(g)
                                   : -std::numeric_limits<double>::infinity()};
      rep.verdict = rep.kappa <= opts.kappa_max ? Verdict::InDomain
                                                : Verdict::Diverging;
    } catch (const OverflowError& e) {
      rep.overflow_mode = e.mode_index;
      rep.verdict = Verdict::Diverging;
      rep.graph_norms = {std::numeric_limits<double>::infinity()};
      rep.log_graph_norms = {e.exponent};
    }
  }

  if (rep.verdict == Verdict::InDomain) {
    // ||(f,u_T)||_Y² = |u_T|² + ∫||f||_*² + |e^{TA}(u_T−y_f)|²
    const double u_h = triple.h_norm(data.u_T);
    const double f_sq = data.f.dual_l2_sq(triple, 0.0, data.T);
    const double log_g = rep.log_graph_norms.back();
    const double d_h = triple.h_norm(rep.difference);
    const double amp_sq =
        std::isfinite(log_g)
            ? std::max(0.0, std::exp(2.0 * log_g) - d_h * d_h)
            : 0.0;
    rep.y_norm = std::sqrt(u_h * u_h + f_sq + amp_sq);
  }
  return rep;
}

Recovery recover_initial_state(const SemigroupEvaluator& ev, const FvpData& data,
                               const RecoveryOptions& opts) {
  Recovery rec;
  rec.report = check_compatibility(ev, data, opts.compat);
  if (rec.report.verdict != Verdict::InDomain && !opts.force && !opts.cutoff) {
    throw IncompatibleDataError(rec.report);
  }
  const SemigroupEvaluator::Inverse inv =
      ev.evolve_inverse(data.T, rec.report.difference, opts.cutoff);
  rec.u0 = inv.value;
  rec.kappa = inv.kappa;
  rec.clipped_modes = inv.clipped_modes;
  return rec;
}

double assembled_stability_constant(const CoerciveOperator& op, double T) {
  const GelfandTriple& triple = op.triple();
  const double c1 = triple.c1(), c2 = triple.c2();
  const double c3 = op.c3(), c4 = op.c4(), k = op.k();
  if (!(c4 > 0)) throw ValidationError("assembled_stability_constant: needs C4 > 0");
  const double equiv_sq = 2.0 + c2 * c2 + (c2 * c2) / (c1 * c1 * T);
  const double gronwall =
      2.0 + (2.0 * c3 * c3 + c4 + 1.0) / (c4 * c4) * std::exp(2.0 * k * T);
  return std::sqrt(equiv_sq * gronwall * std::max(c4, 1.0));
}

FvpSolution solve_fvp(const SemigroupEvaluator& ev, const FvpData& data,
                      RealVector grid, const RecoveryOptions& ropts,
                      const ForwardOptions& fopts) {
  if (grid.size() < 2 || grid(0) != 0.0 ||
      std::abs(grid(grid.size() - 1) - data.T) > 1e-12 * std::max(1.0, data.T)) {
    throw ValidationError("solve_fvp: grid must run from 0 to T");
  }
  Recovery rec = recover_initial_state(ev, data, ropts);
  Trajectory traj = solve_forward_duhamel(ev, rec.u0, data.f, std::move(grid), fopts);

  FvpSolution sol{std::move(traj), std::move(rec.report),
                  assembled_stability_constant(ev.op(), data.T), 0.0};
  sol.final_mismatch = ev.triple().h_norm(sol.trajectory.back() - data.u_T);
  return sol;
}

FvpData apply_parabolic_operator(const CoerciveOperator& op,
                                 const Trajectory& traj) {
  if (traj.source()) {
    return FvpData{*traj.source(), traj.back(), traj.t_end()};
  }
  // No attached source: reconstruct f = u' + Au from grid differences.
  const std::vector<Vector> deriv = grid_derivative(traj.grid(), traj.values());
  std::vector<Vector> f_samples(traj.values().size());
  for (std::size_t i = 0; i < f_samples.size(); ++i) {
    f_samples[i] = deriv[i] + op.apply(traj.values()[i]);
  }
  SourceTerm f(traj.grid(), std::move(f_samples));
  return FvpData{std::move(f), traj.back(), traj.t_end()};
}

YNorm data_y_norm(const SemigroupEvaluator& ev, const FvpData& data,
                  const QuadratureOptions& q) {
  validate(data);
  const GelfandTriple& triple = ev.triple();
  const YfResult yf = compute_yf(ev, data.f, data.T, q);
  const Vector d = data.u_T - yf.value;

  YNorm out;
  const double u_h = triple.h_norm(data.u_T);
  const double f_sq = data.f.dual_l2_sq(triple, 0.0, data.T);

  if (ev.op().backend() == Backend::Spectral) {
    const RealVector& lam = ev.op().eigenvalues();
    std::vector<double> terms;
    for (Eigen::Index j = 0; j < d.size(); ++j) {
      const double mag = std::abs(d(j));
      if (mag == 0.0) continue;
      terms.push_back(2.0 * (data.T * lam(j) + std::log(mag)));
    }
    const double log_amp_sq = terms.empty()
                                  ? -std::numeric_limits<double>::infinity()
                                  : log_sum_exp(terms);
    std::vector<double> pieces;
    if (u_h > 0) pieces.push_back(2.0 * std::log(u_h));
    if (f_sq > 0) pieces.push_back(std::log(f_sq));
    pieces.push_back(log_amp_sq);
    out.log_value = 0.5 * log_sum_exp(pieces);
  } else {
    const Vector amplified = ev.evolve_inverse(data.T, d).value;
    const double a_h = triple.h_norm(amplified);
    out.log_value =
        0.5 * std::log(u_h * u_h + f_sq + a_h * a_h + 1e-300);
  }
  out.finite = out.log_value <= kExpGuard;
  out.value = out.finite ? std::exp(out.log_value)
                         : std::numeric_limits<double>::infinity();
  return out;
}

double y_distance_same_source(const SemigroupEvaluator& ev, const FvpData& a,
                              const FvpData& b, const QuadratureOptions&) {
  if (a.u_T.size() != b.u_T.size() || std::abs(a.T - b.T) > 1e-12) {
    throw ValidationError("y_distance_same_source: incompatible data pairs");
  }
  // δf = 0, so ||δd||_Y² = |δu_T|² + |e^{TA}δu_T|².
  const GelfandTriple& triple = ev.triple();
  const Vector delta = a.u_T - b.u_T;
  const double d_h = triple.h_norm(delta);

  if (ev.op().backend() == Backend::Spectral) {
    const RealVector& lam = ev.op().eigenvalues();
    std::vector<double> terms;
    if (d_h > 0) terms.push_back(2.0 * std::log(d_h));
    for (Eigen::Index j = 0; j < delta.size(); ++j) {
      const double mag = std::abs(delta(j));
      if (mag == 0.0) continue;
      terms.push_back(2.0 * (a.T * lam(j) + std::log(mag)));
    }
    if (terms.empty()) return 0.0;
    const double log_d = 0.5 * log_sum_exp(terms);
    return log_d > kExpGuard ? std::numeric_limits<double>::infinity()
                             : std::exp(log_d);
  }
  const Vector amplified = ev.evolve_inverse(a.T, delta).value;
  const double a_h = triple.h_norm(amplified);
  return std::sqrt(d_h * d_h + a_h * a_h);
}

CompatibleSample sample_compatible_data(const SemigroupEvaluator& ev, double T,
                                        std::uint64_t seed,
                                        const DataClassOptions& opts) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.5, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> freq(0.0, 3.0 / T);

  const int n = ev.dim();
  Vector u0(n);
  for (int j = 0; j < n; ++j) {
    const double r =
        mag(rng) * std::pow(1.0 + j, -opts.u0_decay_power);
    const double p = phase(rng);
    u0(j) = Complex(r * std::cos(p), r * std::sin(p));
  }

  if (opts.homogeneous) {
    return {u0, SourceTerm::zero(n, T)};
  }

  // Mode amplitudes decay like e^{−Tλ_j} so the data stay representable
  // under the e^{TA} amplification.
  RealVector decay(n);
  if (ev.op().backend() == Backend::Spectral) {
    for (int j = 0; j < n; ++j) {
      decay(j) = std::exp(-T * ev.op().eigenvalues()(j));
    }
  } else {
    decay.setOnes();
  }

  const int m = std::max(2, opts.f_time_nodes);
  RealVector nodes(m);
  for (int i = 0; i < m; ++i) nodes(i) = T * i / (m - 1);

  std::vector<double> amp(n), omega(n), theta(n);
  for (int j = 0; j < n; ++j) {
    amp[j] = opts.f_amplitude * mag(rng) * decay(j);
    omega[j] = freq(rng);
    theta[j] = phase(rng);
  }
  std::vector<Vector> samples(m, Vector(n));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      samples[i](j) =
          amp[j] * Complex(std::cos(omega[j] * nodes(i) + theta[j]),
                           std::sin(omega[j] * nodes(i) + theta[j]));
    }
  }
  return {u0, SourceTerm(nodes, std::move(samples))};
}

RoundtripReport homeomorphism_roundtrip(const SemigroupEvaluator& ev,
                                        const RealVector& grid, int trials,
                                        std::uint64_t seed,
                                        const DataClassOptions& opts,
                                        const ForwardOptions& fopts) {
  if (trials < 1) throw ValidationError("homeomorphism_roundtrip: trials >= 1");
  const double T = grid(grid.size() - 1);

  RoundtripReport rep;
  rep.trials = trials;
  for (int trial = 0; trial < trials; ++trial) {
    const CompatibleSample sample =
        sample_compatible_data(ev, T, seed + 0x51ed2701u * trial, opts);

    // Forward trajectory u and its data d = 𝒫u = (f, u(T)).
    const Trajectory u = solve_forward_duhamel(ev, sample.u0, sample.f,
                                               grid, fopts);
    rep.worst_residual = std::max(rep.worst_residual, u.max_relative_residual());
    const FvpData d = apply_parabolic_operator(ev.op(), u);

    // 𝒭d and the two round trips.
    const FvpSolution back = solve_fvp(ev, d, grid, {}, fopts);
    const FvpData d2 = apply_parabolic_operator(ev.op(), back.trajectory);

    const YNorm dn = data_y_norm(ev, d, fopts.quad);
    const double data_err =
        y_distance_same_source(ev, d2, d, fopts.quad) / dn.value;
    const double traj_err =
        x_norm_distance(back.trajectory, u, ev.triple()) / u.x_norm();

    rep.worst_data_error = std::max(rep.worst_data_error, data_err);
    rep.worst_trajectory_error = std::max(rep.worst_trajectory_error, traj_err);
  }
  return rep;
}

}  // namespace fvpkit
