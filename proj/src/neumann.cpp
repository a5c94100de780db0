#include "fvpkit/neumann.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "fvpkit/errors.hpp"
#include "fvpkit/fvp.hpp"
#include "fvpkit/semigroup.hpp"

namespace fvpkit {

NeumannModel::NeumannModel(Geometry geometry, int n, RealVector eigenvalues,
                           std::vector<ModeIndex> modes, CoerciveOperator op)
    : geometry_(geometry),
      n_(n),
      eigenvalues_(std::move(eigenvalues)),
      modes_(std::move(modes)),
      op_(std::move(op)) {}

NeumannModel build_model(const Geometry& geometry, int n) {
  if (n < 2) throw ValidationError("build_model: N must be >= 2");

  RealVector lambda(n);
  std::vector<ModeIndex> modes;
  modes.reserve(n);

  if (const Interval* iv = std::get_if<Interval>(&geometry)) {
    if (!(iv->length > 0)) throw ValidationError("build_model: length must be positive");
    for (int j = 0; j < n; ++j) {
      const double w = j * M_PI / iv->length;
      lambda(j) = w * w;
      modes.push_back({j, -1});
    }
  } else {
    const Rectangle& rect = std::get<Rectangle>(geometry);
    if (!(rect.lx > 0) || !(rect.ly > 0)) {
      throw ValidationError("build_model: lengths must be positive");
    }
    // Enumerate enough lattice modes to cover the N smallest eigenvalues,
    // ties broken lexicographically in (p, q).
    const int reach = n + 2;
    std::vector<std::tuple<double, int, int>> all;
    all.reserve(static_cast<std::size_t>(reach) * reach);
    for (int p = 0; p < reach; ++p) {
      for (int q = 0; q < reach; ++q) {
        const double wx = p * M_PI / rect.lx;
        const double wy = q * M_PI / rect.ly;
        all.emplace_back(wx * wx + wy * wy, p, q);
      }
    }
    std::sort(all.begin(), all.end());
    for (int j = 0; j < n; ++j) {
      lambda(j) = std::get<0>(all[j]);
      modes.push_back({std::get<1>(all[j]), std::get<2>(all[j])});
    }
  }

  GelfandTriple triple = GelfandTriple::spectral(lambda);
  // Dirichlet-form constants: |s(v,w)| ≤ ‖v‖‖w‖ and s(v,v) = ‖v‖² − |v|².
  CoerciveOperator op =
      CoerciveOperator::spectral(lambda, std::move(triple), 1.0, 1.0, 1.0);
  return NeumannModel(geometry, n, std::move(lambda), std::move(modes),
                      std::move(op));
}

BoundaryFlux check_neumann_bc(const NeumannModel& model, const Vector& coeffs,
                              int mesh) {
  if (!model.is_interval()) {
    throw ValidationError(
        "check_neumann_bc: rectangle geometry unsupported in v1");
  }
  if (mesh < 32) throw ValidationError("check_neumann_bc: mesh must be >= 32");
  if (coeffs.size() != model.truncation()) {
    throw ValidationError("check_neumann_bc: coefficient count mismatch");
  }
  const double length = std::get<Interval>(model.geometry()).length;
  const double h = length / mesh;

  auto synthesize = [&](double x) {
    Complex value(0.0, 0.0);
    for (int j = 0; j < model.truncation(); ++j) {
      value += coeffs(j) * std::cos(j * M_PI * x / length);
    }
    return value;
  };

  const Complex u0 = synthesize(0.0);
  const Complex u1 = synthesize(h);
  const Complex un = synthesize(length);
  const Complex un1 = synthesize(length - h);
  return {std::abs((u1 - u0) / h), std::abs((un - un1) / h)};
}

WeylReport weyl_check(const NeumannModel& model) {
  if (model.truncation() < 32) {
    throw ValidationError("weyl_check: insufficient spectrum (need N >= 32)");
  }
  const RealVector& lam = model.eigenvalues();
  const int n = model.truncation();

  // Least squares on log λ_j = log C + α log j over the upper half.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int j = n / 2; j < n; ++j) {
    if (lam(j) <= 0) continue;
    const double x = std::log(static_cast<double>(j));
    const double y = std::log(lam(j));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  WeylReport rep;
  const double denom = count * sxx - sx * sx;
  rep.alpha = (count * sxy - sx * sy) / denom;
  rep.prefactor = std::exp((sy - rep.alpha * sx) / count);
  if (model.is_interval()) {
    rep.window_lo = 1.9;
    rep.window_hi = 2.1;
  } else {
    rep.window_lo = 0.85;
    rep.window_hi = 1.15;
  }
  rep.in_window = rep.alpha >= rep.window_lo && rep.alpha <= rep.window_hi;
  return rep;
}

std::vector<InstabilityRow> instability_experiment(const NeumannModel& model,
                                                   double T,
                                                   std::span<const int> modes) {
  if (!(T > 0)) throw ValidationError("instability_experiment: T must be positive");
  const SemigroupEvaluator ev(model.op());
  const SourceTerm zero = SourceTerm::zero(model.truncation(), T);

  std::vector<InstabilityRow> rows;
  for (int j : modes) {
    if (j < 0 || j >= model.truncation()) {
      throw ValidationError("instability_experiment: mode outside truncation");
    }
    const double lam = model.eigenvalues()(j);
    InstabilityRow row{j, lam, 0.0, false};
    if (T * lam > 700.0) {
      row.overflowed = true;  // reported, not computed
      rows.push_back(row);
      continue;
    }
    Vector u_T = Vector::Zero(model.truncation());
    u_T(j) = Complex(1.0, 0.0);
    const Recovery rec =
        recover_initial_state(ev, FvpData{zero, u_T, T}, RecoveryOptions{});
    row.norm = model.triple().h_norm(rec.u0);
    rows.push_back(row);
  }
  return rows;
}

HolderReport holder_gate(const SourceTerm& f, double sigma_threshold) {
  if (f.node_count() < 3) {
    throw ValidationError("holder_gate: need at least 3 nodes");
  }
  const RealVector& nodes = f.nodes();
  const std::vector<Vector>& samples = f.samples();

  double norm_scale = 0.0;
  for (const Vector& s : samples) norm_scale = std::max(norm_scale, s.norm());

  // Modulus-of-continuity envelope: for each gap size, the worst |Δf|.
  std::map<long long, std::pair<double, double>> envelope;  // gap -> (dt, max df)
  const double span = nodes(nodes.size() - 1) - nodes(0);
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    for (Eigen::Index j = i + 1; j < nodes.size(); ++j) {
      const double dt = nodes(j) - nodes(i);
      const double df = (samples[j] - samples[i]).norm();
      const long long key = std::llround(dt / span * 1e9);
      auto [it, inserted] = envelope.try_emplace(key, dt, df);
      if (!inserted) it->second.second = std::max(it->second.second, df);
    }
  }

  HolderReport rep;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& [key, entry] : envelope) {
    const auto [dt, df] = entry;
    if (df <= 1e-14 * std::max(1.0, norm_scale)) continue;
    const double x = std::log(dt);
    const double y = std::log(df);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) {
    // f is constant on the samples: every exponent passes with constant 0.
    rep.sigma = 1.0;
    rep.constant = 0.0;
    rep.passes = true;
    return rep;
  }
  const double denom = count * sxx - sx * sx;
  rep.sigma = std::clamp((count * sxy - sx * sy) / denom, 0.0, 1.0);
  for (const auto& [key, entry] : envelope) {
    const auto [dt, df] = entry;
    rep.constant = std::max(rep.constant, df / std::pow(dt, rep.sigma));
  }
  rep.passes = rep.sigma >= sigma_threshold - 1e-9 && rep.sigma > 0.0;
  return rep;
}

}  // namespace fvpkit
