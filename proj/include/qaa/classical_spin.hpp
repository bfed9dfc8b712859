#pragma once
/// Classical collective-spin dynamics of the schedule.
///
/// In the large-n limit the Heisenberg equations close on the unit Bloch
/// vector n = (n_x, n_y, n_z).  The classical Hamiltonian per l^3 is
///
///   H(n, tau) = (1-tau) 2(1-n_x) + tau(1-tau) G_E(n_x, n_z) + tau G_P(n_z),
///
/// and the precession field is its gradient,
///
///   omega = (dH/dn_x, 0, dH/dn_z)
///         = (-2(1-tau) + tau(1-tau) dG_E/dn_x,
///            0,
///            tau(1-tau) dG_E/dn_z + tau G_P'(n_z)),
///
/// with equation of motion dn/dt = omega x n.  At tau = 0 the field is
/// (-2, 0, 0) and the start state n = (1, 0, 0) is anti-aligned with it:
/// the adiabatic invariant J = (omega . n)/|omega| starts at -1 and stays
/// near -1 for slow schedules.  The integrator never renormalizes n, so the
/// norm drift is an honest accuracy diagnostic.
///
/// Time is scaled: tau(t) = min(t / T_scaled, 1).  Energies are per l^3, so
/// T_scaled plays the role of the physical anneal time in those units.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qaa/problem.hpp"
#include "qaa/semiclassical.hpp"

namespace qaa {

using Vec3 = std::array<double, 3>;

/// Classical energy per l^3 at fixed tau.
inline double classical_energy(const EffectiveModel& m, double tau, const Vec3& n) {
  return (1.0 - tau) * 2.0 * (1.0 - n[0]) +
         tau * (1.0 - tau) * detail::ge_eval(m.gamma, n[0], n[2]) +
         tau * gp_eval(m.beta, n[2]);
}

/// Precession field omega(n, tau) = grad_n H (y-component always 0).
inline Vec3 omega_field(const EffectiveModel& m, double tau, const Vec3& n) {
  const double wx = -2.0 * (1.0 - tau) + tau * (1.0 - tau) * detail::ge_dx(m.gamma, n[0], n[2]);
  const double wz = tau * (1.0 - tau) * detail::ge_dz(m.gamma, n[0], n[2]) +
                    tau * gp_deriv(m.beta, n[2]);
  return {wx, 0.0, wz};
}

/// One recorded point of a classical trajectory.
struct SpinSample {
  double t = 0.0;
  double tau = 0.0;
  Vec3 n{};
  Vec3 omega{};
};

struct SpinTrajectory {
  std::vector<SpinSample> samples;
  double t_final = 0.0;
  Vec3 n_final{};
  double final_nz = 0.0;
  double max_norm_drift = 0.0;  ///< max | |n| - 1 | along the run
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;
};

struct IntegrateOptions {
  double tol = 1e-10;                    ///< local step-doubling error target
  std::optional<double> frozen_tau;      ///< integrate at fixed tau (conservation tests)
  std::size_t max_samples = 16384;       ///< decimation bound on recorded points
};

/// Integrate dn/dt = omega x n from n = (1, 0, 0) over t in [0, T_scaled]
/// with embedded RK4 (step doubling, Richardson-extrapolated accept).
inline SpinTrajectory integrate_spin(const EffectiveModel& m, double T_scaled,
                                     const IntegrateOptions& opts = {}) {
  if (T_scaled <= 0.0)
    throw std::invalid_argument("integrate_spin: T_scaled must be > 0");

  auto tau_of = [&](double t) {
    return opts.frozen_tau ? *opts.frozen_tau : std::min(t / T_scaled, 1.0);
  };
  auto rhs = [&](double t, const Vec3& n) {
    const Vec3 w = omega_field(m, tau_of(t), n);
    return Vec3{-w[2] * n[1], w[2] * n[0] - w[0] * n[2], w[0] * n[1]};
  };
  auto rk4 = [&](double t, const Vec3& y, double h) {
    const Vec3 k1 = rhs(t, y);
    Vec3 tmp;
    for (int i = 0; i < 3; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const Vec3 k2 = rhs(t + 0.5 * h, tmp);
    for (int i = 0; i < 3; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const Vec3 k3 = rhs(t + 0.5 * h, tmp);
    for (int i = 0; i < 3; ++i) tmp[i] = y[i] + h * k3[i];
    const Vec3 k4 = rhs(t + h, tmp);
    Vec3 out;
    for (int i = 0; i < 3; ++i)
      out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
  };

  SpinTrajectory traj;
  Vec3 n{1.0, 0.0, 0.0};
  double t = 0.0;
  double h = 1e-3 * T_scaled;
  std::size_t keep_stride = 1, since_kept = 0;

  auto record = [&](double tt, const Vec3& nn) {
    if (since_kept++ % keep_stride != 0) return;
    traj.samples.push_back({tt, tau_of(tt), nn, omega_field(m, tau_of(tt), nn)});
    if (traj.samples.size() > opts.max_samples) {
      // Decimate in place: keep every other sample, double the stride.
      std::vector<SpinSample> half;
      half.reserve(traj.samples.size() / 2 + 1);
      for (std::size_t i = 0; i < traj.samples.size(); i += 2)
        half.push_back(traj.samples[i]);
      traj.samples.swap(half);
      keep_stride *= 2;
    }
  };
  record(t, n);

  while (t < T_scaled) {
    h = std::min(h, T_scaled - t);
    const Vec3 y1 = rk4(t, n, h);
    const Vec3 mid = rk4(t, n, 0.5 * h);
    const Vec3 y2 = rk4(t + 0.5 * h, mid, 0.5 * h);
    double err = 0.0;
    for (int i = 0; i < 3; ++i) err = std::max(err, std::abs(y1[i] - y2[i]));
    err /= 15.0;
    if (err < opts.tol || h < 1e-14 * T_scaled) {
      for (int i = 0; i < 3; ++i) n[i] = y2[i] + (y2[i] - y1[i]) / 15.0;
      t += h;
      ++traj.steps_accepted;
      const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
      traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(norm - 1.0));
      record(t, n);
      if (err < 0.25 * opts.tol) h *= 1.25;
    } else {
      ++traj.steps_rejected;
      h *= 0.5;
    }
  }
  // Make sure the final state is recorded regardless of stride phase.
  if (traj.samples.empty() || traj.samples.back().t != t)
    traj.samples.push_back({t, tau_of(t), n, omega_field(m, tau_of(t), n)});
  traj.t_final = t;
  traj.n_final = n;
  traj.final_nz = n[2];
  return traj;
}

/// Adiabaticity diagnostics of a recorded trajectory.
///
/// J = (omega . n)/|omega| is the classical adiabatic invariant (J = -1 at
/// the start).  The instantaneous misalignment is the angle between n and
/// sign(J0) * omega-hat; because n precesses about the field, the meaningful
/// quantity is its sliding average over three precession periods 2 pi/|omega|.
struct AdiabaticDiagnostics {
  double j0 = 0.0;
  double j_drift = 0.0;            ///< max |J(t) - J0|
  double max_misalignment = 0.0;   ///< max of the 3-period windowed mean angle
  double final_misalignment = 0.0; ///< windowed mean angle at the end
};

inline AdiabaticDiagnostics adiabatic_diagnostics(const SpinTrajectory& traj) {
  const std::size_t m = traj.samples.size();
  if (m < 2) throw std::invalid_argument("adiabatic_diagnostics: trajectory too short");

  std::vector<double> ts(m), js(m), mis(m), wnorm(m);
  for (std::size_t i = 0; i < m; ++i) {
    const SpinSample& s = traj.samples[i];
    const double nw = std::sqrt(s.omega[0] * s.omega[0] + s.omega[1] * s.omega[1] +
                                s.omega[2] * s.omega[2]);
    const double nn = std::sqrt(s.n[0] * s.n[0] + s.n[1] * s.n[1] + s.n[2] * s.n[2]);
    wnorm[i] = nw;
    ts[i] = s.t;
    if (nw < 1e-14 || nn < 1e-14) {
      js[i] = i > 0 ? js[i - 1] : -1.0;
      mis[i] = i > 0 ? mis[i - 1] : 0.0;
      continue;
    }
    const double dot = (s.omega[0] * s.n[0] + s.omega[1] * s.n[1] + s.omega[2] * s.n[2]) / nw;
    js[i] = dot / nn;
    mis[i] = 0.0;  // filled below once J0 is known
  }
  AdiabaticDiagnostics out;
  out.j0 = js[0];
  const double sgn = out.j0 >= 0.0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < m; ++i) {
    out.j_drift = std::max(out.j_drift, std::abs(js[i] - out.j0));
    const double c = std::min(1.0, std::max(-1.0, sgn * js[i]));
    mis[i] = std::acos(c);
  }

  // Sliding trapezoidal mean of mis over [t_i - w_i, t_i], w_i = 3 periods.
  std::vector<double> prefix(m, 0.0);  // integral of mis dt up to sample i
  for (std::size_t i = 1; i < m; ++i)
    prefix[i] = prefix[i - 1] + 0.5 * (mis[i] + mis[i - 1]) * (ts[i] - ts[i - 1]);
  std::size_t lo = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (wnorm[i] < 1e-14) continue;
    const double window = 3.0 * 2.0 * 3.14159265358979323846 / wnorm[i];
    const double t_lo = ts[i] - window;
    if (t_lo < ts[0]) continue;  // need one full window of history
    while (lo + 1 < i && ts[lo + 1] <= t_lo) ++lo;
    // Linear interpolation of the prefix integral at t_lo within [lo, lo+1].
    const double seg = ts[lo + 1] - ts[lo];
    const double frac = seg > 0.0 ? (t_lo - ts[lo]) / seg : 0.0;
    const double mis_lo = mis[lo] + frac * (mis[lo + 1] - mis[lo]);
    const double int_lo = prefix[lo] + 0.5 * (mis[lo] + mis_lo) * (t_lo - ts[lo]);
    const double mean = (prefix[i] - int_lo) / window;
    out.max_misalignment = std::max(out.max_misalignment, mean);
    out.final_misalignment = mean;
  }
  return out;
}

}  // namespace qaa
