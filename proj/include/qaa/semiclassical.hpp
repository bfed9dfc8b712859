#pragma once
/// Semiclassical (large-n) reduction of the interpolating schedule.
///
/// On the collective Bloch sphere with n_z = q and n_x = R(q) = sqrt(1-q^2)
/// (momentum p = 0 on the stable branch), the schedule becomes a classical
/// potential per l^3:
///
///   U(q, tau) = (1-tau) 2(1-R) + tau(1-tau) G_E(R, q) + tau G_P(q),
///
/// with G_E the six-term driver polynomial evaluated at the classical fields
/// and G_P the reduced cost cubic.  Quadratic fluctuations about a minimum
/// q* give an effective oscillator frequency
///
///   Omega*^2 = U''(q*) R(q*) omega_x(q*),
///   omega_x = 2(1-tau) - tau(1-tau) dG_E/dn_x,
///
/// and the exact spectral gap obeys gap/l^3 ~ eps Omega* with eps = 2/n.
/// omega_x is the transverse stiffness: where it crosses zero the momentum
/// direction softens, and with a nonzero cubic coefficient the stationary
/// point splits — the local (cusp-type) bifurcation.  First-order (global)
/// transitions instead show up as jumps of the global minimizer.
///
/// solve_a3 locates the boundary of the cusp regime for the pure
/// {N_x, N_z}/2 driver family: the strength gamma4_c at which the bifurcation
/// point collides with the adiabatic path, solved from the tangency condition
/// of the reduced cubic normal form.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qaa/problem.hpp"
#include "qaa/roots.hpp"
#include "qaa/spin_algebra.hpp"

namespace qaa {

/// Reduced model: cost cubic plus driver polynomial coefficients.
struct EffectiveModel {
  BetaCoefficients beta{};
  GammaCoefficients gamma{};

  EffectiveModel() = default;
  EffectiveModel(const BetaCoefficients& b, const GammaCoefficients& g)
      : beta(b), gamma(g) {}
  EffectiveModel(const HwpInstance& inst, const GammaCoefficients& g)
      : beta(inst.beta), gamma(g) {}
};

namespace detail {

/// G_E and partial derivatives at classical fields (n_x, n_z).
inline double ge_eval(const GammaCoefficients& g, double nx, double nz) {
  return nx * (g.g1 + nx * (g.g2 + nx * g.g3)) + g.g4 * nx * nz +
         g.g5 * nx * nz * nz + g.g6 * nx * nx * nz;
}
inline double ge_dx(const GammaCoefficients& g, double nx, double nz) {
  return g.g1 + 2.0 * g.g2 * nx + 3.0 * g.g3 * nx * nx + g.g4 * nz +
         g.g5 * nz * nz + 2.0 * g.g6 * nx * nz;
}
inline double ge_dz(const GammaCoefficients& g, double nx, double nz) {
  return g.g4 * nx + 2.0 * g.g5 * nx * nz + g.g6 * nx * nx;
}
inline double ge_dxx(const GammaCoefficients& g, double nx, double nz) {
  return 2.0 * g.g2 + 6.0 * g.g3 * nx + 2.0 * g.g6 * nz;
}
inline double ge_dxz(const GammaCoefficients& g, double nx, double nz) {
  return g.g4 + 2.0 * g.g5 * nz + 2.0 * g.g6 * nx;
}
inline double ge_dzz(const GammaCoefficients& g, double nx, double /*nz*/) {
  return 2.0 * g.g5 * nx;
}

/// d/dq of G_E(R(q), q) on the p = 0 branch.
inline double ge_total_dq(const GammaCoefficients& g, double q) {
  const double r = std::sqrt(std::max(0.0, 1.0 - q * q));
  return ge_dx(g, r, q) * (r > 0.0 ? -q / r : 0.0) + ge_dz(g, r, q);
}

}  // namespace detail

/// U(q, tau): the reduced potential per l^3.
inline double u_eval(const EffectiveModel& m, double tau, double q) {
  const double r = std::sqrt(std::max(0.0, 1.0 - q * q));
  return (1.0 - tau) * 2.0 * (1.0 - r) +
         tau * (1.0 - tau) * detail::ge_eval(m.gamma, r, q) +
         tau * gp_eval(m.beta, q);
}

/// dU/dq at fixed tau (diverges at |q| -> 1; callers clamp).
inline double u_deriv(const EffectiveModel& m, double tau, double q) {
  const double r = std::sqrt(std::max(1e-28, 1.0 - q * q));
  const double rp = -q / r;
  const double fp = detail::ge_dx(m.gamma, r, q) * rp + detail::ge_dz(m.gamma, r, q);
  return 2.0 * (1.0 - tau) * q / r + tau * (1.0 - tau) * fp +
         tau * gp_deriv(m.beta, q);
}

/// d^2U/dq^2 at fixed tau.
inline double u_second(const EffectiveModel& m, double tau, double q) {
  const double r = std::sqrt(std::max(1e-28, 1.0 - q * q));
  const double rp = -q / r;
  const double rpp = -1.0 / (r * r * r);
  const double gx = detail::ge_dx(m.gamma, r, q);
  const double fpp = detail::ge_dxx(m.gamma, r, q) * rp * rp + gx * rpp +
                     2.0 * detail::ge_dxz(m.gamma, r, q) * rp +
                     detail::ge_dzz(m.gamma, r, q);
  return 2.0 * (1.0 - tau) / (r * r * r) + tau * (1.0 - tau) * fpp +
         tau * gp_second(m.beta, q);
}

/// Transverse stiffness omega_x(q, tau) = 2(1-tau) - tau(1-tau) dG_E/dn_x.
inline double omega_x(const EffectiveModel& m, double tau, double q) {
  const double r = std::sqrt(std::max(0.0, 1.0 - q * q));
  return 2.0 * (1.0 - tau) - tau * (1.0 - tau) * detail::ge_dx(m.gamma, r, q);
}

/// Global minimum of U(., tau) on [-1, 1], plus the best coexisting local
/// minimum when one exists.  Interior grid minima are refined by bisection
/// on the derivative sign change to |U'| <= 1e-10 abscissa resolution;
/// boundary minima are kept at q = +-1.
struct MinimizeResult {
  double q_star = 0.0;
  double value = 0.0;
  bool boundary = false;          ///< global minimizer sits at q = +-1
  bool has_secondary = false;     ///< a coexisting local minimum exists
  double q_secondary = 0.0;
  double value_secondary = 0.0;
};

inline MinimizeResult minimize_u(const EffectiveModel& m, double tau,
                                 int grid = 2001) {
  if (grid < 101) throw std::invalid_argument("minimize_u: grid too coarse");
  std::vector<double> qs(grid), vs(grid);
  for (int i = 0; i < grid; ++i) {
    qs[i] = -1.0 + 2.0 * i / (grid - 1);
    vs[i] = u_eval(m, tau, qs[i]);
  }

  struct Candidate {
    double q, v;
    bool boundary;
  };
  std::vector<Candidate> cands;
  for (int i = 0; i < grid; ++i) {
    const bool is_min = (i == 0)          ? vs[0] < vs[1]
                        : (i == grid - 1) ? vs[grid - 1] < vs[grid - 2]
                                          : vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1];
    if (!is_min) continue;
    if (i == 0 || i == grid - 1) {
      cands.push_back({qs[i], vs[i], true});
      continue;
    }
    // Refine by bisection on U' inside the bracketing cell.
    double lo = std::max(qs[i - 1], -1.0 + 1e-12);
    double hi = std::min(qs[i + 1], 1.0 - 1e-12);
    double q = qs[i];
    if (u_deriv(m, tau, lo) < 0.0 && u_deriv(m, tau, hi) > 0.0)
      q = bisect_sign_change([&](double x) { return u_deriv(m, tau, x); }, lo, hi, 80);
    cands.push_back({q, u_eval(m, tau, q), false});
  }
  if (cands.empty()) {
    // Flat potential: report q = 0.
    return {0.0, u_eval(m, tau, 0.0), false, false, 0.0, 0.0};
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i)
    if (cands[i].v < cands[best].v) best = i;

  MinimizeResult out;
  out.q_star = cands[best].q;
  out.value = cands[best].v;
  out.boundary = cands[best].boundary;
  double second_v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (i == best || std::abs(cands[i].q - out.q_star) < 0.02) continue;
    if (cands[i].v < second_v) {
      second_v = cands[i].v;
      out.has_secondary = true;
      out.q_secondary = cands[i].q;
      out.value_secondary = cands[i].v;
    }
  }
  return out;
}

/// Quadratic-fluctuation analysis at the global minimum of U(., tau).
///
/// The stable momentum branch is p* = 0 when omega_x > 0 and p* = pi when
/// omega_x < 0; the inverse effective mass is R omega_x, so the oscillator
/// frequency obeys Omega*^2 = U'' R omega_x.  `mass_singular` marks
/// |omega_x| < 1e-8 (the stiffness zero where the harmonic picture fails);
/// `elliptic` requires Omega*^2 > 0.
struct StationaryPoint {
  double q_star = 0.0;
  double value = 0.0;
  double u_second = 0.0;
  double omega_x = 0.0;
  double mass_inv = 0.0;      ///< R(q*) omega_x
  double omega_eff_sq = 0.0;  ///< U'' R omega_x
  double omega_eff = 0.0;     ///< sqrt(max(omega_eff_sq, 0))
  double p_branch = 0.0;      ///< 0 or pi
  bool mass_singular = false;
  bool elliptic = false;
};

inline StationaryPoint stationary_analysis(const EffectiveModel& m, double tau,
                                           int grid = 2001) {
  const MinimizeResult min = minimize_u(m, tau, grid);
  StationaryPoint s;
  s.q_star = min.q_star;
  s.value = min.value;
  const double r = std::sqrt(std::max(0.0, 1.0 - min.q_star * min.q_star));
  s.u_second = min.boundary ? 0.0 : u_second(m, tau, min.q_star);
  s.omega_x = omega_x(m, tau, min.q_star);
  s.mass_inv = r * s.omega_x;
  s.omega_eff_sq = min.boundary ? 0.0 : s.u_second * s.mass_inv;
  s.omega_eff = s.omega_eff_sq > 0.0 ? std::sqrt(s.omega_eff_sq) : 0.0;
  s.p_branch = s.omega_x >= 0.0 ? 0.0 : 3.14159265358979323846;
  s.mass_singular = std::abs(s.omega_x) < 1e-8;
  s.elliptic = s.omega_eff_sq > 0.0;
  return s;
}

/// Semiclassical gap estimate at size n: eps Omega* with eps = 2/n.
inline double semiclassical_gap(const StationaryPoint& s, int n) {
  return 2.0 / n * s.omega_eff;
}

/// A stiffness-zero crossing along the adiabatic path with nonvanishing
/// cubic normal-form coefficient: the cusp-type bifurcation where the
/// momentum direction splits.  p_plus/p_minus are the emergent stationary
/// momenta probed at tau0 + 0.01 (or tau0 - 0.01 when the radicand requires
/// it): +-sqrt(6 b0 dtau / a0).
struct LocalBifurcation {
  double tau0 = 0.0;   ///< stiffness zero along the path
  double q0 = 0.0;     ///< minimizer at tau0
  double a0 = 0.0;     ///< cubic coefficient  tau(1-tau) Gxx (1 - q0^2)
  double b0 = 0.0;     ///< unfolding rate  [2 + (1-2 tau) Gx] R
  double c0 = 0.0;     ///< curvature U''(q0, tau0)
  double d0 = 0.0;     ///< cross term d^2U/(dq dtau)
  double p_plus = 0.0;
  double p_minus = 0.0;
};

inline std::vector<LocalBifurcation> detect_local_bifurcation(
    const EffectiveModel& m, const std::vector<double>& tau_grid,
    int q_grid = 2001) {
  if (tau_grid.size() < 2)
    throw std::invalid_argument("detect_local_bifurcation: need >= 2 grid points");
  std::vector<LocalBifurcation> events;
  auto stiffness = [&](double tau) {
    return omega_x(m, tau, minimize_u(m, tau, q_grid).q_star);
  };
  double prev = stiffness(tau_grid[0]);
  for (std::size_t k = 1; k < tau_grid.size(); ++k) {
    const double cur = stiffness(tau_grid[k]);
    bool crossing = prev * cur < 0.0;
    double root_hint = 0.0;
    bool have_hint = false;
    if (!crossing && cur == 0.0) {
      // The stiffness zero landed exactly on a grid point; count it as a
      // crossing only if the sign actually flips across the point.
      const double h = 0.25 * (tau_grid[k] - tau_grid[k - 1]);
      const double left = stiffness(tau_grid[k] - h);
      const double right = stiffness(tau_grid[k] + h);
      if (left * right < 0.0) {
        crossing = true;
        root_hint = tau_grid[k];
        have_hint = true;
      }
    }
    if (crossing) {
      const double tau0 =
          have_hint ? root_hint
                    : bisect_sign_change(stiffness, tau_grid[k - 1], tau_grid[k], 60);
      const double q0 = minimize_u(m, tau0, q_grid).q_star;
      const double r = std::sqrt(std::max(0.0, 1.0 - q0 * q0));
      const double gx = detail::ge_dx(m.gamma, r, q0);
      const double gxx = detail::ge_dxx(m.gamma, r, q0);
      LocalBifurcation ev;
      ev.tau0 = tau0;
      ev.q0 = q0;
      ev.a0 = tau0 * (1.0 - tau0) * gxx * (1.0 - q0 * q0);
      ev.b0 = (2.0 + (1.0 - 2.0 * tau0) * gx) * r;
      ev.c0 = u_second(m, tau0, q0);
      const double rp = r > 0.0 ? -q0 / r : 0.0;
      const double fp = gx * rp + detail::ge_dz(m.gamma, r, q0);
      ev.d0 = -2.0 * q0 / std::max(r, 1e-14) + (1.0 - 2.0 * tau0) * fp +
              gp_deriv(m.beta, q0);
      // Without a cubic term (linear-in-N_x drivers) the stiffness zero is
      // spectrally silent: no stationary-momentum splitting occurs.
      if (std::abs(ev.a0) > 1e-12) {
        double rad = 6.0 * ev.b0 * 0.01 / ev.a0;
        if (rad < 0.0) rad = -rad;
        ev.p_plus = std::sqrt(rad);
        ev.p_minus = -ev.p_plus;
        events.push_back(ev);
      }
    }
    prev = cur;
  }
  return events;
}

/// A first-order jump of the global minimizer: |Delta q*| > 0.05 between
/// adjacent grid points.  The barrier is measured at the midpoint tau as the
/// highest potential value between the two coexisting wells minus the mean
/// of the two well depths (0 if no coexisting well is resolved there).
struct GlobalBifurcation {
  double tau_mid = 0.0;
  double q_left = 0.0;
  double q_right = 0.0;
  double barrier = 0.0;
};

inline std::vector<GlobalBifurcation> detect_global_bifurcation(
    const EffectiveModel& m, const std::vector<double>& tau_grid,
    int q_grid = 2001) {
  if (tau_grid.size() < 2)
    throw std::invalid_argument("detect_global_bifurcation: need >= 2 grid points");
  std::vector<GlobalBifurcation> events;
  double prev_q = minimize_u(m, tau_grid[0], q_grid).q_star;
  for (std::size_t k = 1; k < tau_grid.size(); ++k) {
    const double cur_q = minimize_u(m, tau_grid[k], q_grid).q_star;
    if (std::abs(cur_q - prev_q) > 0.05) {
      GlobalBifurcation ev;
      ev.tau_mid = 0.5 * (tau_grid[k - 1] + tau_grid[k]);
      ev.q_left = prev_q;
      ev.q_right = cur_q;
      const MinimizeResult mid = minimize_u(m, ev.tau_mid, q_grid);
      if (mid.has_secondary) {
        const double lo = std::min(mid.q_star, mid.q_secondary);
        const double hi = std::max(mid.q_star, mid.q_secondary);
        double peak = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 400; ++i) {
          const double q = lo + (hi - lo) * i / 400.0;
          peak = std::max(peak, u_eval(m, ev.tau_mid, q));
        }
        ev.barrier = peak - 0.5 * (mid.value + mid.value_secondary);
      }
      events.push_back(ev);
    }
    prev_q = cur_q;
  }
  return events;
}

/// Adiabatic tracking of the potential minimum: integrate
///
///   dq*/dtau = -[G_P'(q) + (1-tau)^2 dG_E/dq] / [(1-tau) U''(q, tau)]
///
/// (the stationarity condition differentiated along the path, with dU'/dtau
/// simplified using U' = 0).  Embedded RK4 with step doubling to local
/// tolerance 1e-9.  Integration halts with `halted` set when the well
/// flattens (U'' < 1e-8, a fold), and with `reached_boundary` set when
/// |q| -> 1.
struct QStarTrajectory {
  std::vector<double> tau;
  std::vector<double> q;
  bool halted = false;            ///< stopped at a curvature collapse
  bool reached_boundary = false;  ///< stopped at |q| = 1
  double final_q = 0.0;
  double final_tau = 0.0;
};

inline QStarTrajectory q_star_ode(const EffectiveModel& m, double tau_begin,
                                  double tau_end,
                                  std::optional<double> q_start = std::nullopt,
                                  double tol = 1e-9) {
  if (!(tau_end > tau_begin))
    throw std::invalid_argument("q_star_ode: need tau_end > tau_begin");
  auto rhs = [&](double tau, double q) {
    const double upp = u_second(m, tau, q);
    return -(gp_deriv(m.beta, q) +
             (1.0 - tau) * (1.0 - tau) * detail::ge_total_dq(m.gamma, q)) /
           ((1.0 - tau) * upp);
  };
  auto rk4 = [&](double tau, double q, double h) {
    const double k1 = rhs(tau, q);
    const double k2 = rhs(tau + 0.5 * h, q + 0.5 * h * k1);
    const double k3 = rhs(tau + 0.5 * h, q + 0.5 * h * k2);
    const double k4 = rhs(tau + h, q + h * k3);
    return q + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  QStarTrajectory out;
  double tau = tau_begin;
  double q = q_start ? *q_start : minimize_u(m, tau_begin).q_star;
  double h = 1e-3 * (tau_end - tau_begin);
  out.tau.push_back(tau);
  out.q.push_back(q);

  while (tau < tau_end) {
    if (u_second(m, tau, q) < 1e-8) {
      out.halted = true;
      break;
    }
    if (std::abs(q) >= 1.0 - 1e-9) {
      out.reached_boundary = true;
      break;
    }
    h = std::min(h, tau_end - tau);
    const double y1 = rk4(tau, q, h);
    const double ymid = rk4(tau, q, 0.5 * h);
    const double y2 = rk4(tau + 0.5 * h, ymid, 0.5 * h);
    const double err = std::abs(y1 - y2) / 15.0;
    if (err < tol || h < 1e-14 * (tau_end - tau_begin)) {
      q = y2 + (y2 - y1) / 15.0;
      if (q > 1.0) q = 1.0;
      if (q < -1.0) q = -1.0;
      tau += h;
      out.tau.push_back(tau);
      out.q.push_back(q);
      if (err < 0.25 * tol) h *= 1.25;
    } else {
      h *= 0.5;
    }
  }
  out.final_q = q;
  out.final_tau = tau;
  return out;
}

/// Kind of candidate point located by solve_a3.
enum class A3Kind { none, root, tangent };

inline const char* to_string(A3Kind k) {
  switch (k) {
    case A3Kind::none: return "none";
    case A3Kind::root: return "root";
    default: return "tangent";
  }
}

/// Output of the cusp-boundary solver for the pure {N_x,N_z}/2 driver.
///
/// `candidate` marks that the tangency function had a root or a usable
/// interior near-miss; the gate booleans record the physical admissibility
/// checks, and `converged = candidate && all gates`.  The two schedule-shape
/// gates (minimizer jump and sign coherence) are evaluated lazily: when a
/// cheaper gate has already failed they are left false with `jump`/`q_min`
/// set to NaN.
struct BifurcationSolution {
  bool candidate = false;
  bool converged = false;
  A3Kind kind = A3Kind::none;
  double tau_c = 0.0;     ///< schedule location of the tangency/root
  double gamma4_c = 0.0;  ///< critical driver strength (equilibrium value)
  double x_c = 0.0;       ///< scaled transverse displacement at the event
  double residual = 0.0;  ///< |f(tau_c)|; 0 for sign-change roots
  bool gate_x_range = false;
  bool gate_gamma_finite = false;
  bool gate_jump = false;
  bool gate_sign = false;
  double jump = 0.0;   ///< largest minimizer step of the bare schedule
  double q_min = 0.0;  ///< bare-schedule minimizer at tau = 1
};

namespace detail {

/// Tangency function of the reduced normal form along the schedule.
inline double a3_fvalue(const BetaCoefficients& beta, double tau) {
  const double den = 2.0 - tau * (2.0 - beta[2]);
  const double s = beta[1] + beta[3];
  return tau * (1.0 - beta[2]) - 1.0 -
         (2.0 / 3.0) * tau * tau * (1.0 - tau) * s * s / (den * den);
}

/// Equilibrium driver strength at the candidate point; +-inf when the
/// denominator degenerates.
inline double a3_gamma_eq(const BetaCoefficients& beta, double tau) {
  const double den = (1.0 - tau) * (tau * beta[2] - 2.0 * (1.0 - tau));
  const double num = (1.0 - tau) * (3.0 * beta[1] + beta[3]) + tau * beta[2] * beta[3];
  if (std::abs(den) < 1e-12)
    return num >= 0.0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
  return num / den;
}

/// Minimizer-track scan of the bare (driverless) schedule: largest step of
/// argmin_q U_bare between consecutive tau rows, and the final minimizer.
struct BareScheduleScan {
  double jump = 0.0;
  double q_min = 0.0;
};

inline BareScheduleScan bare_schedule_scan(const BetaCoefficients& beta) {
  constexpr int nq = 501, nt = 201;
  static thread_local std::vector<double> qs, wall;
  if (qs.empty()) {
    qs.resize(nq);
    wall.resize(nq);
    for (int i = 0; i < nq; ++i) {
      qs[i] = -1.0 + 2.0 * i / (nq - 1);
      wall[i] = 2.0 * (1.0 - std::sqrt(std::max(0.0, 1.0 - qs[i] * qs[i])));
    }
  }
  std::array<double, nq> gp{};
  for (int i = 0; i < nq; ++i)
    gp[i] = qs[i] * (beta[1] + qs[i] * (beta[2] + qs[i] * beta[3]));

  BareScheduleScan out;
  double prev_q = 0.0;
  for (int k = 0; k < nt; ++k) {
    const double tau = static_cast<double>(k) / (nt - 1);
    int arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nq; ++i) {
      const double u = (1.0 - tau) * wall[i] + tau * gp[i];
      if (u < best) {
        best = u;
        arg = i;
      }
    }
    const double qmin = qs[arg];
    if (k > 0) out.jump = std::max(out.jump, std::abs(qmin - prev_q));
    prev_q = qmin;
    if (k == nt - 1) out.q_min = qmin;
  }
  return out;
}

inline double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace detail

/// Locate the cusp-regime boundary for the cost cubic `beta`: scan the
/// tangency function on (0, min(pole, 1)), take the first sign change (root)
/// or the best interior near-miss (tangent), then evaluate the equilibrium
/// strength, the scaled displacement, and the admissibility gates.
inline BifurcationSolution solve_a3(const BetaCoefficients& beta) {
  constexpr int kGrid = 600;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  BifurcationSolution out;
  out.jump = nan;
  out.q_min = nan;

  const double pole =
      beta[2] < 2.0 ? 2.0 / (2.0 - beta[2]) : std::numeric_limits<double>::infinity();
  const double hi = std::min(pole, 1.0) - 1e-9;
  if (hi <= 1e-9) return out;

  std::vector<double> taus(kGrid), vals(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    taus[i] = 1e-6 + (hi - 1e-6) * i / (kGrid - 1);
    vals[i] = detail::a3_fvalue(beta, taus[i]);
  }

  int root_at = -1;
  for (int i = 0; i + 1 < kGrid; ++i) {
    if (detail::sign_of(vals[i]) * detail::sign_of(vals[i + 1]) < 0.0) {
      root_at = i;
      break;
    }
  }
  auto f = [&](double t) { return detail::a3_fvalue(beta, t); };
  if (root_at >= 0) {
    out.tau_c = brent_root(f, taus[root_at], taus[root_at + 1], 1e-13);
    out.kind = A3Kind::root;
    out.residual = 0.0;
    out.candidate = true;
  } else {
    int imin = 0;
    for (int i = 1; i < kGrid; ++i)
      if (std::abs(vals[i]) < std::abs(vals[imin])) imin = i;
    if (imin == 0 || imin >= kGrid - 2) return out;
    double best = 0.0;
    out.tau_c = golden_min([&](double t) { return std::abs(f(t)); },
                           taus[imin - 1], taus[imin + 1], 1e-12, &best);
    out.kind = A3Kind::tangent;
    out.residual = best;
    out.candidate = true;
  }

  out.gamma4_c = detail::a3_gamma_eq(beta, out.tau_c);
  const double x_sq = (2.0 / 3.0) * (out.tau_c * (1.0 - beta[2]) - 1.0) / (1.0 - out.tau_c);
  const double s13 = beta[1] + beta[3];
  if (s13 == 0.0) {
    out.x_c = 0.0;
  } else {
    const double den = 2.0 - out.tau_c * (2.0 - beta[2]);
    out.x_c = detail::sign_of(s13 / den) * std::sqrt(std::max(x_sq, 0.0));
  }

  out.gate_x_range = x_sq >= 0.0 && x_sq <= 2.25;
  out.gate_gamma_finite = std::isfinite(out.gamma4_c);
  if (out.gate_x_range && out.gate_gamma_finite) {
    const detail::BareScheduleScan scan = detail::bare_schedule_scan(beta);
    out.jump = scan.jump;
    out.q_min = scan.q_min;
    out.gate_jump = scan.jump > 0.05;
    out.gate_sign = out.gamma4_c == 0.0 || scan.q_min == 0.0 ||
                    detail::sign_of(out.gamma4_c) == -detail::sign_of(scan.q_min);
  }
  out.converged = out.candidate && out.gate_x_range && out.gate_gamma_finite &&
                  out.gate_jump && out.gate_sign;
  return out;
}

}  // namespace qaa
