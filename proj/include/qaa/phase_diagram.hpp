#pragma once
/// Phase boundary of the cusp regime and ensemble success statistics.
///
/// gamma_c_of_L scans a box of clause weights, solves the cusp-boundary
/// condition at every grid point, and reports the largest admissible critical
/// driver strength |gamma4_c| — floored by the analytic envelope from
/// pure-tilt costs (beta2 = beta3 = 0), whose critical strength approaches
/// the tilt |beta1| itself.
///
/// success_fraction draws entry-uniform random drivers and measures how often
/// they simultaneously (a) push on the correct side of the critical strength
/// (gamma4 beyond gamma4_c, matching its sign) and (b) keep the quadratic
/// couplings from overwhelming the stabilizing terms.  The analytic
/// companion numbers are interval estimates: treating |gamma2| + |gamma6|
/// against the midpoint threshold gives a mass acceptance of 23/32
/// independent of L, and the side criterion approaches 1/2 for large L, so
/// the product estimate is 23/64.
///
/// verify_success_by_gap replaces the static criteria with the measured
/// quantity itself: the minimum-gap scaling verdict across a ladder of sizes
/// for each sampled driver embedded exactly (weight-preserving terms and
/// all), classified against an exponential/power-law dichotomy fit.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qaa/driver_ensemble.hpp"
#include "qaa/parallel.hpp"
#include "qaa/problem.hpp"
#include "qaa/rng.hpp"
#include "qaa/semiclassical.hpp"
#include "qaa/spectral.hpp"

namespace qaa {

/// Clause-weight box scanned by gamma_c_of_L.
enum class PhaseDomain {
  zero_to_L,  ///< p in [0, L]^4 (physical nonnegative weights)
  symmetric   ///< p in [-L, L]^4
};

/// Result of the boundary scan.
struct PhaseBoundary {
  double gamma_c = 0.0;      ///< max(grid_max, envelope)
  double grid_max = 0.0;     ///< largest converged |gamma4_c| on the grid
  ClauseWeights argmax_p{};  ///< grid point achieving grid_max
  double tau_at_max = 0.0;
  double x_at_max = 0.0;
  double residual_at_max = 0.0;
  A3Kind kind_at_max = A3Kind::none;
  double envelope = 0.0;     ///< max |beta1| over the domain (analytic floor)
  ClauseWeights envelope_p{};
  std::size_t n_converged = 0;
  std::size_t n_grid = 0;
};

/// Scan p over the domain box with `grid_per_axis` points per axis (>= 5),
/// solve the cusp boundary at each point, and take the largest admissible
/// critical strength.  Deterministic for any `jobs`.
inline PhaseBoundary gamma_c_of_L(double L, int grid_per_axis = 21,
                                  PhaseDomain domain = PhaseDomain::zero_to_L,
                                  int jobs = 1) {
  if (grid_per_axis < 5)
    throw std::invalid_argument("gamma_c_of_L: grid_per_axis must be >= 5");
  if (L <= 0.0) throw std::invalid_argument("gamma_c_of_L: L must be > 0");

  const int g = grid_per_axis;
  std::vector<double> axis(g);
  for (int i = 0; i < g; ++i)
    axis[i] = domain == PhaseDomain::zero_to_L ? L * i / (g - 1)
                                               : -L + 2.0 * L * i / (g - 1);

  const std::size_t total = static_cast<std::size_t>(g) * g * g * g;
  std::vector<double> score(total, -1.0);  // |gamma4_c| if converged, else -1
  auto p_of_index = [&](std::size_t idx) {
    ClauseWeights p{};
    for (int a = 3; a >= 0; --a) {
      p[a] = axis[idx % g];
      idx /= g;
    }
    return p;
  };
  parallel_for(jobs, total, [&](std::size_t idx) {
    const BifurcationSolution sol = solve_a3(betas_from_p(p_of_index(idx)));
    if (sol.converged) score[idx] = std::abs(sol.gamma4_c);
  });

  PhaseBoundary out;
  out.n_grid = total;
  std::size_t best_idx = 0;
  bool any = false;
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (score[idx] < 0.0) continue;
    ++out.n_converged;
    if (!any || score[idx] > score[best_idx]) {
      best_idx = idx;
      any = true;
    }
  }
  if (any) {
    out.argmax_p = p_of_index(best_idx);
    const BifurcationSolution sol = solve_a3(betas_from_p(out.argmax_p));
    out.grid_max = std::abs(sol.gamma4_c);
    out.tau_at_max = sol.tau_c;
    out.x_at_max = sol.x_c;
    out.residual_at_max = sol.residual;
    out.kind_at_max = sol.kind;
  }

  // Analytic floor: |beta1| is maximized at a corner of the box.
  for (int mask = 0; mask < 16; ++mask) {
    ClauseWeights corner{};
    for (int a = 0; a < 4; ++a) {
      const double lo = domain == PhaseDomain::zero_to_L ? 0.0 : -L;
      corner[a] = (mask >> a) & 1 ? L : lo;
    }
    const double b1 = std::abs(betas_from_p(corner)[1]);
    if (b1 > out.envelope) {
      out.envelope = b1;
      out.envelope_p = corner;
    }
  }
  out.gamma_c = std::max(out.grid_max, out.envelope);
  return out;
}

/// Monte-Carlo ensemble statistics of entry-uniform drivers, alongside the
/// interval-model estimates.
struct SuccessReport {
  double L = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double gamma4_c = 0.0;          ///< critical strength of the instance (0 if unresolved)
  double frac_joint = 0.0;        ///< measured: side and mass criteria together
  double frac_side = 0.0;         ///< measured marginal
  double frac_mass = 0.0;         ///< measured marginal
  double frac_gamma_ok = 0.0;     ///< interval model: clamp((4L - |g4c|) / 8L)
  double frac_mass_ok = 0.0;      ///< interval model: 23/32, L-independent
  double analytic_estimate = 0.0; ///< large-L product: 23/64
};

/// Side criterion: the sampled driver pushes at least as hard as the
/// critical strength, on the correct side.
inline bool driver_side_ok(const GammaCoefficients& g, double gamma4_c) {
  if (gamma4_c < 0.0) return g.g4 <= -std::abs(gamma4_c);
  if (gamma4_c > 0.0) return g.g4 >= std::abs(gamma4_c);
  return true;
}

/// Mass criterion: quadratic couplings bounded by the stabilizing terms,
/// |g2| + |g6| <= 1 + (|g1| + 3|g3| + |g4| + |g5|)/2.
inline bool driver_mass_ok(const GammaCoefficients& g) {
  return std::abs(g.g2) + std::abs(g.g6) <=
         1.0 + 0.5 * (std::abs(g.g1) + 3.0 * std::abs(g.g3) + std::abs(g.g4) +
                      std::abs(g.g5));
}

inline SuccessReport success_fraction(const HwpInstance& inst, double L,
                                      std::size_t samples, std::uint64_t seed,
                                      int jobs = 1) {
  if (samples < 1000)
    throw std::invalid_argument("success_fraction: need at least 10^3 samples");
  if (L <= 0.0) throw std::invalid_argument("success_fraction: L must be > 0");

  const BifurcationSolution sol = solve_a3(inst.beta);
  const double g4c = sol.converged ? sol.gamma4_c : 0.0;

  std::vector<std::uint8_t> side(samples), mass(samples);
  parallel_for(jobs, samples, [&](std::size_t k) {
    const DriverMatrix a = sample_A(L, subseed(seed, k));
    const GammaCoefficients g = gammas_from_A(a);
    side[k] = driver_side_ok(g, g4c) ? 1 : 0;
    mass[k] = driver_mass_ok(g) ? 1 : 0;
  });

  SuccessReport rep;
  rep.L = L;
  rep.samples = samples;
  rep.seed = seed;
  rep.gamma4_c = g4c;
  std::size_t n_side = 0, n_mass = 0, n_joint = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    n_side += side[k];
    n_mass += mass[k];
    n_joint += side[k] & mass[k];
  }
  rep.frac_side = static_cast<double>(n_side) / samples;
  rep.frac_mass = static_cast<double>(n_mass) / samples;
  rep.frac_joint = static_cast<double>(n_joint) / samples;
  const double fg = (4.0 * L - std::abs(g4c)) / (8.0 * L);
  rep.frac_gamma_ok = std::min(1.0, std::max(0.0, fg));
  rep.frac_mass_ok = 23.0 / 32.0;
  rep.analytic_estimate = 0.5 * 23.0 / 32.0;
  return rep;
}

/// Per-driver outcome of the gap-scaling verification.
struct GapVerdict {
  std::uint64_t sample_seed = 0;
  bool side_ok = false;
  bool mass_ok = false;
  ScalingVerdict verdict = ScalingVerdict::exponential;
  double exp_rate = 0.0;
  double pow_exponent = 0.0;
};

/// Ensemble comparison of the static success criteria against the measured
/// gap-scaling dichotomy.
struct GapVerdictReport {
  std::size_t samples = 0;
  std::vector<int> ladder;        ///< sizes used for the scaling fit
  double poly_fraction = 0.0;     ///< fraction classified polynomial by gaps
  double joint_fraction = 0.0;    ///< fraction passing the static criteria
  std::vector<GapVerdict> verdicts;
};

/// For each sampled driver, embed it exactly on a ladder of five sizes
/// spanning [20, n_max], fit the minimum gap against both scaling laws, and
/// classify.  Bounded to n_max <= 200 and samples <= 1000.
inline GapVerdictReport verify_success_by_gap(const HwpInstance& inst, double L,
                                              std::size_t samples, int n_max,
                                              double threshold_exponent = 0.02,
                                              std::uint64_t seed = 0, int jobs = 1,
                                              int grid = 161) {
  if (n_max > 200)
    throw std::invalid_argument("verify_success_by_gap: n_max must be <= 200");
  if (n_max < 28)
    throw std::invalid_argument("verify_success_by_gap: n_max must be >= 28");
  if (samples > 1000)
    throw std::invalid_argument("verify_success_by_gap: samples must be <= 1000");
  if (samples == 0)
    throw std::invalid_argument("verify_success_by_gap: need samples >= 1");

  const BifurcationSolution sol = solve_a3(inst.beta);
  const double g4c = sol.converged ? sol.gamma4_c : 0.0;

  GapVerdictReport rep;
  rep.samples = samples;
  rep.ladder.resize(5);
  for (int k = 0; k < 5; ++k)
    rep.ladder[k] = static_cast<int>(std::lround(20.0 + k * (n_max - 20.0) / 4.0));
  rep.verdicts.resize(samples);

  SpectralOptions opts;
  opts.want_hdot = false;
  opts.refine_tol = 1e-8;

  parallel_for(jobs, samples, [&](std::size_t k) {
    const std::uint64_t sk = subseed(seed, k);
    const DriverMatrix a = sample_A(L, sk);
    const GammaCoefficients g = gammas_from_A(a);
    GapVerdict& v = rep.verdicts[k];
    v.sample_seed = sk;
    v.side_ok = driver_side_ok(g, g4c);
    v.mass_ok = driver_mass_ok(g);

    std::vector<double> xs_n, xs_ln, ys;
    for (int n : rep.ladder) {
      const double mg =
          gap_profile(inst, DriverSpec::from_block(a), n, grid, opts).min_gap;
      xs_n.push_back(static_cast<double>(n));
      xs_ln.push_back(std::log(static_cast<double>(n)));
      ys.push_back(std::log(std::max(mg, 1e-300)));
    }
    const LineFit fe = fit_line(xs_n, ys);
    const LineFit fp = fit_line(xs_ln, ys);
    v.exp_rate = -fe.slope;
    v.pow_exponent = -fp.slope;
    v.verdict = (fp.rss < fe.rss || v.exp_rate < threshold_exponent)
                    ? ScalingVerdict::polynomial
                    : ScalingVerdict::exponential;
  });

  std::size_t n_poly = 0, n_joint = 0;
  for (const GapVerdict& v : rep.verdicts) {
    n_poly += v.verdict == ScalingVerdict::polynomial ? 1 : 0;
    n_joint += (v.side_ok && v.mass_ok) ? 1 : 0;
  }
  rep.poly_fraction = static_cast<double>(n_poly) / samples;
  rep.joint_fraction = static_cast<double>(n_joint) / samples;
  return rep;
}

}  // namespace qaa
