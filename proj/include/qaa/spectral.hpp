#pragma once
/// Exact spectral diagnostics of the interpolating schedule.
///
/// The schedule is H(tau) = (1-tau) H_B + tau(1-tau) H_E + tau H_P on the
/// (n+1)-dimensional symmetric subspace, with all three operators in RAW
/// (l^3-scaled) units, l = n/2.  Reported energies are divided by l^3 by
/// default, so gaps are directly comparable to the reduced semiclassical
/// potential; the adiabatic small parameter is eps = 2/n = 1/l.
///
/// The runtime proxy follows the standard adiabatic condition:
/// max_tau |<0| dH/dtau |1>| / (min_tau gap)^2, with
/// dH/dtau = H_P - H_B + (1 - 2 tau) H_E.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qaa/driver_ensemble.hpp"
#include "qaa/matrix.hpp"
#include "qaa/parallel.hpp"
#include "qaa/problem.hpp"
#include "qaa/roots.hpp"
#include "qaa/spin_algebra.hpp"

namespace qaa {

/// Driver specification for spectral runs: an explicit 8x8 clause block
/// (embedded exactly, weight-preserving terms included), a six-coefficient
/// polynomial (l^3 * sym_poly), or no intermediate Hamiltonian at all.
struct DriverSpec {
  enum class Kind { none, block, polynomial };

  Kind kind = Kind::none;
  DriverMatrix block;
  GammaCoefficients gamma;

  static DriverSpec none() { return {}; }
  static DriverSpec from_block(const DriverMatrix& a) {
    DriverSpec d;
    d.kind = Kind::block;
    d.block = a;
    return d;
  }
  static DriverSpec from_gamma(const GammaCoefficients& g) {
    DriverSpec d;
    d.kind = Kind::polynomial;
    d.gamma = g;
    return d;
  }

  /// RAW (l^3-scaled) intermediate Hamiltonian on the weight ladder.
  SubspaceOperator build(int n) const {
    switch (kind) {
      case Kind::none:
        return SubspaceOperator(n + 1, n + 1);
      case Kind::block:
        return build_he_symmetric(block, n, true);
      default: {
        SubspaceOperator he = sym_poly(n, gamma);
        he *= std::pow(0.5 * n, 3);
        return he;
      }
    }
  }

  /// Polynomial coefficients seen by the semiclassical limit.
  GammaCoefficients effective_gamma() const {
    switch (kind) {
      case Kind::none:
        return {};
      case Kind::block:
        return gammas_from_A(block);
      default:
        return gamma;
    }
  }
};

/// H(tau) from prebuilt RAW endpoint and intermediate operators.
inline SubspaceOperator assemble_h(double tau, const SubspaceOperator& hb,
                                   const SubspaceOperator& he,
                                   const SubspaceOperator& hp) {
  SubspaceOperator h = hb;
  h *= (1.0 - tau);
  if (he.rows() != 0) {
    SubspaceOperator t = he;
    t *= tau * (1.0 - tau);
    h += t;
  }
  SubspaceOperator p = hp;
  p *= tau;
  h += p;
  return h;
}

/// Options shared by the spectral routines.
struct SpectralOptions {
  HpMode hp_mode = HpMode::exact;  ///< finite-n runs default to the exact cost
  bool raw_units = false;          ///< report l^3-scaled energies instead of /l^3
  bool want_hdot = true;           ///< matrix elements of dH/dtau per grid point
  double refine_tol = 1e-6;        ///< absolute tau tolerance of the refinement
  int jobs = 1;
};

/// Two lowest levels, gap, and adiabatic matrix element along the schedule.
struct GapProfile {
  std::vector<double> tau;      ///< grid, linspace(0, 1)
  std::vector<double> lambda0;  ///< ground energy
  std::vector<double> lambda1;  ///< first excited energy
  std::vector<double> gap;      ///< lambda1 - lambda0
  std::vector<double> hdot;     ///< |<0| dH/dtau |1>|; empty unless requested
  double min_gap = 0.0;         ///< refined minimum gap
  double tau_at_min = 0.0;      ///< refined minimizing tau
  double hdot_max = 0.0;        ///< 0 when hdot not requested
  double runtime_bound = 0.0;   ///< hdot_max / min_gap^2; 0 when hdot not requested
};

/// Sweep the schedule on a uniform tau grid (>= 50 points), then refine the
/// minimum gap by golden-section search inside the bracketing grid cell.
/// Energies are divided by l^3 unless `raw_units` is set.
inline GapProfile gap_profile(const HwpInstance& inst, const DriverSpec& driver,
                              int n, int grid = 201,
                              const SpectralOptions& opts = {}) {
  if (grid < 50) throw std::invalid_argument("gap_profile: grid must be >= 50");
  if (n < 3) throw std::invalid_argument("gap_profile: requires n >= 3");

  const SubspaceOperator hb = build_hb(n);
  const SubspaceOperator he = driver.build(n);
  const SubspaceOperator hp = build_hp(n, inst, opts.hp_mode);
  const bool has_he = driver.kind != DriverSpec::Kind::none;
  const double scale = opts.raw_units ? 1.0 : 1.0 / std::pow(0.5 * n, 3);

  GapProfile out;
  out.tau.resize(grid);
  out.lambda0.resize(grid);
  out.lambda1.resize(grid);
  out.gap.resize(grid);
  if (opts.want_hdot) out.hdot.resize(grid);
  for (int i = 0; i < grid; ++i)
    out.tau[i] = static_cast<double>(i) / (grid - 1);

  parallel_for(opts.jobs, static_cast<std::size_t>(grid), [&](std::size_t i) {
    const double tau = out.tau[i];
    const SubspaceOperator h = assemble_h(tau, hb, he, hp);
    const Spectrum s = eigh(h, opts.want_hdot);
    out.lambda0[i] = s.eigenvalues[0] * scale;
    out.lambda1[i] = s.eigenvalues[1] * scale;
    out.gap[i] = (s.eigenvalues[1] - s.eigenvalues[0]) * scale;
    if (opts.want_hdot) {
      // dH/dtau = H_P - H_B + (1 - 2 tau) H_E, sandwiched between the two
      // lowest eigenvectors.
      const std::size_t dim = h.rows();
      double elem = 0.0;
      for (std::size_t r = 0; r < dim; ++r) {
        double row = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
          double d = hp(r, c) - hb(r, c);
          if (has_he) d += (1.0 - 2.0 * tau) * he(r, c);
          row += d * s.vectors(c, 1);
        }
        elem += s.vectors(r, 0) * row;
      }
      out.hdot[i] = std::abs(elem) * scale;
    }
  });

  // Locate and refine the minimum.
  std::size_t imin = 0;
  for (std::size_t i = 1; i < out.gap.size(); ++i)
    if (out.gap[i] < out.gap[imin]) imin = i;
  out.min_gap = out.gap[imin];
  out.tau_at_min = out.tau[imin];
  if (imin > 0 && imin + 1 < out.gap.size()) {
    auto gap_at = [&](double tau) {
      const Spectrum s = eigh(assemble_h(tau, hb, he, hp), false);
      return (s.eigenvalues[1] - s.eigenvalues[0]) * scale;
    };
    double best = 0.0;
    const double t = golden_min(gap_at, out.tau[imin - 1], out.tau[imin + 1],
                                opts.refine_tol, &best);
    if (best < out.min_gap) {
      out.min_gap = best;
      out.tau_at_min = t;
    }
  }

  if (opts.want_hdot) {
    for (double v : out.hdot) out.hdot_max = std::max(out.hdot_max, v);
    out.runtime_bound = out.hdot_max / (out.min_gap * out.min_gap);
  }
  return out;
}

/// Verdict of the exponential-vs-polynomial dichotomy fit.
enum class ScalingVerdict { exponential, polynomial };

inline const char* to_string(ScalingVerdict v) {
  return v == ScalingVerdict::exponential ? "exponential" : "polynomial";
}

/// Minimum gap per size plus both scaling fits:
///   exponential: ln gap = exp_intercept - exp_rate * n
///   power law:   ln gap = pow_intercept - pow_exponent * ln n
struct ScalingFit {
  std::vector<int> n_list;
  std::vector<double> min_gaps;
  double exp_intercept = 0.0, exp_rate = 0.0, exp_rss = 0.0;
  double pow_intercept = 0.0, pow_exponent = 0.0, pow_rss = 0.0;
  ScalingVerdict verdict = ScalingVerdict::exponential;
};

/// Fit the minimum gap across a ladder of sizes (>= 5 sizes, each n >= 20)
/// and classify: polynomial when the power law explains the data at least as
/// well as the exponential, or when the fitted exponential rate is below
/// `threshold_exponent` (an essentially flat exponential is not a closing
/// exponential gap).
inline ScalingFit min_gap_scaling(const HwpInstance& inst, const DriverSpec& driver,
                                  const std::vector<int>& n_list, int grid = 201,
                                  SpectralOptions opts = {},
                                  double threshold_exponent = 0.02) {
  if (n_list.size() < 5)
    throw std::invalid_argument("min_gap_scaling: need at least 5 sizes");
  for (int n : n_list)
    if (n < 20) throw std::invalid_argument("min_gap_scaling: sizes must be >= 20");

  opts.want_hdot = false;  // eigenvalues suffice for gap scaling
  ScalingFit fit;
  fit.n_list = n_list;
  fit.min_gaps.resize(n_list.size());
  for (std::size_t i = 0; i < n_list.size(); ++i)
    fit.min_gaps[i] = gap_profile(inst, driver, n_list[i], grid, opts).min_gap;

  std::vector<double> xs_n, xs_ln, ys;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    xs_n.push_back(static_cast<double>(n_list[i]));
    xs_ln.push_back(std::log(static_cast<double>(n_list[i])));
    ys.push_back(std::log(fit.min_gaps[i]));
  }
  const LineFit fe = fit_line(xs_n, ys);
  const LineFit fp = fit_line(xs_ln, ys);
  fit.exp_intercept = fe.intercept;
  fit.exp_rate = -fe.slope;
  fit.exp_rss = fe.rss;
  fit.pow_intercept = fp.intercept;
  fit.pow_exponent = -fp.slope;
  fit.pow_rss = fp.rss;
  fit.verdict = (fp.rss < fe.rss || fit.exp_rate < threshold_exponent)
                    ? ScalingVerdict::polynomial
                    : ScalingVerdict::exponential;
  return fit;
}

/// Squared overlap of the instantaneous ground state at `tau` with the
/// cost-minimizing weight sector.  Degenerate cost minima (ties within
/// 1e-9 relative to the cost scale) are summed over.
inline double ground_overlap(const HwpInstance& inst, const DriverSpec& driver,
                             int n, double tau,
                             const SpectralOptions& opts = {}) {
  if (n < 3) throw std::invalid_argument("ground_overlap: requires n >= 3");
  const SubspaceOperator hb = build_hb(n);
  const SubspaceOperator he = driver.build(n);
  const SubspaceOperator hp = build_hp(n, inst, opts.hp_mode);
  const Spectrum s = eigh(assemble_h(tau, hb, he, hp), true);

  double cost_min = hp(0, 0);
  double cost_scale = std::abs(hp(0, 0));
  for (int w = 1; w <= n; ++w) {
    cost_min = std::min(cost_min, hp(w, w));
    cost_scale = std::max(cost_scale, std::abs(hp(w, w)));
  }
  const double tol = 1e-9 * std::max(1.0, cost_scale);
  double overlap = 0.0;
  for (int w = 0; w <= n; ++w)
    if (hp(w, w) <= cost_min + tol) overlap += s.vectors(w, 0) * s.vectors(w, 0);
  return overlap;
}

}  // namespace qaa
