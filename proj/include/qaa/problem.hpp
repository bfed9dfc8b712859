#pragma once
/// Generalized Hamming-weight cost functions and the schedule endpoints.
///
/// A problem instance is a 4-vector p = (p0, p1, p2, p3) of clause weights:
/// every ordered triple of distinct bits contributes p_k when exactly k of its
/// bits are 1.  The total cost of a weight-w string is
///
///   E(w) = p0*C(n-w,3)*6 + p1*w*C(n-w,2)*6 + p2*C(w,2)*(n-w)*6 + p3*C(w,3)*6
///
/// counting ordered triples (each unordered triple 3! times).  In the large-n
/// limit E(w)/l^3 -> G_P(q) with l = n/2, q = 1 - 2w/n, and
///
///   G_P(q) = beta0 + beta1 q + beta2 q^2 + beta3 q^3,
///
/// a cubic whose coefficients are fixed linear combinations of p.  The cost
/// Hamiltonian is diagonal in the weight basis; the transverse-field start
/// Hamiltonian is H_B = l^3 * 2(I - N_x).  All Hamiltonians here are RAW
/// (l^3-scaled); spectral routines divide by l^3 for reporting.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qaa/matrix.hpp"
#include "qaa/spin_algebra.hpp"

namespace qaa {

/// Clause weights (p0, p1, p2, p3): p_k is the cost of a triple with k ones.
using ClauseWeights = std::array<double, 4>;

/// Cubic coefficients (beta0, beta1, beta2, beta3) of the reduced cost
/// G_P(q) = beta0 + beta1 q + beta2 q^2 + beta3 q^3 on q in [-1, 1].
using BetaCoefficients = std::array<double, 4>;

/// Linear map from clause weights to reduced-cost coefficients:
///   beta_k = xi_k/2 * [p1 + (-1)^k p2] + C(3,k)/6 * [p0 + (-1)^k p3],
/// with xi = (+1, +1, -1, -1).
inline BetaCoefficients betas_from_p(const ClauseWeights& p) {
  return {0.5 * (p[1] + p[2]) + (p[0] + p[3]) / 6.0,
          0.5 * (p[1] - p[2]) + 0.5 * (p[0] - p[3]),
          -0.5 * (p[1] + p[2]) + 0.5 * (p[0] + p[3]),
          -0.5 * (p[1] - p[2]) + (p[0] - p[3]) / 6.0};
}

/// G_P(q) and its first two derivatives in q.
inline double gp_eval(const BetaCoefficients& b, double q) {
  return b[0] + q * (b[1] + q * (b[2] + q * b[3]));
}
inline double gp_deriv(const BetaCoefficients& b, double q) {
  return b[1] + q * (2.0 * b[2] + q * 3.0 * b[3]);
}
inline double gp_second(const BetaCoefficients& b, double q) {
  return 2.0 * b[2] + 6.0 * b[3] * q;
}

/// A Hamming-weight problem instance: clause weights plus the derived cubic.
struct HwpInstance {
  ClauseWeights p{};
  BetaCoefficients beta{};

  HwpInstance() : HwpInstance(ClauseWeights{0.0, 0.0, 0.0, 0.0}) {}
  explicit HwpInstance(const ClauseWeights& weights)
      : p(weights), beta(betas_from_p(weights)) {}

  /// The reference triple-flip instance p = (0, 3, 1, 1):
  /// beta = (13/6, 1/2, -3/2, -7/6), a double-minimum cost with the global
  /// minimum at q = +1 (w = 0).
  static HwpInstance reference_instance() {
    return HwpInstance(ClauseWeights{0.0, 3.0, 1.0, 1.0});
  }
};

namespace detail {

/// C(k, m) for m <= 3 as a double, zero when k < m.
inline double choose_small(std::int64_t k, int m) {
  if (k < m) return 0.0;
  const double kd = static_cast<double>(k);
  switch (m) {
    case 0: return 1.0;
    case 1: return kd;
    case 2: return kd * (kd - 1.0) / 2.0;
    case 3: return kd * (kd - 1.0) * (kd - 2.0) / 6.0;
    default: throw std::invalid_argument("choose_small: m must be <= 3");
  }
}

}  // namespace detail

/// Exact cost of a weight-w string of n bits under clause weights p,
/// summed over the C(n, 3) unordered triples of distinct positions:
///   E(w) = sum_k p_k * C(w, k) * C(n-w, 3-k).
/// Normalization: E(w) -> l^3 * G_P(1 - 2w/n) as n -> infinity, so the
/// exact and asymptotic modes of build_hp agree to O(1/n).
inline double exact_cost(int n, int w, const ClauseWeights& p) {
  if (n < 3) throw std::invalid_argument("exact_cost: requires n >= 3");
  if (w < 0 || w > n) throw std::invalid_argument("exact_cost: w out of range");
  double total = 0.0;
  for (int k = 0; k <= 3; ++k)
    total += p[k] * detail::choose_small(w, k) * detail::choose_small(n - w, 3 - k);
  return total;
}

/// Shape classification of the reduced cost G_P on [-1, 1].
enum class CostShape { monotonic, single_minimum, double_minimum };

inline std::string to_string(CostShape s) {
  switch (s) {
    case CostShape::monotonic: return "monotonic";
    case CostShape::single_minimum: return "single-minimum";
    default: return "double-minimum";
  }
}

/// Classification of the cost landscape: the list of local minima of G_P on
/// [-1, 1] (interior stationary points with G_P'' > 0, plus endpoints where
/// the one-sided slope points inward), the global minimizer, and the shape
/// tag.  Ties within 1e-10 prefer an interior minimum over an endpoint, then
/// the larger q (lower Hamming weight).
struct CostClassification {
  CostShape shape = CostShape::monotonic;
  double q_star = 0.0;                 ///< global minimizer of G_P on [-1, 1]
  double value = 0.0;                  ///< G_P(q_star)
  std::vector<double> local_minima;    ///< all local minima, ascending in q
};

inline CostClassification classify_cost(const BetaCoefficients& beta) {
  constexpr double kBoundaryEps = 1e-12;
  constexpr double kTieEps = 1e-10;
  std::vector<double> minima;        // interior first, then endpoints
  std::vector<bool> interior_flag;

  // Interior stationary points: roots of beta1 + 2 beta2 q + 3 beta3 q^2.
  std::vector<double> roots;
  const double a = 3.0 * beta[3], b2 = 2.0 * beta[2], c = beta[1];
  if (std::abs(a) > 0.0) {
    const double disc = b2 * b2 - 4.0 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      // Numerically stable quadratic roots.
      const double qfac = -0.5 * (b2 + (b2 >= 0.0 ? sq : -sq));
      if (qfac != 0.0) {
        roots.push_back(qfac / a);
        roots.push_back(c / qfac);
      } else {
        roots.push_back(0.0);
      }
    }
  } else if (std::abs(b2) > 0.0) {
    roots.push_back(-c / b2);
  }
  for (double r : roots) {
    if (std::abs(r) < 1.0 - kBoundaryEps && gp_second(beta, r) > 0.0)
      minima.push_back(r), interior_flag.push_back(true);
  }

  // Endpoints: q = -1 is a local minimum when the cost increases inward
  // (G_P'(-1) > 0, or flat with positive curvature); q = +1 mirrors this.
  const double d_m1 = gp_deriv(beta, -1.0), d_p1 = gp_deriv(beta, 1.0);
  if (d_m1 > 0.0 || (d_m1 == 0.0 && gp_second(beta, -1.0) > 0.0))
    minima.push_back(-1.0), interior_flag.push_back(false);
  if (d_p1 < 0.0 || (d_p1 == 0.0 && gp_second(beta, 1.0) > 0.0))
    minima.push_back(1.0), interior_flag.push_back(false);

  CostClassification out;
  if (beta[1] == 0.0 && beta[2] == 0.0 && beta[3] == 0.0) {
    // Constant cost: a plateau.  Report the smallest-|q| representative
    // and tag the shape monotonic.
    out.shape = CostShape::monotonic;
    out.q_star = 0.0;
    out.value = gp_eval(beta, 0.0);
    return out;
  }

  // Candidates for the global minimum: the local minima plus both
  // endpoints (a compact interval can hide its minimum at a boundary
  // point where the derivative tests degenerate, e.g. a triple root).
  std::vector<double> cand(minima);
  std::vector<bool> cand_interior(interior_flag);
  for (double e : {-1.0, 1.0}) {
    if (std::find(cand.begin(), cand.end(), e) == cand.end())
      cand.push_back(e), cand_interior.push_back(false);
  }

  // Global minimum with tie rules: lowest value; within kTieEps prefer
  // interior over endpoint, then larger q.
  std::size_t best = 0;
  for (std::size_t i = 1; i < cand.size(); ++i) {
    const double vi = gp_eval(beta, cand[i]);
    const double vb = gp_eval(beta, cand[best]);
    if (vi < vb - kTieEps) {
      best = i;
    } else if (vi <= vb + kTieEps) {
      if (cand_interior[i] != cand_interior[best]) {
        if (cand_interior[i]) best = i;
      } else if (cand[i] > cand[best]) {
        best = i;
      }
    }
  }
  out.q_star = cand[best];
  out.value = gp_eval(beta, cand[best]);
  const bool global_interior = cand_interior[best];

  std::vector<double> sorted(minima);
  std::sort(sorted.begin(), sorted.end());
  out.local_minima = std::move(sorted);

  if (minima.size() >= 2)
    out.shape = CostShape::double_minimum;
  else if (minima.size() == 1 && global_interior)
    out.shape = CostShape::single_minimum;
  else
    out.shape = CostShape::monotonic;
  return out;
}

/// Mode selector for the cost Hamiltonian: `asymptotic` uses the reduced
/// cubic l^3 G_P(q_w) (the large-n object every semiclassical formula refers
/// to); `exact` uses the combinatorial count E(w).
enum class HpMode { asymptotic, exact };

/// Diagonal cost Hamiltonian on the (n+1)-dimensional weight ladder, RAW
/// (l^3) units.  Row w corresponds to Hamming weight w, q_w = 1 - 2w/n.
inline SubspaceOperator build_hp(int n, const HwpInstance& inst,
                                 HpMode mode = HpMode::asymptotic) {
  if (n < 2) throw std::invalid_argument("build_hp: requires n >= 2");
  const double l3 = std::pow(0.5 * n, 3);
  SubspaceOperator h(n + 1, n + 1);
  for (int w = 0; w <= n; ++w) {
    if (mode == HpMode::asymptotic) {
      h(w, w) = l3 * gp_eval(inst.beta, 1.0 - 2.0 * w / n);
    } else {
      h(w, w) = exact_cost(n, w, inst.p);
    }
  }
  return h;
}

/// Transverse-field start Hamiltonian H_B = l^3 * 2 (I - N_x), RAW units.
/// Its ground state is the uniform superposition (spin coherent state along
/// +x) with eigenvalue 0.
inline SubspaceOperator build_hb(int n) {
  SubspaceOperator nx = build_nx(n);
  const double l3 = std::pow(0.5 * n, 3);
  SubspaceOperator h = SubspaceOperator::identity(n + 1);
  h *= 2.0 * l3;
  nx *= 2.0 * l3;
  h -= nx;
  return h;
}

}  // namespace qaa
