#pragma once
/// Random three-bit evolution drivers and their collective-spin reduction.
///
/// A driver is a real symmetric 8x8 matrix A with zero diagonal, acting on
/// the 2^3 configurations of an ordered bit triple (bit value 0 = '+',
/// 1 = '-'; position 0 is the most significant config bit).  The full driver
/// Hamiltonian places A on every ordered triple of distinct qubits; since it
/// commutes with permutations it preserves the symmetric subspace, where it
/// becomes an (n+1) x (n+1) weight-ladder operator coupling |w> to |w'> with
/// |w - w'| <= 3.
///
/// In the large-n limit the ladder operator converges entrywise (at l^3
/// scaling, l = n/2) to a six-term symmetrized polynomial in (N_x, N_z):
///
///   G_E = g1 N_x + g2 N_x^2 + g3 N_x^3 + g4 {N_x,N_z}/2
///         + g5 {N_x,N_z^2}/2 + g6 {N_x^2,N_z}/2,
///
/// with coefficients that are exact rational combinations of the 28
/// independent entries of A (gammas_from_A).  Weight-preserving clause
/// contributions (pairs of configs with equal occupancy) drop out of the
/// polynomial model; build_he_symmetric can include or exclude them.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qaa/matrix.hpp"
#include "qaa/rng.hpp"
#include "qaa/spin_algebra.hpp"

namespace qaa {

/// Number of 1-bits ('-' marks) in a 3-bit configuration.
inline int occupancy(int config) {
  return std::popcount(static_cast<unsigned>(config) & 7u);
}

/// Real symmetric 8x8 driver block with zero diagonal.  The 28 independent
/// entries are serialized in row-major upper-triangle order:
/// (0,1), (0,2), ..., (0,7), (1,2), ..., (6,7).
class DriverMatrix {
public:
  static constexpr int kEntries = 28;

  DriverMatrix() : a_{} {}

  double operator()(int c, int d) const { return a_[index(c, d)]; }

  /// Set A[c][d] = A[d][c] = v (c != d).
  void set(int c, int d, double v) {
    if (c == d) throw std::invalid_argument("DriverMatrix::set: diagonal is fixed at zero");
    a_[index(c, d)] = v;
    a_[index(d, c)] = v;
  }

  /// Upper-triangle pairs in serialization order.
  static const std::array<std::pair<int, int>, kEntries>& upper_pairs() {
    static const auto pairs = [] {
      std::array<std::pair<int, int>, kEntries> p{};
      int k = 0;
      for (int c = 0; c < 8; ++c)
        for (int d = c + 1; d < 8; ++d) p[k++] = {c, d};
      return p;
    }();
    return pairs;
  }

  std::array<double, kEntries> entries() const {
    std::array<double, kEntries> e{};
    int k = 0;
    for (const auto& [c, d] : upper_pairs()) e[k++] = (*this)(c, d);
    return e;
  }

  static DriverMatrix from_entries(const std::array<double, kEntries>& e) {
    DriverMatrix m;
    int k = 0;
    for (const auto& [c, d] : upper_pairs()) m.set(c, d, e[k++]);
    return m;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

private:
  static int index(int c, int d) {
    if (c < 0 || c > 7 || d < 0 || d > 7)
      throw std::invalid_argument("DriverMatrix: config index out of range");
    return c * 8 + d;
  }
  std::array<double, 64> a_;
};

/// Entry-wise uniform random driver: the 28 independent entries are i.i.d.
/// uniform on [-L, L], drawn in serialization order from a deterministic
/// seeded generator.
inline DriverMatrix sample_A(double L, std::uint64_t seed) {
  if (L < 0.0) throw std::invalid_argument("sample_A: L must be >= 0");
  Rng rng(splitmix64(seed));
  std::array<double, DriverMatrix::kEntries> e{};
  for (double& v : e) v = rng.uniform(-L, L);
  return DriverMatrix::from_entries(e);
}

/// Structured driver family organized by flip type.
///
///  - single_flip[alpha][s1][s2]: amplitude for flipping position alpha when
///    the two spectator positions (in increasing position order) carry bits
///    (s1, s2).
///  - double_same[pair][s]: simultaneous flip of a position pair whose bits
///    agree (00 <-> 11); pair index 0, 1, 2 = positions (0,1), (0,2), (1,2);
///    s is the spectator bit.
///  - double_opp[pair][s]: pair flip with disagreeing bits (01 <-> 10);
///    these moves preserve occupancy and therefore never feed the
///    polynomial coefficients.
///  - triple[4] = (B, C, D, E): full three-bit flips, for the config pairs
///    (0,7), (1,6), (2,5), (3,4) in that order.
struct AppendixParams {
  std::array<std::array<std::array<double, 2>, 2>, 3> single_flip{};
  std::array<std::array<double, 2>, 3> double_same{};
  std::array<std::array<double, 2>, 3> double_opp{};
  std::array<double, 4> triple{};
};

namespace detail {

/// Bit of `config` at position alpha (position 0 = most significant).
inline int config_bit(int config, int alpha) { return (config >> (2 - alpha)) & 1; }

/// Positions (ascending) set in a 3-bit mask.
inline std::vector<int> mask_positions(int mask) {
  std::vector<int> pos;
  for (int alpha = 0; alpha < 3; ++alpha)
    if (config_bit(mask, alpha)) pos.push_back(alpha);
  return pos;
}

/// Pair index for two flipped positions: (0,1) -> 0, (0,2) -> 1, (1,2) -> 2.
inline int pair_index(int alpha_lo, int alpha_hi) {
  if (alpha_lo == 0) return alpha_hi == 1 ? 0 : 1;
  return 2;
}

}  // namespace detail

/// Assemble the 8x8 driver block from structured parameters.
inline DriverMatrix parametrized_A(const AppendixParams& params) {
  DriverMatrix m;
  for (const auto& [c, d] : DriverMatrix::upper_pairs()) {
    const int x = c ^ d;
    const auto flipped = detail::mask_positions(x);
    double v = 0.0;
    if (flipped.size() == 1) {
      const int alpha = flipped[0];
      std::array<int, 2> spect{};
      int k = 0;
      for (int beta = 0; beta < 3; ++beta)
        if (beta != alpha) spect[k++] = detail::config_bit(c, beta);
      v = params.single_flip[alpha][spect[0]][spect[1]];
    } else if (flipped.size() == 2) {
      const int pair = detail::pair_index(flipped[0], flipped[1]);
      int spectator_pos = 3 - flipped[0] - flipped[1];
      const int s = detail::config_bit(c, spectator_pos);
      const int b1 = detail::config_bit(c, flipped[0]);
      const int b2 = detail::config_bit(c, flipped[1]);
      v = (b1 == b2) ? params.double_same[pair][s] : params.double_opp[pair][s];
    } else {
      v = params.triple[std::min(c, d)];
    }
    if (v != 0.0) m.set(c, d, v);
  }
  return m;
}

/// Factorized sub-family: single flips a_alpha * b_{s1 s2}, same-direction
/// pair flips a2_pair * b_s, opposite pair flips a2t_pair * bt_s, plus the
/// four triple amplitudes.
struct FactorizedParams {
  std::array<double, 3> a{};                       ///< single-flip per position
  std::array<std::array<double, 2>, 2> b{};        ///< spectator dependence b[s1][s2]
  std::array<double, 3> a2{};                      ///< same-direction pair amplitude
  std::array<double, 2> b_same{};                  ///< spectator dependence
  std::array<double, 3> a2t{};                     ///< opposite-direction pair amplitude
  std::array<double, 2> b_opp{};                   ///< spectator dependence
  double B = 0.0, C = 0.0, D = 0.0, E = 0.0;       ///< triple amplitudes

  AppendixParams expand() const {
    AppendixParams p;
    for (int alpha = 0; alpha < 3; ++alpha)
      for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2)
          p.single_flip[alpha][s1][s2] = a[alpha] * b[s1][s2];
    for (int pair = 0; pair < 3; ++pair)
      for (int s = 0; s < 2; ++s) {
        p.double_same[pair][s] = a2[pair] * b_same[s];
        p.double_opp[pair][s] = a2t[pair] * b_opp[s];
      }
    p.triple = {B, C, D, E};
    return p;
  }
};

/// The reference single-flip driver: a = (1,1,1), b_00 = -2, b_11 = +2,
/// mixed spectators 0; no pair or triple moves.  Its polynomial reduction is
/// exactly g4 = -8 with all other coefficients zero.
inline FactorizedParams reference_driver_params() {
  FactorizedParams f;
  f.a = {1.0, 1.0, 1.0};
  f.b[0][0] = -2.0;
  f.b[1][1] = 2.0;
  return f;
}

inline DriverMatrix reference_driver() {
  return parametrized_A(reference_driver_params().expand());
}

/// Exact polynomial coefficients of a factorized driver.  Used to
/// cross-check gammas_from_A on structured inputs.
inline GammaCoefficients gammas_from_factorized(const FactorizedParams& f) {
  const double sum_a = f.a[0] + f.a[1] + f.a[2];
  const double sum_b = f.b[0][0] + f.b[0][1] + f.b[1][0] + f.b[1][1];
  const double sum_a2 = f.a2[0] + f.a2[1] + f.a2[2];
  const double triple_combo = f.C + f.D + f.E - 3.0 * f.B;
  GammaCoefficients g;
  g.g1 = sum_a * sum_b / 3.0 + triple_combo / 3.0;
  g.g2 = 2.0 / 3.0 * sum_a2 * (f.b_same[0] + f.b_same[1]);
  g.g3 = 4.0 / 3.0 * f.B;
  g.g4 = 2.0 / 3.0 * sum_a * (f.b[0][0] - f.b[1][1]);
  g.g5 = sum_a * (f.b[0][0] + f.b[1][1] - f.b[0][1] - f.b[1][0]) / 3.0 -
         triple_combo / 3.0;
  g.g6 = 2.0 / 3.0 * sum_a2 * (f.b_same[0] - f.b_same[1]);
  return g;
}

namespace detail {

/// Integer numerators (over a common denominator 3) of the linear map from
/// the 28 driver entries to the six polynomial coefficients.  Built once from
/// the flip-type classification of each config pair:
///  - single flips feed g1 always, g4 (sign of the agreeing spectator bits)
///    and g5 (+1 agreeing / -1 mixed spectators);
///  - same-direction double flips feed g2 and g6 (spectator sign);
///  - opposite-direction double flips preserve occupancy and feed nothing;
///  - the full flip (0,7) feeds g1, g3, g5; the other triples feed g1, g5.
inline const std::array<std::array<int, DriverMatrix::kEntries>, 6>&
gamma_numerators() {
  static const auto table = [] {
    std::array<std::array<int, DriverMatrix::kEntries>, 6> t{};
    int k = 0;
    for (int c = 0; c < 8; ++c)
      for (int d = c + 1; d < 8; ++d, ++k) {
        const int x = c ^ d;
        const auto flipped = mask_positions(x);
        if (flipped.size() == 1) {
          t[0][k] += 1;
          std::array<int, 2> spect{};
          int m = 0;
          for (int beta = 0; beta < 3; ++beta)
            if (beta != flipped[0]) spect[m++] = config_bit(c, beta);
          if (spect[0] == spect[1]) {
            t[3][k] += spect[0] == 0 ? 2 : -2;
            t[4][k] += 1;
          } else {
            t[4][k] += -1;
          }
        } else if (flipped.size() == 2) {
          const int b1 = config_bit(c, flipped[0]);
          const int b2 = config_bit(c, flipped[1]);
          if (b1 == b2) {
            t[1][k] += 2;
            const int spectator_pos = 3 - flipped[0] - flipped[1];
            t[5][k] += config_bit(c, spectator_pos) == 0 ? 2 : -2;
          }
        } else {
          if (c == 0) {
            t[0][k] += -3;
            t[2][k] += 4;
            t[4][k] += 3;
          } else {
            t[0][k] += 1;
            t[4][k] += -1;
          }
        }
      }
    return t;
  }();
  return table;
}

}  // namespace detail

/// Exact large-n polynomial coefficients of a driver block: each gamma is a
/// rational linear combination (integer numerators over 3) of the 28 entries.
inline GammaCoefficients gammas_from_A(const DriverMatrix& a) {
  const auto& table = detail::gamma_numerators();
  const auto e = a.entries();
  std::array<double, 6> g{};
  for (int j = 0; j < 6; ++j) {
    double s = 0.0;
    for (int k = 0; k < DriverMatrix::kEntries; ++k)
      if (table[j][k] != 0) s += table[j][k] * e[k];
    g[j] = s / 3.0;
  }
  GammaCoefficients out;
  out.g1 = g[0];
  out.g2 = g[1];
  out.g3 = g[2];
  out.g4 = g[3];
  out.g5 = g[4];
  out.g6 = g[5];
  return out;
}

namespace detail {

/// Binomial coefficient as a double via the multiplicative loop; accurate to
/// ~1e-15 relative and representable for n <= 300.
inline double choose_dbl(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
  return r;
}

/// ln C(n, k) via lgamma, for n too large for direct doubles.
inline double ln_choose(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// Threshold between exact double binomials and ln-space evaluation.
constexpr int kExactBinomialMaxN = 300;

}  // namespace detail

/// Weight-ladder operator of the driver on the symmetric subspace, RAW
/// (l^3-scaled) units: row/column w = Hamming weight.  The closed form sums
/// the 8x8 block over occupancy classes:
///
///   H[w', w] = C(n,3) * sum_m C(n-3, w-m) S[m+d, m] / sqrt(C(n,w) C(n,w')),
///
/// with d = w' - w and S the occupancy-class sums of A.  When
/// `include_weight_preserving` is false, config pairs with equal occupancy
/// (which only feed w' = w) are dropped — the convention used for all
/// polynomial-model comparisons.
inline SubspaceOperator build_he_symmetric(const DriverMatrix& a, int n,
                                           bool include_weight_preserving = true) {
  if (n < 3) throw std::invalid_argument("build_he_symmetric: requires n >= 3");
  double s_table[4][4] = {};
  for (int c = 0; c < 8; ++c)
    for (int d = 0; d < 8; ++d) {
      if (c == d) continue;
      const int mc = occupancy(c), md = occupancy(d);
      if (!include_weight_preserving && mc == md) continue;
      s_table[md][mc] += a(d, c);
    }

  const std::size_t dim = static_cast<std::size_t>(n) + 1;
  SubspaceOperator h(dim, dim);
  const bool exact = n <= detail::kExactBinomialMaxN;
  std::vector<double> inv_sqrt_choose, ln_choose_n;
  if (exact) {
    inv_sqrt_choose.resize(dim);
    for (int w = 0; w <= n; ++w)
      inv_sqrt_choose[w] = 1.0 / std::sqrt(detail::choose_dbl(n, w));
  } else {
    ln_choose_n.resize(dim);
    for (int w = 0; w <= n; ++w) ln_choose_n[w] = detail::ln_choose(n, w);
  }
  const double ln_triples = exact ? 0.0 : detail::ln_choose(n, 3);
  const double triples = detail::choose_dbl(n, 3);

  for (int w = 0; w <= n; ++w)
    for (int dw = -3; dw <= 3; ++dw) {
      const int wp = w + dw;
      if (wp < 0 || wp > n) continue;
      double sum = 0.0;
      for (int m = std::max(0, std::max(-dw, w - (n - 3))); m <= std::min(3 - std::max(0, dw), w);
           ++m) {
        const double s = s_table[m + dw][m];
        if (s == 0.0) continue;
        if (exact) {
          sum += detail::choose_dbl(n - 3, w - m) * s;
        } else {
          sum += std::exp(detail::ln_choose(n - 3, w - m) + ln_triples -
                          0.5 * (ln_choose_n[w] + ln_choose_n[wp])) *
                 s;
        }
      }
      if (sum == 0.0) continue;
      h(wp, w) = exact ? triples * sum * inv_sqrt_choose[w] * inv_sqrt_choose[wp] : sum;
    }
  h.symmetrize();
  return h;
}

/// Brute-force oracle for build_he_symmetric: apply the driver block to every
/// bit triple of the full 2^n register and project onto the (n+1) symmetric
/// weight states.  Includes all clause terms (weight-preserving ones too).
/// Restricted to 3 <= n <= 14.  Each entry accumulates up to ~10^4 terms, so
/// the sums are Neumaier-compensated to keep the oracle's own roundoff far
/// below the 1e-10 tolerance it is compared at.
inline SubspaceOperator build_he_dense(const DriverMatrix& a, int n) {
  if (n < 3 || n > 14)
    throw std::invalid_argument("build_he_dense: requires 3 <= n <= 14");
  const std::size_t dim = static_cast<std::size_t>(n) + 1;
  std::vector<double> inv_sqrt_choose(dim);
  for (int w = 0; w <= n; ++w)
    inv_sqrt_choose[w] = 1.0 / std::sqrt(detail::choose_dbl(n, w));

  SubspaceOperator h(dim, dim);
  std::vector<double> comp(dim * dim, 0.0);
  const std::uint32_t states = 1u << n;
  for (std::uint32_t z = 0; z < states; ++z) {
    const int w = std::popcount(z);
    for (int i = 0; i < n - 2; ++i)
      for (int j = i + 1; j < n - 1; ++j)
        for (int k = j + 1; k < n; ++k) {
          const int c = (((z >> i) & 1u) << 2) | (((z >> j) & 1u) << 1) |
                        ((z >> k) & 1u);
          for (int d = 0; d < 8; ++d) {
            if (d == c) continue;
            const double v = a(d, c);
            if (v == 0.0) continue;
            std::uint32_t z2 = z & ~((1u << i) | (1u << j) | (1u << k));
            z2 |= (static_cast<std::uint32_t>((d >> 2) & 1) << i) |
                  (static_cast<std::uint32_t>((d >> 1) & 1) << j) |
                  (static_cast<std::uint32_t>(d & 1) << k);
            const int w2 = std::popcount(z2);
            const double term = v * inv_sqrt_choose[w] * inv_sqrt_choose[w2];
            double& sum = h(w2, w);
            const double t = sum + term;
            comp[static_cast<std::size_t>(w2) * dim + w] +=
                std::abs(sum) >= std::abs(term) ? (sum - t) + term
                                                : (term - t) + sum;
            sum = t;
          }
        }
  }
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) h(r, c) += comp[r * dim + c];
  h.symmetrize();
  return h;
}

/// Max-norm distance, at l^3 scaling, between the weight-changing entries of
/// the exact ladder operator (weight-preserving clause terms dropped) and the
/// six-term polynomial model.  Weight-preserving (w' = w) entries are
/// excluded on both sides: the polynomial's ladder diagonal mirrors exactly
/// the clause terms the reduced model drops.  Decreases as O(1/n).
inline double he_model_error(const DriverMatrix& a, int n) {
  const double inv_l3 = 1.0 / std::pow(0.5 * n, 3);
  SubspaceOperator exact = build_he_symmetric(a, n, false);
  exact *= inv_l3;
  const SubspaceOperator model = sym_poly(n, gammas_from_A(a));
  double err = 0.0;
  for (std::size_t i = 0; i < exact.rows(); ++i)
    for (std::size_t j = 0; j < exact.cols(); ++j) {
      if (i == j) continue;
      err = std::max(err, std::abs(exact(i, j) - model(i, j)));
    }
  return err;
}

/// Re-derive the polynomial coefficients numerically: least-squares fit of
/// the l^-3-scaled ladder operator onto the six polynomial monomials plus a
/// diagonal nuisance basis {I, N_z, N_z^2, N_z^3}, at each n in `n_list`,
/// followed by a linear extrapolation in 1/n to the intercept.  Agrees with
/// gammas_from_A up to the quality of the extrapolation; used as an
/// independent check of the rational table.
inline GammaCoefficients fit_gammas_from_operator(const DriverMatrix& a,
                                                  const std::vector<int>& n_list) {
  if (n_list.size() < 2)
    throw std::invalid_argument("fit_gammas_from_operator: need >= 2 sizes");
  std::vector<double> inv_n;
  std::array<std::vector<double>, 6> comps;

  for (int n : n_list) {
    const Matrix nx = build_nx(n);
    const Matrix nz = build_nz(n);
    const Matrix nx2 = nx * nx;
    const Matrix nz2 = nz * nz;
    std::vector<Matrix> basis;
    basis.reserve(10);
    basis.push_back(nx);
    basis.push_back(nx2);
    basis.push_back(nx2 * nx);
    basis.push_back(sym_product(nx, nz));
    basis.push_back(sym_product(nx, nz2));
    basis.push_back(sym_product(nx2, nz));
    basis.push_back(Matrix::identity(n + 1));
    basis.push_back(nz);
    basis.push_back(nz2);
    basis.push_back(nz2 * nz);

    SubspaceOperator target = build_he_symmetric(a, n, false);
    target *= 1.0 / std::pow(0.5 * n, 3);

    const std::size_t nb = basis.size();
    Matrix gram(nb, nb);
    std::vector<double> rhs(nb, 0.0);
    auto dot = [](const Matrix& x, const Matrix& y) {
      double s = 0.0;
      for (std::size_t k = 0; k < x.data().size(); ++k)
        s += x.data()[k] * y.data()[k];
      return s;
    };
    for (std::size_t i = 0; i < nb; ++i) {
      for (std::size_t j = i; j < nb; ++j) {
        const double g = dot(basis[i], basis[j]);
        gram(i, j) = g;
        gram(j, i) = g;
      }
      rhs[i] = dot(basis[i], target);
    }
    const std::vector<double> x = solve_linear(gram, rhs);
    inv_n.push_back(1.0 / n);
    for (int j = 0; j < 6; ++j) comps[j].push_back(x[j]);
  }

  std::array<double, 6> g{};
  for (int j = 0; j < 6; ++j) g[j] = fit_line(inv_n, comps[j]).intercept;
  GammaCoefficients out;
  out.g1 = g[0];
  out.g2 = g[1];
  out.g3 = g[2];
  out.g4 = g[3];
  out.g5 = g[4];
  out.g6 = g[5];
  return out;
}

}  // namespace qaa
