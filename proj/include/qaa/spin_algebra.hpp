#pragma once
/// Collective spin operators on the symmetric (Dicke) subspace.
///
/// Conventions:
///  - Basis states |w>, w = 0..n, are the symmetric-subspace states of n
///    qubits with Hamming weight w (w qubits flipped to |1>).
///  - N_z and N_x are the collective spin components scaled by l = n/2, so
///    both have spectra in [-1, 1].  N_z is diagonal with eigenvalues
///    q_w = 1 - 2w/n; N_x is tridiagonal with
///    <w-1|N_x|w> = sqrt(w (n - w + 1)) / n.
///  - The commutator [N_x, N_z] is O(1/n): the operators become classical
///    commuting fields in the large-n limit.
///  - Mixed polynomials in (N_x, N_z) are always symmetrized (Weyl ordering),
///    keeping every operator Hermitian.
///
/// The dense symmetric eigensolver (Householder tridiagonalization followed
/// by implicit-shift QL) is self-contained; matrices in this project stay
/// small (dimension n+1, with n up to a few thousand).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qaa/matrix.hpp"

namespace qaa {

/// A matrix acting on the (n+1)-dimensional symmetric subspace.
using SubspaceOperator = Matrix;

/// N_z: diagonal, <w|N_z|w> = 1 - 2w/n.
inline SubspaceOperator build_nz(int n) {
  if (n < 2) throw std::invalid_argument("build_nz: n must be >= 2");
  const std::size_t dim = static_cast<std::size_t>(n) + 1;
  Matrix m(dim, dim);
  for (std::size_t w = 0; w < dim; ++w)
    m(w, w) = 1.0 - 2.0 * static_cast<double>(w) / n;
  return m;
}

/// N_x: symmetric tridiagonal, <w-1|N_x|w> = sqrt(w (n - w + 1)) / n.
inline SubspaceOperator build_nx(int n) {
  if (n < 2) throw std::invalid_argument("build_nx: n must be >= 2");
  const std::size_t dim = static_cast<std::size_t>(n) + 1;
  Matrix m(dim, dim);
  for (std::size_t w = 1; w < dim; ++w) {
    const double v = std::sqrt(static_cast<double>(w) * (n - static_cast<double>(w) + 1.0)) / n;
    m(w - 1, w) = v;
    m(w, w - 1) = v;
  }
  return m;
}

/// Coefficients of the six-term symmetrized polynomial in (N_x, N_z).
struct GammaCoefficients {
  double g1 = 0.0;  ///< N_x
  double g2 = 0.0;  ///< N_x^2
  double g3 = 0.0;  ///< N_x^3
  double g4 = 0.0;  ///< (N_x N_z + N_z N_x)/2
  double g5 = 0.0;  ///< (N_x N_z^2 + N_z^2 N_x)/2
  double g6 = 0.0;  ///< (N_x^2 N_z + N_z N_x^2)/2

  std::vector<double> as_vector() const { return {g1, g2, g3, g4, g5, g6}; }

  double max_abs() const {
    double m = 0.0;
    for (double v : as_vector()) m = std::max(m, std::abs(v));
    return m;
  }
};

/// Symmetrized (Weyl-ordered) polynomial
///   g1 N_x + g2 N_x^2 + g3 N_x^3 + g4 {N_x,N_z}/2 + g5 {N_x,N_z^2}/2
///   + g6 {N_x^2,N_z}/2
/// acting on the symmetric subspace of n qubits.
inline SubspaceOperator sym_poly(int n, const GammaCoefficients& gamma) {
  const Matrix nx = build_nx(n);
  const Matrix nz = build_nz(n);
  const Matrix nx2 = nx * nx;
  Matrix out = gamma.g1 * nx;
  if (gamma.g2 != 0.0) out += gamma.g2 * nx2;
  if (gamma.g3 != 0.0) out += gamma.g3 * (nx2 * nx);
  if (gamma.g4 != 0.0) out += gamma.g4 * sym_product(nx, nz);
  if (gamma.g5 != 0.0) out += gamma.g5 * sym_product(nx, nz * nz);
  if (gamma.g6 != 0.0) out += gamma.g6 * sym_product(nx2, nz);
  out.symmetrize();
  return out;
}

/// Eigen-decomposition of a real symmetric matrix.
struct Spectrum {
  std::vector<double> eigenvalues;  ///< ascending
  Matrix vectors;                   ///< column k pairs with eigenvalues[k]; empty unless requested

  /// Gap between the two lowest eigenvalues.
  double gap() const {
    if (eigenvalues.size() < 2) throw std::logic_error("Spectrum::gap: need dimension >= 2");
    return eigenvalues[1] - eigenvalues[0];
  }
};

namespace detail {

/// Householder reduction of a symmetric matrix to tridiagonal form
/// (diagonal d, subdiagonal e); accumulates the transform in `a` when
/// `want_vectors` is set.
inline void tred2(Matrix& a, std::vector<double>& d, std::vector<double>& e,
                  bool want_vectors) {
  const int n = static_cast<int>(a.rows());
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (int i = n - 1; i > 0; --i) {
    const int l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (int k = 0; k < i; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (int k = 0; k < i; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = (f >= 0.0 ? -std::sqrt(h) : std::sqrt(h));
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j < i; ++j) {
          if (want_vectors) a(j, i) = a(i, j) / h;
          g = 0.0;
          for (int k = 0; k < j + 1; ++k) g += a(j, k) * a(i, k);
          for (int k = j + 1; k < i; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j < i; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k < j + 1; ++k) a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  if (want_vectors) d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    if (want_vectors) {
      if (d[i] != 0.0) {
        for (int j = 0; j < i; ++j) {
          double g = 0.0;
          for (int k = 0; k < i; ++k) g += a(i, k) * a(k, j);
          for (int k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
        }
      }
      d[i] = a(i, i);
      a(i, i) = 1.0;
      for (int j = 0; j < i; ++j) a(j, i) = a(i, j) = 0.0;
    } else {
      d[i] = a(i, i);
    }
  }
}

/// Implicit-shift QL iteration on a tridiagonal matrix (d, e).  If
/// `want_vectors`, rotations are accumulated into the columns of `z`.
/// Throws on non-convergence (64-sweep budget per eigenvalue).
inline void tql2(std::vector<double>& d, std::vector<double>& e, Matrix& z,
                 bool want_vectors) {
  const int n = static_cast<int>(d.size());
  const double eps = 1e-15;
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 64)
          throw std::runtime_error("eigh: QL iteration failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (want_vectors) {
            for (int k = 0; k < n; ++k) {
              f = z(k, i + 1);
              z(k, i + 1) = s * z(k, i) + c * f;
              z(k, i) = c * z(k, i) - s * f;
            }
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace detail

/// Full eigen-decomposition of a real symmetric matrix.  Eigenvalues come
/// back sorted ascending; eigenvectors (as columns, matching order) only when
/// `want_vectors` is set — skipping them roughly halves the cost.
inline Spectrum eigh(const Matrix& m, bool want_vectors = true) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigh: matrix not square");
  const int n = static_cast<int>(m.rows());
  Spectrum s;
  if (n == 0) return s;
  Matrix a = m;
  std::vector<double> d, e;
  detail::tred2(a, d, e, want_vectors);
  try {
    detail::tql2(d, e, a, want_vectors);
  } catch (const std::runtime_error&) {
    throw std::runtime_error("eigh: QL iteration failed to converge (matrix max-norm " +
                             std::to_string(m.max_abs()) + ")");
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int i, int j) { return d[i] < d[j]; });

  s.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) s.eigenvalues[i] = d[order[i]];
  if (want_vectors) {
    s.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) s.vectors(i, j) = a(i, order[j]);
  }
  return s;
}

}  // namespace qaa
