// Small dense complex matrices and a matrix-exponential rotation oracle.
// This is the slow-but-transparent crosscheck route used by `verify`:
// the mode rotation is rebuilt as exp(i Gamma) where Gamma is the
// second-quantized lift of the 2x2 generator of V(chi), and compared against
// the production Clebsch-Gordan recursion. Feasible for sectors n <= ~40.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "twinfock/fock.hpp"

namespace twinfock::dense {

struct CMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<complex> a;

  CMatrix() = default;
  CMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, complex(0, 0)) {}

  complex& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  const complex& at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

  static CMatrix identity(int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }
};

inline CMatrix multiply(const CMatrix& x, const CMatrix& y) {
  if (x.cols != y.rows) throw std::invalid_argument("dense::multiply: shape mismatch");
  CMatrix out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int k = 0; k < x.cols; ++k) {
      const complex v = x.at(i, k);
      if (v == complex(0, 0)) continue;
      for (int j = 0; j < y.cols; ++j) out.at(i, j) += v * y.at(k, j);
    }
  }
  return out;
}

inline std::vector<complex> apply(const CMatrix& m, const std::vector<complex>& v) {
  if (m.cols != static_cast<int>(v.size())) throw std::invalid_argument("dense::apply: shape mismatch");
  std::vector<complex> out(static_cast<std::size_t>(m.rows), complex(0, 0));
  for (int i = 0; i < m.rows; ++i) {
    complex acc(0, 0);
    for (int j = 0; j < m.cols; ++j) acc += m.at(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

inline double max_abs_diff(const CMatrix& x, const CMatrix& y) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.a.size(); ++i) worst = std::max(worst, std::abs(x.a[i] - y.a[i]));
  return worst;
}

// One-norm, used to pick the scaling power for the exponential.
inline double norm_one(const CMatrix& m) {
  double worst = 0.0;
  for (int j = 0; j < m.cols; ++j) {
    double col = 0.0;
    for (int i = 0; i < m.rows; ++i) col += std::abs(m.at(i, j));
    worst = std::max(worst, col);
  }
  return worst;
}

// exp(M) by scaling-and-squaring with a plain Taylor series. Fine for the
// verification sizes here (n + 1 <= ~40 and well-conditioned anti-Hermitian M).
inline CMatrix expm(const CMatrix& m) {
  if (m.rows != m.cols) throw std::invalid_argument("dense::expm: square matrix required");
  int squarings = 0;
  double scale = norm_one(m);
  while (scale > 0.25) {
    scale *= 0.5;
    ++squarings;
  }
  const double factor = std::ldexp(1.0, -squarings);
  CMatrix scaled = m;
  for (complex& v : scaled.a) v *= factor;
  CMatrix result = CMatrix::identity(m.rows);
  CMatrix term = CMatrix::identity(m.rows);
  for (int k = 1; k <= 24; ++k) {
    term = multiply(term, scaled);
    for (complex& v : term.a) v /= static_cast<double>(k);
    for (std::size_t i = 0; i < result.a.size(); ++i) result.a[i] += term.a[i];
  }
  for (int s = 0; s < squarings; ++s) result = multiply(result, result);
  return result;
}

// Sector matrices of the quadratic mode operators a_i^dagger a_j.
inline CMatrix up_dag_down(int n) {  // raises k by one
  CMatrix m(n + 1, n + 1);
  for (int k = 0; k < n; ++k) m.at(k + 1, k) = std::sqrt(static_cast<double>(k + 1) * (n - k));
  return m;
}

inline CMatrix down_dag_up(int n) {  // lowers k by one
  CMatrix m(n + 1, n + 1);
  for (int k = 0; k < n; ++k) m.at(k, k + 1) = std::sqrt(static_cast<double>(k + 1) * (n - k));
  return m;
}

inline CMatrix up_number(int n) {
  CMatrix m(n + 1, n + 1);
  for (int k = 0; k <= n; ++k) m.at(k, k) = static_cast<double>(k);
  return m;
}

inline CMatrix down_number(int n) {
  CMatrix m(n + 1, n + 1);
  for (int k = 0; k <= n; ++k) m.at(k, k) = static_cast<double>(n - k);
  return m;
}

// Hermitian 2x2 generator G with V = exp(iG) for the mode map
// V(chi) = [[1, e^{i chi}], [1, -e^{i chi}]] / sqrt(2), via the principal
// log of V's eigenvalues. V is never degenerate on the unit circle, so the
// two-eigenvector construction is safe for every chi.
inline std::array<std::array<complex, 2>, 2> mode_generator(double chi) {
  const complex e = std::polar(1.0, chi);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const std::array<std::array<complex, 2>, 2> v = {{{inv_sqrt2, inv_sqrt2 * e},
                                                    {inv_sqrt2, -inv_sqrt2 * e}}};
  const complex tr = v[0][0] + v[1][1];
  const complex det = v[0][0] * v[1][1] - v[0][1] * v[1][0];
  const complex disc = std::sqrt(tr * tr - 4.0 * det);
  const std::array<complex, 2> lambda = {0.5 * (tr + disc), 0.5 * (tr - disc)};
  // eigenvector columns of V: (V - lambda I) w = 0
  std::array<std::array<complex, 2>, 2> w;  // w[i][j]: component i of eigenvector j
  for (int j = 0; j < 2; ++j) {
    // pick the larger row of (V - lambda I) for a stable kernel vector
    const complex a = v[0][0] - lambda[j], b = v[0][1];
    const complex c = v[1][0], d = v[1][1] - lambda[j];
    complex x, y;
    if (std::abs(a) + std::abs(b) >= std::abs(c) + std::abs(d)) {
      x = -b;
      y = a;
    } else {
      x = -d;
      y = c;
    }
    const double nrm = std::sqrt(std::norm(x) + std::norm(y));
    w[0][j] = x / nrm;
    w[1][j] = y / nrm;
  }
  // G = W diag(arg lambda) W^dagger (Gram-Schmidt not needed: V unitary,
  // distinct eigenvalues give orthogonal eigenvectors)
  std::array<std::array<complex, 2>, 2> g{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      complex acc(0, 0);
      for (int s = 0; s < 2; ++s) {
        acc += w[i][s] * std::arg(lambda[s]) * std::conj(w[j][s]);
      }
      g[i][j] = acc;
    }
  }
  return g;
}

// Rotation oracle: beta = exp(i Gamma) alpha with Gamma the sector lift
// Gamma = G00 n_up + G01 a_up^ a_down + G10 a_down^ a_up + G11 n_down.
inline SectorState oracle_rotate(const SectorState& state, double chi) {
  const int n = state.total_n;
  const auto g = mode_generator(chi);
  CMatrix gamma(n + 1, n + 1);
  const CMatrix nu = up_number(n), nd = down_number(n);
  const CMatrix ud = up_dag_down(n), du = down_dag_up(n);
  for (std::size_t i = 0; i < gamma.a.size(); ++i) {
    gamma.a[i] = g[0][0] * nu.a[i] + g[0][1] * ud.a[i] + g[1][0] * du.a[i] + g[1][1] * nd.a[i];
  }
  for (complex& v : gamma.a) v *= complex(0.0, 1.0);  // i Gamma
  const CMatrix u = expm(gamma);
  SectorState out;
  out.total_n = n;
  out.rotation_angle = chi;
  out.amplitudes = apply(u, state.amplitudes);
  return out;
}

}  // namespace twinfock::dense
