// Exact two-mode bosonic Fock sectors and the second-quantized operators
// acting on them: annihilation, detection channels, phase states, Schwinger
// spin expectations, and the dense-matrix channel identity check.
//
// Conventions used throughout the library:
//   - A sector of total particle number n is spanned by |k, n-k> for
//     k = 0..n, where k counts the up-mode occupation. amplitudes[k] is the
//     coefficient of |n_up = k, n_down = n - k>.
//   - Detection channels at analyzer angle theta are
//     c_{theta,+-} = (a_up +- e^{i theta} a_down) / sqrt(2).
//   - Spin components are the Schwinger operators in units of hbar/2:
//     sigma_x = a_up^ a_down + a_down^ a_up,
//     sigma_y = -i (a_up^ a_down - a_down^ a_up),
//     sigma_z = a_up^ a_up - a_down^ a_down.
//   - Binomial magnitudes are always computed in log space via lgamma; raw
//     factorials overflow long before the particle numbers of interest.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twinfock {

using complex = std::complex<double>;

// Fixed-n two-mode state. `rotation_angle` is empty for the canonical
// (up/down) basis and holds chi when the amplitudes refer to the rotated
// modes b_{+-} = (a_up +- e^{i chi} a_down) / sqrt(2).
struct SectorState {
  int total_n = 0;
  std::vector<complex> amplitudes;  // length total_n + 1, index k = n_up
  std::optional<double> rotation_angle;

  bool canonical() const { return !rotation_angle.has_value(); }
  std::string basis_label() const;
};

struct SpinExpectation {
  double sx = 0.0;
  double sy = 0.0;
  double sz = 0.0;
  double transverse_magnitude = 0.0;  // sqrt(sx^2 + sy^2)
};

inline std::string SectorState::basis_label() const {
  if (canonical()) return "canonical";
  return "rotated(chi=" + std::to_string(*rotation_angle) + ")";
}

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

inline void require_canonical(const SectorState& s, const char* op) {
  require(s.canonical(), std::string(op) + ": state must be in the canonical basis");
}

inline void require_well_formed(const SectorState& s, const char* op) {
  require(s.total_n >= 0, std::string(op) + ": negative total_n");
  require(s.amplitudes.size() == static_cast<std::size_t>(s.total_n) + 1,
          std::string(op) + ": amplitude vector length must be total_n + 1");
}

inline double squared_norm(const std::vector<complex>& v) {
  double s = 0.0;
  for (const complex& a : v) s += std::norm(a);
  return s;
}

// log of binomial coefficient C(n, k)
inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// sqrt(C(n, k) / 2^n), the phase-state magnitude, in log space
inline double half_binomial_amplitude(int n, int k) {
  return std::exp(0.5 * (log_binomial(n, k) - n * std::log(2.0)));
}

}  // namespace detail

// Normalizes in place; error on (numerically) zero vectors.
inline void normalize(SectorState& s) {
  const double n2 = detail::squared_norm(s.amplitudes);
  detail::require(n2 > 0.0, "normalize: zero state");
  const double inv = 1.0 / std::sqrt(n2);
  for (complex& a : s.amplitudes) a *= inv;
}

// |n_up, n_down>: a single unit amplitude at k = n_up. Rejects the vacuum.
inline SectorState new_double_fock(int n_up, int n_down) {
  detail::require(n_up >= 0 && n_down >= 0, "new_double_fock: negative occupation");
  detail::require(n_up + n_down >= 1, "new_double_fock: zero total particles");
  SectorState s;
  s.total_n = n_up + n_down;
  s.amplitudes.assign(static_cast<std::size_t>(s.total_n) + 1, complex(0.0, 0.0));
  s.amplitudes[static_cast<std::size_t>(n_up)] = complex(1.0, 0.0);
  return s;
}

enum class Mode { up, down };

// Image under a_up or a_down in sector total_n - 1, unnormalized, plus its
// squared norm (the exact measurement weight of that annihilation).
//   a_up:   out[k] = sqrt(k+1) * amp[k+1]
//   a_down: out[k] = sqrt(n-k) * amp[k]
inline std::pair<SectorState, double> apply_annihilation(const SectorState& state, Mode mode) {
  detail::require_well_formed(state, "apply_annihilation");
  detail::require(state.total_n >= 1, "apply_annihilation: vacuum input");
  const int n = state.total_n;
  SectorState out;
  out.total_n = n - 1;
  out.rotation_angle = state.rotation_angle;
  out.amplitudes.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    if (mode == Mode::up) {
      out.amplitudes[k] = std::sqrt(static_cast<double>(k + 1)) * state.amplitudes[k + 1];
    } else {
      out.amplitudes[k] = std::sqrt(static_cast<double>(n - k)) * state.amplitudes[k];
    }
  }
  const double weight = detail::squared_norm(out.amplitudes);
  return {std::move(out), weight};
}

enum class Sign { plus, minus };

inline int sign_value(Sign s) { return s == Sign::plus ? +1 : -1; }

// c_{theta,+-} psi = (a_up psi +- e^{i theta} a_down psi) / sqrt(2),
// unnormalized, with its squared norm (the channel's detection weight).
inline std::pair<SectorState, double> apply_channel(const SectorState& state, double angle,
                                                    Sign sign) {
  detail::require_well_formed(state, "apply_channel");
  detail::require_canonical(state, "apply_channel");
  detail::require(state.total_n >= 1, "apply_channel: vacuum input");
  const int n = state.total_n;
  const complex phase = std::polar(1.0, angle) * (sign == Sign::plus ? 1.0 : -1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  SectorState out;
  out.total_n = n - 1;
  out.amplitudes.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const complex up = std::sqrt(static_cast<double>(k + 1)) * state.amplitudes[k + 1];
    const complex down = std::sqrt(static_cast<double>(n - k)) * state.amplitudes[k];
    out.amplitudes[k] = inv_sqrt2 * (up + phase * down);
  }
  const double weight = detail::squared_norm(out.amplitudes);
  return {std::move(out), weight};
}

// (c_phi^dagger)^n |vac> / sqrt(n!): amplitude at k is
// sqrt(C(n,k)/2^n) e^{-i phi (n-k)}. The e^{-i phi} convention makes
// apply_channel(phase_state(n, phi), phi, +) land on phase_state(n-1, phi).
inline SectorState phase_state(int n, double phi) {
  detail::require(n >= 1, "phase_state: n must be >= 1");
  SectorState s;
  s.total_n = n;
  s.amplitudes.resize(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    s.amplitudes[k] = std::polar(detail::half_binomial_amplitude(n, k), -phi * (n - k));
  }
  return s;
}

// Schwinger spin expectations. The transverse pair comes from the single
// tridiagonal sum T = <a_up^ a_down> = sum_k conj(amp[k+1]) sqrt((k+1)(n-k)) amp[k]:
// sx = 2 Re T, sy = 2 Im T; sz is diagonal with weight 2k - n.
inline SpinExpectation expect_spin(const SectorState& state) {
  detail::require_well_formed(state, "expect_spin");
  detail::require_canonical(state, "expect_spin");
  const int n = state.total_n;
  complex t(0.0, 0.0);
  double sz = 0.0;
  for (int k = 0; k <= n; ++k) {
    sz += (2.0 * k - n) * std::norm(state.amplitudes[k]);
    if (k < n) {
      t += std::conj(state.amplitudes[k + 1]) *
           std::sqrt(static_cast<double>(k + 1) * (n - k)) * state.amplitudes[k];
    }
  }
  SpinExpectation e;
  e.sx = 2.0 * t.real();
  e.sy = 2.0 * t.imag();
  e.sz = sz;
  e.transverse_magnitude = std::hypot(e.sx, e.sy);
  return e;
}

// |<a|b>|^2 for states of the same sector and basis.
inline double fidelity(const SectorState& a, const SectorState& b) {
  detail::require_well_formed(a, "fidelity");
  detail::require_well_formed(b, "fidelity");
  detail::require(a.total_n == b.total_n, "fidelity: sector mismatch");
  detail::require(a.rotation_angle == b.rotation_angle, "fidelity: basis mismatch");
  complex ov(0.0, 0.0);
  for (int k = 0; k <= a.total_n; ++k) ov += std::conj(a.amplitudes[k]) * b.amplitudes[k];
  return std::norm(ov);
}

namespace detail {

// Dense (n+1)x(n+1) matrix of sigma_x on sector n (tridiagonal).
inline std::vector<std::vector<complex>> sigma_x_matrix(int n) {
  std::vector<std::vector<complex>> m(n + 1, std::vector<complex>(n + 1, complex(0, 0)));
  for (int k = 0; k < n; ++k) {
    const double w = std::sqrt(static_cast<double>(k + 1) * (n - k));
    m[k + 1][k] = w;  // a_up^ a_down raises k
    m[k][k + 1] = w;  // a_down^ a_up lowers k
  }
  return m;
}

// Dense n x (n+1) matrix of c_{theta,sign} from sector n to sector n-1.
inline std::vector<std::vector<complex>> channel_matrix(int n, double theta, Sign sign) {
  std::vector<std::vector<complex>> m(n, std::vector<complex>(n + 1, complex(0, 0)));
  const complex phase = std::polar(1.0, theta) * (sign == Sign::plus ? 1.0 : -1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < n; ++k) {
    m[k][k + 1] += inv_sqrt2 * std::sqrt(static_cast<double>(k + 1));      // a_up part
    m[k][k] += inv_sqrt2 * phase * std::sqrt(static_cast<double>(n - k));  // a_down part
  }
  return m;
}

}  // namespace detail

// Checks (n_hat +- sigma_x)/2 = c_{+-}^dagger c_{+-} entrywise on every
// sector n <= n_max by explicit dense matrices; returns the worst deviation.
inline double verify_smur_identity(int n_max) {
  detail::require(n_max >= 1 && n_max <= 50, "verify_smur_identity: n_max must be in [1, 50]");
  double worst = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    for (Sign sign : {Sign::plus, Sign::minus}) {
      const auto c = detail::channel_matrix(n, 0.0, sign);
      const auto sx = detail::sigma_x_matrix(n);
      const double s = sign == Sign::plus ? 1.0 : -1.0;
      for (int row = 0; row <= n; ++row) {
        for (int col = 0; col <= n; ++col) {
          complex lhs = 0.5 * s * sx[row][col];
          if (row == col) lhs += 0.5 * n;
          complex rhs(0.0, 0.0);  // (C^H C)[row][col]
          for (int j = 0; j < n; ++j) rhs += std::conj(c[j][row]) * c[j][col];
          worst = std::max(worst, std::abs(lhs - rhs));
        }
      }
    }
  }
  return worst;
}

}  // namespace twinfock
