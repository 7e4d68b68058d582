#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "support/oracles.hpp"
#include "twinfock/analysis.hpp"
#include "twinfock/measurement.hpp"

using namespace twinfock;

TEST_CASE("estimate_phase reads the transverse spin direction") {
  for (double phi : {0.1, 1.9, 4.0, 6.1}) {
    REQUIRE(oracle::wrap_distance(estimate_phase(phase_state(25, phi)), phi) < 1e-12);
  }
  // sigma_z eigenstates have no transverse direction to estimate
  CHECK_THROWS_AS(estimate_phase(new_double_fock(3, 3)), std::invalid_argument);
}

TEST_CASE("manifold fidelity equals the best overlap on a fine grid") {
  // brute-force 4096-point grid of |<phi|psi>|^2 computed from scratch
  for (std::uint64_t seed : {11ULL, 12ULL}) {
    const SectorState s = oracle::random_state(24, seed);
    const PhaseFit fit = phase_manifold_fidelity(s);
    double grid_best = 0.0;
    for (int j = 0; j < 4096; ++j) {
      const double phi = (2.0 * M_PI * j) / 4096.0;
      complex overlap(0.0, 0.0);
      for (int k = 0; k <= 24; ++k) {
        overlap += std::conj(std::polar(detail::half_binomial_amplitude(24, k),
                                        -phi * (24 - k))) *
                   s.amplitudes[k];
      }
      grid_best = std::max(grid_best, std::norm(overlap));
    }
    REQUIRE(fit.fidelity >= grid_best - 1e-9);
    REQUIRE(fit.fidelity <= 1.0 + 1e-12);
    REQUIRE(fit.best_phi >= 0.0);
    REQUIRE(fit.best_phi < 2.0 * M_PI);
  }
}

TEST_CASE("manifold fit is exact on phase states") {
  for (double phi : {0.0, 0.77, 3.5, 6.0}) {
    const PhaseFit fit = phase_manifold_fidelity(phase_state(60, phi));
    REQUIRE_THAT(fit.fidelity, Catch::Matchers::WithinAbs(1.0, 1e-10));
    REQUIRE(oracle::wrap_distance(fit.best_phi, phi) < 1e-5);
  }
}

TEST_CASE("manifold fit handles mirror-symmetric superpositions") {
  // real symmetric combination of |phi*> and |-phi*>: the overlap curve has
  // twin peaks at +-phi*, far from the transverse-spin direction, and the
  // global scan must find one of them
  const double target = 2.2;
  SectorState cat = phase_state(40, target);
  const SectorState mirror = phase_state(40, -target);
  for (int k = 0; k <= 40; ++k) cat.amplitudes[k] += mirror.amplitudes[k];
  normalize(cat);
  const PhaseFit fit = phase_manifold_fidelity(cat);
  const double to_peak = std::min(oracle::wrap_distance(fit.best_phi, target),
                                  oracle::wrap_distance(fit.best_phi, -target));
  REQUIRE(to_peak < 1e-6);
  // each peak carries essentially half the norm plus the small cross term
  REQUIRE(fit.fidelity > 0.45);
  REQUIRE(fit.fidelity < 0.75);
}

TEST_CASE("mode rotation agrees with the dense Eigen oracle") {
  for (int n : {1, 2, 3, 8, 17, 30}) {
    const SectorState s = oracle::random_state(n, 900 + n);
    for (double chi : {0.0, 0.6, 3.14159, 5.7}) {
      const SectorState fast = rotate_modes(s, chi);
      const SectorState slow = oracle::rotate(s, chi);
      REQUIRE(fast.rotation_angle.has_value());
      REQUIRE(*fast.rotation_angle == chi);
      for (int m = 0; m <= n; ++m) {
        REQUIRE(std::abs(fast.amplitudes[m] - slow.amplitudes[m]) < 1e-10);
      }
    }
  }
}

TEST_CASE("mode rotation is unitary and exactly invertible at large n") {
  for (int n : {150, 400}) {
    const SectorState s = oracle::random_state(n, 1200 + n);
    const SectorState rotated = rotate_modes(s, 2.3);
    REQUIRE_THAT(detail::squared_norm(rotated.amplitudes),
                 Catch::Matchers::WithinAbs(1.0, 1e-11));
    REQUIRE_FALSE(rotated.canonical());
    const SectorState back = rotate_modes_inverse(rotated);
    REQUIRE(back.canonical());
    REQUIRE_THAT(fidelity(back, s), Catch::Matchers::WithinAbs(1.0, 1e-11));
  }
}

TEST_CASE("basis labels guard rotation composition") {
  const SectorState rotated = rotate_modes(phase_state(5, 0.4), 1.0);
  CHECK_THROWS_AS(rotate_modes(rotated, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(rotate_modes_inverse(phase_state(5, 0.4)), std::invalid_argument);
  CHECK_THROWS_AS(phase_manifold_fidelity(rotated), std::invalid_argument);
}

TEST_CASE("count distribution of a phase state is binomial in the mismatch") {
  for (int n : {6, 41}) {
    const auto pascal = oracle::pascal_row(n);
    for (double delta : {0.9, 2.4}) {
      const CountDistribution dist = bob_count_distribution(phase_state(n, 0.7), 0.7 + delta);
      const long double p = std::cos(0.5L * static_cast<long double>(delta)) *
                            std::cos(0.5L * static_cast<long double>(delta));
      double mass = 0.0;
      for (int m = 0; m <= n; ++m) {
        const long double pmf =
            pascal[m] * std::pow(p, m) * std::pow(1.0L - p, n - m);
        REQUIRE_THAT(dist.probabilities[m],
                     Catch::Matchers::WithinAbs(static_cast<double>(pmf), 1e-12));
        mass += dist.probabilities[m];
      }
      REQUIRE_THAT(mass, Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
  }
}

TEST_CASE("count distribution at the matched angle is a delta at m = n") {
  const CountDistribution dist = bob_count_distribution(phase_state(35, 1.3), 1.3);
  REQUIRE_THAT(dist.probabilities[35], Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("twin Fock counts show Hong-Ou-Mandel parity suppression") {
  // a balanced double Fock sends particles through in pairs: odd + counts
  // carry no probability, for every analyzer angle
  for (int half : {2, 5, 11}) {
    for (double chi : {0.0, 1.1, 4.0}) {
      const CountDistribution dist = bob_count_distribution(new_double_fock(half, half), chi);
      for (int m = 1; m <= 2 * half; m += 2) {
        REQUIRE(dist.probabilities[m] < 1e-20);
      }
      // and the distribution is symmetric under m <-> n - m
      for (int m = 0; m <= half; ++m) {
        REQUIRE_THAT(dist.probabilities[m],
                     Catch::Matchers::WithinAbs(dist.probabilities[2 * half - m], 1e-13));
      }
    }
  }
}

TEST_CASE("uniformity statistic is zero for balanced bins and large for lumped ones") {
  std::vector<double> balanced;
  for (int i = 0; i < 320; ++i) {
    balanced.push_back((2.0 * M_PI) * ((i % 16) + 0.5) / 16.0);
  }
  const PhaseStats even = uniformity_test(balanced, 16);
  REQUIRE_THAT(even.chi_square, Catch::Matchers::WithinAbs(0.0, 1e-12));
  for (long long c : even.bin_counts) REQUIRE(c == 20);

  std::vector<double> lumped(320, 0.1);
  const PhaseStats bad = uniformity_test(lumped, 16);
  // all 320 samples in one bin: chi2 = (320 - 20)^2/20 + 15 * 20
  REQUIRE_THAT(bad.chi_square, Catch::Matchers::WithinAbs(4800.0, 1e-9));

  CHECK_THROWS_AS(uniformity_test(std::vector<double>(50, 1.0), 16), std::invalid_argument);
  CHECK_THROWS_AS(uniformity_test(balanced, 0), std::invalid_argument);
}

TEST_CASE("phases wrap into the canonical interval") {
  REQUIRE_THAT(detail::mod_2pi(-0.1), Catch::Matchers::WithinAbs(2.0 * M_PI - 0.1, 1e-12));
  REQUIRE_THAT(detail::mod_2pi(7.0), Catch::Matchers::WithinAbs(7.0 - 2.0 * M_PI, 1e-12));
  REQUIRE(detail::mod_2pi(2.0 * M_PI) == 0.0);
  REQUIRE(detail::mod_2pi(0.0) == 0.0);
}
