// Conditional detection probabilities for a balanced two-mode source.
//
// Starting from |N/2, N/2>, a detector click lands in the + channel with
// probability (2k+1)/(2(k+1)) when k previous clicks did, independent of the
// analyzer angle. The click sequence alone therefore carries no phase
// information; the simulated column reproduces the ladder with O(k/N)
// finite-size corrections that vanish as the source grows.

#include <cstdio>
#include <cstdlib>

#include "twinfock/twinfock.hpp"

int main(int argc, char** argv) {
  const long long n = argc > 1 ? std::atoll(argv[1]) : 10000;
  const int k_max = argc > 2 ? std::atoi(argv[2]) : 12;
  if (n < 2 || n % 2 != 0 || k_max < 0 || k_max + 1 > n) {
    std::fprintf(stderr, "usage: %s [even N >= 2] [k_max < N]\n", argv[0]);
    return 2;
  }

  using namespace twinfock;
  SectorState state = new_double_fock(static_cast<int>(n / 2), static_cast<int>(n / 2));
  std::printf("source |%lld,%lld>, forcing + detections at theta = 0\n\n", n / 2, n / 2);
  std::printf("%4s  %-19s  %-19s  %s\n", "k", "P(+ | k clicks)", "(2k+1)/(2(k+1))", "difference");
  for (int k = 0; k <= k_max; ++k) {
    const auto [p_plus, p_minus] = detection_probabilities(state, 0.0);
    const double reference = (2.0 * k + 1.0) / (2.0 * (k + 1.0));
    std::printf("%4d  %.15f  %.15f  %+.3e\n", k, p_plus, reference, p_plus - reference);
    if (k < k_max) {
      auto [next, weight] = collapse(state, 0.0, Sign::plus);
      state = std::move(next);
    }
  }
  return 0;
}
