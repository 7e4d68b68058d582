#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>

#include "support/oracles.hpp"
#include "twinfock/measurement.hpp"

using namespace twinfock;

TEST_CASE("seed mixing reproduces the SplitMix64 reference values") {
  // frozen from an independent implementation of the SplitMix64 finalizer
  CHECK(mix_seed(0, 0) == 16294208416658607535ULL);
  CHECK(mix_seed(1, 0) == 10451216379200822465ULL);
  CHECK(mix_seed(0, 1) == 7960286522194355700ULL);
  CHECK(mix_seed(0xDEADBEEFULL, 41) == 17717088003226239901ULL);
  CHECK(mix_seed(20250823ULL, 1999) == 12333971945760424747ULL);
}

TEST_CASE("unit draws follow the standard mt19937_64 stream") {
  // the C++ standard pins the 10000th output of a default-seeded mt19937_64
  // to 9981545732273789042; our draw is its top 53 bits over 2^53
  TrajectoryRng rng(5489u);
  double draw = 0.0;
  for (int i = 0; i < 10000; ++i) draw = rng.next_unit();
  REQUIRE(draw == (9981545732273789042ULL >> 11) * 0x1.0p-53);
  TrajectoryRng fresh(5489u);
  for (int i = 0; i < 1000; ++i) {
    const double u = fresh.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("detection probabilities from the balanced source start at one half") {
  for (int half : {1, 3, 10, 500}) {
    const auto [p_plus, p_minus] = detection_probabilities(new_double_fock(half, half), 1.7);
    REQUIRE_THAT(p_plus, Catch::Matchers::WithinAbs(0.5, 1e-13));
    REQUIRE_THAT(p_minus, Catch::Matchers::WithinAbs(0.5, 1e-13));
  }
}

TEST_CASE("collapse returns the normalized branch and its weight") {
  const SectorState s = oracle::random_state(12, 4242);
  for (int sign : {+1, -1}) {
    const Sign outcome = sign > 0 ? Sign::plus : Sign::minus;
    const auto [branch, probability] = collapse(s, 0.8, outcome);
    REQUIRE_THAT(detail::squared_norm(branch.amplitudes), Catch::Matchers::WithinAbs(1.0, 1e-13));
    // weight equals the dense-channel squared norm over n
    const oracle::Vec image = oracle::channel_op(12, 0.8, sign) * oracle::to_eigen(s);
    REQUIRE_THAT(probability, Catch::Matchers::WithinAbs(image.squaredNorm() / 12.0, 1e-13));
  }
}

TEST_CASE("collapse rejects an impossible branch") {
  // phase_state feeds the + channel only, so the - branch has zero weight
  CHECK_THROWS_AS(collapse(phase_state(5, 1.1), 1.1, Sign::minus), std::invalid_argument);
}

TEST_CASE("outcome order does not matter, only the counts") {
  // c_+ and c_- commute, so any interleaving with the same (p, q) counts
  // collapses to exactly the same state.
  const SectorState start = new_double_fock(6, 6);
  const auto [state_a, probs_a] = forced_sequence(
      start, 0.4, {Sign::plus, Sign::plus, Sign::minus, Sign::plus, Sign::minus});
  const auto [state_b, probs_b] = forced_sequence(
      start, 0.4, {Sign::minus, Sign::minus, Sign::plus, Sign::plus, Sign::plus});
  REQUIRE_THAT(fidelity(state_a, state_b), Catch::Matchers::WithinAbs(1.0, 1e-13));
  // and the total path probability is permutation invariant as well
  double path_a = 1.0, path_b = 1.0;
  for (double p : probs_a) path_a *= p;
  for (double p : probs_b) path_b *= p;
  REQUIRE_THAT(path_a, Catch::Matchers::WithinAbs(path_b, 1e-15));
}

TEST_CASE("conditional + probability climbs toward its large-N ladder") {
  // after p plus and q minus detections from a large balanced source the next
  // + probability approaches (2p + 1) / (2(p + q) + 2)
  const SectorState start = new_double_fock(500, 500);
  for (const auto& [p, q] : std::vector<std::pair<int, int>>{{3, 0}, {2, 2}, {5, 1}, {0, 4}}) {
    std::vector<Sign> outcomes(p, Sign::plus);
    outcomes.insert(outcomes.end(), q, Sign::minus);
    const auto [state, probs] = forced_sequence(start, 0.0, outcomes);
    const auto [p_plus, p_minus] = detection_probabilities(state, 0.0);
    const double ladder = (2.0 * p + 1.0) / (2.0 * (p + q) + 2.0);
    REQUIRE_THAT(p_plus, Catch::Matchers::WithinAbs(ladder, 0.02));  // finite-N correction ~ (p+q)/N
  }
}

TEST_CASE("which-path detection reduces a Fock state and flips a fair coin") {
  const auto [after_up, s1] = which_path_detect(new_double_fock(4, 2), Mode::up, 0.2);
  REQUIRE_THAT(fidelity(after_up, new_double_fock(3, 2)), Catch::Matchers::WithinAbs(1.0, 1e-15));
  REQUIRE(s1 == Sign::plus);
  const auto [after_down, s2] = which_path_detect(new_double_fock(4, 2), Mode::down, 0.9);
  REQUIRE_THAT(fidelity(after_down, new_double_fock(4, 1)), Catch::Matchers::WithinAbs(1.0, 1e-15));
  REQUIRE(s2 == Sign::minus);
  CHECK_THROWS_AS(which_path_detect(new_double_fock(0, 3), Mode::up, 0.2),
                  std::invalid_argument);
}

TEST_CASE("trajectories follow their schedule and record one draw per step") {
  ExperimentConfig config;
  config.n_up = 10;
  config.n_down = 10;
  config.detections = 6;
  config.angle = 0.9;
  config.schedule = {DetectionMode::indistinguishable, DetectionMode::which_path_up,
                     DetectionMode::indistinguishable, DetectionMode::which_path_down,
                     DetectionMode::indistinguishable, DetectionMode::indistinguishable};
  const Trajectory t = run_trajectory(config, 31337);
  REQUIRE(t.records.size() == 6);
  REQUIRE(t.final_state.total_n == 14);
  // replay the documented consumption rule: exactly one draw per detection
  TrajectoryRng rng(31337);
  SectorState state = new_double_fock(10, 10);
  for (int step = 0; step < 6; ++step) {
    const DetectionRecord& rec = t.records[step];
    REQUIRE(rec.step == step + 1);
    REQUIRE(rec.mode == config.schedule[step]);
    REQUIRE(rec.angle == 0.9);
    const double draw = rng.next_unit();
    if (rec.mode == DetectionMode::indistinguishable) {
      const auto [p_plus, p_minus] = detection_probabilities(state, config.angle);
      const Sign expected = draw < p_plus ? Sign::plus : Sign::minus;
      REQUIRE(rec.outcome == sign_value(expected));
      REQUIRE(rec.probability == (expected == Sign::plus ? p_plus : p_minus));
      state = collapse(state, config.angle, expected).first;
    } else {
      REQUIRE(rec.outcome == (draw < 0.5 ? +1 : -1));
      REQUIRE(rec.probability == 0.5);
      const Mode source =
          rec.mode == DetectionMode::which_path_up ? Mode::up : Mode::down;
      state = which_path_detect(state, source, draw).first;
    }
  }
  REQUIRE_THAT(fidelity(state, t.final_state), Catch::Matchers::WithinAbs(1.0, 1e-14));
}

TEST_CASE("sampled outcome frequencies stay fair at every step") {
  // unconditional P(+ at step j) = 1/2 is exact (martingale); sampling 600
  // trajectories should sit within 5 sigma ~ 0.1 of it
  ExperimentConfig config;
  config.n_up = 8;
  config.n_down = 8;
  config.detections = 3;
  config.master_seed = 2024;
  config.trajectories = 600;
  const std::vector<Trajectory> ensemble = run_ensemble(config);
  for (int step = 0; step < 3; ++step) {
    int plus = 0;
    for (const Trajectory& t : ensemble) plus += (t.records[step].outcome > 0);
    REQUIRE_THAT(plus / 600.0, Catch::Matchers::WithinAbs(0.5, 0.1));
  }
}

TEST_CASE("ensembles use the documented per-index seeds") {
  ExperimentConfig config;
  config.n_up = 5;
  config.n_down = 5;
  config.detections = 4;
  config.master_seed = 777;
  config.trajectories = 8;
  const std::vector<Trajectory> ensemble = run_ensemble(config);
  REQUIRE(ensemble.size() == 8);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    REQUIRE(ensemble[i].seed == mix_seed(777, i));
    const Trajectory replay = run_trajectory(config, ensemble[i].seed);
    REQUIRE_THAT(fidelity(replay.final_state, ensemble[i].final_state),
                 Catch::Matchers::WithinAbs(1.0, 1e-15));
  }
  config.master_seed.reset();
  CHECK_THROWS_AS(run_ensemble(config), std::invalid_argument);
}

TEST_CASE("trajectory summaries describe the final state") {
  ExperimentConfig config;
  config.n_up = 30;
  config.n_down = 30;
  config.detections = 10;
  const Trajectory t = run_trajectory(config, 5);
  const SpinExpectation spin = expect_spin(t.final_state);
  REQUIRE(t.summary.spin.sx == spin.sx);
  REQUIRE(t.summary.spin.sy == spin.sy);
  REQUIRE(t.summary.spin.sz == spin.sz);
  const PhaseFit fit = phase_manifold_fidelity(t.final_state);
  REQUIRE(t.summary.estimated_phase == fit.best_phi);
  REQUIRE(t.summary.phase_fidelity == fit.fidelity);
}

TEST_CASE("config validation names the offending key") {
  ExperimentConfig config;
  config.n_up = 2;
  config.n_down = 2;
  config.detections = 10;  // more than the particles available
  auto errors = config.validate();
  REQUIRE_FALSE(errors.empty());
  REQUIRE(errors.front().find("detections") == 0);

  config.detections = 3;
  config.schedule = {DetectionMode::indistinguishable};  // wrong length
  errors = config.validate();
  REQUIRE_FALSE(errors.empty());
  REQUIRE(errors.front().find("schedule") == 0);

  config.schedule = {DetectionMode::which_path_up, DetectionMode::which_path_up,
                     DetectionMode::which_path_up};  // 3 up draws, only 2 up particles
  errors = config.validate();
  REQUIRE_FALSE(errors.empty());
  REQUIRE(errors.front().find("schedule") == 0);

  config.schedule.clear();
  config.trajectories = 0;
  errors = config.validate();
  REQUIRE_FALSE(errors.empty());
  REQUIRE(errors.front().find("trajectories") == 0);
}
