// Sequential single-particle detection: channel probabilities, projective
// collapse, which-path detections, and seeded Monte Carlo trajectories.
//
// Randomness contract (also documented in the README):
//   - generator: std::mt19937_64 seeded directly with the trajectory seed;
//   - uniform draws: (engine() >> 11) * 2^-53, i.e. the top 53 bits mapped
//     to [0, 1);
//   - exactly one draw is consumed per detection, in schedule order;
//   - trajectory i of an ensemble uses seed mix_seed(master_seed, i), a
//     SplitMix64-style finalizer, so members are independent of execution
//     order and of how the ensemble is partitioned.

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "twinfock/analysis.hpp"
#include "twinfock/fock.hpp"

namespace twinfock {

enum class DetectionMode { indistinguishable, which_path_up, which_path_down };

inline std::string mode_name(DetectionMode m) {
  switch (m) {
    case DetectionMode::indistinguishable: return "indistinguishable";
    case DetectionMode::which_path_up: return "which_path_up";
    case DetectionMode::which_path_down: return "which_path_down";
  }
  return "?";
}

struct DetectionRecord {
  int step = 0;        // 1-based position in the trajectory
  double angle = 0.0;  // analyzer angle theta of the run
  int outcome = 0;     // +1 or -1
  double probability = 0.0;  // probability of the realized outcome
  DetectionMode mode = DetectionMode::indistinguishable;
};

struct ExperimentConfig {
  long long n_up = 0;
  long long n_down = 0;
  int detections = 0;
  double angle = 0.0;
  std::vector<DetectionMode> schedule;  // empty = all indistinguishable
  std::optional<std::uint64_t> master_seed;
  int trajectories = 1;

  // Returns human-readable problems, each beginning with the offending
  // config key, so the CLI can fail with a precise diagnostic.
  std::vector<std::string> validate() const {
    std::vector<std::string> errors;
    if (n_up < 0) errors.push_back("n_up: must be nonnegative");
    if (n_down < 0) errors.push_back("n_down: must be nonnegative");
    if (n_up + n_down < 1) errors.push_back("n_up: total particle count must be at least 1");
    if (detections < 0) errors.push_back("detections: must be nonnegative");
    if (detections >= n_up + n_down)
      errors.push_back("detections: must be less than the total particle count");
    if (!schedule.empty() && schedule.size() != static_cast<std::size_t>(detections))
      errors.push_back("schedule: length must equal detections");
    long long ups = 0, downs = 0;
    for (DetectionMode m : schedule) {
      if (m == DetectionMode::which_path_up) ++ups;
      if (m == DetectionMode::which_path_down) ++downs;
    }
    if (ups > n_up) errors.push_back("schedule: more which_path(up) steps than up particles");
    if (downs > n_down)
      errors.push_back("schedule: more which_path(down) steps than down particles");
    if (trajectories < 1) errors.push_back("trajectories: must be at least 1");
    return errors;
  }

  DetectionMode mode_at(int step_index) const {
    if (schedule.empty()) return DetectionMode::indistinguishable;
    return schedule[static_cast<std::size_t>(step_index)];
  }
};

struct TrajectorySummary {
  double estimated_phase = 0.0;  // manifold argmax of the final state
  double phase_fidelity = 0.0;   // overlap with the best phase state
  SpinExpectation spin;
};

struct Trajectory {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::vector<DetectionRecord> records;
  SectorState final_state;
  TrajectorySummary summary;
};

// SplitMix64 finalizer over master_seed advanced by (index + 1) golden-ratio
// increments. Constants are the standard SplitMix64 ones (Steele et al.).
inline std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class TrajectoryRng {
 public:
  explicit TrajectoryRng(std::uint64_t seed) : engine_(seed) {}
  // Top 53 bits to a double in [0, 1).
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

namespace detail {
// Branches with probability below this are treated as impossible: genuine
// branches carry at least O(1/n) probability while annihilated channels sit
// at rounding level (<= 1e-18 by the orthogonal-channel property).
inline constexpr double zero_branch_cutoff = 1e-15;
}  // namespace detail

// (p_plus, p_minus) with p = squared-norm(c_{theta,+-} psi) / n. The channel
// identity guarantees p_plus + p_minus = 1 up to rounding.
inline std::pair<double, double> detection_probabilities(const SectorState& state, double angle) {
  detail::require(state.total_n >= 1, "detection_probabilities: vacuum input");
  const double n = static_cast<double>(state.total_n);
  const double wp = apply_channel(state, angle, Sign::plus).second;
  const double wm = apply_channel(state, angle, Sign::minus).second;
  return {wp / n, wm / n};
}

// Normalized post-detection state and the probability of the requested
// outcome. Forcing a zero-probability branch is a caller bug and throws.
inline std::pair<SectorState, double> collapse(const SectorState& state, double angle,
                                               Sign outcome) {
  detail::require(state.total_n >= 1, "collapse: vacuum input");
  auto [next, weight] = apply_channel(state, angle, outcome);
  const double probability = weight / static_cast<double>(state.total_n);
  detail::require(probability > detail::zero_branch_cutoff,
                  "collapse: zero-probability branch requested");
  normalize(next);
  return {std::move(next), probability};
}

// Detection with a known source condensate: the collapse operator is the bare
// a_up or a_down, and the +- outcome is a fair coin (rng_draw < 1/2 means +)
// that does not touch the state. A double Fock input therefore stays a double
// Fock with one fewer particle in the chosen mode.
inline std::pair<SectorState, Sign> which_path_detect(const SectorState& state, Mode source,
                                                      double rng_draw) {
  detail::require(state.total_n >= 1, "which_path_detect: vacuum input");
  auto [next, weight] = apply_annihilation(state, source);
  detail::require(weight / static_cast<double>(state.total_n) > detail::zero_branch_cutoff,
                  "which_path_detect: annihilating an empty mode");
  normalize(next);
  return {std::move(next), rng_draw < 0.5 ? Sign::plus : Sign::minus};
}

namespace detail {

inline TrajectorySummary summarize(const SectorState& final_state) {
  TrajectorySummary s;
  const PhaseFit fit = phase_manifold_fidelity(final_state);
  s.estimated_phase = fit.best_phi;
  s.phase_fidelity = fit.fidelity;
  s.spin = expect_spin(final_state);
  return s;
}

}  // namespace detail

// One seeded run: N_d detections from the double Fock state following the
// schedule. Indistinguishable steps sample the outcome by inverse CDF with
// the + channel occupying [0, p_plus); which-path steps flip the fair coin.
inline Trajectory run_trajectory(const ExperimentConfig& config, std::uint64_t seed) {
  {
    const auto problems = config.validate();
    detail::require(problems.empty(),
                    "run_trajectory: invalid config: " + (problems.empty() ? "" : problems.front()));
  }
  Trajectory t;
  t.config = config;
  t.seed = seed;
  t.final_state = new_double_fock(static_cast<int>(config.n_up), static_cast<int>(config.n_down));
  TrajectoryRng rng(seed);
  t.records.reserve(static_cast<std::size_t>(config.detections));
  for (int step = 0; step < config.detections; ++step) {
    const DetectionMode mode = config.mode_at(step);
    const double draw = rng.next_unit();
    DetectionRecord rec;
    rec.step = step + 1;
    rec.angle = config.angle;
    rec.mode = mode;
    if (mode == DetectionMode::indistinguishable) {
      const auto [p_plus, p_minus] = detection_probabilities(t.final_state, config.angle);
      const Sign outcome = draw < p_plus ? Sign::plus : Sign::minus;
      auto [next, probability] = collapse(t.final_state, config.angle, outcome);
      t.final_state = std::move(next);
      rec.outcome = sign_value(outcome);
      rec.probability = outcome == Sign::plus ? p_plus : p_minus;
    } else {
      const Mode source = mode == DetectionMode::which_path_up ? Mode::up : Mode::down;
      auto [next, outcome] = which_path_detect(t.final_state, source, draw);
      t.final_state = std::move(next);
      rec.outcome = sign_value(outcome);
      rec.probability = 0.5;
    }
    t.records.push_back(rec);
  }
  t.summary = detail::summarize(t.final_state);
  return t;
}

// Deterministic replay of a fixed outcome string, returning the final state
// and each step's conditional probability; reproduces the 1/2, 3/4, 5/6, ...
// cascade when fed consecutive + outcomes from a symmetric double Fock.
inline std::pair<SectorState, std::vector<double>> forced_sequence(
    const SectorState& state, double angle, const std::vector<Sign>& outcomes) {
  SectorState current = state;
  std::vector<double> probabilities;
  probabilities.reserve(outcomes.size());
  for (Sign outcome : outcomes) {
    auto [next, probability] = collapse(current, angle, outcome);
    current = std::move(next);
    probabilities.push_back(probability);
  }
  return {std::move(current), std::move(probabilities)};
}

// Ensemble of config.trajectories runs, trajectory i seeded mix_seed(master, i).
// The loop is serial; the per-index seeding makes the result independent of
// any execution order, which is the determinism contract.
inline std::vector<Trajectory> run_ensemble(const ExperimentConfig& config) {
  detail::require(config.master_seed.has_value(), "run_ensemble: master_seed is required");
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(config.trajectories));
  for (int i = 0; i < config.trajectories; ++i) {
    out.push_back(run_trajectory(config, mix_seed(*config.master_seed, static_cast<std::uint64_t>(i))));
  }
  return out;
}

}  // namespace twinfock
