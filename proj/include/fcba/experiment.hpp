#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fcba/instances.hpp"
#include "fcba/models.hpp"
#include "fcba/policies.hpp"
#include "fcba/rng.hpp"

namespace fcba {

struct ExperimentConfig {
  /// Generated instance; ignored when `instance` is set.
  InstanceSpec generator;
  /// Draw a fresh generated instance for every replication instead of one per experiment.
  bool redraw_per_replication = false;
  std::optional<ProblemInstance> instance;

  std::vector<Policy> policies;
  std::int64_t budget = 0;
  std::int64_t t0 = 3;
  std::int64_t macro_reps = 1;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> checkpoints;  ///< empty means {budget}
  bool posthoc = false;                   ///< collect plug-in PCS estimates at the final checkpoint

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  std::size_t k() const;
  std::vector<std::int64_t> resolved_checkpoints() const;
};

struct CheckpointStats {
  std::int64_t checkpoint = 0;
  std::int64_t correct = 0;
  double pcs = 0.0;
  double std_error = 0.0;
  std::vector<double> mean_ratios;               ///< T_i / N averaged over replications
  std::vector<double> mean_ratios_given_correct; ///< same, over correct replications only
  double true_best_ratio = 0.0;                  ///< T_best / N averaged over replications
  double true_best_extra_ratio = 0.0;            ///< (T_best - t0) / (N - k t0) averaged over replications
  double true_best_extra_ratio_given_correct = 0.0;
};

struct PosthocSummary {
  double mean_v0 = 0.0;  ///< mean of 1 - V0 estimate
  double sd_v0 = 0.0;
  double mean_ldr = 0.0;
  double sd_ldr = 0.0;
};

struct PolicyCurve {
  Policy policy;
  std::vector<CheckpointStats> points;
  std::optional<PosthocSummary> posthoc;
};

struct PcsCurve {
  std::size_t k = 0;
  std::int64_t macro_reps = 0;
  std::vector<PolicyCurve> curves;

  const PolicyCurve& curve(const Policy& policy) const;
};

/// Macro-replications in parallel; threads <= 0 uses the OpenMP default. The result does not
/// depend on the thread count.
PcsCurve run_experiment(const ExperimentConfig& config, int threads = 0);
/// Single-threaded reference with the same per-replication kernel.
PcsCurve run_experiment_serial(const ExperimentConfig& config);

/// One observation from `alt` drawn with `rng`.
double draw_sample(const AlternativeModel& alt, CounterRng& rng);

}  // namespace fcba
