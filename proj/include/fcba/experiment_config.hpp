#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fcba/errors.hpp"
#include "fcba/experiment.hpp"

namespace fcba {

/// Invalid experiment configuration. what() starts with the offending field name.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Parses the JSON config document and validates it.
///
/// {
///   "instance": {"generator": "stepping" | "noisy", "k": 50, "variance": "equal" | "increasing" | "decreasing",
///                "variance_value": 4, "mean_scale": 0.1, "seed": 1, "redraw_per_replication": false}
///            | {"alternatives": [{"model": "gaussian", "mean": 1, "variance": 1},
///                                {"model": "exponential", "mean": 2}]},
///   "policies": ["EA", "OCBA", "ROA", "FCBA0", "LCFCBA0"],
///   "budget": 1000, "t0": 3, "macro_reps": 10000, "seed": 7,
///   "checkpoints": [500, 1000] | {"start": 101, "stop": 200, "step": 1},
///   "posthoc": false
/// }
ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace fcba
