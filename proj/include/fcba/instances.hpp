#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "fcba/models.hpp"

namespace fcba {

enum class MeanConfig { Stepping, Noisy };
enum class VarianceConfig { Equal, Increasing, Decreasing };

struct InstanceSpec {
  MeanConfig means = MeanConfig::Stepping;
  std::size_t k = 10;
  VarianceConfig variances = VarianceConfig::Equal;
  double equal_variance = 4.0;
  double mean_scale = 0.1;  ///< stepping: scale * (k + 1 - i); noisy: scale * k * U[0, 1]
  std::uint64_t seed = 0;
};

/// Stepping or noisy means with equal or quintile-grouped variances. Grouped variances follow
/// the mean ranking: the top fifth gets 2 (increasing) or 6 (decreasing).
ProblemInstance generate_instance(const InstanceSpec& spec);

MeanConfig parse_mean_config(std::string_view text);
VarianceConfig parse_variance_config(std::string_view text);
std::string_view to_string(MeanConfig c);
std::string_view to_string(VarianceConfig c);

}  // namespace fcba
