#include "fcba/instances.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "fcba/errors.hpp"
#include "fcba/rng.hpp"

namespace fcba {

ProblemInstance generate_instance(const InstanceSpec& spec) {
  const std::size_t k = spec.k;
  if (k < 2) throw InvalidArgument("k must be at least 2");
  if (spec.variances != VarianceConfig::Equal && k % 5 != 0)
    throw InvalidArgument("grouped variance settings need k divisible by 5, got k = " + std::to_string(k));

  std::vector<double> means(k);
  if (spec.means == MeanConfig::Stepping) {
    for (std::size_t i = 0; i < k; ++i) means[i] = spec.mean_scale * static_cast<double>(k - i);
  } else {
    CounterRng rng(derive_seed(spec.seed, 0));
    for (;;) {
      for (auto& m : means) m = spec.mean_scale * static_cast<double>(k) * rng.uniform();
      auto sorted = means;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) break;
    }
  }

  std::vector<double> variances(k, spec.equal_variance);
  if (spec.variances != VarianceConfig::Equal) {
    std::vector<std::size_t> rank(k);
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(), [&](auto a, auto b) { return means[a] > means[b]; });
    const std::size_t group = k / 5;
    for (std::size_t r = 0; r < k; ++r) {
      const double level = static_cast<double>(r / group);
      variances[rank[r]] = spec.variances == VarianceConfig::Increasing ? 2.0 + level : 6.0 - level;
    }
  }
  return ProblemInstance::gaussian(means, variances);
}

MeanConfig parse_mean_config(std::string_view text) {
  if (text == "stepping") return MeanConfig::Stepping;
  if (text == "noisy") return MeanConfig::Noisy;
  throw InvalidArgument("unknown mean configuration '" + std::string(text) + "'");
}

VarianceConfig parse_variance_config(std::string_view text) {
  if (text == "equal") return VarianceConfig::Equal;
  if (text == "increasing") return VarianceConfig::Increasing;
  if (text == "decreasing") return VarianceConfig::Decreasing;
  throw InvalidArgument("unknown variance setting '" + std::string(text) + "'");
}

std::string_view to_string(MeanConfig c) { return c == MeanConfig::Stepping ? "stepping" : "noisy"; }

std::string_view to_string(VarianceConfig c) {
  switch (c) {
    case VarianceConfig::Equal:
      return "equal";
    case VarianceConfig::Increasing:
      return "increasing";
    case VarianceConfig::Decreasing:
      return "decreasing";
  }
  return "";
}

}  // namespace fcba
