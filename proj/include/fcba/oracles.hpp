#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fcba/models.hpp"

namespace fcba {

/// P(mean_best <= mean_subopt) for Gaussian alternatives with T1 and T2 samples.
double exact_binary_pics(const AlternativeModel& best, const AlternativeModel& subopt, double T1, double T2);

enum class EventKind {
  All,  ///< mean_best <= min_{j in S} mean_j
  Any,  ///< mean_best <= max_{j in S} mean_j
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

inline constexpr std::int64_t kMinMcDraws = 1000;

/// Brute-force estimate of the event over sample means with the given per-alternative counts.
/// Draw d is generated from the stream keyed by (seed, d), so the result does not depend on threading.
McEstimate mc_event_probability(const ProblemInstance& instance, std::span<const std::int64_t> counts,
                                const std::vector<std::size_t>& subset, std::int64_t draws, std::uint64_t seed,
                                EventKind kind = EventKind::All);

/// P(mean_best <= min_{j in S} mean_j) for Gaussian alternatives by one-dimensional quadrature of
/// f_best(x) * prod_j P(mean_j >= x).
double gaussian_event_probability(const ProblemInstance& instance, std::span<const std::int64_t> counts,
                                  const std::vector<std::size_t>& subset);

}  // namespace fcba
