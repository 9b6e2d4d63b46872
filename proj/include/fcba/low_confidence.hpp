#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fcba/expansion.hpp"
#include "fcba/models.hpp"
#include "fcba/rng.hpp"
#include "fcba/state.hpp"

namespace fcba {

/// Critical point of a subset S (containing the best) and the derived SIBC rate and order.
struct SubsetAnalysis {
  std::vector<std::size_t> subset;  ///< sorted, contains the best index
  double critical_point = 0.0;      ///< x* minimizing J_S
  double rate = 0.0;                ///< J_S(x*)
  int order = 1;                    ///< l_S = |S| - 1 - active_count
  int active_count = 0;             ///< sub-optimal i in S with m_i >= x*
};

/// J_S(x) = p_b I_b(x) + sum_{i in S, i != b} p_i I_i(max(x, m_i)).
double subset_rate(const ProblemInstance& instance, const SamplingRatios& ratios, const std::vector<std::size_t>& subset,
                   double x);

/// Gaussian subsets use the weighted-mean closed form when it exceeds every sub-optimal mean in S;
/// otherwise x* comes from bisection on J_S'.
SubsetAnalysis critical_point(const ProblemInstance& instance, const SamplingRatios& ratios,
                              std::vector<std::size_t> subset);

namespace detail {
/// Minimizer of J_S by bisection on its monotone derivative; `subset` must be normalized.
double critical_point_bisection(const ProblemInstance& instance, const SamplingRatios& ratios,
                                const std::vector<std::size_t>& subset);
}  // namespace detail

struct SibcEstimate {
  double value = 0.0;   ///< exp(-T J_S) c_S / T^{l_S/2}
  double std_error = 0.0;  ///< Monte Carlo standard error of value
  double c_s = 0.0;
  double c_s_std_error = 0.0;
  SubsetAnalysis analysis;
};

inline constexpr std::int64_t kDefaultMcBudget = 1'000'000;
inline constexpr std::size_t kMaxRefinedSize = 12;

/// Expansion of P(mean_best <= min_{j in S} mean_j). The Gaussian expectation inside c_S is
/// estimated with `mc_budget` draws from `rng`.
SibcEstimate sibc_probability_approx(const ProblemInstance& instance, const SamplingRatios& ratios,
                                     std::vector<std::size_t> subset, double T, std::int64_t mc_budget,
                                     CounterRng& rng);

/// Whether the k = 3 ratios sit on the side of the critical line where both pairwise terms carry full weight.
bool k3_critical_line(const ProblemInstance& instance, const SamplingRatios& ratios);

/// Piecewise k = 3 Gaussian approximation of 1 - PCS.
ApproxReport refined_pics_k3(const ProblemInstance& instance, const SamplingRatios& ratios, double T);

struct RefinedTerm {
  std::vector<std::size_t> subset;
  int sign = 1;
  double rate = 0.0;
  double c_s = 0.0;
  double mc_std_error = 0.0;
  double value = 0.0;  ///< signed contribution
};

struct RefinedReport {
  std::vector<RefinedTerm> terms;
  double total = 0.0;
  double budget = 0.0;
};

/// Inclusion-exclusion over subsets with l_S = 1. Every subset reuses the same random numbers.
RefinedReport refined_pics_general(const ProblemInstance& instance, const SamplingRatios& ratios, double T,
                                   std::int64_t mc_budget, CounterRng& rng);

/// Plug-in critical-line test of the low-confidence policy: true when some j outside the two
/// leading sample means satisfies (s_j/p_j)(m* - m**) > (s*/p*)(m** - m_j).
bool lc_trigger(const AllocationState& state);

}  // namespace fcba
