#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fcba/state.hpp"

namespace fcba {

enum class PolicyKind { EA, OCBA, ROA, FCBA, LCFCBA };

struct Policy {
  PolicyKind kind = PolicyKind::EA;
  int order = 0;  ///< expansion order; FCBA and LCFCBA only

  /// Accepts EA, OCBA, ROA, FCBA<l>, FCBA(<l>), LCFCBA0, LC-FCBA(0); case-insensitive.
  static Policy parse(std::string_view text);
  std::string name() const;

  friend bool operator==(const Policy&, const Policy&) = default;
};

enum class DecisionReason { InitialFill, BalanceBest, ScoreCandidate, LowConfidenceOverride, TieBreak };

std::string_view to_string(DecisionReason reason);

struct PolicyDecision {
  std::size_t index = 0;
  DecisionReason reason = DecisionReason::InitialFill;
};

/// Round-robin: fewest samples, lowest index on ties.
PolicyDecision ea_step(const AllocationState& state);
/// Plug-in OCBA ratios: q_j ~ s_j/d_j^2 and q_b = sqrt(s_b sum_j q_j^2/s_j), normalized.
std::vector<double> ocba_target_ratios(const AllocationState& state);
/// Sequential OCBA: sample the estimated best while T_b^2/s_b <= sum_j T_j^2/s_j, otherwise the
/// sub-optimal alternative with the smallest d_j^2 T_j / s_j. Counts track ocba_target_ratios.
PolicyDecision ocba_step(const AllocationState& state);
/// Most starving alternative against plug-in rate-optimal ratios.
PolicyDecision roa_step(const AllocationState& state);
/// One step of FCBA(order); T is the total budget.
PolicyDecision fcba_step(const AllocationState& state, double T, int order);
/// FCBA(0) with the critical-line override.
PolicyDecision lc_fcba_step(const AllocationState& state, double T);

/// First alternative with fewer than t0 samples, if any; index == size() otherwise.
PolicyDecision initial_fill_step(const AllocationState& state, std::int64_t t0);

PolicyDecision decide(const Policy& policy, const AllocationState& state, double T);

}  // namespace fcba
