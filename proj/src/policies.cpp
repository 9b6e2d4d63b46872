#include "fcba/policies.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "fcba/allocation_solver.hpp"
#include "fcba/errors.hpp"
#include "fcba/expansion.hpp"
#include "fcba/low_confidence.hpp"

namespace fcba {

Policy Policy::parse(std::string_view text) {
  std::string key;
  for (char c : text)
    if (std::isalnum(static_cast<unsigned char>(c))) key.push_back(static_cast<char>(std::toupper(c)));
  if (key == "EA") return {PolicyKind::EA, 0};
  if (key == "OCBA") return {PolicyKind::OCBA, 0};
  if (key == "ROA") return {PolicyKind::ROA, 0};
  auto order_of = [&](std::string_view digits) {
    if (digits.empty()) return 0;
    if (digits.size() > 2 || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw InvalidArgument("unknown policy '" + std::string(text) + "'");
    const int order = std::stoi(std::string(digits));
    detail::check_order(order);
    return order;
  };
  const std::string_view k(key);
  if (k.starts_with("LCFCBA")) {
    if (order_of(k.substr(6)) != 0) throw InvalidArgument("the low-confidence policy is defined for order 0 only");
    return {PolicyKind::LCFCBA, 0};
  }
  if (k.starts_with("FCBA")) return {PolicyKind::FCBA, order_of(k.substr(4))};
  throw InvalidArgument("unknown policy '" + std::string(text) + "'");
}

std::string Policy::name() const {
  switch (kind) {
    case PolicyKind::EA:
      return "EA";
    case PolicyKind::OCBA:
      return "OCBA";
    case PolicyKind::ROA:
      return "ROA";
    case PolicyKind::FCBA:
      return "FCBA" + std::to_string(order);
    case PolicyKind::LCFCBA:
      return "LCFCBA0";
  }
  return "";
}

std::string_view to_string(DecisionReason reason) {
  switch (reason) {
    case DecisionReason::InitialFill:
      return "InitialFill";
    case DecisionReason::BalanceBest:
      return "BalanceBest";
    case DecisionReason::ScoreCandidate:
      return "ScoreCandidate";
    case DecisionReason::LowConfidenceOverride:
      return "LowConfidenceOverride";
    case DecisionReason::TieBreak:
      return "TieBreak";
  }
  return "";
}

namespace {

void require_variances(const AllocationState& state) {
  for (std::size_t i = 0; i < state.size(); ++i)
    if (state.count(i) < 2)
      throw InvalidArgument("alternative " + std::to_string(i) + " needs at least two samples before allocation");
}

// Lowest-index alternative whose sample mean ties the estimated best.
std::optional<std::size_t> tied_with_best(const AllocationState& state, std::size_t b) {
  for (std::size_t j = 0; j < state.size(); ++j)
    if (j != b && state.mean(j) == state.mean(b)) return j;
  return std::nullopt;
}

std::size_t most_starving(const AllocationState& state, const std::vector<double>& target) {
  const double n = static_cast<double>(state.total());
  std::size_t out = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double gap = target[i] * n - static_cast<double>(state.count(i));
    if (gap > best) {
      best = gap;
      out = i;
    }
  }
  return out;
}

struct Candidate {
  std::size_t index = 0;
  bool balance = false;  ///< T_b^2/s_b > sum_j T_j^2/s_j
};

Candidate fcba_candidate(const AllocationState& state, std::size_t b, double T, int order) {
  const double n = static_cast<double>(state.total());
  const double sb = state.variance(b);
  const double tb = static_cast<double>(state.count(b));
  const double pb = tb / n;
  Candidate c;
  double best = -std::numeric_limits<double>::infinity();
  double others = 0.0;
  bool first = true;
  for (std::size_t j = 0; j < state.size(); ++j) {
    if (j == b) continue;
    const double sj = state.variance(j);
    const double tj = static_cast<double>(state.count(j));
    const double pj = tj / n;
    const double r = detail::pair_r(state.mean(b) - state.mean(j), sb, pb, sj, pj);
    const double ls = detail::log_score_raw(r, sb, pb, sj, pj, T, order);
    if (first || ls > best) {
      best = ls;
      c.index = j;
      first = false;
    }
    others += tj * tj / sj;
  }
  c.balance = tb * tb / sb > others;
  return c;
}

}  // namespace

PolicyDecision ea_step(const AllocationState& state) {
  const auto& counts = state.counts();
  const auto it = std::min_element(counts.begin(), counts.end());
  return {static_cast<std::size_t>(it - counts.begin()), DecisionReason::ScoreCandidate};
}

std::vector<double> ocba_target_ratios(const AllocationState& state) {
  require_variances(state);
  const auto b = state.best_estimate();
  if (tied_with_best(state, b)) throw InvalidArgument("OCBA targets are undefined when the leading means tie");
  const std::size_t k = state.size();
  std::vector<double> q(k, 0.0);
  double weighted = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (j == b) continue;
    const double d = state.mean(b) - state.mean(j);
    q[j] = state.variance(j) / (d * d);
    weighted += q[j] * q[j] / state.variance(j);
  }
  q[b] = std::sqrt(state.variance(b) * weighted);
  double sum = 0.0;
  for (double v : q) sum += v;
  for (double& v : q) v /= sum;
  return q;
}

PolicyDecision ocba_step(const AllocationState& state) {
  require_variances(state);
  const auto b = state.best_estimate();
  if (auto tie = tied_with_best(state, b)) return {*tie, DecisionReason::TieBreak};
  // same balance test as FCBA; the candidate is the smallest OCBA score d_j^2 T_j / s_j
  double others = 0.0;
  double lowest = std::numeric_limits<double>::infinity();
  std::size_t candidate = b;
  for (std::size_t j = 0; j < state.size(); ++j) {
    if (j == b) continue;
    const double tj = static_cast<double>(state.count(j));
    const double sj = state.variance(j);
    const double d = state.mean(b) - state.mean(j);
    others += tj * tj / sj;
    const double s = d * d * tj / sj;
    if (s < lowest) {
      lowest = s;
      candidate = j;
    }
  }
  const double tb = static_cast<double>(state.count(b));
  if (tb * tb / state.variance(b) > others) return {candidate, DecisionReason::ScoreCandidate};
  return {b, DecisionReason::BalanceBest};
}

PolicyDecision roa_step(const AllocationState& state) {
  require_variances(state);
  const auto b = state.best_estimate();
  if (auto tie = tied_with_best(state, b)) return {*tie, DecisionReason::TieBreak};
  std::vector<double> m(state.size());
  std::vector<double> v(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    m[i] = state.mean(i);
    v[i] = state.variance(i);
  }
  const auto ratios = solve_roa(ProblemInstance::gaussian(m, v));
  const auto i = most_starving(state, ratios.values());
  return {i, i == b ? DecisionReason::BalanceBest : DecisionReason::ScoreCandidate};
}

PolicyDecision fcba_step(const AllocationState& state, double T, int order) {
  detail::check_order(order);
  require_variances(state);
  if (!(static_cast<double>(state.total()) < T)) throw InvalidArgument("simulation budget exhausted");
  const auto b = state.best_estimate();
  if (auto tie = tied_with_best(state, b)) return {*tie, DecisionReason::TieBreak};
  const auto c = fcba_candidate(state, b, T, order);
  if (c.balance) return {c.index, DecisionReason::ScoreCandidate};
  return {b, DecisionReason::BalanceBest};
}

PolicyDecision lc_fcba_step(const AllocationState& state, double T) {
  require_variances(state);
  if (!(static_cast<double>(state.total()) < T)) throw InvalidArgument("simulation budget exhausted");
  const auto b = state.best_estimate();
  if (auto tie = tied_with_best(state, b)) return {*tie, DecisionReason::TieBreak};
  const auto c = fcba_candidate(state, b, T, 0);
  if (c.balance) return {c.index, DecisionReason::ScoreCandidate};
  if (lc_trigger(state)) return {c.index, DecisionReason::LowConfidenceOverride};
  return {b, DecisionReason::BalanceBest};
}

PolicyDecision initial_fill_step(const AllocationState& state, std::int64_t t0) {
  for (std::size_t i = 0; i < state.size(); ++i)
    if (state.count(i) < t0) return {i, DecisionReason::InitialFill};
  return {state.size(), DecisionReason::InitialFill};
}

PolicyDecision decide(const Policy& policy, const AllocationState& state, double T) {
  switch (policy.kind) {
    case PolicyKind::EA:
      return ea_step(state);
    case PolicyKind::OCBA:
      return ocba_step(state);
    case PolicyKind::ROA:
      return roa_step(state);
    case PolicyKind::FCBA:
      return fcba_step(state, T, policy.order);
    case PolicyKind::LCFCBA:
      return lc_fcba_step(state, T);
  }
  throw InvalidArgument("unknown policy kind");
}

}  // namespace fcba
