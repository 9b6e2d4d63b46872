#include "fcba/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "fcba/errors.hpp"

namespace fcba {

namespace detail {

void check_order(int order) {
  if (order < 0 || order > kMaxOrder)
    throw InvalidArgument("expansion order must lie in [0, " + std::to_string(kMaxOrder) + "], got " +
                          std::to_string(order));
}

void check_positive(double x, const char* what) {
  if (!(x > 0.0)) throw DomainError(std::string(what) + " must be positive, got " + std::to_string(x));
}

double double_factorial_odd(int l) {
  double out = 1.0;
  for (int i = 1; i <= l; ++i) out *= 2.0 * i - 1.0;
  return out;
}

namespace {

// U = e^g P(x), U' = e^g Q(x) with Q = -T/2 + c x^{-(l+1)}.
double log_envelope(double x, double T) { return -0.5 * T * x - 0.5 * std::log(x); }

double tail_coefficient(double T, int order) {
  const double sign = (order % 2 == 0) ? -1.0 : 1.0;
  return 0.5 * sign * double_factorial_odd(order + 1) / std::pow(T, order);
}

double q_factor(double x, double T, int order) {
  return -0.5 * T + tail_coefficient(T, order) / std::pow(x, order + 1);
}

}  // namespace

double log_score_raw(double r, double s1, double p1, double sj, double pj, double T, int order) {
  if (!(r > 0.0)) return std::numeric_limits<double>::infinity();
  const double log_abs_q = std::log(std::abs(q_factor(r, T, order)));
  return log_envelope(r, T) + log_abs_q + std::log(r) + std::log(sj) - 2.0 * std::log(pj) -
         std::log(s1 / p1 + sj / pj);
}

}  // namespace detail

using detail::check_order;
using detail::check_positive;

SamplingRatios::SamplingRatios(std::vector<double> p) : p_(std::move(p)) {
  if (p_.size() < 2) throw InvalidArgument("sampling ratios need at least two entries");
  double sum = 0.0;
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!(p_[i] > 0.0) || !std::isfinite(p_[i]))
      throw InvalidArgument("sampling ratio p_" + std::to_string(i + 1) + " must be positive");
    sum += p_[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("sampling ratios must sum to 1, got " + std::to_string(sum));
}

SamplingRatios SamplingRatios::uniform(std::size_t k) {
  return SamplingRatios(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

SamplingRatios SamplingRatios::from_counts(std::span<const std::int64_t> counts) {
  const auto n = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  if (n <= 0) throw InvalidArgument("counts must have a positive total");
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  return SamplingRatios(std::move(p));
}

double u_ell(double x, double T, int order) {
  check_order(order);
  check_positive(x, "u_ell argument x");
  check_positive(T, "budget T");
  double poly = 1.0;
  double term = 1.0;
  for (int l = 1; l <= order; ++l) {
    term *= -(2.0 * l - 1.0) / (x * T);
    poly += term;
  }
  return std::exp(detail::log_envelope(x, T)) * poly;
}

double u_ell_prime(double x, double T, int order) {
  check_order(order);
  check_positive(x, "u_ell argument x");
  check_positive(T, "budget T");
  return std::exp(detail::log_envelope(x, T)) * detail::q_factor(x, T, order);
}

double u_ell_second(double x, double T, int order) {
  check_order(order);
  check_positive(x, "u_ell argument x");
  check_positive(T, "budget T");
  const double c = detail::tail_coefficient(T, order);
  const double q = detail::q_factor(x, T, order);
  const double dg = -0.5 * T - 0.5 / x;
  const double dq = -(order + 1) * c / std::pow(x, order + 2);
  return std::exp(detail::log_envelope(x, T)) * (dg * q + dq);
}

double log_abs_u_ell_prime(double x, double T, int order) {
  check_order(order);
  check_positive(x, "u_ell argument x");
  check_positive(T, "budget T");
  return detail::log_envelope(x, T) + std::log(std::abs(detail::q_factor(x, T, order)));
}

namespace {

void require_gaussian(const ProblemInstance& instance) {
  if (!instance.all_gaussian()) throw UnsupportedModel("operation requires an all-Gaussian instance");
}

void require_compatible(const ProblemInstance& instance, const SamplingRatios& ratios) {
  if (ratios.size() != instance.size())
    throw InvalidArgument("ratio vector has " + std::to_string(ratios.size()) + " entries, instance has " +
                          std::to_string(instance.size()));
}

void require_suboptimal(const ProblemInstance& instance, std::size_t j) {
  if (j >= instance.size() || j == instance.best_index())
    throw InvalidArgument("index " + std::to_string(j) + " is not a sub-optimal alternative");
}

}  // namespace

double r_j(const ProblemInstance& instance, std::size_t j, const SamplingRatios& ratios) {
  require_gaussian(instance);
  require_compatible(instance, ratios);
  require_suboptimal(instance, j);
  const auto b = instance.best_index();
  return detail::pair_r(instance[b].mean() - instance[j].mean(), instance[b].variance(), ratios[b],
                        instance[j].variance(), ratios[j]);
}

ApproxReport v_ell(const ProblemInstance& instance, const SamplingRatios& ratios, double T, int order) {
  check_order(order);
  check_positive(T, "budget T");
  require_gaussian(instance);
  require_compatible(instance, ratios);
  ApproxReport report;
  report.order = order;
  report.budget = T;
  report.variant = ApproxVariant::Expansion;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * T);
  for (std::size_t j = 0; j < instance.size(); ++j) {
    if (j == instance.best_index()) continue;
    const double r = r_j(instance, j, ratios);
    PairTerm term{j, 0.5 * r, std::sqrt(r), u_ell(r, T, order) * norm};
    report.total += term.value;
    report.terms.push_back(term);
  }
  return report;
}

double pics_expansion_binary(const AlternativeModel& best, const AlternativeModel& subopt, double p1, double pj,
                             double T, int order) {
  check_order(order);
  check_positive(T, "budget T");
  const bool gaussian = best.is_gaussian() && subopt.is_gaussian();
  if (order > 0 && !gaussian)
    throw UnsupportedModel("expansion orders above zero are available for Gaussian pairs only");
  const auto q = pairwise_quantities(best, subopt, p1, pj);
  double poly = 1.0;
  if (order > 0) {
    const double r = 2.0 * q.rate;
    double term = 1.0;
    for (int l = 1; l <= order; ++l) {
      term *= -(2.0 * l - 1.0) / (r * T);
      poly += term;
    }
  }
  return std::exp(-T * q.rate) / (std::sqrt(2.0 * std::numbers::pi * T) * q.prefactor) * poly;
}

double ldr_pics(const ProblemInstance& instance, const SamplingRatios& ratios, double T) {
  require_compatible(instance, ratios);
  check_positive(T, "budget T");
  const auto b = instance.best_index();
  double min_rate = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < instance.size(); ++j) {
    if (j == b) continue;
    min_rate = std::min(min_rate, pairwise_quantities(instance[b], instance[j], ratios[b], ratios[j]).rate);
  }
  return std::exp(-T * min_rate);
}

double score(const ProblemInstance& instance, std::size_t j, const SamplingRatios& ratios, double T, int order) {
  check_order(order);
  check_positive(T, "budget T");
  const double r = r_j(instance, j, ratios);
  const auto b = instance.best_index();
  return std::exp(detail::log_score_raw(r, instance[b].variance(), ratios[b], instance[j].variance(), ratios[j], T,
                                        order));
}

double posthoc_pcs_estimate(const AllocationState& state, double T, PosthocVariant variant) {
  check_positive(T, "budget T");
  const std::size_t k = state.size();
  if (k < 2) throw InvalidArgument("post-hoc estimate needs at least two alternatives");
  const double n = static_cast<double>(state.total());
  const auto b = state.best_estimate();
  const double sb = state.variance(b);
  const double pb = static_cast<double>(state.count(b)) / n;
  double sum = 0.0;
  double min_r = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    if (j == b) continue;
    const double pj = static_cast<double>(state.count(j)) / n;
    const double r = detail::pair_r(state.mean(b) - state.mean(j), sb, pb, state.variance(j), pj);
    if (!(r > 0.0)) return 0.0;
    min_r = std::min(min_r, r);
    if (variant == PosthocVariant::V0) sum += std::exp(-0.5 * r * T - 0.5 * std::log(r));
  }
  const double v = variant == PosthocVariant::V0 ? sum / std::sqrt(2.0 * std::numbers::pi * T)
                                                 : std::exp(-0.5 * T * min_r);
  return std::clamp(1.0 - v, 0.0, 1.0);
}

}  // namespace fcba
