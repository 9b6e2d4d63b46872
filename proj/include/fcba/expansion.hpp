#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fcba/models.hpp"
#include "fcba/state.hpp"

namespace fcba {

/// Point on the open simplex: every p_i > 0 and the entries sum to one.
class SamplingRatios {
 public:
  explicit SamplingRatios(std::vector<double> p);

  static SamplingRatios uniform(std::size_t k);
  static SamplingRatios from_counts(std::span<const std::int64_t> counts);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& values() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

enum class ApproxVariant { Expansion, LDR, RefinedK3, RefinedGeneral };

struct PairTerm {
  std::size_t j = 0;
  double rate = 0.0;
  double prefactor = 0.0;
  double value = 0.0;
};

struct ApproxReport {
  std::vector<PairTerm> terms;
  double total = 0.0;
  int order = 0;
  double budget = 0.0;
  ApproxVariant variant = ApproxVariant::Expansion;
  std::optional<bool> critical_line;
};

inline constexpr int kMaxOrder = 10;

/// U_l(x; T) = exp(-Tx/2 - ln(x)/2) * (1 + sum_{l=1..order} (-1)^l (2l-1)!! / (xT)^l).
double u_ell(double x, double T, int order);
/// dU_l/dx in closed form.
double u_ell_prime(double x, double T, int order);
/// d^2U_l/dx^2 in closed form.
double u_ell_second(double x, double T, int order);
/// log|dU_l/dx|; finite even where u_ell_prime underflows.
double log_abs_u_ell_prime(double x, double T, int order);

/// R_j = (m_best - m_j)^2 / (s_best/p_best + s_j/p_j) for a Gaussian instance.
double r_j(const ProblemInstance& instance, std::size_t j, const SamplingRatios& ratios);

/// sum_j U_l(R_j)/sqrt(2 pi T): the order-l approximation of 1 - PCS.
ApproxReport v_ell(const ProblemInstance& instance, const SamplingRatios& ratios, double T, int order);

/// Expansion of P(mean_best <= mean_subopt) at budget T.
double pics_expansion_binary(const AlternativeModel& best, const AlternativeModel& subopt, double p1, double pj,
                             double T, int order);

/// exp(-T min_j G_j).
double ldr_pics(const ProblemInstance& instance, const SamplingRatios& ratios, double T);

/// |U'_l(R_j)| R_j (s_j/p_j^2) / (s_best/p_best + s_j/p_j); +inf when R_j = 0.
double score(const ProblemInstance& instance, std::size_t j, const SamplingRatios& ratios, double T, int order);

enum class PosthocVariant { V0, LDR };

/// Plug-in PCS estimate from a finished replication, clamped to [0, 1].
double posthoc_pcs_estimate(const AllocationState& state, double T, PosthocVariant variant);

namespace detail {

void check_order(int order);
void check_positive(double x, const char* what);

/// (2l-1)!! for l >= 0, exact in double up to l = kMaxOrder + 1.
double double_factorial_odd(int l);

/// R = d^2 / (s1/p1 + sj/pj) on raw values.
inline double pair_r(double d, double s1, double p1, double sj, double pj) { return d * d / (s1 / p1 + sj / pj); }

/// log of the score on raw plug-ins; +inf when r == 0.
double log_score_raw(double r, double s1, double p1, double sj, double pj, double T, int order);

}  // namespace detail

}  // namespace fcba
