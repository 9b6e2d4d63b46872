#include "fcba/oracles.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "fcba/errors.hpp"
#include "fcba/rng.hpp"

namespace fcba {

double exact_binary_pics(const AlternativeModel& best, const AlternativeModel& subopt, double T1, double T2) {
  if (!best.is_gaussian() || !subopt.is_gaussian()) throw UnsupportedModel("exact binary PICS needs Gaussian models");
  if (!(T1 >= 1.0) || !(T2 >= 1.0)) throw InvalidArgument("sample counts must be at least 1");
  const double sd = std::sqrt(best.variance() / T1 + subopt.variance() / T2);
  return 0.5 * std::erfc((best.mean() - subopt.mean()) / (sd * std::numbers::sqrt2));
}

namespace {

std::vector<std::size_t> others_in(const ProblemInstance& instance, std::span<const std::int64_t> counts,
                                   const std::vector<std::size_t>& subset) {
  if (counts.size() != instance.size()) throw InvalidArgument("counts and instance differ in length");
  for (auto c : counts)
    if (c < 1) throw InvalidArgument("every alternative needs at least one sample");
  std::vector<std::size_t> out;
  for (auto i : subset) {
    if (i >= instance.size()) throw InvalidArgument("subset index out of range");
    if (i != instance.best_index() && std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
  }
  if (out.empty()) throw InvalidArgument("event subset needs a sub-optimal alternative");
  return out;
}

}  // namespace

McEstimate mc_event_probability(const ProblemInstance& instance, std::span<const std::int64_t> counts,
                                const std::vector<std::size_t>& subset, std::int64_t draws, std::uint64_t seed,
                                EventKind kind) {
  const auto others = others_in(instance, counts, subset);
  if (draws < kMinMcDraws) throw InvalidArgument("Monte Carlo oracle needs at least 1000 draws");
  const auto b = instance.best_index();
  std::vector<std::size_t> members{b};
  members.insert(members.end(), others.begin(), others.end());

  std::int64_t hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(static)
  for (std::int64_t d = 0; d < draws; ++d) {
    CounterRng g(derive_seed(seed, static_cast<std::uint64_t>(d)));
    double xb = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (auto i : members) {
      const auto& alt = instance[i];
      const double n = static_cast<double>(counts[i]);
      double x;
      if (alt.is_gaussian()) {
        x = alt.mean() + std::sqrt(alt.variance() / n) * g.normal();
      } else {
        std::gamma_distribution<double> gamma(n, alt.mean() / n);
        x = gamma(g);
      }
      if (i == b) {
        xb = x;
      } else {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    if (xb <= (kind == EventKind::All ? lo : hi)) ++hits;
  }
  const double n = static_cast<double>(draws);
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

double gaussian_event_probability(const ProblemInstance& instance, std::span<const std::int64_t> counts,
                                  const std::vector<std::size_t>& subset) {
  if (!instance.all_gaussian()) throw UnsupportedModel("quadrature oracle needs Gaussian models");
  const auto others = others_in(instance, counts, subset);
  const auto b = instance.best_index();
  auto sd = [&](std::size_t i) { return std::sqrt(instance[i].variance() / static_cast<double>(counts[i])); };
  const double mb = instance[b].mean();
  const double sb = sd(b);
  auto integrand = [&](double x) {
    const double z = (x - mb) / sb;
    double v = std::exp(-0.5 * z * z) / (sb * std::sqrt(2.0 * std::numbers::pi));
    for (auto j : others) v *= 0.5 * std::erfc((x - instance[j].mean()) / (sd(j) * std::numbers::sqrt2));
    return v;
  };
  // the integrand is negligible beyond 40 standard deviations of every member
  double lo = mb - 40.0 * sb;
  double hi = mb + 40.0 * sb;
  for (auto j : others) {
    lo = std::min(lo, instance[j].mean() - 40.0 * sd(j));
    hi = std::max(hi, instance[j].mean() + 40.0 * sd(j));
  }
  constexpr int pieces = 400;
  const double h = (hi - lo) / pieces;
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double a = lo + i * h;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, a + h, 8, 1e-13);
  }
  return total;
}

}  // namespace fcba
