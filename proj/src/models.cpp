#include "fcba/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fcba/errors.hpp"

namespace fcba {

AlternativeModel AlternativeModel::gaussian(double mean, double variance) {
  if (!std::isfinite(mean)) throw InvalidArgument("gaussian mean must be finite");
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw InvalidArgument("gaussian variance must be positive, got " + std::to_string(variance));
  return AlternativeModel(ModelKind::Gaussian, mean, variance);
}

AlternativeModel AlternativeModel::exponential(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw InvalidArgument("exponential scale must be positive, got " + std::to_string(scale));
  return AlternativeModel(ModelKind::Exponential, scale, scale * scale);
}

double AlternativeModel::scale() const {
  if (kind_ != ModelKind::Exponential) throw UnsupportedModel("scale() is defined for exponential models only");
  return mean_;
}

double cgf(const AlternativeModel& alt, double lambda) {
  switch (alt.kind()) {
    case ModelKind::Gaussian:
      return alt.mean() * lambda + 0.5 * alt.variance() * lambda * lambda;
    case ModelKind::Exponential: {
      const double beta = alt.mean();
      if (!(lambda < 1.0 / beta))
        throw DomainError("exponential CGF requires lambda < 1/beta = " + std::to_string(1.0 / beta));
      return -std::log1p(-beta * lambda);
    }
  }
  return 0.0;
}

double cgf_derivative(const AlternativeModel& alt, double lambda) {
  switch (alt.kind()) {
    case ModelKind::Gaussian:
      return alt.mean() + alt.variance() * lambda;
    case ModelKind::Exponential: {
      const double beta = alt.mean();
      if (!(lambda < 1.0 / beta))
        throw DomainError("exponential CGF requires lambda < 1/beta = " + std::to_string(1.0 / beta));
      return beta / (1.0 - beta * lambda);
    }
  }
  return 0.0;
}

namespace {

void require_exponential_support(double x) {
  if (!(x > 0.0)) throw DomainError("exponential rate function requires x > 0, got " + std::to_string(x));
}

}  // namespace

double rate_function(const AlternativeModel& alt, double x) {
  switch (alt.kind()) {
    case ModelKind::Gaussian: {
      const double d = x - alt.mean();
      return 0.5 * d * d / alt.variance();
    }
    case ModelKind::Exponential: {
      require_exponential_support(x);
      const double r = x / alt.mean();
      // r - 1 - log r, written to keep precision near r = 1
      return (r - 1.0) - std::log1p(r - 1.0);
    }
  }
  return 0.0;
}

double rate_derivative(const AlternativeModel& alt, double x) {
  switch (alt.kind()) {
    case ModelKind::Gaussian:
      return (x - alt.mean()) / alt.variance();
    case ModelKind::Exponential:
      require_exponential_support(x);
      return 1.0 / alt.mean() - 1.0 / x;
  }
  return 0.0;
}

double tilted_variance(const AlternativeModel& alt, double x) {
  switch (alt.kind()) {
    case ModelKind::Gaussian:
      return alt.variance();
    case ModelKind::Exponential:
      require_exponential_support(x);
      return x * x;
  }
  return 0.0;
}

PairwiseQuantities pairwise_quantities(const AlternativeModel& best, const AlternativeModel& subopt,
                                       double p1, double pj) {
  if (!(p1 > 0.0) || !(pj > 0.0)) throw InvalidArgument("pairwise_quantities: ratios must be positive");
  const double m1 = best.mean();
  const double mj = subopt.mean();
  if (!(m1 > mj)) throw InvalidArgument("pairwise_quantities: best mean must exceed the sub-optimal mean");

  PairwiseQuantities q;
  if (best.is_gaussian() && subopt.is_gaussian()) {
    const double w1 = p1 / best.variance();
    const double wj = pj / subopt.variance();
    q.mu = (w1 * m1 + wj * mj) / (w1 + wj);
  } else {
    // p1 I1'(x) + pj Ij'(x) is strictly increasing on [mj, m1]
    auto derivative = [&](double x) { return p1 * rate_derivative(best, x) + pj * rate_derivative(subopt, x); };
    const double eps = 1e-12 * (m1 - mj);
    double lo = mj + eps;
    double hi = m1 - eps;
    if (derivative(lo) >= 0.0) {
      q.mu = lo;
    } else if (derivative(hi) <= 0.0) {
      q.mu = hi;
    } else {
      while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (derivative(mid) < 0.0 ? lo : hi) = mid;
      }
      q.mu = 0.5 * (lo + hi);
    }
  }

  q.rate = p1 * rate_function(best, q.mu) + pj * rate_function(subopt, q.mu);
  q.lambda_best = tilt_point(best, q.mu);
  q.lambda_subopt = tilt_point(subopt, q.mu);
  const double sigma_tilde = std::sqrt(tilted_variance(best, q.mu) / p1 + tilted_variance(subopt, q.mu) / pj);
  q.prefactor = q.lambda_subopt * pj * sigma_tilde;
  return q;
}

ProblemInstance::ProblemInstance(std::vector<AlternativeModel> alternatives)
    : alternatives_(std::move(alternatives)) {
  if (alternatives_.size() < 2) throw InvalidArgument("a problem instance needs at least two alternatives");
  const auto top = std::max_element(alternatives_.begin(), alternatives_.end(),
                                    [](const auto& a, const auto& b) { return a.mean() < b.mean(); });
  best_ = static_cast<std::size_t>(top - alternatives_.begin());
  const auto ties = std::count_if(alternatives_.begin(), alternatives_.end(),
                                  [&](const auto& a) { return a.mean() == top->mean(); });
  if (ties != 1) throw InvalidArgument("the best alternative must be unique");
}

ProblemInstance ProblemInstance::gaussian(std::span<const double> means, std::span<const double> variances) {
  if (means.size() != variances.size()) throw InvalidArgument("means and variances differ in length");
  std::vector<AlternativeModel> alts;
  alts.reserve(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) alts.push_back(AlternativeModel::gaussian(means[i], variances[i]));
  return ProblemInstance(std::move(alts));
}

bool ProblemInstance::all_gaussian() const noexcept {
  return std::all_of(alternatives_.begin(), alternatives_.end(), [](const auto& a) { return a.is_gaussian(); });
}

std::vector<double> ProblemInstance::means() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& a : alternatives_) out.push_back(a.mean());
  return out;
}

std::vector<double> ProblemInstance::variances() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& a : alternatives_) out.push_back(a.variance());
  return out;
}

}  // namespace fcba
