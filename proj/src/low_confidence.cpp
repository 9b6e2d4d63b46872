#include "fcba/low_confidence.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fcba/errors.hpp"

namespace fcba {

namespace {

std::vector<std::size_t> normalize_subset(const ProblemInstance& instance, std::vector<std::size_t> subset) {
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  if (!subset.empty() && subset.back() >= instance.size())
    throw InvalidArgument("subset index " + std::to_string(subset.back()) + " out of range");
  if (!std::binary_search(subset.begin(), subset.end(), instance.best_index()))
    throw InvalidArgument("subset must contain the best alternative");
  if (subset.size() < 2) throw InvalidArgument("subset needs at least one sub-optimal alternative");
  return subset;
}

void require_gaussian(const ProblemInstance& instance) {
  if (!instance.all_gaussian()) throw UnsupportedModel("operation requires an all-Gaussian instance");
}

void require_compatible(const ProblemInstance& instance, const SamplingRatios& ratios) {
  if (ratios.size() != instance.size()) throw InvalidArgument("ratio vector and instance differ in length");
}

double subset_rate_derivative(const ProblemInstance& instance, const SamplingRatios& ratios,
                              const std::vector<std::size_t>& subset, double x) {
  const auto b = instance.best_index();
  double d = 0.0;
  for (auto i : subset) d += ratios[i] * rate_derivative(instance[i], i == b ? x : std::max(x, instance[i].mean()));
  return d;
}

struct Expectation {
  double mean = 1.0;
  double std_error = 0.0;
};

// E[1{U >= 0} exp(-U'AU/2)] with U ~ N(0, Sigma_UU). Draw d uses the normal vector keyed by (base, d),
// so calls sharing `base` use common random numbers.
Expectation truncated_gaussian_expectation(const Eigen::MatrixXd& sigma_uu, const Eigen::MatrixXd& a,
                                           std::int64_t draws, std::uint64_t base) {
  const auto s = sigma_uu.rows();
  if (s == 0) return {};
  if (draws < 2) throw InvalidArgument("Monte Carlo budget must be at least 2");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_uu);
  if (llt.info() != Eigen::Success) throw NumericError("active-block covariance is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  Eigen::VectorXd z(s);
  Eigen::VectorXd u(s);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t d = 0; d < draws; ++d) {
    CounterRng g(derive_seed(base, static_cast<std::uint64_t>(d)));
    bool inside = true;
    for (Eigen::Index r = 0; r < s; ++r) {
      z(r) = g.normal();
      u(r) = l.row(r).head(r + 1).dot(z.head(r + 1));
      if (u(r) < 0.0) {
        inside = false;
        break;
      }
    }
    if (!inside) continue;
    const double w = std::exp(-0.5 * u.dot(a * u));
    sum += w;
    sum_sq += w * w;
  }
  const double n = static_cast<double>(draws);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

struct CsParts {
  double c_s = 0.0;
  double c_s_std_error = 0.0;
};

CsParts subset_constant(const ProblemInstance& instance, const SamplingRatios& ratios, const SubsetAnalysis& an,
                        std::int64_t mc_budget, std::uint64_t base) {
  const auto b = instance.best_index();
  const double x = an.critical_point;
  const double tol = 1e-12 * std::max(1.0, std::abs(x));
  std::vector<std::size_t> active;
  std::vector<std::size_t> inactive;
  for (auto i : an.subset) {
    if (i == b) continue;
    (instance[i].mean() >= x - tol ? active : inactive).push_back(i);
  }
  const double shared = instance[b].variance() / ratios[b];
  auto block = [&](const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    Eigen::MatrixXd m(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c)
        m(r, c) = shared + (rows[r] == cols[c] ? instance[rows[r]].variance() / ratios[rows[r]] : 0.0);
    return m;
  };
  const Eigen::MatrixXd suu = block(active, active);
  const Eigen::MatrixXd suv = block(active, inactive);
  const Eigen::MatrixXd svv = block(inactive, inactive);

  Eigen::MatrixXd schur = svv;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(active.size(), active.size());
  if (!active.empty()) {
    Eigen::LLT<Eigen::MatrixXd> uu(suu);
    if (uu.info() != Eigen::Success) throw NumericError("active-block covariance is not positive definite");
    const Eigen::MatrixXd uu_inv_uv = uu.solve(suv);
    schur -= suv.transpose() * uu_inv_uv;
    Eigen::LLT<Eigen::MatrixXd> sc(schur);
    if (sc.info() != Eigen::Success) throw NumericError("Schur complement is not positive definite");
    a = uu_inv_uv * sc.solve(uu_inv_uv.transpose());
  }
  Eigen::LLT<Eigen::MatrixXd> sc(schur);
  if (sc.info() != Eigen::Success) throw NumericError("inactive-block covariance is not positive definite");
  double log_det = 0.0;
  const Eigen::MatrixXd lsc = sc.matrixL();
  for (Eigen::Index i = 0; i < lsc.rows(); ++i) log_det += 2.0 * std::log(lsc(i, i));

  double log_prefactor = -0.5 * static_cast<double>(inactive.size()) * std::log(2.0 * std::numbers::pi) -
                         0.5 * log_det;
  for (auto i : inactive) {
    const double lambda = rate_derivative(instance[i], x);
    if (!(lambda > 0.0)) throw NumericError("inactive alternative has a non-positive tilt");
    log_prefactor -= std::log(lambda * ratios[i]);
  }
  const auto e = truncated_gaussian_expectation(suu, a, mc_budget, base);
  const double prefactor = std::exp(log_prefactor);
  return {prefactor * e.mean, prefactor * e.std_error};
}

SibcEstimate assemble(const SubsetAnalysis& an, const CsParts& cs, double T) {
  SibcEstimate out;
  out.analysis = an;
  out.c_s = cs.c_s;
  out.c_s_std_error = cs.c_s_std_error;
  const double scale = std::exp(-T * an.rate) / std::pow(T, 0.5 * an.order);
  out.value = scale * cs.c_s;
  out.std_error = scale * cs.c_s_std_error;
  return out;
}

}  // namespace

double subset_rate(const ProblemInstance& instance, const SamplingRatios& ratios, const std::vector<std::size_t>& subset,
                   double x) {
  const auto b = instance.best_index();
  double j = 0.0;
  for (auto i : subset) j += ratios[i] * rate_function(instance[i], i == b ? x : std::max(x, instance[i].mean()));
  return j;
}

namespace detail {

double critical_point_bisection(const ProblemInstance& instance, const SamplingRatios& ratios,
                                const std::vector<std::size_t>& subset) {
  double lo = instance.best().mean();
  for (auto i : subset) lo = std::min(lo, instance[i].mean());
  double hi = instance.best().mean();
  // J_S is C^1 and convex; its derivative is <= 0 at the lowest mean and >= 0 at the best mean
  for (int it = 0; it < 400 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (subset_rate_derivative(instance, ratios, subset, mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

SubsetAnalysis critical_point(const ProblemInstance& instance, const SamplingRatios& ratios,
                              std::vector<std::size_t> subset) {
  require_compatible(instance, ratios);
  SubsetAnalysis out;
  out.subset = normalize_subset(instance, std::move(subset));
  const auto b = instance.best_index();

  double top_sub = -std::numeric_limits<double>::infinity();
  for (auto i : out.subset)
    if (i != b) top_sub = std::max(top_sub, instance[i].mean());

  bool closed = false;
  if (instance.all_gaussian()) {
    double num = 0.0;
    double den = 0.0;
    for (auto i : out.subset) {
      const double w = ratios[i] / instance[i].variance();
      num += w * instance[i].mean();
      den += w;
    }
    const double x = num / den;
    if (x > top_sub) {
      out.critical_point = x;
      closed = true;
    }
  }
  if (!closed) out.critical_point = detail::critical_point_bisection(instance, ratios, out.subset);

  out.rate = subset_rate(instance, ratios, out.subset, out.critical_point);
  const double tol = 1e-12 * std::max(1.0, std::abs(out.critical_point));
  for (auto i : out.subset)
    if (i != b && instance[i].mean() >= out.critical_point - tol) ++out.active_count;
  out.order = static_cast<int>(out.subset.size()) - 1 - out.active_count;
  return out;
}

SibcEstimate sibc_probability_approx(const ProblemInstance& instance, const SamplingRatios& ratios,
                                     std::vector<std::size_t> subset, double T, std::int64_t mc_budget,
                                     CounterRng& rng) {
  require_gaussian(instance);
  detail::check_positive(T, "budget T");
  if (subset.size() > kMaxRefinedSize) throw InvalidArgument("subset larger than " + std::to_string(kMaxRefinedSize));
  const auto an = critical_point(instance, ratios, std::move(subset));
  const auto cs = subset_constant(instance, ratios, an, mc_budget, rng());
  return assemble(an, cs, T);
}

namespace {

struct K3Order {
  std::size_t best, second, third;
};

K3Order k3_order(const ProblemInstance& instance) {
  if (instance.size() != 3) throw InvalidArgument("the piecewise refined formula needs exactly k = 3");
  require_gaussian(instance);
  const auto b = instance.best_index();
  std::size_t s = b == 0 ? 1 : 0;
  std::size_t t = 3 - b - s;
  if (instance[t].mean() > instance[s].mean()) std::swap(s, t);
  return {b, s, t};
}

}  // namespace

bool k3_critical_line(const ProblemInstance& instance, const SamplingRatios& ratios) {
  require_compatible(instance, ratios);
  const auto o = k3_order(instance);
  const double m1 = instance[o.best].mean();
  const double m2 = instance[o.second].mean();
  const double m3 = instance[o.third].mean();
  return instance[o.third].variance() / ratios[o.third] * (m1 - m2) >
         instance[o.best].variance() / ratios[o.best] * (m2 - m3);
}

ApproxReport refined_pics_k3(const ProblemInstance& instance, const SamplingRatios& ratios, double T) {
  detail::check_positive(T, "budget T");
  const auto o = k3_order(instance);
  const bool line = k3_critical_line(instance, ratios);
  ApproxReport report;
  report.order = 0;
  report.budget = T;
  report.variant = ApproxVariant::RefinedK3;
  report.critical_line = line;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * T);
  for (auto j : {o.second, o.third}) {
    const double r = r_j(instance, j, ratios);
    const double weight = (j == o.third && !line) ? 0.5 : 1.0;
    PairTerm term{j, 0.5 * r, std::sqrt(r), weight * u_ell(r, T, 0) * norm};
    report.total += term.value;
    report.terms.push_back(term);
  }
  return report;
}

RefinedReport refined_pics_general(const ProblemInstance& instance, const SamplingRatios& ratios, double T,
                                   std::int64_t mc_budget, CounterRng& rng) {
  require_gaussian(instance);
  require_compatible(instance, ratios);
  detail::check_positive(T, "budget T");
  if (instance.size() > kMaxRefinedSize)
    throw InvalidArgument("refined expansion supports k <= " + std::to_string(kMaxRefinedSize));
  const auto b = instance.best_index();
  std::vector<std::size_t> subs;
  for (std::size_t i = 0; i < instance.size(); ++i)
    if (i != b) subs.push_back(i);

  const std::uint64_t base = rng();
  RefinedReport report;
  report.budget = T;
  const std::uint32_t masks = 1u << subs.size();
  for (std::uint32_t mask = 1; mask < masks; ++mask) {
    std::vector<std::size_t> subset{b};
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (mask & (1u << i)) subset.push_back(subs[i]);
    const auto an = critical_point(instance, ratios, subset);
    if (an.order != 1) continue;
    const auto est = assemble(an, subset_constant(instance, ratios, an, mc_budget, base), T);
    const int n = static_cast<int>(an.subset.size()) - 1;
    RefinedTerm term;
    term.subset = an.subset;
    term.sign = n % 2 == 1 ? 1 : -1;
    term.rate = an.rate;
    term.c_s = est.c_s;
    term.mc_std_error = est.std_error;
    term.value = term.sign * est.value;
    report.total += term.value;
    report.terms.push_back(std::move(term));
  }
  return report;
}

bool lc_trigger(const AllocationState& state) {
  const std::size_t k = state.size();
  if (k < 3) return false;
  const double n = static_cast<double>(state.total());
  const auto b = state.best_estimate();
  const auto s = state.second_best_estimate();
  const double lhs_gap = state.mean(b) - state.mean(s);
  const double rhs_weight = state.variance(b) / (static_cast<double>(state.count(b)) / n);
  for (std::size_t j = 0; j < k; ++j) {
    if (j == b || j == s) continue;
    const double pj = static_cast<double>(state.count(j)) / n;
    if (state.variance(j) / pj * lhs_gap > rhs_weight * (state.mean(s) - state.mean(j))) return true;
  }
  return false;
}

}  // namespace fcba
