#include "fcba/allocation_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace fcba {

namespace {

constexpr double kRatioFloor = 1e-9;
constexpr double kPolishSwitch = 1e-6;

void require_gaussian(const ProblemInstance& instance) {
  if (!instance.all_gaussian()) throw UnsupportedModel("allocation solvers require an all-Gaussian instance");
}

// V_l(p) split as sum_j exp(g_j) P_j with every derivative carried relative to exp(g_j).
class Objective {
 public:
  Objective(const ProblemInstance& instance, double T, int order)
      : b_(instance.best_index()), k_(instance.size()), T_(T), order_(order), s_(instance.variances()) {
    const auto m = instance.means();
    for (std::size_t j = 0; j < k_; ++j)
      if (j != b_) subs_.push_back(j);
    for (auto j : subs_) d2_.push_back((m[b_] - m[j]) * (m[b_] - m[j]));
    c_tail_ = 0.5 * ((order % 2 == 0) ? -1.0 : 1.0) * detail::double_factorial_odd(order + 1) / std::pow(T, order);
  }

  std::size_t size() const { return k_; }

  double r(std::size_t idx, const std::vector<double>& p) const {
    const auto j = subs_[idx];
    return d2_[idx] / (s_[b_] / p[b_] + s_[j] / p[j]);
  }

  double log_envelope(double x) const { return -0.5 * T_ * x - 0.5 * std::log(x); }

  double shift(const std::vector<double>& p) const {
    double c = -std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < subs_.size(); ++idx) c = std::max(c, log_envelope(r(idx, p)));
    return c;
  }

  double poly(double x) const {
    double out = 1.0;
    double term = 1.0;
    for (int l = 1; l <= order_; ++l) {
      term *= -(2.0 * l - 1.0) / (x * T_);
      out += term;
    }
    return out;
  }

  // exp(-shift) * V_l(p), up to the constant 1/sqrt(2 pi T)
  double value(const std::vector<double>& p, double shift) const {
    double f = 0.0;
    for (std::size_t idx = 0; idx < subs_.size(); ++idx) {
      const double x = r(idx, p);
      f += std::exp(log_envelope(x) - shift) * poly(x);
    }
    return f;
  }

  double log_value(const std::vector<double>& p) const {
    const double c = shift(p);
    return std::log(value(p, c)) + c - 0.5 * std::log(2.0 * std::numbers::pi * T_);
  }

  void gradient(const std::vector<double>& p, double shift, std::vector<double>& g) const {
    g.assign(k_, 0.0);
    for (std::size_t idx = 0; idx < subs_.size(); ++idx) {
      const auto j = subs_[idx];
      const double x = r(idx, p);
      const double w = std::exp(log_envelope(x) - shift) * q(x);
      const double den = s_[b_] / p[b_] + s_[j] / p[j];
      g[b_] += w * x * (s_[b_] / (p[b_] * p[b_])) / den;
      g[j] += w * x * (s_[j] / (p[j] * p[j])) / den;
    }
  }

  Eigen::MatrixXd hessian(const std::vector<double>& p, double shift) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k_, k_);
    for (std::size_t idx = 0; idx < subs_.size(); ++idx) {
      const auto j = subs_[idx];
      const double x = r(idx, p);
      const double e = std::exp(log_envelope(x) - shift);
      const double u1 = e * q(x);
      const double dg = -0.5 * T_ - 0.5 / x;
      const double u2 = e * (dg * q(x) - (order_ + 1) * c_tail_ / std::pow(x, order_ + 2));
      const double den = s_[b_] / p[b_] + s_[j] / p[j];
      const double db = -s_[b_] / (p[b_] * p[b_]);
      const double dj = -s_[j] / (p[j] * p[j]);
      const double dbb = 2.0 * s_[b_] / (p[b_] * p[b_] * p[b_]);
      const double djj = 2.0 * s_[j] / (p[j] * p[j] * p[j]);
      const double d2 = d2_[idx];
      const double rb = -d2 * db / (den * den);
      const double rj = -d2 * dj / (den * den);
      const double rbb = d2 * (2.0 * db * db / (den * den * den) - dbb / (den * den));
      const double rjj = d2 * (2.0 * dj * dj / (den * den * den) - djj / (den * den));
      const double rbj = d2 * (2.0 * db * dj / (den * den * den));
      h(b_, b_) += u2 * rb * rb + u1 * rbb;
      h(j, j) += u2 * rj * rj + u1 * rjj;
      h(b_, j) += u2 * rb * rj + u1 * rbj;
      h(j, b_) = h(b_, j);
    }
    return h;
  }

 private:
  double q(double x) const { return -0.5 * T_ + c_tail_ / std::pow(x, order_ + 1); }

  std::size_t b_;
  std::size_t k_;
  double T_;
  int order_;
  double c_tail_ = 0.0;
  std::vector<double> s_;
  std::vector<std::size_t> subs_;
  std::vector<double> d2_;
};

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

void renormalize(std::vector<double>& p) {
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= s;
}

}  // namespace

std::vector<double> project_to_simplex(const std::vector<double>& v, double floor) {
  const std::size_t k = v.size();
  const double mass = 1.0 - static_cast<double>(k) * floor;
  if (k == 0 || !(mass > 0.0)) throw InvalidArgument("simplex floor leaves no mass to distribute");
  std::vector<double> u(k);
  for (std::size_t i = 0; i < k; ++i) u[i] = v[i] - floor;
  std::vector<double> sorted = u;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    cum += sorted[j];
    const double t = (cum - mass) / static_cast<double>(j + 1);
    if (sorted[j] - t > 0.0) theta = t;
  }
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = std::max(u[i] - theta, 0.0) + floor;
  return out;
}

OptimalityResidual kkt_residuals(const ProblemInstance& instance, const SamplingRatios& ratios, double T, int order) {
  require_gaussian(instance);
  const auto b = instance.best_index();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double sum_sub = 0.0;
  for (std::size_t j = 0; j < instance.size(); ++j) {
    if (j == b) continue;
    const double sc = score(instance, j, ratios, T, order);
    lo = std::min(lo, sc);
    hi = std::max(hi, sc);
    sum_sub += ratios[j] * ratios[j] / instance[j].variance();
  }
  OptimalityResidual out;
  out.score_spread = hi - lo;
  out.relative_score_spread = hi > 0.0 ? out.score_spread / hi : 0.0;
  out.balance_gap = ratios[b] * ratios[b] / instance[b].variance() - sum_sub;
  return out;
}

SolveResult solve_v_ell_detailed(const ProblemInstance& instance, double T, int order, const SolverOptions& options) {
  require_gaussian(instance);
  detail::check_order(order);
  detail::check_positive(T, "budget T");
  if (order % 2 != 0) throw InvalidArgument("even order required: V_l is convex only for even l");
  const std::size_t k = instance.size();
  const Objective obj(instance, T, order);

  std::vector<double> p(k, 1.0 / static_cast<double>(k));
  if (options.initial) {
    if (options.initial->size() != k) throw InvalidArgument("initial point has the wrong length");
    p = project_to_simplex(*options.initial, kRatioFloor);
  }

  SolveResult result{SamplingRatios::uniform(k), {}, 0, 0, {}};
  result.log_objective_trace.push_back(obj.log_value(p));
  const double pg_tol = options.newton_polish ? std::max(options.step_tolerance, kPolishSwitch) : options.step_tolerance;

  std::vector<double> g;
  std::vector<double> trial(k);
  double alpha = -1.0;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const double c = obj.shift(p);
    const double f0 = obj.value(p, c);
    obj.gradient(p, c, g);
    if (alpha < 0.0) {
      const double gmax = std::abs(*std::max_element(g.begin(), g.end(), [](double a, double b) {
        return std::abs(a) < std::abs(b);
      }));
      alpha = gmax > 0.0 ? 0.1 / gmax : 1.0;
    } else {
      alpha *= 2.0;
    }
    bool accepted = false;
    double f1 = f0;
    while (alpha > 1e-300) {
      for (std::size_t i = 0; i < k; ++i) trial[i] = p[i] - alpha * g[i];
      trial = project_to_simplex(trial, kRatioFloor);
      f1 = obj.value(trial, c);
      double slope = 0.0;
      for (std::size_t i = 0; i < k; ++i) slope += g[i] * (trial[i] - p[i]);
      if (f1 <= f0 + 1e-4 * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    const double step = distance(trial, p);
    p = trial;
    result.log_objective_trace.push_back(std::log(f1) + c - 0.5 * std::log(2.0 * std::numbers::pi * T));
    ++result.gradient_iterations;
    if (step < pg_tol) break;
  }

  if (options.newton_polish) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(k));
    for (int it = 0; it < 200; ++it) {
      const double c = obj.shift(p);
      const double f0 = obj.value(p, c);
      obj.gradient(p, c, g);
      const Eigen::MatrixXd h = obj.hessian(p, c);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
      if (ldlt.info() != Eigen::Success) break;
      const Eigen::VectorXd gv = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(k));
      const Eigen::VectorXd hg = ldlt.solve(gv);
      const Eigen::VectorXd h1 = ldlt.solve(ones);
      const double nu = ones.dot(hg) / ones.dot(h1);
      Eigen::VectorXd dp = -(hg - nu * h1);
      dp.array() -= dp.mean();
      const double decrement = -gv.dot(dp);
      if (!(decrement > 0.0) || decrement <= 1e-30 * f0) break;
      double t = 1.0;
      for (std::size_t i = 0; i < k; ++i)
        if (dp(i) < 0.0) t = std::min(t, 0.9 * p[i] / -dp(i));
      bool moved = false;
      while (t > 1e-20) {
        for (std::size_t i = 0; i < k; ++i) trial[i] = p[i] + t * dp(i);
        renormalize(trial);
        const double f1 = obj.value(trial, c);
        if (f1 <= f0 - 1e-4 * t * decrement || (f1 <= f0 && t < 1e-3)) {
          const double step = distance(trial, p);
          p = trial;
          result.log_objective_trace.push_back(std::log(f1) + c - 0.5 * std::log(2.0 * std::numbers::pi * T));
          ++result.newton_iterations;
          moved = step > 0.0;
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
    }
  }

  result.ratios = SamplingRatios(p);
  result.residual = kkt_residuals(instance, result.ratios, T, order);
  if (!(result.residual.relative_score_spread < 1e-6) || !(std::abs(result.residual.balance_gap) < 1e-6))
    throw SolverError("V_l minimization did not reach the optimality conditions", result.residual);
  return result;
}

SamplingRatios solve_v_ell(const ProblemInstance& instance, double T, int order, const SolverOptions& options) {
  return solve_v_ell_detailed(instance, T, order, options).ratios;
}

SamplingRatios solve_roa(const ProblemInstance& instance) {
  require_gaussian(instance);
  const std::size_t k = instance.size();
  const auto b = instance.best_index();
  const double sb = instance[b].variance();
  std::vector<double> d2(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    const double d = instance[b].mean() - instance[j].mean();
    d2[j] = d * d;
  }

  using boost::math::tools::eps_tolerance;
  using boost::math::tools::toms748_solve;
  const eps_tolerance<double> tol(50);

  // sub-optimal ratios that equalize every R_j at r = (1 - s) * r_max, given p_b;
  // parameterized by the gap s so the pole at r_max stays resolvable
  double d2min = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j)
    if (j != b) d2min = std::min(d2min, d2[j]);
  auto inner = [&](double pb, double s, std::vector<double>& p) {
    double sum = 0.0;
    p.assign(k, 0.0);
    p[b] = pb;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == b) continue;
      const double denom = (sb / pb) * ((d2[j] / d2min - 1.0) + s) / (1.0 - s);
      p[j] = instance[j].variance() / denom;
      sum += p[j];
    }
    return sum;
  };

  std::vector<double> p;
  auto solve_inner = [&](double pb) {
    std::uintmax_t iters = 300;
    auto f = [&](double s) { return inner(pb, s, p) - (1.0 - pb); };
    const double lo = 1e-300, hi = 1.0 - 1e-15;
    // at extreme p_b the root can sit outside the representable range; the
    // endpoint still gives the right sign to the outer balance equation
    if (f(hi) >= 0.0) return;
    const auto bracket = toms748_solve(f, lo, hi, tol, iters);
    inner(pb, 0.5 * (bracket.first + bracket.second), p);
  };
  auto balance = [&](double pb) {
    solve_inner(pb);
    double h = pb * pb / sb;
    for (std::size_t j = 0; j < k; ++j)
      if (j != b) h -= p[j] * p[j] / instance[j].variance();
    return h;
  };

  std::uintmax_t iters = 300;
  const auto bracket = toms748_solve(balance, 1e-12, 1.0 - 1e-12, tol, iters);
  solve_inner(0.5 * (bracket.first + bracket.second));
  renormalize(p);
  return SamplingRatios(p);
}

}  // namespace fcba
