#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fcba {

enum class ModelKind { Gaussian, Exponential };

/// Sampling distribution of one alternative.
///
/// Gaussian alternatives carry (mean, variance); exponential alternatives carry
/// a scale beta with mean beta and variance beta^2.
class AlternativeModel {
 public:
  static AlternativeModel gaussian(double mean, double variance);
  static AlternativeModel exponential(double scale);

  ModelKind kind() const noexcept { return kind_; }
  bool is_gaussian() const noexcept { return kind_ == ModelKind::Gaussian; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }
  /// Exponential scale beta; equals the mean.
  double scale() const;

  friend bool operator==(const AlternativeModel&, const AlternativeModel&) = default;

 private:
  AlternativeModel(ModelKind kind, double mean, double variance)
      : kind_(kind), mean_(mean), variance_(variance) {}

  ModelKind kind_;
  double mean_;
  double variance_;
};

/// Cumulant generating function log E[exp(lambda X)].
double cgf(const AlternativeModel& alt, double lambda);

/// Legendre-Fenchel transform of the CGF.
double rate_function(const AlternativeModel& alt, double x);

/// I'(x), which is also the tilting point lambda* solving cgf'(lambda*) = x.
double rate_derivative(const AlternativeModel& alt, double x);
inline double tilt_point(const AlternativeModel& alt, double x) { return rate_derivative(alt, x); }

/// Derivative of the CGF; tilt_point inverts it.
double cgf_derivative(const AlternativeModel& alt, double lambda);

/// Variance of the tilted distribution centred at x, i.e. cgf''(tilt_point(x)).
double tilted_variance(const AlternativeModel& alt, double x);

/// Large-deviations quantities for the pair (best, j) at ratios (p1, pj).
struct PairwiseQuantities {
  double mu = 0.0;             ///< crossing point, p1 I1'(mu) + pj Ij'(mu) = 0
  double rate = 0.0;           ///< G_j = p1 I1(mu) + pj Ij(mu)
  double lambda_best = 0.0;    ///< tilt of the best at mu (negative)
  double lambda_subopt = 0.0;  ///< tilt of the sub-optimal at mu (positive)
  double prefactor = 0.0;      ///< lambda_subopt * pj * sigma_tilde
};

PairwiseQuantities pairwise_quantities(const AlternativeModel& best, const AlternativeModel& subopt,
                                       double p1, double pj);

/// Ordered set of k >= 2 alternatives with a unique largest mean.
class ProblemInstance {
 public:
  explicit ProblemInstance(std::vector<AlternativeModel> alternatives);

  static ProblemInstance gaussian(std::span<const double> means, std::span<const double> variances);

  std::size_t size() const noexcept { return alternatives_.size(); }
  std::size_t best_index() const noexcept { return best_; }
  const AlternativeModel& operator[](std::size_t i) const { return alternatives_[i]; }
  const AlternativeModel& best() const { return alternatives_[best_]; }
  const std::vector<AlternativeModel>& alternatives() const noexcept { return alternatives_; }
  bool all_gaussian() const noexcept;
  std::vector<double> means() const;
  std::vector<double> variances() const;

 private:
  std::vector<AlternativeModel> alternatives_;
  std::size_t best_ = 0;
};

}  // namespace fcba
