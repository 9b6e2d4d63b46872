#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fcba/errors.hpp"
#include "fcba/expansion.hpp"
#include "fcba/models.hpp"

namespace fcba {

struct OptimalityResidual {
  double score_spread = 0.0;           ///< max_j score - min_j score
  double relative_score_spread = 0.0;  ///< score_spread / max_j score
  double balance_gap = 0.0;            ///< p_b^2/s_b - sum_j p_j^2/s_j
};

struct SolverOptions {
  std::size_t max_iterations = 100000;
  double step_tolerance = 1e-12;
  std::optional<std::vector<double>> initial;  ///< interior start; uniform when empty
  bool newton_polish = true;
};

struct SolveResult {
  SamplingRatios ratios;
  OptimalityResidual residual;
  std::size_t gradient_iterations = 0;
  std::size_t newton_iterations = 0;
  std::vector<double> log_objective_trace;  ///< log V_l after every accepted step
};

class SolverError : public NumericError {
 public:
  SolverError(const std::string& what, OptimalityResidual residual)
      : NumericError(what), residual_(residual) {}
  const OptimalityResidual& residual() const noexcept { return residual_; }

 private:
  OptimalityResidual residual_;
};

/// Minimizer of V_l over the open simplex (even l only).
SamplingRatios solve_v_ell(const ProblemInstance& instance, double T, int order, const SolverOptions& options = {});
SolveResult solve_v_ell_detailed(const ProblemInstance& instance, double T, int order,
                                 const SolverOptions& options = {});

/// Rate-optimal ratios: all R_j equal and p_b^2/s_b = sum_j p_j^2/s_j.
SamplingRatios solve_roa(const ProblemInstance& instance);

OptimalityResidual kkt_residuals(const ProblemInstance& instance, const SamplingRatios& ratios, double T, int order);

/// Euclidean projection of v onto {p : p_i >= floor, sum p_i = 1}.
std::vector<double> project_to_simplex(const std::vector<double>& v, double floor = 0.0);

}  // namespace fcba
