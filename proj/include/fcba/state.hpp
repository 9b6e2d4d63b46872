#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fcba {

/// Per-alternative sample counts and running moments for one replication.
class AllocationState {
 public:
  explicit AllocationState(std::size_t k);

  /// One-pass (Welford) update of count, mean and central sum.
  void push(std::size_t i, double x);

  std::size_t size() const noexcept { return count_.size(); }
  std::int64_t count(std::size_t i) const;
  double mean(std::size_t i) const;
  /// Sample variance with n-1 denominator, floored at kVarianceFloor. Needs count >= 2.
  double variance(std::size_t i) const;
  std::int64_t total() const noexcept { return total_; }
  const std::vector<std::int64_t>& counts() const noexcept { return count_; }

  /// Largest sample mean, lowest index on ties.
  std::size_t best_estimate() const;
  /// Largest sample mean excluding best_estimate(), lowest index on ties.
  std::size_t second_best_estimate() const;

  static constexpr double kVarianceFloor = 1e-12;

 private:
  void check_index(std::size_t i) const;

  std::vector<std::int64_t> count_;
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::int64_t total_ = 0;
};

}  // namespace fcba
