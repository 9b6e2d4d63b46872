#include "fcba/state.hpp"

#include <algorithm>
#include <string>

#include "fcba/errors.hpp"

namespace fcba {

AllocationState::AllocationState(std::size_t k) : count_(k, 0), mean_(k, 0.0), m2_(k, 0.0) {
  if (k == 0) throw InvalidArgument("allocation state needs at least one alternative");
}

void AllocationState::check_index(std::size_t i) const {
  if (i >= count_.size())
    throw InvalidArgument("alternative index " + std::to_string(i) + " out of range [0, " +
                          std::to_string(count_.size()) + ")");
}

void AllocationState::push(std::size_t i, double x) {
  check_index(i);
  const auto n = ++count_[i];
  const double delta = x - mean_[i];
  mean_[i] += delta / static_cast<double>(n);
  m2_[i] += delta * (x - mean_[i]);
  ++total_;
}

std::int64_t AllocationState::count(std::size_t i) const {
  check_index(i);
  return count_[i];
}

double AllocationState::mean(std::size_t i) const {
  check_index(i);
  return mean_[i];
}

double AllocationState::variance(std::size_t i) const {
  check_index(i);
  if (count_[i] < 2)
    throw InvalidArgument("variance of alternative " + std::to_string(i) + " needs at least two samples");
  return std::max(m2_[i] / static_cast<double>(count_[i] - 1), kVarianceFloor);
}

std::size_t AllocationState::best_estimate() const {
  return static_cast<std::size_t>(std::max_element(mean_.begin(), mean_.end()) - mean_.begin());
}

std::size_t AllocationState::second_best_estimate() const {
  if (size() < 2) throw InvalidArgument("second best needs at least two alternatives");
  const std::size_t best = best_estimate();
  std::size_t out = best == 0 ? 1 : 0;
  for (std::size_t i = 0; i < size(); ++i)
    if (i != best && mean_[i] > mean_[out]) out = i;
  return out;
}

}  // namespace fcba
