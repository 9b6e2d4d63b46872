#include "fcba/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "fcba/errors.hpp"
#include "fcba/expansion.hpp"

#ifdef FCBA_HAVE_OPENMP
#include <omp.h>
#endif

namespace fcba {

double draw_sample(const AlternativeModel& alt, CounterRng& rng) {
  if (alt.is_gaussian()) return alt.mean() + std::sqrt(alt.variance()) * rng.normal();
  const double u = rng.uniform();
  (void)rng();  // keep two draws per observation for both models
  return -alt.mean() * std::log(u);
}

std::size_t ExperimentConfig::k() const { return instance ? instance->size() : generator.k; }

std::vector<std::int64_t> ExperimentConfig::resolved_checkpoints() const {
  return checkpoints.empty() ? std::vector<std::int64_t>{budget} : checkpoints;
}

void ExperimentConfig::validate() const {
  if (!instance) {
    if (generator.k < 2) throw InvalidArgument("instance.k: need at least two alternatives");
    if (generator.variances != VarianceConfig::Equal && generator.k % 5 != 0)
      throw InvalidArgument("instance.k: grouped variance settings need k divisible by 5");
    if (!(generator.equal_variance > 0.0)) throw InvalidArgument("instance.variance_value: must be positive");
  } else if (redraw_per_replication) {
    throw InvalidArgument("instance.redraw_per_replication: only generated instances can be redrawn");
  }
  if (policies.empty()) throw InvalidArgument("policies: at least one policy is required");
  if (t0 < 2) throw InvalidArgument("t0: at least two initial samples are required");
  if (macro_reps < 1) throw InvalidArgument("macro_reps: must be at least 1");
  const auto init = static_cast<std::int64_t>(k()) * t0;
  if (budget <= init) throw InvalidArgument("budget: must exceed k * t0 = " + std::to_string(init));
  const auto cps = resolved_checkpoints();
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] <= init || cps[i] > budget)
      throw InvalidArgument("checkpoints: " + std::to_string(cps[i]) + " outside (k * t0, budget]");
    if (i > 0 && cps[i] <= cps[i - 1]) throw InvalidArgument("checkpoints: must be strictly increasing");
  }
}

const PolicyCurve& PcsCurve::curve(const Policy& policy) const {
  for (const auto& c : curves)
    if (c.policy == policy) return c;
  throw InvalidArgument("policy " + policy.name() + " is not part of this experiment");
}

namespace {

// Integer sums only, so merging in any order gives identical results.
struct Accumulator {
  std::size_t policies = 0, checkpoints = 0, k = 0;
  std::vector<std::int64_t> correct;
  std::vector<std::int64_t> count_sum;
  std::vector<std::int64_t> count_sum_correct;
  std::vector<std::int64_t> best_sum;
  std::vector<std::int64_t> best_sum_correct;

  Accumulator(std::size_t p, std::size_t c, std::size_t k_)
      : policies(p),
        checkpoints(c),
        k(k_),
        correct(p * c, 0),
        count_sum(p * c * k_, 0),
        count_sum_correct(p * c * k_, 0),
        best_sum(p * c, 0),
        best_sum_correct(p * c, 0) {}

  void merge(const Accumulator& o) {
    auto add = [](auto& a, const auto& b) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    add(correct, o.correct);
    add(count_sum, o.count_sum);
    add(count_sum_correct, o.count_sum_correct);
    add(best_sum, o.best_sum);
    add(best_sum_correct, o.best_sum_correct);
  }
};

struct Posthoc {
  std::vector<double> v0, ldr;  // [policy * reps + r]
};

class Runner {
 public:
  explicit Runner(const ExperimentConfig& config)
      : cfg_(config), checkpoints_(config.resolved_checkpoints()) {
    cfg_.validate();
    if (!cfg_.instance && !cfg_.redraw_per_replication) fixed_ = generate_instance(cfg_.generator);
    if (cfg_.instance) fixed_ = *cfg_.instance;
    if (cfg_.posthoc) {
      const auto n = cfg_.policies.size() * static_cast<std::size_t>(cfg_.macro_reps);
      posthoc_.v0.assign(n, 0.0);
      posthoc_.ldr.assign(n, 0.0);
    }
  }

  Accumulator make_accumulator() const { return Accumulator(cfg_.policies.size(), checkpoints_.size(), cfg_.k()); }

  void replicate(std::int64_t r, Accumulator& acc) {
    const ProblemInstance inst = fixed_ ? *fixed_ : redrawn(r);
    const std::size_t k = inst.size();
    const auto truth = inst.best_index();
    const std::uint64_t stream = derive_seed(cfg_.seed, static_cast<std::uint64_t>(r));
    const double budget = static_cast<double>(cfg_.budget);

    for (std::size_t pi = 0; pi < cfg_.policies.size(); ++pi) {
      const auto& policy = cfg_.policies[pi];
      AllocationState state(k);
      std::vector<CounterRng> rngs;
      rngs.reserve(k);
      for (std::size_t i = 0; i < k; ++i) rngs.emplace_back(derive_seed(stream, i));
      for (std::size_t i = 0; i < k; ++i)
        for (std::int64_t t = 0; t < cfg_.t0; ++t) state.push(i, draw_sample(inst[i], rngs[i]));

      std::size_t ci = 0;
      while (state.total() < cfg_.budget) {
        const auto d = decide(policy, state, budget);
        state.push(d.index, draw_sample(inst[d.index], rngs[d.index]));
        if (ci < checkpoints_.size() && state.total() == checkpoints_[ci]) {
          record(acc, pi, ci, state, truth);
          ++ci;
        }
      }
      if (cfg_.posthoc) {
        const auto slot = pi * static_cast<std::size_t>(cfg_.macro_reps) + static_cast<std::size_t>(r);
        posthoc_.v0[slot] = posthoc_pcs_estimate(state, budget, PosthocVariant::V0);
        posthoc_.ldr[slot] = posthoc_pcs_estimate(state, budget, PosthocVariant::LDR);
      }
    }
  }

  PcsCurve finish(const Accumulator& acc) const {
    PcsCurve out;
    out.k = cfg_.k();
    out.macro_reps = cfg_.macro_reps;
    const double reps = static_cast<double>(cfg_.macro_reps);
    const auto k = out.k;
    const double init = static_cast<double>(cfg_.t0);
    for (std::size_t pi = 0; pi < cfg_.policies.size(); ++pi) {
      PolicyCurve pc;
      pc.policy = cfg_.policies[pi];
      for (std::size_t ci = 0; ci < checkpoints_.size(); ++ci) {
        const auto slot = pi * checkpoints_.size() + ci;
        CheckpointStats s;
        s.checkpoint = checkpoints_[ci];
        s.correct = acc.correct[slot];
        s.pcs = static_cast<double>(s.correct) / reps;
        s.std_error = std::sqrt(s.pcs * (1.0 - s.pcs) / reps);
        const double n = static_cast<double>(s.checkpoint);
        const double extra = n - static_cast<double>(k) * init;
        const double nc = static_cast<double>(s.correct);
        s.mean_ratios.resize(k);
        s.mean_ratios_given_correct.assign(k, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
          s.mean_ratios[i] = static_cast<double>(acc.count_sum[slot * k + i]) / (reps * n);
          if (s.correct > 0)
            s.mean_ratios_given_correct[i] = static_cast<double>(acc.count_sum_correct[slot * k + i]) / (nc * n);
        }
        s.true_best_ratio = static_cast<double>(acc.best_sum[slot]) / (reps * n);
        s.true_best_extra_ratio = (static_cast<double>(acc.best_sum[slot]) - reps * init) / (reps * extra);
        if (s.correct > 0)
          s.true_best_extra_ratio_given_correct =
              (static_cast<double>(acc.best_sum_correct[slot]) - nc * init) / (nc * extra);
        pc.points.push_back(std::move(s));
      }
      if (cfg_.posthoc) pc.posthoc = summarize(pi);
      out.curves.push_back(std::move(pc));
    }
    return out;
  }

  std::int64_t reps() const { return cfg_.macro_reps; }

 private:
  ProblemInstance redrawn(std::int64_t r) const {
    InstanceSpec spec = cfg_.generator;
    spec.seed = derive_seed(cfg_.generator.seed, static_cast<std::uint64_t>(r) + 1);
    return generate_instance(spec);
  }

  void record(Accumulator& acc, std::size_t pi, std::size_t ci, const AllocationState& state, std::size_t truth) const {
    const auto slot = pi * checkpoints_.size() + ci;
    const bool ok = state.best_estimate() == truth;
    const auto k = state.size();
    acc.correct[slot] += ok ? 1 : 0;
    for (std::size_t i = 0; i < k; ++i) {
      acc.count_sum[slot * k + i] += state.count(i);
      if (ok) acc.count_sum_correct[slot * k + i] += state.count(i);
    }
    acc.best_sum[slot] += state.count(truth);
    if (ok) acc.best_sum_correct[slot] += state.count(truth);
  }

  PosthocSummary summarize(std::size_t pi) const {
    const auto reps = static_cast<std::size_t>(cfg_.macro_reps);
    auto stats = [&](const std::vector<double>& v, double& mean, double& sd) {
      double s = 0.0;
      for (std::size_t r = 0; r < reps; ++r) s += v[pi * reps + r];
      mean = s / static_cast<double>(reps);
      double q = 0.0;
      for (std::size_t r = 0; r < reps; ++r) q += (v[pi * reps + r] - mean) * (v[pi * reps + r] - mean);
      sd = reps > 1 ? std::sqrt(q / static_cast<double>(reps - 1)) : 0.0;
    };
    PosthocSummary out;
    stats(posthoc_.v0, out.mean_v0, out.sd_v0);
    stats(posthoc_.ldr, out.mean_ldr, out.sd_ldr);
    return out;
  }

  ExperimentConfig cfg_;
  std::vector<std::int64_t> checkpoints_;
  std::optional<ProblemInstance> fixed_;
  Posthoc posthoc_;
};

}  // namespace

PcsCurve run_experiment_serial(const ExperimentConfig& config) {
  Runner runner(config);
  auto acc = runner.make_accumulator();
  for (std::int64_t r = 0; r < runner.reps(); ++r) runner.replicate(r, acc);
  return runner.finish(acc);
}

PcsCurve run_experiment(const ExperimentConfig& config, int threads) {
#ifdef FCBA_HAVE_OPENMP
  Runner runner(config);
  auto total = runner.make_accumulator();
  std::exception_ptr failure;
  const int n = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel num_threads(n)
  {
    auto local = runner.make_accumulator();
#pragma omp for schedule(dynamic, 8)
    for (std::int64_t r = 0; r < runner.reps(); ++r) {
      try {
        runner.replicate(r, local);
      } catch (...) {
#pragma omp critical(fcba_failure)
        if (!failure) failure = std::current_exception();
      }
    }
#pragma omp critical(fcba_merge)
    total.merge(local);
  }
  if (failure) std::rethrow_exception(failure);
  return runner.finish(total);
#else
  (void)threads;
  return run_experiment_serial(config);
#endif
}

}  // namespace fcba
