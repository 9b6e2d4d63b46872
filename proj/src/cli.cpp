#include "fcba/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "fcba/allocation_solver.hpp"
#include "fcba/csv.hpp"
#include "fcba/experiment_config.hpp"
#include "fcba/low_confidence.hpp"
#include "fcba/oracles.hpp"

#ifdef FCBA_HAVE_OPENMP
#include <omp.h>
#endif

namespace fcba {

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

struct InstanceFlags {
  std::vector<double> means;
  std::vector<double> variances;
  std::string model = "gaussian";

  void add_to(CLI::App& cmd) {
    cmd.add_option("--means", means, "alternative means, comma separated")->delimiter(',')->required();
    cmd.add_option("--variances", variances, "Gaussian variances (default 1 each)")->delimiter(',');
    cmd.add_option("--model", model, "gaussian or exponential")->check(CLI::IsMember({"gaussian", "exponential"}));
  }

  ProblemInstance build() const {
    std::vector<AlternativeModel> alts;
    if (model == "exponential") {
      if (!variances.empty()) throw InvalidArgument("--variances: not used by exponential alternatives");
      for (double m : means) alts.push_back(AlternativeModel::exponential(m));
    } else {
      if (!variances.empty() && variances.size() != means.size())
        throw InvalidArgument("--variances: expected one value per mean");
      for (std::size_t i = 0; i < means.size(); ++i)
        alts.push_back(AlternativeModel::gaussian(means[i], variances.empty() ? 1.0 : variances[i]));
    }
    return ProblemInstance(std::move(alts));
  }
};

SamplingRatios ratios_or_uniform(const std::vector<double>& p, std::size_t k) {
  if (p.empty()) return SamplingRatios::uniform(k);
  if (p.size() != k) throw InvalidArgument("--ratios: expected " + std::to_string(k) + " values");
  return SamplingRatios(p);
}

std::string subset_label(const std::vector<std::size_t>& s) {
  std::string out;
  for (auto i : s) {
    if (!out.empty()) out += ';';
    out += std::to_string(i + 1);
  }
  return out;
}

std::vector<std::size_t> from_one_based(const std::vector<std::int64_t>& v, std::size_t k, const char* flag) {
  std::vector<std::size_t> out;
  for (auto i : v) {
    if (i < 1 || static_cast<std::size_t>(i) > k) throw InvalidArgument(std::string(flag) + ": index out of range");
    out.push_back(static_cast<std::size_t>(i - 1));
  }
  return out;
}

void set_threads(int threads) {
#ifdef FCBA_HAVE_OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

// ---- run ----

struct RunArgs {
  std::string config;
  std::string out_dir;
  bool quiet = false;
};

int cmd_run(const RunArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_experiment_config(a.config);
    if (g.seed) cfg.seed = *g.seed;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    const auto curve = run_experiment(cfg, g.threads);
    const std::filesystem::path dir(a.out_dir);
    std::filesystem::create_directories(dir);
    std::ofstream pcs(dir / "pcs_curve.csv", std::ios::binary);
    std::ofstream summary(dir / "summary.csv", std::ios::binary);
    if (!pcs || !summary) throw std::runtime_error("cannot write into " + dir.string());
    write_pcs_curve(pcs, curve);
    write_summary(summary, curve);
    pcs.close();
    summary.close();
    if (!pcs || !summary) throw std::runtime_error("failed writing into " + dir.string());
    if (!a.quiet) print_summary_table(out, curve);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

// ---- approx ----

struct ApproxArgs {
  InstanceFlags inst;
  std::vector<double> ratios;
  double budget = 0.0;
  int order = 0;
  std::string variant = "expansion";
  std::int64_t mc_draws = kDefaultMcBudget;
};

void approx_row(std::ostream& out, const std::string& id, const std::string& subset, double rate, double prefactor,
                double value, const std::string& line) {
  out << id << ',' << subset << ',' << format_number(rate) << ',' << format_number(prefactor) << ','
      << format_number(value) << ',' << line << '\n';
}

void approx_total(std::ostream& out, double total, const std::string& line) {
  out << "total,,,," << format_number(total) << ',' << line << '\n';
}

void cmd_approx(const ApproxArgs& a, const Globals& g, std::ostream& out) {
  const auto inst = a.inst.build();
  const auto p = ratios_or_uniform(a.ratios, inst.size());
  const auto b = inst.best_index();
  out << "term_id,subset,rate,prefactor,value,critical_line\n";
  if (a.variant == "expansion" || a.variant == "refined_k3") {
    const auto rep = a.variant == "expansion" ? v_ell(inst, p, a.budget, a.order) : refined_pics_k3(inst, p, a.budget);
    const std::string line = rep.critical_line ? (*rep.critical_line ? "true" : "false") : "";
    std::size_t id = 0;
    for (const auto& t : rep.terms)
      approx_row(out, std::to_string(++id), subset_label({b, t.j}), t.rate, t.prefactor, t.value, line);
    approx_total(out, rep.total, line);
  } else if (a.variant == "ldr") {
    std::size_t id = 0;
    for (std::size_t j = 0; j < inst.size(); ++j) {
      if (j == b) continue;
      const auto q = pairwise_quantities(inst[b], inst[j], p[b], p[j]);
      approx_row(out, std::to_string(++id), subset_label({b, j}), q.rate, 1.0, std::exp(-a.budget * q.rate), "");
    }
    approx_total(out, ldr_pics(inst, p, a.budget), "");
  } else {
    CounterRng rng(derive_seed(g.seed.value_or(0), 0));
    const auto rep = refined_pics_general(inst, p, a.budget, a.mc_draws, rng);
    std::size_t id = 0;
    for (const auto& t : rep.terms)
      approx_row(out, std::to_string(++id), subset_label(t.subset), t.rate, t.sign * t.c_s, t.value, "");
    approx_total(out, rep.total, "");
  }
}

// ---- solve ----

struct SolveArgs {
  InstanceFlags inst;
  std::vector<double> budgets;
  int order = 0;
  bool roa = false;
};

void cmd_solve(const SolveArgs& a, std::ostream& out) {
  const auto inst = a.inst.build();
  const auto k = inst.size();
  if (!a.roa && a.budgets.empty()) throw InvalidArgument("--budget: required unless --roa is given");
  if (!a.roa && a.order % 2 != 0) throw InvalidArgument("--order: even order required");
  out << "method,budget";
  for (std::size_t i = 1; i <= k; ++i) out << ",p_" << i;
  out << ",score_spread,relative_score_spread,balance_gap\n";
  auto row = [&](const std::string& method, const std::string& budget, const SamplingRatios& p,
                 const OptimalityResidual& r) {
    out << method << ',' << budget;
    for (double v : p.values()) out << ',' << format_number(v);
    out << ',' << format_number(r.score_spread) << ',' << format_number(r.relative_score_spread) << ','
        << format_number(r.balance_gap) << '\n';
  };
  for (double T : a.budgets) {
    const auto res = solve_v_ell_detailed(inst, T, a.order);
    row("fcba" + std::to_string(a.order), format_number(T), res.ratios, res.residual);
  }
  if (a.roa) {
    const auto p = solve_roa(inst);
    const auto b = inst.best_index();
    OptimalityResidual r;
    double lo = INFINITY, hi = -INFINITY, sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == b) continue;
      const double rate = pairwise_quantities(inst[b], inst[j], p[b], p[j]).rate;
      lo = std::min(lo, rate);
      hi = std::max(hi, rate);
      sum += p[j] * p[j] / inst[j].variance();
    }
    r.score_spread = hi - lo;
    r.relative_score_spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
    r.balance_gap = p[b] * p[b] / inst[b].variance() - sum;
    row("roa", "", p, r);
  }
}

// ---- lowconf ----

struct LowconfArgs {
  InstanceFlags inst;
  std::vector<double> ratios;
  double budget = 0.0;
  std::int64_t mc_draws = 0;
};

void cmd_lowconf(const LowconfArgs& a, const Globals& g, std::ostream& out) {
  const auto inst = a.inst.build();
  const auto p = ratios_or_uniform(a.ratios, inst.size());
  const auto b = inst.best_index();
  if (inst.size() > kMaxRefinedSize) throw InvalidArgument("--means: at most 12 alternatives for subset enumeration");
  std::vector<std::size_t> subs;
  for (std::size_t i = 0; i < inst.size(); ++i)
    if (i != b) subs.push_back(i);
  if (a.mc_draws > 0 && !(a.budget > 0.0)) throw InvalidArgument("--budget: required with --mc-draws");
  if (inst.size() == 3) {
    out << "critical_line," << (k3_critical_line(inst, p) ? "true" : "false") << '\n';
  }
  out << "subset,critical_point,rate,order,active_count,sibc,sibc_stderr\n";
  const std::uint64_t base = derive_seed(g.seed.value_or(0), 0);
  for (std::uint32_t mask = 1; mask < (1u << subs.size()); ++mask) {
    std::vector<std::size_t> s{b};
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (mask & (1u << i)) s.push_back(subs[i]);
    std::sort(s.begin(), s.end());
    const auto an = critical_point(inst, p, s);
    out << subset_label(an.subset) << ',' << format_number(an.critical_point) << ',' << format_number(an.rate) << ','
        << an.order << ',' << an.active_count << ',';
    if (a.mc_draws > 0) {
      CounterRng rng(derive_seed(base, mask));
      const auto est = sibc_probability_approx(inst, p, s, a.budget, a.mc_draws, rng);
      out << format_number(est.value) << ',' << format_number(est.std_error);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

// ---- oracle ----

struct OracleArgs {
  InstanceFlags inst;
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> subset;
  std::int64_t draws = 0;
  std::string event = "all";
};

void cmd_oracle(const OracleArgs& a, const Globals& g, std::ostream& out) {
  const auto inst = a.inst.build();
  const auto k = inst.size();
  const auto b = inst.best_index();
  if (a.counts.size() != k) throw InvalidArgument("--counts: expected " + std::to_string(k) + " values");
  std::vector<std::size_t> s = from_one_based(a.subset, k, "--subset");
  if (s.empty())
    for (std::size_t i = 0; i < k; ++i)
      if (i != b) s.push_back(i);
  std::erase(s, b);
  if (s.empty()) throw InvalidArgument("--subset: needs a sub-optimal alternative");
  const auto kind = a.event == "any" ? EventKind::Any : EventKind::All;
  const bool gaussian = std::all_of(inst.alternatives().begin(), inst.alternatives().end(),
                                    [](const AlternativeModel& m) { return m.is_gaussian(); });
  out << "method,value,stderr\n";
  if (gaussian && s.size() == 1)
    out << "exact," << format_number(exact_binary_pics(inst[b], inst[s[0]], static_cast<double>(a.counts[b]),
                                                       static_cast<double>(a.counts[s[0]])))
        << ",0\n";
  if (gaussian && kind == EventKind::All) {
    std::vector<std::size_t> full = s;
    full.push_back(b);
    out << "quadrature," << format_number(gaussian_event_probability(inst, a.counts, full)) << ",\n";
  }
  if (a.draws > 0) {
    std::vector<std::size_t> full = s;
    full.push_back(b);
    const auto mc = mc_event_probability(inst, a.counts, full, a.draws, g.seed.value_or(0), kind);
    out << "monte_carlo," << format_number(mc.value) << ',' << format_number(mc.std_error) << '\n';
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-budget ranking and selection: experiments, approximations and allocation solvers", "fcba"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "master seed for experiments and Monte Carlo estimates");
  app.add_option("--threads", g.threads, "worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run a macro-replication experiment from a JSON config");
  run_cmd->add_option("-c,--config", run.config, "config file")->required();
  run_cmd->add_option("-o,--out", run.out_dir, "output directory")->required();
  run_cmd->add_flag("-q,--quiet", run.quiet, "skip the console summary");

  ApproxArgs ap;
  auto* approx_cmd = app.add_subcommand("approx", "evaluate a PICS approximation with its per-term breakdown");
  ap.inst.add_to(*approx_cmd);
  approx_cmd->add_option("--ratios", ap.ratios, "sampling ratios (default uniform)")->delimiter(',');
  approx_cmd->add_option("-T,--budget", ap.budget, "total budget")->required();
  approx_cmd->add_option("--order", ap.order, "expansion order");
  approx_cmd->add_option("--variant", ap.variant, "expansion, ldr, refined_k3 or refined")
      ->check(CLI::IsMember({"expansion", "ldr", "refined_k3", "refined"}));
  approx_cmd->add_option("--mc-draws", ap.mc_draws, "Monte Carlo draws for the refined constants");

  SolveArgs sv;
  auto* solve_cmd = app.add_subcommand("solve", "optimal static sampling ratios");
  sv.inst.add_to(*solve_cmd);
  solve_cmd->add_option("-T,--budget", sv.budgets, "one or more budgets (one row each)")->delimiter(',');
  solve_cmd->add_option("--order", sv.order, "expansion order (even)");
  solve_cmd->add_flag("--roa", sv.roa, "also print the rate-optimal ratios");

  LowconfArgs lc;
  auto* lowconf_cmd = app.add_subcommand("lowconf", "critical points and SIBC terms for every subset");
  lc.inst.add_to(*lowconf_cmd);
  lowconf_cmd->add_option("--ratios", lc.ratios, "sampling ratios (default uniform)")->delimiter(',');
  lowconf_cmd->add_option("-T,--budget", lc.budget, "total budget (needed for SIBC values)");
  lowconf_cmd->add_option("--mc-draws", lc.mc_draws, "Monte Carlo draws per subset; 0 skips SIBC values");

  OracleArgs orc;
  auto* oracle_cmd = app.add_subcommand("oracle", "exact, quadrature and Monte Carlo incorrect-selection probabilities");
  orc.inst.add_to(*oracle_cmd);
  oracle_cmd->add_option("--counts", orc.counts, "samples per alternative")->delimiter(',')->required();
  oracle_cmd->add_option("--subset", orc.subset, "1-based sub-optimal indices (default all)")->delimiter(',');
  oracle_cmd->add_option("--draws", orc.draws, "Monte Carlo draws; 0 skips Monte Carlo");
  oracle_cmd->add_option("--event", orc.event, "all or any")->check(CLI::IsMember({"all", "any"}));

  std::vector<const char*> argv;
  if (args.empty()) argv.push_back("fcba");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    if (e.get_exit_code() == 0) return kExitOk;
    return kExitUsage;
  }

  set_threads(g.threads);
  if (run_cmd->parsed()) return cmd_run(run, g, out, err);
  try {
    if (approx_cmd->parsed()) cmd_approx(ap, g, out);
    if (solve_cmd->parsed()) cmd_solve(sv, out);
    if (lowconf_cmd->parsed()) cmd_lowconf(lc, g, out);
    if (oracle_cmd->parsed()) cmd_oracle(orc, g, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace fcba
