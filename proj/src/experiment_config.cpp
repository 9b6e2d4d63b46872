#include "fcba/experiment_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fcba {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) { throw ConfigError(field + ": " + msg); }

void reject_unknown(const json& obj, const std::string& prefix, const std::set<std::string>& known) {
  for (const auto& [key, _] : obj.items())
    if (!known.contains(key)) fail(prefix + key, "unknown key");
}

const json& require(const json& obj, const std::string& prefix, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(prefix + key, "missing required field");
  return *it;
}

std::int64_t as_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t as_u64(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  fail(field, "expected a non-negative integer");
}

double as_double(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& field) {
  if (!v.is_string()) fail(field, "expected a string");
  return v.get<std::string>();
}

AlternativeModel parse_alternative(const json& a, const std::string& field) {
  if (!a.is_object()) fail(field, "expected an object");
  reject_unknown(a, field + ".", {"model", "mean", "variance"});
  const std::string model = a.contains("model") ? as_string(a["model"], field + ".model") : "gaussian";
  const double mean = as_double(require(a, field + ".", "mean"), field + ".mean");
  try {
    if (model == "gaussian")
      return AlternativeModel::gaussian(mean, as_double(require(a, field + ".", "variance"), field + ".variance"));
    if (model == "exponential") {
      if (a.contains("variance")) fail(field + ".variance", "not allowed for exponential alternatives");
      return AlternativeModel::exponential(mean);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(field, e.what());
  }
  fail(field + ".model", "expected \"gaussian\" or \"exponential\"");
}

void parse_instance(const json& inst, ExperimentConfig& cfg) {
  if (!inst.is_object()) fail("instance", "expected an object");
  if (inst.contains("alternatives")) {
    reject_unknown(inst, "instance.", {"alternatives"});
    const auto& alts = inst["alternatives"];
    if (!alts.is_array()) fail("instance.alternatives", "expected an array");
    std::vector<AlternativeModel> models;
    for (std::size_t i = 0; i < alts.size(); ++i)
      models.push_back(parse_alternative(alts[i], "instance.alternatives[" + std::to_string(i) + "]"));
    try {
      cfg.instance = ProblemInstance(std::move(models));
    } catch (const std::exception& e) {
      fail("instance.alternatives", e.what());
    }
    return;
  }
  reject_unknown(inst, "instance.",
                 {"generator", "k", "variance", "variance_value", "mean_scale", "seed", "redraw_per_replication"});
  auto& g = cfg.generator;
  try {
    g.means = parse_mean_config(as_string(require(inst, "instance.", "generator"), "instance.generator"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail("instance.generator", e.what());
  }
  const auto k = as_int(require(inst, "instance.", "k"), "instance.k");
  if (k < 2) fail("instance.k", "need at least two alternatives");
  g.k = static_cast<std::size_t>(k);
  if (inst.contains("variance")) {
    try {
      g.variances = parse_variance_config(as_string(inst["variance"], "instance.variance"));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail("instance.variance", e.what());
    }
  }
  if (inst.contains("variance_value")) g.equal_variance = as_double(inst["variance_value"], "instance.variance_value");
  if (inst.contains("mean_scale")) g.mean_scale = as_double(inst["mean_scale"], "instance.mean_scale");
  if (inst.contains("seed")) g.seed = as_u64(inst["seed"], "instance.seed");
  if (inst.contains("redraw_per_replication")) {
    if (!inst["redraw_per_replication"].is_boolean()) fail("instance.redraw_per_replication", "expected a boolean");
    cfg.redraw_per_replication = inst["redraw_per_replication"].get<bool>();
  }
}

std::vector<std::int64_t> parse_checkpoints(const json& v) {
  std::vector<std::int64_t> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_int(v[i], "checkpoints[" + std::to_string(i) + "]"));
    return out;
  }
  if (!v.is_object()) fail("checkpoints", "expected an array or a {start, stop, step} object");
  reject_unknown(v, "checkpoints.", {"start", "stop", "step"});
  const auto start = as_int(require(v, "checkpoints.", "start"), "checkpoints.start");
  const auto stop = as_int(require(v, "checkpoints.", "stop"), "checkpoints.stop");
  const auto step = v.contains("step") ? as_int(v["step"], "checkpoints.step") : 1;
  if (step < 1) fail("checkpoints.step", "must be positive");
  for (auto t = start; t <= stop; t += step) out.push_back(t);
  return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail("config", std::string("not valid JSON (") + e.what() + ")");
  }
  if (!doc.is_object()) fail("config", "expected a JSON object");
  reject_unknown(doc, "", {"instance", "policies", "budget", "t0", "macro_reps", "seed", "checkpoints", "posthoc"});

  ExperimentConfig cfg;
  parse_instance(require(doc, "", "instance"), cfg);

  const auto& pol = require(doc, "", "policies");
  if (!pol.is_array() || pol.empty()) fail("policies", "expected a non-empty array of policy names");
  for (std::size_t i = 0; i < pol.size(); ++i) {
    const auto field = "policies[" + std::to_string(i) + "]";
    try {
      cfg.policies.push_back(Policy::parse(as_string(pol[i], field)));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(field, e.what());
    }
  }

  cfg.budget = as_int(require(doc, "", "budget"), "budget");
  cfg.macro_reps = as_int(require(doc, "", "macro_reps"), "macro_reps");
  if (doc.contains("t0")) cfg.t0 = as_int(doc["t0"], "t0");
  if (doc.contains("seed")) cfg.seed = as_u64(doc["seed"], "seed");
  if (doc.contains("checkpoints")) cfg.checkpoints = parse_checkpoints(doc["checkpoints"]);
  if (doc.contains("posthoc")) {
    if (!doc["posthoc"].is_boolean()) fail("posthoc", "expected a boolean");
    cfg.posthoc = doc["posthoc"].get<bool>();
  }

  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("config", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

}  // namespace fcba
