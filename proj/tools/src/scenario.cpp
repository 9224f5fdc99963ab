#include "carma_cli/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "carma/error.hpp"
#include "carma/model_io.hpp"

namespace carma::cli {

namespace fs = std::filesystem;

namespace {

double get_number(const nlohmann::json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) fail(ErrorCode::config, where + ": missing \"" + key + "\"");
  if (!j.at(key).is_number()) fail(ErrorCode::config, where + ": \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

double opt_number(const nlohmann::json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? get_number(j, key, where) : fallback;
}

ParetoJumps pareto_from_json(const nlohmann::json& j) {
  ParetoJumps p;
  p.rate = opt_number(j, "rate", p.rate, "pareto");
  p.alpha = opt_number(j, "alpha", p.alpha, "pareto");
  p.scale = opt_number(j, "scale", p.scale, "pareto");
  if (j.contains("symmetric")) {
    if (!j.at("symmetric").is_boolean()) fail(ErrorCode::config, "pareto: \"symmetric\" must be true or false");
    p.symmetric = j.at("symmetric").get<bool>();
  }
  return p;
}

StableJumps stable_from_json(const nlohmann::json& j) {
  StableJumps s;
  s.alpha = opt_number(j, "alpha", s.alpha, "stable");
  s.scale = opt_number(j, "scale", s.scale, "stable");
  return s;
}

}  // namespace

LevyModel driver_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::config, "driver must be a JSON object");
  if (!j.contains("kind") || !j.at("kind").is_string()) fail(ErrorCode::config, "driver: missing string \"kind\"");
  const LevyKind kind = levy_kind_from_string(j.at("kind").get<std::string>());
  const int d = static_cast<int>(opt_number(j, "d", 1.0, "driver"));
  if (d < 1) fail(ErrorCode::invalid_parameter, "driver dimension must be >= 1");
  Mat Sigma = Mat::Identity(d, d);
  if (j.contains("sigma")) Sigma = matrix_from_json(j.at("sigma"), d, d, "driver sigma");
  switch (kind) {
    case LevyKind::brownian: return LevyModel::brownian(Sigma);
    case LevyKind::compound_poisson_pareto: return LevyModel::compound_poisson(d, pareto_from_json(j));
    case LevyKind::alpha_stable: return LevyModel::alpha_stable(d, stable_from_json(j));
    case LevyKind::mixture: {
      if (!j.contains("sigma")) Sigma = Mat::Zero(d, d);
      std::optional<ParetoJumps> pj;
      std::optional<StableJumps> sj;
      if (j.contains("pareto")) pj = pareto_from_json(j.at("pareto"));
      if (j.contains("stable")) sj = stable_from_json(j.at("stable"));
      return LevyModel::mixture(Sigma, pj, sj);
    }
  }
  fail(ErrorCode::config, "unhandled driver kind");
}

nlohmann::json driver_to_json(const LevyModel& m) {
  nlohmann::json j;
  j["kind"] = to_string(m.kind);
  j["d"] = m.d;
  j["sigma"] = matrix_to_json(m.Sigma);
  if (m.pareto) {
    const nlohmann::json p{{"rate", m.pareto->rate},
                           {"alpha", m.pareto->alpha},
                           {"scale", m.pareto->scale},
                           {"symmetric", m.pareto->symmetric}};
    if (m.kind == LevyKind::mixture)
      j["pareto"] = p;
    else
      j.update(p);
  }
  if (m.stable) {
    const nlohmann::json s{{"alpha", m.stable->alpha}, {"scale", m.stable->scale}};
    if (m.kind == LevyKind::mixture)
      j["stable"] = s;
    else
      j.update(s);
  }
  return j;
}

double Scenario::number(const std::string& key, double fallback) const {
  return opt_number(params, key, fallback, "params");
}

long Scenario::integer(const std::string& key, long fallback) const {
  const double v = number(key, static_cast<double>(fallback));
  if (v != static_cast<double>(static_cast<long>(v))) fail(ErrorCode::config, "params: \"" + key + "\" must be an integer");
  return static_cast<long>(v);
}

std::vector<double> Scenario::numbers(const std::string& key, const std::vector<double>& fallback) const {
  if (!params.contains(key)) return fallback;
  const auto& a = params.at(key);
  if (!a.is_array()) fail(ErrorCode::config, "params: \"" + key + "\" must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) fail(ErrorCode::config, "params: \"" + key + "\" must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

const MatrixPolyPair& Scenario::require_model() const {
  if (!model) fail(ErrorCode::config, "experiment \"" + experiment + "\" needs a \"model\"");
  return *model;
}

const LevyModel& Scenario::require_driver() const {
  if (!driver) fail(ErrorCode::config, "experiment \"" + experiment + "\" needs a \"driver\"");
  return *driver;
}

const GridSpec& Scenario::require_grid() const {
  if (!grid) fail(ErrorCode::config, "experiment \"" + experiment + "\" needs a \"grid\"");
  return *grid;
}

Scenario load_scenario(const std::string& path, const Overrides& overrides) {
  const nlohmann::json j = read_json_file(path);
  if (!j.is_object()) fail(ErrorCode::config, path + ": scenario must be a JSON object");
  Scenario s;
  s.source = path;

  if (!j.contains("experiment") || !j.at("experiment").is_string())
    fail(ErrorCode::config, path + ": missing string \"experiment\"");
  s.experiment = j.at("experiment").get<std::string>();
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), s.experiment) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    fail(ErrorCode::config, path + ": unknown experiment \"" + s.experiment + "\" (expected one of " + list + ")");
  }

  if (!j.contains("seed") || !j.at("seed").is_number_unsigned())
    fail(ErrorCode::config, path + ": \"seed\" must be present as a non-negative integer");
  s.seed = j.at("seed").get<std::uint64_t>();
  if (overrides.seed) s.seed = *overrides.seed;

  s.output_dir = j.value("output", std::string("results"));
  if (overrides.output_dir) s.output_dir = *overrides.output_dir;
  if (j.contains("threads")) {
    if (!j.at("threads").is_number_unsigned()) fail(ErrorCode::config, path + ": \"threads\" must be a non-negative integer");
    s.threads = j.at("threads").get<unsigned>();
  }
  if (overrides.threads) s.threads = *overrides.threads;

  nlohmann::json canon;
  canon["experiment"] = s.experiment;
  canon["seed"] = s.seed;

  if (j.contains("model")) {
    const auto& m = j.at("model");
    if (m.is_string()) {
      fs::path mp(m.get<std::string>());
      if (mp.is_relative()) mp = fs::path(path).parent_path() / mp;
      if (!fs::exists(mp)) fail(ErrorCode::config, path + ": model file " + mp.string() + " does not exist");
      s.model = load_model(mp.string());
    } else {
      s.model = model_from_json(m);
    }
    canon["model"] = model_to_json(*s.model);
  }
  if (j.contains("driver")) {
    s.driver = driver_from_json(j.at("driver"));
    canon["driver"] = driver_to_json(*s.driver);
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (!g.is_object()) fail(ErrorCode::config, path + ": \"grid\" must be an object");
    GridSpec gs;
    gs.from = get_number(g, "from", "grid");
    gs.to = get_number(g, "to", "grid");
    gs.step = get_number(g, "step", "grid");
    if (!(gs.step > 0.0) || !(gs.to > gs.from)) fail(ErrorCode::invalid_parameter, "grid needs step > 0 and to > from");
    s.grid = gs;
    canon["grid"] = {{"from", gs.from}, {"to", gs.to}, {"step", gs.step}};
  }
  if (j.contains("params")) {
    if (!j.at("params").is_object()) fail(ErrorCode::config, path + ": \"params\" must be an object");
    s.params = j.at("params");
  }
  for (const auto& [key, value] : s.params.items()) {
    const bool numeric = value.is_number() || (value.is_array() && std::all_of(value.begin(), value.end(), [](const auto& v) {
                                                 return v.is_number();
                                               }));
    if (!numeric) fail(ErrorCode::config, path + ": params." + key + " must be a number or an array of numbers");
    if (key.find("tolerance") != std::string::npos && value.is_number() && !(value.get<double>() > 0.0))
      fail(ErrorCode::invalid_parameter, "params." + key + " must be positive");
  }
  canon["params"] = s.params;
  s.canonical = canon;
  return s;
}

std::string config_hash(const nlohmann::json& canonical) {
  const std::string text = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace carma::cli
