#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "carma/levy.hpp"
#include "carma/polyalg.hpp"

namespace carma::cli {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"kernel",   "consistency",     "spectral-levy", "spectral-mcarma",
                                              "simulate", "noise-analytics", "tail-estimate", "dependence"};
  return names;
}

struct GridSpec {
  double from = -50.0;
  double to = 51.0;
  double step = 1.0 / 256.0;

  TimeGrid grid() const { return TimeGrid::span(from, to, step); }
};

struct Scenario {
  std::string source;  // scenario file path
  std::string experiment;
  std::optional<MatrixPolyPair> model;
  std::optional<LevyModel> driver;
  std::uint64_t seed = 0;
  std::string output_dir;
  unsigned threads = 0;
  std::optional<GridSpec> grid;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json canonical;  // resolved configuration used for the hash

  /// Numeric parameter with a default; throws config for a non-numeric entry.
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;

  const MatrixPolyPair& require_model() const;
  const LevyModel& require_driver() const;
  const GridSpec& require_grid() const;
};

/// {"kind": "alpha_stable", "d": 1, "alpha": 1.5, "scale": 1} and friends.
LevyModel driver_from_json(const nlohmann::json& j);
nlohmann::json driver_to_json(const LevyModel& m);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<unsigned> threads;
};

/// Reads and validates a scenario file. Model files are resolved relative to
/// the scenario's directory.
Scenario load_scenario(const std::string& path, const Overrides& overrides = {});

/// 64-bit FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& canonical);

}  // namespace carma::cli
