#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "carma_cli/scenario.hpp"

namespace carma::cli {

/// %.17g, so CSV values round-trip exactly.
std::string fmt(double v);

struct Table {
  std::string file;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  void write(const std::string& dir) const;
};

struct ExperimentResult {
  std::vector<Table> tables;
  nlohmann::json budgets = nlohmann::json::object();
  std::vector<std::string> summary;  // human-readable lines for stdout
};

ExperimentResult run_experiment(const Scenario& s);

/// Dry run: admissibility, causality, truncation budgets and a memory
/// estimate, without simulating. Throws the same errors as run_experiment.
nlohmann::json validate_scenario(const Scenario& s);

}  // namespace carma::cli
