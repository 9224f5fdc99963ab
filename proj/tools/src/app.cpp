#include "carma_cli/app.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "carma_cli/experiments.hpp"
#include "carma_cli/scenario.hpp"

namespace carma::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::config:
    case ErrorCode::invalid_parameter:
    case ErrorCode::shape_mismatch:
    case ErrorCode::unsupported_model:
      return 2;
    case ErrorCode::inadmissible_model:
    case ErrorCode::singular_solve:
      return 3;
    default:
      return is_numeric_failure(code) ? 4 : 1;
  }
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int do_run(const Scenario& s, std::ostream& out) {
  ExperimentResult res = run_experiment(s);
  std::filesystem::create_directories(s.output_dir);
  nlohmann::json manifest;
  manifest["library_version"] = CARMA_VERSION_STRING;
  manifest["config_hash"] = config_hash(s.canonical);
  manifest["config"] = s.canonical;
  manifest["experiment"] = s.experiment;
  manifest["seed"] = s.seed;
  manifest["budgets"] = res.budgets;
  manifest["timestamp"] = utc_timestamp();
  nlohmann::json files = nlohmann::json::array();
  for (const auto& t : res.tables) {
    t.write(s.output_dir);
    files.push_back(t.file);
  }
  manifest["files"] = files;
  std::ofstream(std::filesystem::path(s.output_dir) / "manifest.json") << manifest.dump(2) << '\n';
  for (const auto& line : res.summary) out << line << '\n';
  out << "wrote " << res.tables.size() << " table(s) to " << s.output_dir << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"carma: CARMA kernels, spectral approximants and random-content analytics"};
  app.require_subcommand(1);
  std::string scenario_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  unsigned threads = 0;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", scenario_path, "scenario JSON file")->required();
    sub->add_option("--seed", seed, "override the scenario seed");
    sub->add_option("--out", out_dir, "override the output directory");
    sub->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
  };
  CLI::App* run = app.add_subcommand("run", "run a scenario and write CSV results plus a manifest");
  CLI::App* validate = app.add_subcommand("validate", "check a scenario without simulating");
  add_common(run);
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  CLI::App* sub = run->parsed() ? run : validate;
  Overrides ov;
  if (sub->count("--seed")) ov.seed = seed;
  if (sub->count("--out")) ov.output_dir = out_dir;
  if (sub->count("--threads")) ov.threads = threads;

  try {
    const Scenario s = load_scenario(scenario_path, ov);
    if (run->parsed()) return do_run(s, out);
    const nlohmann::json rep = validate_scenario(s);
    out << "OK\n" << rep.dump(2) << '\n';
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "error: config: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace carma::cli
