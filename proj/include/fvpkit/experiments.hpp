#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fvpkit/coercive_operator.hpp"
#include "fvpkit/neumann.hpp"

namespace fvpkit {

/// Parsed experiment configuration. Tolerances not present in the document
/// take the documented defaults below.
struct ExperimentConfig {
  std::string experiment;  // registry name, or "all"
  std::optional<nlohmann::json> model;  // Neumann descriptor or operator table
  double T = 1.0;
  int grid_size = 129;
  std::vector<int> levels = {8, 16, 32};
  int trials = 50;
  std::vector<int> modes = {0, 1, 2, 3, 4, 5, 6};
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 7;
  std::filesystem::path output_dir = "out";

  double tol(const std::string& name, double fallback) const;
};

/// Throws ValidationError with field diagnostics on malformed documents.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ExperimentInfo {
  std::string name;
  std::string description;  // one line, names the property it verifies
};

/// Compiled-in registry, sorted by name.
std::vector<ExperimentInfo> list_experiments();

struct ExperimentOutcome {
  std::string name;
  bool pass = false;
  nlohmann::json report;
  std::vector<std::filesystem::path> artifacts;
};

/// Runs one named experiment, writing results.csv, report.json and
/// plotdata/*.csv under out_dir/<name>/.
ExperimentOutcome run_experiment(const std::string& name,
                                 const ExperimentConfig& config,
                                 const std::filesystem::path& out_dir);

/// Runs the configured experiment (or every registered one for "all").
/// Parallelism across experiments is capped by FVPKIT_THREADS (default 1).
/// Returns the process exit status: 0 all-pass, 2 property violation.
int run_configured(const ExperimentConfig& config);

}  // namespace fvpkit
