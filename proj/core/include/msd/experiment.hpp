#pragma once
// Experiment runner: maps a JSON config onto the simulation pipelines and
// aggregates metrics over seeded trials. Results are plain records so the
// report layer can emit CSV/Markdown/JSON/SVG without knowing the
// experiment internals.

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace msd {

using json = nlohmann::ordered_json;

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 12345;
  int trials = 3;
  std::string scale = "full";  // "full" | "desk"
  json params = json::object();
};

// Parses a config document. The MSD_SEED environment variable, when set,
// overrides the seed.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);

struct ResultRecord {
  std::string experiment;
  json config;  // echoed run parameters, stable key order
  json values;  // metric name -> value, stable key order
};

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg);

struct CheckOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Compares records against the pinned tolerance bands for the experiment.
std::vector<CheckOutcome> check_results(const ExperimentConfig& cfg,
                                        const std::vector<ResultRecord>& recs);

const std::vector<std::string>& experiment_ids();

// Canonical config for an experiment id (what ships under configs/).
json default_config(const std::string& experiment);

}  // namespace msd
