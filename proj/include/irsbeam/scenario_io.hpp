#pragma once

#include <nlohmann/json_fwd.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "irsbeam/alt_opt.hpp"

namespace irsbeam {

/// Schema violation with the JSON path of the offending field.
struct ScenarioError : std::runtime_error {
  ScenarioError(std::string json_path, const std::string& message)
      : std::runtime_error(json_path + ": " + message), path(std::move(json_path)) {}
  std::string path;
};

/// Strict scenario parsing: unknown keys are rejected, every error carries
/// its JSON path. Scalar noise_powers / sinr_targets broadcast over K.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario_file(const std::string& path);

nlohmann::json scenario_to_json(const Scenario& scenario);

// Channel sets replay byte-exactly: complex entries as [re, im] arrays with
// explicit dimensions.
nlohmann::json channelset_to_json(const ChannelSet& channels);
ChannelSet channelset_from_json(const nlohmann::json& doc);

nlohmann::json report_to_json(const SolveReport& report, const Scenario& scenario);
nlohmann::json solution_to_json(const SolveReport& report);
std::string trajectory_csv(const SolveReport& report);

/// Dotted-path override ("algorithm.trials=500"); values parse as JSON when
/// possible, else as strings.
void apply_override(nlohmann::json& doc, const std::string& key,
                    const std::string& value);

/// Runs one scenario and writes report.json, trajectory.csv and
/// solution.json into out_dir. Returns the process exit code
/// (0 converged / iteration cap, 2 infeasible, 3 phase step failed).
int run_scenario_to_dir(const Scenario& scenario, const std::string& out_dir);

/// One solve per axis value; writes sweep.csv plus per-point solutions under
/// out_dir/points. Axis is one of N, M, K, tau, P, trials.
int sweep_scenario(const nlohmann::json& base_doc, const std::string& axis,
                   const std::vector<std::string>& values,
                   const std::string& out_dir, int jobs);

int exit_code_for(SolveStatus status);

}  // namespace irsbeam
