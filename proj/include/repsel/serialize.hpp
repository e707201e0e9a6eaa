#pragma once

#include <string>

#include <json.hpp>

#include "repsel/harness.hpp"
#include "repsel/trainer.hpp"

// JSON and CSV serialization. ordered_json keeps key order stable so reports
// are byte-identical across reruns.
namespace repsel {

using Json = nlohmann::ordered_json;

Json to_json(const SynthConfig& cfg);
SynthConfig synth_config_from_json(const Json& j);

Json to_json(const StrategyConfig& cfg);
StrategyConfig strategy_config_from_json(const Json& j);

Json to_json(const Hyper& h);
Hyper hyper_from_json(const Json& j);

Json to_json(const StudyConfig& cfg);
StudyConfig study_config_from_json(const Json& j);

Json to_json(const ModelParams& p);
ModelParams model_params_from_json(const Json& j);

/// Versioned document: {"schema_version": 1, params, initial, trace, ...}.
Json to_json(const TrainedModel& m);
TrainedModel trained_model_from_json(const Json& j);

Json to_json(const SensitivityEstimate& est);
Json to_json(const ReplicationStudy& study);

/// Write via a temp file + atomic rename; never leaves a partial file.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Shortest-round-trip decimal for CSV cells.
std::string format_double(double v);

std::string runs_csv(const ReplicationStudy& study);
std::string pairs_csv(const ReplicationStudy& study);
std::string dynamics_csv(const ReplicationStudy& study);
std::string summary_csv(const SweepReport& report);

/// study.json + runs.csv + pairs.csv + dynamics.csv under out_dir.
void write_study_outputs(const ReplicationStudy& study, const std::string& out_dir);

/// Per-study subdirectories plus summary.csv and sweep.json.
void write_sweep_outputs(const SweepReport& report, const std::string& out_dir);

}  // namespace repsel
