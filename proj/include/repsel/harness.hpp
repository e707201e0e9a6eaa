#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "repsel/bounds.hpp"
#include "repsel/sensitivity.hpp"
#include "repsel/strategies.hpp"
#include "repsel/trainer.hpp"
#include "repsel/types.hpp"

namespace repsel {

struct CsvPaths {
  std::string source_train;
  std::string source_eval;
  std::string target_train;
  std::string target_eval;
  bool operator==(const CsvPaths&) const = default;
};

using DataConfig = std::variant<SynthConfig, CsvPaths>;

enum class Protocol { direct, two_stage };

struct StudySensitivityConfig {
  bool enabled = false;
  SensitivitySettings settings;
  std::size_t pool_size = 64;  // candidates taken from the target eval set
  bool operator==(const StudySensitivityConfig& o) const {
    return enabled == o.enabled && pool_size == o.pool_size;
  }
};

struct StudyConfig {
  std::string name;  // defaults to the strategy name when empty
  DataConfig data = SynthConfig{};
  Protocol protocol = Protocol::two_stage;
  StrategyConfig strategy = Uniform{};
  Hyper hyper;         // target stage
  Hyper hyper_source;  // stage 1 of two_stage
  std::vector<std::uint64_t> seeds = {42, 43, 44, 45, 46, 47, 48, 49, 50, 51};
  double epsilon = 0.01;  // pairwise failure threshold
  /// Draw a fresh dataset per seed (two independent samples reading of the
  /// replicability definition). false shares one dataset across seeds.
  bool resample_per_seed = true;
  double histogram_bin_width = 0.005;
  double t_pace = 0.12;      // curriculum closed-form sensitivity parameter
  double rho_target = 0.05;  // for the required-sample-size report
  StudySensitivityConfig sensitivity;
};

/// Every violated field with a message; empty means valid.
std::vector<std::string> study_config_violations(const StudyConfig& cfg);

/// Throws ConfigError listing every violated field.
void validate(const StudyConfig& cfg);

struct RunRecord {
  std::uint64_t seed = 0;
  double acc_source = 0.0;
  double acc_target = 0.0;  // the failure-metric surrogate
  TrainTrace trace;
};

struct PairDiff {
  std::size_t i = 0;
  std::size_t j = 0;
  double diff = 0.0;
};

struct HistogramReport {
  double bin_width = 0.005;
  std::vector<double> edges;  // counts.size() + 1, starting at 0
  std::vector<long> counts;
  double exceed_fraction = 0.0;  // equals pairwise_failure_rate on the same diffs
  double epsilon = 0.01;
};

struct EpochDynamics {
  int epoch = 0;
  std::vector<double> run_min;  // per run, in seed order
  std::vector<double> run_max;
  std::vector<double> run_std;
  double max_weight_spread = 0.0;  // population std of run_max across runs
};

struct BoundReport {
  double delta_closed = 0.0;
  std::optional<double> delta_hat;
  double c_est = 0.0;
  double M = 0.0;
  double G = 0.0;
  double eta = 0.0;
  int E = 0;
  double n = 0.0;  // sample size used in the bound (target train size)
  double bound_theorem = 0.0;   // Theorem-1 form, prefactor 4
  double bound_strategy = 0.0;  // per-strategy appendix form, prefactor 2
  long long required_n = 0;     // for rho_target
};

struct ReplicationStudy {
  StudyConfig config;
  std::vector<RunRecord> runs;
  std::vector<PairDiff> pairs;  // all unordered pairs, lexicographic order
  double failure_rate = 0.0;
  HistogramReport histogram;
  std::vector<EpochDynamics> dynamics;
  std::optional<SensitivityEstimate> sensitivity;
  BoundReport bounds;
};

/// Fraction of unordered pairs with |a_i - a_j| > epsilon (strict), plus the
/// diffs in lexicographic pair order. Throws on fewer than 2 values.
std::pair<double, std::vector<double>> pairwise_failure_rate(std::span<const double> accuracies,
                                                             double epsilon);

/// Per-epoch aggregation across runs; throws DataError on ragged traces.
std::vector<EpochDynamics> weight_dynamics(const std::vector<TrainTrace>& traces);

/// Fixed-width bins from 0. Throws DataError on empty diffs or bin_width <= 0.
HistogramReport histogram(std::span<const double> diffs, double bin_width, double epsilon);

/// Train one model per seed under the configured protocol, then aggregate:
/// pairwise differences of target-eval accuracy, failure rate, histogram,
/// weight dynamics, optional empirical sensitivity, and the bound report.
/// Deterministic given cfg.
ReplicationStudy run_study(const StudyConfig& cfg);

struct SweepRow {
  std::string name;
  std::string strategy;
  std::string protocol;
  double n_target = 0;
  double mean_acc = 0.0;
  double std_acc = 0.0;
  double failure_rate = 0.0;
  double delta_closed = 0.0;
  std::optional<double> delta_hat;
  double bound_theorem = 0.0;
  double bound_strategy = 0.0;
  double c_est = 0.0;
};

struct SweepReport {
  std::vector<ReplicationStudy> studies;
  std::vector<SweepRow> rows;
};

/// One study per config; errors are attributed to the failing study by name.
SweepReport sweep(const std::vector<StudyConfig>& cfgs);

}  // namespace repsel
