#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "repsel/model.hpp"
#include "repsel/strategies.hpp"
#include "repsel/types.hpp"

namespace repsel {

struct Hyper {
  double lr = 0.1;
  int epochs = 15;
  int batch_size = 32;
  double loss_cap = 4.0;  // L_max for the normalized bounded loss
  int eval_every = 1;
  bool operator==(const Hyper&) const = default;
};

/// Throws ConfigError listing violations (lr >= 0, epochs >= 1, ...).
void validate(const Hyper& h);

struct EpochRecord {
  int epoch = 0;
  double acc_source = 0.0;  // matched-analog eval accuracy (NaN without an eval set)
  double acc_target = 0.0;  // mismatched-analog
  double weight_min = 0.0;
  double weight_max = 0.0;
  double weight_std = 0.0;    // population std of that epoch's weights
  double max_grad_norm = 0.0; // max per-example gradient norm seen this epoch
  bool operator==(const EpochRecord&) const = default;
};

using TrainTrace = std::vector<EpochRecord>;

struct TrainedModel {
  ModelParams params;
  ModelParams initial;  // params before the first update (difficulty reference)
  TrainTrace trace;
  std::uint64_t seed = 0;
  std::string strategy;
  bool operator==(const TrainedModel&) const = default;
};

struct EvalSets {
  const Dataset* source = nullptr;
  const Dataset* target = nullptr;
};

struct TrainOptions {
  /// Domain-feature counts of the source sample, for importance weighting.
  /// Empty means "use the training set's own counts".
  std::vector<long> source_counts;
  const ModelParams* start = nullptr;  // warm start instead of init_params
  double init_scale = 0.01;
};

/// Weighted-SGD fine-tuning: each epoch recomputes selection weights from the
/// current model, draws batch_size * ceil(n/batch_size) examples by weighted
/// sampling with replacement and applies SGD on raw cross-entropy. Zero-weight
/// examples are never drawn. Deterministic per seed.
TrainedModel train(const Dataset& ds, const EvalSets& evals, const StrategyConfig& strategy,
                   const Hyper& h, std::uint64_t seed, const TrainOptions& opts = {});

/// Stage 1: uniform selection on source_train. Stage 2: `strategy` on
/// target_train continuing from stage-1 params; the returned trace covers
/// stage 2 only.
TrainedModel two_stage_train(const DomainPair& pair, const StrategyConfig& strategy,
                             const Hyper& h_source, const Hyper& h_target, std::uint64_t seed);

/// Inverse-CDF sampling with replacement, proportional to weights. Exposed so
/// tests can reproduce the exact multiset the trainer draws.
std::vector<std::size_t> sample_indices(const std::vector<double>& weights, std::size_t count,
                                        std::mt19937_64& rng);

/// Model state after running `epochs_to_run` epochs of the training loop with
/// the pacing ratio still computed against total_epochs. Used by the
/// retrained sensitivity mode. epochs_to_run = 0 returns the initial params.
ModelParams train_prefix(const Dataset& ds, const StrategyConfig& strategy, const Hyper& h,
                         std::uint64_t seed, int epochs_to_run, int total_epochs,
                         const TrainOptions& opts = {});

}  // namespace repsel
