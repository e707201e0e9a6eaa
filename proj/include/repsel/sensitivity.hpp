#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "repsel/strategies.hpp"
#include "repsel/trainer.hpp"
#include "repsel/types.hpp"

namespace repsel {

/// Total variation distance with the 1/2 convention: 0.5 * sum |p_i - q_i|.
/// Throws DataError on length mismatch.
double tv_distance(std::span<const double> p, std::span<const double> q);

enum class SensitivityMode { immediate, retrained };

struct SensitivitySettings {
  std::size_t candidates_per_index = 2;  // K; K >= |pool| means exhaustive
  SensitivityMode mode = SensitivityMode::immediate;
  std::uint64_t seed = 1234;  // candidate subsampling when K < |pool|
  bool per_index_detail = false;
  /// Retrained mode only: how to train the per-neighbor model.
  std::optional<Hyper> retrain_hyper;
  std::uint64_t retrain_seed = 42;
};

struct SensitivityEstimate {
  double delta_hat = 0.0;  // max TV over evaluated perturbations, <= 1
  std::size_t n_perturbations = 0;
  SensitivityMode mode = SensitivityMode::immediate;
  std::optional<std::vector<double>> per_index_max;
};

/// Empirical selection sensitivity over neighboring datasets: for each index j
/// and each candidate replacement from the pool, recompute the weights and
/// take the TV distance against the base weights.
///
/// immediate: weights recomputed under the same model snapshot (data-derived
/// quantities such as curriculum difficulty are recomputed for the changed
/// element). retrained: a model is retrained on each neighbor for ctx.epoch
/// epochs (settings.retrain_hyper / retrain_seed) before the weights are read.
SensitivityEstimate empirical_sensitivity(const StrategyConfig& cfg, const Dataset& ds,
                                          const EpochContext& ctx,
                                          const std::vector<Example>& pool,
                                          const SensitivitySettings& settings);

/// Closed forms: uniform 0; IW 1/(2 lambda); CBS 1/tau; CL 0.8/t_pace;
/// UCL max(1/tau_unc, 1/tau_curr); GB 1/tau_gb. Curriculum requires t_pace.
double theoretical_sensitivity(const StrategyConfig& cfg, std::optional<double> t_pace = {});

}  // namespace repsel
