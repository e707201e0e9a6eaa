#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "repsel/model.hpp"
#include "repsel/types.hpp"

namespace repsel {

/// Probability distribution over dataset indices. Entries are >= 0, sum to 1
/// within 1e-9, and at least one entry is positive.
struct SelectionWeights {
  std::vector<double> w;
  /// Set when a degenerate input (all weights clipped to zero, or all raw
  /// scores equal under min-max rescaling) forced the uniform fallback.
  bool degenerate_fallback = false;

  std::size_t size() const { return w.size(); }
};

bool weights_valid(const SelectionWeights& sw, double tol = 1e-9);

enum class PaceKind { linear, exp, log };

struct Uniform {
  bool operator==(const Uniform&) const = default;
};
struct ImportanceWeighting {
  double lambda = 0.8;
  bool operator==(const ImportanceWeighting&) const = default;
};
struct ConfidenceSampling {
  double tau = 0.2;
  double w_min = 0.01;
  double w_max = 5.0;
  bool operator==(const ConfidenceSampling&) const = default;
};
struct Curriculum {
  double alpha = 0.25;
  double beta = 1.0;
  PaceKind pace = PaceKind::linear;
  double k = 3.0;  // exp pacing growth rate
  bool operator==(const Curriculum&) const = default;
};
struct UncertaintyCurriculum {
  double tau_unc = 0.12;
  double tau_curr = 0.12;
  double alpha = 0.25;
  double beta = 1.0;
  PaceKind pace = PaceKind::linear;
  double k = 3.0;
  bool operator==(const UncertaintyCurriculum&) const = default;
};
struct GradientBased {
  double tau_gb = 0.1;
  double w_min = 0.01;
  double w_max = 5.0;
  bool use_gradients = true;
  bool operator==(const GradientBased&) const = default;
};

using StrategyConfig = std::variant<Uniform, ImportanceWeighting, ConfidenceSampling, Curriculum,
                                    UncertaintyCurriculum, GradientBased>;

std::string strategy_name(const StrategyConfig& cfg);

/// Throws ConfigError listing every violated parameter constraint.
void validate(const StrategyConfig& cfg);

/// Everything a strategy may read at one epoch. The difficulty cache is owned
/// by the caller (the trainer keeps it across epochs); curriculum fills it on
/// first use from initial_model. A populated cache must correspond to the
/// dataset passed alongside it — callers that perturb the data (sensitivity
/// estimation) update or drop the cache themselves.
struct EpochContext {
  int epoch = 0;
  int total_epochs = 1;
  const ModelParams* model = nullptr;
  const ModelParams* initial_model = nullptr;
  double loss_cap = 4.0;
  const std::vector<long>* source_counts = nullptr;  // importance weighting
  std::optional<std::vector<double>>* difficulty_cache = nullptr;
};

SelectionWeights uniform_weights(std::size_t n);

/// w(f) = (P_T(f) + lambda)/(P_S(f) + lambda); P_T empirical from ds, P_S from
/// source_counts (length F, zero counts allowed). Normalized to sum 1.
SelectionWeights importance_weights(const Dataset& ds, const std::vector<long>& source_counts,
                                    double lambda);

SelectionWeights confidence_weights(const Dataset& ds, const ModelParams& model, double tau,
                                    double w_min, double w_max);
/// Core of confidence sampling: (1-c)^(1/tau), clipped to [w_min, w_max],
/// normalized. Falls back to uniform (flagged) when everything clips to 0.
SelectionWeights weights_from_confidences(std::span<const double> confidences, double tau,
                                          double w_min, double w_max);

/// Pacing schedules: linear, exp (growth rate k) and log, each starting at
/// alpha and reaching 1 at t_ratio = 1. Monotone non-decreasing.
double pacing(PaceKind kind, double t_ratio, double alpha, double k);

/// Normalized pacing profile used inside the curriculum ratio
/// r = alpha + (beta - alpha) * profile(e/E): exactly 0 at t = 0 and 1 at
/// t = 1 for every kind (the exp form is affinely rescaled to pin both ends).
double pace_profile(PaceKind kind, double t_ratio, double k);

/// floor(r * n) clamped to [1, n] with r as above.
std::size_t active_count(double alpha, double beta, PaceKind pace, double k, int epoch,
                         int total_epochs, std::size_t n);

/// Difficulty of each example: bounded loss under the initial model.
std::vector<double> difficulty_scores(const ModelParams& initial_model, const Dataset& ds,
                                      double loss_cap);

SelectionWeights curriculum_weights(const EpochContext& ctx, const Dataset& ds, double alpha,
                                    double beta, PaceKind pace, double k);

SelectionWeights uncertainty_curriculum_weights(const EpochContext& ctx, const Dataset& ds,
                                                double tau_unc, double tau_curr, double alpha,
                                                double beta, PaceKind pace, double k);

/// Top-k entries keep their score, the rest get 0; normalized to sum 1.
SelectionWeights weights_from_scores_topk(std::span<const double> scores, std::size_t k);

SelectionWeights gradient_weights(const Dataset& ds, const ModelParams& model, double tau_gb,
                                  double w_min, double w_max, bool use_gradients,
                                  double loss_cap = 4.0);
/// Min-max rescale raw scores to [0,1], affine-map to [w_min, w_max],
/// normalize. All-equal raw scores fall back to uniform (flagged).
SelectionWeights weights_from_raw_scores(std::span<const double> raw, double w_min, double w_max);

/// Indices of the k largest scores, ties broken by ascending index.
std::vector<std::size_t> top_k_indices(std::span<const double> scores, std::size_t k);

/// Dispatch on the strategy tag. Throws DataError on an empty dataset and
/// ConfigError when a required context field is missing (e.g. source_counts
/// for importance weighting).
SelectionWeights compute_weights(const StrategyConfig& cfg, const Dataset& ds,
                                 const EpochContext& ctx);

}  // namespace repsel
