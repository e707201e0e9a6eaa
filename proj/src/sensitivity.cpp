#include "repsel/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "repsel/datagen.hpp"
#include "repsel/rng.hpp"

namespace repsel {

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw DataError("tv_distance: length mismatch (" + std::to_string(p.size()) + " vs " +
                    std::to_string(q.size()) + ")");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

namespace {

// K distinct pool positions for index j, deterministic in (seed, j).
// K >= |pool| selects every candidate (exhaustive).
std::vector<std::size_t> candidate_positions(std::size_t pool_size, std::size_t K,
                                             std::uint64_t seed, std::size_t j) {
  std::vector<std::size_t> pos(pool_size);
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  if (K >= pool_size) return pos;
  std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(j)));
  for (std::size_t i = 0; i < K; ++i) {
    const std::size_t r = i + static_cast<std::size_t>(rng() % (pool_size - i));
    std::swap(pos[i], pos[r]);
  }
  pos.resize(K);
  return pos;
}

}  // namespace

SensitivityEstimate empirical_sensitivity(const StrategyConfig& cfg, const Dataset& ds,
                                          const EpochContext& ctx,
                                          const std::vector<Example>& pool,
                                          const SensitivitySettings& settings) {
  if (ds.empty()) throw DataError("empirical_sensitivity: empty dataset");
  if (pool.empty()) throw DataError("empirical_sensitivity: empty replacement pool");
  if (settings.candidates_per_index < 1) {
    throw ConfigError("empirical_sensitivity: candidates_per_index must be >= 1");
  }
  validate(cfg);
  const bool retrained = settings.mode == SensitivityMode::retrained;
  if (retrained && !settings.retrain_hyper.has_value()) {
    throw ConfigError("retrained sensitivity mode needs retrain_hyper");
  }

  const std::size_t n = ds.size();
  const bool needs_difficulty = std::holds_alternative<Curriculum>(cfg);

  // Base weights. In retrained mode the base model comes from the same
  // retraining procedure applied to the unperturbed dataset.
  ModelParams base_model, base_initial;
  EpochContext base_ctx = ctx;
  if (retrained) {
    const Hyper& rh = *settings.retrain_hyper;
    base_initial = init_params(ds.feature_dim(), ds.class_count(), settings.retrain_seed);
    base_model = train_prefix(ds, cfg, rh, settings.retrain_seed, ctx.epoch, ctx.total_epochs);
    base_ctx.model = &base_model;
    base_ctx.initial_model = &base_initial;
    base_ctx.loss_cap = rh.loss_cap;
    base_ctx.difficulty_cache = nullptr;
  }
  std::optional<std::vector<double>> base_difficulty;
  if (needs_difficulty && !retrained) {
    if (ctx.difficulty_cache != nullptr && ctx.difficulty_cache->has_value() &&
        (*ctx.difficulty_cache)->size() == n) {
      base_difficulty = **ctx.difficulty_cache;
    } else {
      if (ctx.initial_model == nullptr) {
        throw ConfigError("curriculum sensitivity needs an initial model");
      }
      base_difficulty = difficulty_scores(*ctx.initial_model, ds, ctx.loss_cap);
    }
    base_ctx.difficulty_cache = &base_difficulty;
  }
  const SelectionWeights base = compute_weights(cfg, ds, base_ctx);

  std::vector<double> per_index(n, 0.0);
  std::vector<std::size_t> per_index_count(n, 0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long jj = 0; jj < static_cast<long long>(n); ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    const std::vector<std::size_t> cands =
        candidate_positions(pool.size(), settings.candidates_per_index, settings.seed, j);
    double worst = 0.0;
    for (std::size_t c : cands) {
      const Dataset neighbor = replace_example(ds, j, pool[c]);
      SelectionWeights perturbed;
      if (retrained) {
        const Hyper& rh = *settings.retrain_hyper;
        ModelParams nb_initial =
            init_params(neighbor.feature_dim(), neighbor.class_count(), settings.retrain_seed);
        ModelParams nb_model =
            train_prefix(neighbor, cfg, rh, settings.retrain_seed, ctx.epoch, ctx.total_epochs);
        EpochContext nb_ctx = ctx;
        nb_ctx.model = &nb_model;
        nb_ctx.initial_model = &nb_initial;
        nb_ctx.loss_cap = rh.loss_cap;
        nb_ctx.difficulty_cache = nullptr;
        perturbed = compute_weights(cfg, neighbor, nb_ctx);
      } else {
        EpochContext nb_ctx = base_ctx;
        std::optional<std::vector<double>> nb_difficulty;
        if (needs_difficulty) {
          // only slot j changed; difficulty is a per-example function
          nb_difficulty = *base_difficulty;
          (*nb_difficulty)[j] = bounded_loss(*ctx.initial_model, neighbor[j], ctx.loss_cap);
          nb_ctx.difficulty_cache = &nb_difficulty;
        }
        perturbed = compute_weights(cfg, neighbor, nb_ctx);
      }
      worst = std::max(worst, tv_distance(base.w, perturbed.w));
    }
    per_index[j] = worst;
    per_index_count[j] = cands.size();
  }

  SensitivityEstimate est;
  est.mode = settings.mode;
  for (std::size_t j = 0; j < n; ++j) {
    est.delta_hat = std::max(est.delta_hat, per_index[j]);
    est.n_perturbations += per_index_count[j];
  }
  if (settings.per_index_detail) est.per_index_max = std::move(per_index);
  return est;
}

double theoretical_sensitivity(const StrategyConfig& cfg, std::optional<double> t_pace) {
  validate(cfg);
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ImportanceWeighting>) {
          return 1.0 / (2.0 * s.lambda);
        } else if constexpr (std::is_same_v<T, ConfidenceSampling>) {
          return 1.0 / s.tau;
        } else if constexpr (std::is_same_v<T, Curriculum>) {
          if (!t_pace.has_value() || !(*t_pace > 0.0)) {
            throw ConfigError("curriculum closed-form sensitivity needs t_pace > 0");
          }
          return 0.8 / *t_pace;
        } else if constexpr (std::is_same_v<T, UncertaintyCurriculum>) {
          return std::max(1.0 / s.tau_unc, 1.0 / s.tau_curr);
        } else {
          return 1.0 / s.tau_gb;
        }
      },
      cfg);
}

}  // namespace repsel
