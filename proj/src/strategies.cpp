#include "repsel/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "repsel/kernels.hpp"

namespace repsel {

namespace {

SelectionWeights normalized(std::vector<double> w, bool fallback_flag = false) {
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return {std::move(w), fallback_flag};
}

SelectionWeights uniform_fallback(std::size_t n) {
  SelectionWeights sw = uniform_weights(n);
  sw.degenerate_fallback = true;
  return sw;
}

void require_nonempty(const Dataset& ds) {
  if (ds.empty()) throw DataError("selection weights require a non-empty dataset");
}

}  // namespace

bool weights_valid(const SelectionWeights& sw, double tol) {
  if (sw.w.empty()) return false;
  double sum = 0.0;
  double max = 0.0;
  for (double v : sw.w) {
    if (!(v >= 0.0) || !std::isfinite(v)) return false;
    sum += v;
    max = std::max(max, v);
  }
  return std::abs(sum - 1.0) <= tol && max > 0.0;
}

std::string strategy_name(const StrategyConfig& cfg) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Uniform>) return "uniform";
        if constexpr (std::is_same_v<T, ImportanceWeighting>) return "importance";
        if constexpr (std::is_same_v<T, ConfidenceSampling>) return "confidence";
        if constexpr (std::is_same_v<T, Curriculum>) return "curriculum";
        if constexpr (std::is_same_v<T, UncertaintyCurriculum>) return "uncertainty_curriculum";
        if constexpr (std::is_same_v<T, GradientBased>) return "gradient";
      },
      cfg);
}

void validate(const StrategyConfig& cfg) {
  std::ostringstream bad;
  auto flag = [&bad](const std::string& msg) {
    if (bad.tellp() > 0) bad << "; ";
    bad << msg;
  };
  auto check_pace_window = [&](double alpha, double beta, double k) {
    if (!(alpha > 0.0) || alpha > 1.0) flag("alpha must be in (0,1]");
    if (beta < alpha || beta > 1.0) flag("beta must be in [alpha,1]");
    if (!(k > 0.0)) flag("k must be > 0");
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ImportanceWeighting>) {
          if (!(s.lambda > 0.0)) flag("lambda must be > 0");
        } else if constexpr (std::is_same_v<T, ConfidenceSampling>) {
          if (!(s.tau > 0.0)) flag("tau must be > 0");
          if (s.w_min < 0.0) flag("w_min must be >= 0");
          if (s.w_max < s.w_min) flag("w_max must be >= w_min");
        } else if constexpr (std::is_same_v<T, Curriculum>) {
          check_pace_window(s.alpha, s.beta, s.k);
        } else if constexpr (std::is_same_v<T, UncertaintyCurriculum>) {
          if (!(s.tau_unc > 0.0)) flag("tau_unc must be > 0");
          if (!(s.tau_curr > 0.0)) flag("tau_curr must be > 0");
          check_pace_window(s.alpha, s.beta, s.k);
        } else if constexpr (std::is_same_v<T, GradientBased>) {
          if (!(s.tau_gb > 0.0)) flag("tau_gb must be > 0");
          if (s.w_min < 0.0) flag("w_min must be >= 0");
          if (s.w_max < s.w_min) flag("w_max must be >= w_min");
        }
      },
      cfg);
  if (bad.tellp() > 0) {
    throw ConfigError("invalid " + strategy_name(cfg) + " strategy: " + bad.str());
  }
}

SelectionWeights uniform_weights(std::size_t n) {
  if (n == 0) throw DataError("uniform_weights: n must be >= 1");
  return {std::vector<double>(n, 1.0 / static_cast<double>(n)), false};
}

SelectionWeights importance_weights(const Dataset& ds, const std::vector<long>& source_counts,
                                    double lambda) {
  require_nonempty(ds);
  if (!(lambda > 0.0)) throw ConfigError("importance_weights: lambda must be > 0");
  const std::size_t F = static_cast<std::size_t>(ds.domain_feature_count());
  if (source_counts.size() != F) {
    throw DataError("importance_weights: source_counts must cover all " + std::to_string(F) +
                    " domain-feature values");
  }
  const std::vector<long> target_counts = ds.domain_feature_histogram();
  long source_total = 0;
  for (long c : source_counts) source_total += c;

  std::vector<double> ratio(F);
  for (std::size_t f = 0; f < F; ++f) {
    const double pt = static_cast<double>(target_counts[f]) / static_cast<double>(ds.size());
    const double ps = source_total > 0
                          ? static_cast<double>(source_counts[f]) / static_cast<double>(source_total)
                          : 0.0;
    ratio[f] = (pt + lambda) / (ps + lambda);
  }
  std::vector<double> w(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    w[i] = ratio[static_cast<std::size_t>(ds[i].domain_feature)];
  }
  return normalized(std::move(w));
}

SelectionWeights weights_from_confidences(std::span<const double> confidences, double tau,
                                          double w_min, double w_max) {
  if (confidences.empty()) throw DataError("weights_from_confidences: empty input");
  std::vector<double> w(confidences.size());
  const double inv_tau = 1.0 / tau;
  double sum = 0.0;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const double raw = std::pow(std::max(0.0, 1.0 - confidences[i]), inv_tau);
    w[i] = std::clamp(raw, w_min, w_max);
    sum += w[i];
  }
  if (sum <= 0.0) return uniform_fallback(confidences.size());
  for (double& v : w) v /= sum;
  return {std::move(w), false};
}

SelectionWeights confidence_weights(const Dataset& ds, const ModelParams& model, double tau,
                                    double w_min, double w_max) {
  require_nonempty(ds);
  return weights_from_confidences(kernels::confidences(model, ds), tau, w_min, w_max);
}

double pacing(PaceKind kind, double t_ratio, double alpha, double k) {
  switch (kind) {
    case PaceKind::linear:
      return alpha + (1.0 - alpha) * std::min(t_ratio, 1.0);
    case PaceKind::exp:
      return alpha + (1.0 - alpha) * std::min(std::exp(k * t_ratio - k), 1.0);
    case PaceKind::log:
      return alpha + (1.0 - alpha) * std::min(std::log(1.0 + 9.0 * t_ratio) / std::log(10.0), 1.0);
  }
  throw ConfigError("pacing: unknown kind");
}

double pace_profile(PaceKind kind, double t_ratio, double k) {
  const double t = std::clamp(t_ratio, 0.0, 1.0);
  switch (kind) {
    case PaceKind::linear:
      return t;
    case PaceKind::exp: {
      // exp schedule rescaled so the profile is exactly 0 at t=0 and 1 at t=1
      const double low = std::exp(-k);
      return (std::exp(k * t - k) - low) / (1.0 - low);
    }
    case PaceKind::log:
      return std::log(1.0 + 9.0 * t) / std::log(10.0);
  }
  throw ConfigError("pace_profile: unknown kind");
}

std::size_t active_count(double alpha, double beta, PaceKind pace, double k, int epoch,
                         int total_epochs, std::size_t n) {
  const double t = total_epochs > 0 ? static_cast<double>(epoch) / total_epochs : 0.0;
  const double r = alpha + (beta - alpha) * pace_profile(pace, t, k);
  const double raw = std::floor(r * static_cast<double>(n));
  const auto k_active = static_cast<std::size_t>(std::max(1.0, raw));
  return std::min(k_active, n);
}

std::vector<double> difficulty_scores(const ModelParams& initial_model, const Dataset& ds,
                                      double loss_cap) {
  return kernels::bounded_losses(initial_model, ds, loss_cap);
}

namespace {

const std::vector<double>& cached_difficulty(const EpochContext& ctx, const Dataset& ds,
                                             std::vector<double>& scratch) {
  if (ctx.difficulty_cache != nullptr && ctx.difficulty_cache->has_value() &&
      (*ctx.difficulty_cache)->size() == ds.size()) {
    return **ctx.difficulty_cache;
  }
  if (ctx.initial_model == nullptr) {
    throw ConfigError("curriculum weights need an initial model for difficulty");
  }
  scratch = difficulty_scores(*ctx.initial_model, ds, ctx.loss_cap);
  if (ctx.difficulty_cache != nullptr) {
    *ctx.difficulty_cache = scratch;
    return **ctx.difficulty_cache;
  }
  return scratch;
}

}  // namespace

SelectionWeights curriculum_weights(const EpochContext& ctx, const Dataset& ds, double alpha,
                                    double beta, PaceKind pace, double k) {
  require_nonempty(ds);
  std::vector<double> scratch;
  const std::vector<double>& difficulty = cached_difficulty(ctx, ds, scratch);

  const std::size_t n = ds.size();
  const std::size_t k_active = active_count(alpha, beta, pace, k, ctx.epoch, ctx.total_epochs, n);

  // k_active lowest-difficulty examples, ties by ascending index
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return difficulty[a] < difficulty[b]; });

  std::vector<double> w(n, 0.0);
  const double share = 1.0 / static_cast<double>(k_active);
  for (std::size_t r = 0; r < k_active; ++r) w[order[r]] = share;
  return {std::move(w), false};
}

std::vector<std::size_t> top_k_indices(std::span<const double> scores, std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(k, order.size()));
  return order;
}

SelectionWeights weights_from_scores_topk(std::span<const double> scores, std::size_t k) {
  if (scores.empty()) throw DataError("weights_from_scores_topk: empty input");
  const std::vector<std::size_t> keep = top_k_indices(scores, k);
  std::vector<double> w(scores.size(), 0.0);
  for (std::size_t i : keep) w[i] = scores[i];
  return normalized(std::move(w));
}

SelectionWeights uncertainty_curriculum_weights(const EpochContext& ctx, const Dataset& ds,
                                                double tau_unc, double tau_curr, double alpha,
                                                double beta, PaceKind pace, double k) {
  require_nonempty(ds);
  if (ctx.model == nullptr) throw ConfigError("uncertainty curriculum needs the current model");
  const std::vector<double> conf = kernels::confidences(*ctx.model, ds);

  // log score: (1-c)/tau_unc - l/tau_curr; shifted by the max before exp so
  // the products cannot overflow. Normalization cancels the shift.
  const std::size_t n = ds.size();
  std::vector<double> log_scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double loss = bounded_loss_from_prob(conf[i], ctx.loss_cap);
    log_scores[i] = (1.0 - conf[i]) / tau_unc - loss / tau_curr;
  }
  const double m = *std::max_element(log_scores.begin(), log_scores.end());
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) scores[i] = std::exp(log_scores[i] - m);

  const std::size_t k_active = active_count(alpha, beta, pace, k, ctx.epoch, ctx.total_epochs, n);
  return weights_from_scores_topk(scores, k_active);
}

SelectionWeights weights_from_raw_scores(std::span<const double> raw, double w_min, double w_max) {
  if (raw.empty()) throw DataError("weights_from_raw_scores: empty input");
  const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi == lo) return uniform_fallback(raw.size());

  std::vector<double> w(raw.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double unit = (raw[i] - lo) / (hi - lo);
    w[i] = w_min + (w_max - w_min) * unit;
    sum += w[i];
  }
  if (sum <= 0.0) return uniform_fallback(raw.size());
  for (double& v : w) v /= sum;
  return {std::move(w), false};
}

SelectionWeights gradient_weights(const Dataset& ds, const ModelParams& model, double tau_gb,
                                  double w_min, double w_max, bool use_gradients,
                                  double loss_cap) {
  require_nonempty(ds);
  std::vector<double> raw(ds.size());
  if (use_gradients) {
    const std::vector<double> norms = kernels::gradient_norms(model, ds);
    // shift by the max before exponentiating; the min-max rescale below is
    // invariant under the common factor, and exp stays in range
    const double m = *std::max_element(norms.begin(), norms.end());
    for (std::size_t i = 0; i < norms.size(); ++i) raw[i] = std::exp((norms[i] - m) / tau_gb);
  } else {
    const std::vector<double> losses = kernels::bounded_losses(model, ds, loss_cap);
    const double m = *std::min_element(losses.begin(), losses.end());
    for (std::size_t i = 0; i < losses.size(); ++i) raw[i] = std::exp((m - losses[i]) / tau_gb);
  }
  return weights_from_raw_scores(raw, w_min, w_max);
}

SelectionWeights compute_weights(const StrategyConfig& cfg, const Dataset& ds,
                                 const EpochContext& ctx) {
  require_nonempty(ds);
  return std::visit(
      [&](const auto& s) -> SelectionWeights {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return uniform_weights(ds.size());
        } else if constexpr (std::is_same_v<T, ImportanceWeighting>) {
          if (ctx.source_counts == nullptr) {
            throw ConfigError("importance weighting needs source domain-feature counts");
          }
          return importance_weights(ds, *ctx.source_counts, s.lambda);
        } else if constexpr (std::is_same_v<T, ConfidenceSampling>) {
          if (ctx.model == nullptr) throw ConfigError("confidence sampling needs the model");
          return confidence_weights(ds, *ctx.model, s.tau, s.w_min, s.w_max);
        } else if constexpr (std::is_same_v<T, Curriculum>) {
          return curriculum_weights(ctx, ds, s.alpha, s.beta, s.pace, s.k);
        } else if constexpr (std::is_same_v<T, UncertaintyCurriculum>) {
          return uncertainty_curriculum_weights(ctx, ds, s.tau_unc, s.tau_curr, s.alpha, s.beta,
                                                s.pace, s.k);
        } else {
          if (ctx.model == nullptr) throw ConfigError("gradient selection needs the model");
          return gradient_weights(ds, *ctx.model, s.tau_gb, s.w_min, s.w_max, s.use_gradients,
                                  ctx.loss_cap);
        }
      },
      cfg);
}

}  // namespace repsel
