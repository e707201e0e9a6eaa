#include "repsel/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "repsel/rng.hpp"

namespace repsel {

namespace {

constexpr std::uint64_t kStageTwoTag = 0x737461676532ULL;  // distinct stage-2 seed stream

struct WeightStats {
  double min = 0, max = 0, std = 0;
};

WeightStats weight_stats(const std::vector<double>& w) {
  WeightStats s;
  s.min = *std::min_element(w.begin(), w.end());
  s.max = *std::max_element(w.begin(), w.end());
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  double var = 0.0;
  for (double v : w) var += (v - mean) * (v - mean);
  s.std = std::sqrt(var / static_cast<double>(w.size()));
  return s;
}

struct EpochOutcome {
  WeightStats weights;
  double max_grad_norm = 0.0;
};

// One epoch: recompute weights, sample batch_size * ceil(n/batch_size)
// examples with replacement, SGD on raw cross-entropy batch means.
EpochOutcome run_epoch(ModelParams& params, const Dataset& ds, const StrategyConfig& strategy,
                       const Hyper& h, int epoch, int total_epochs, const ModelParams& initial,
                       const std::vector<long>& source_counts,
                       std::optional<std::vector<double>>& difficulty_cache,
                       std::mt19937_64& rng) {
  EpochContext ctx;
  ctx.epoch = epoch;
  ctx.total_epochs = total_epochs;
  ctx.model = &params;
  ctx.initial_model = &initial;
  ctx.loss_cap = h.loss_cap;
  ctx.source_counts = &source_counts;
  ctx.difficulty_cache = &difficulty_cache;

  const SelectionWeights sw = compute_weights(strategy, ds, ctx);
  double total = 0.0;
  for (double v : sw.w) total += v;
  if (!(total > 0.0)) throw DataError("strategy produced all-zero selection weights");

  EpochOutcome out;
  out.weights = weight_stats(sw.w);

  const std::size_t n = ds.size();
  const std::size_t batches = (n + static_cast<std::size_t>(h.batch_size) - 1) /
                              static_cast<std::size_t>(h.batch_size);
  const std::size_t draws = batches * static_cast<std::size_t>(h.batch_size);
  const std::vector<std::size_t> picks = sample_indices(sw.w, draws, rng);

  const int d = params.d, C = params.C;
  std::vector<double> grad_W(static_cast<std::size_t>(C) * d);
  std::vector<double> grad_b(static_cast<std::size_t>(C));
  std::vector<double> probs;
  std::size_t next = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    std::fill(grad_W.begin(), grad_W.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    for (int s = 0; s < h.batch_size; ++s) {
      const Example& e = ds[picks[next++]];
      probs = predict_proba(params, e.features);
      probs[static_cast<std::size_t>(e.label)] -= 1.0;  // residual
      double r2 = 0.0, x2 = 0.0;
      for (double xv : e.features) x2 += xv * xv;
      for (int c = 0; c < C; ++c) {
        const double rc = probs[static_cast<std::size_t>(c)];
        r2 += rc * rc;
        grad_b[static_cast<std::size_t>(c)] += rc;
        double* row = grad_W.data() + static_cast<std::size_t>(c) * d;
        for (int j = 0; j < d; ++j) row[j] += rc * e.features[static_cast<std::size_t>(j)];
      }
      out.max_grad_norm = std::max(out.max_grad_norm, std::sqrt(r2 * (x2 + 1.0)));
    }
    const double step = h.lr / static_cast<double>(h.batch_size);
    for (std::size_t i = 0; i < params.W.size(); ++i) params.W[i] -= step * grad_W[i];
    for (std::size_t i = 0; i < params.b.size(); ++i) params.b[i] -= step * grad_b[i];
  }
  return out;
}

constexpr double kNoEval = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void validate(const Hyper& h) {
  std::ostringstream bad;
  auto flag = [&bad](const char* msg) {
    if (bad.tellp() > 0) bad << "; ";
    bad << msg;
  };
  if (h.lr < 0) flag("lr must be >= 0");
  if (h.epochs < 1) flag("epochs must be >= 1");
  if (h.batch_size < 1) flag("batch_size must be >= 1");
  if (!(h.loss_cap > 0)) flag("loss_cap must be > 0");
  if (h.eval_every < 1) flag("eval_every must be >= 1");
  if (bad.tellp() > 0) throw ConfigError(std::string("invalid hyper: ") + bad.str());
}

std::vector<std::size_t> sample_indices(const std::vector<double>& weights, std::size_t count,
                                        std::mt19937_64& rng) {
  std::vector<double> cum(weights.size());
  double run = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    run += weights[i];
    cum[i] = run;
  }
  if (!(run > 0.0)) throw DataError("sample_indices: weights sum to zero");

  std::vector<std::size_t> out(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double x = uniform01(rng) * run;
    // first index with cum > x; zero-weight entries are never returned
    const auto it = std::upper_bound(cum.begin(), cum.end(), x);
    out[s] = std::min(static_cast<std::size_t>(it - cum.begin()), weights.size() - 1);
  }
  return out;
}

TrainedModel train(const Dataset& ds, const EvalSets& evals, const StrategyConfig& strategy,
                   const Hyper& h, std::uint64_t seed, const TrainOptions& opts) {
  if (ds.empty()) throw DataError("train: empty dataset");
  validate(h);
  validate(strategy);

  TrainedModel out;
  out.seed = seed;
  out.strategy = strategy_name(strategy);
  out.params = opts.start != nullptr
                   ? *opts.start
                   : init_params(ds.feature_dim(), ds.class_count(), seed, opts.init_scale);
  out.initial = out.params;

  const std::vector<long> source_counts =
      opts.source_counts.empty() ? ds.domain_feature_histogram() : opts.source_counts;
  std::optional<std::vector<double>> difficulty_cache;
  std::mt19937_64 rng(seed);

  for (int e = 0; e < h.epochs; ++e) {
    const EpochOutcome oc = run_epoch(out.params, ds, strategy, h, e, h.epochs, out.initial,
                                      source_counts, difficulty_cache, rng);
    if (e % h.eval_every == 0 || e == h.epochs - 1) {
      EpochRecord rec;
      rec.epoch = e;
      rec.acc_source = evals.source != nullptr
                           ? evaluate(out.params, *evals.source, h.loss_cap).accuracy
                           : kNoEval;
      rec.acc_target = evals.target != nullptr
                           ? evaluate(out.params, *evals.target, h.loss_cap).accuracy
                           : kNoEval;
      rec.weight_min = oc.weights.min;
      rec.weight_max = oc.weights.max;
      rec.weight_std = oc.weights.std;
      rec.max_grad_norm = oc.max_grad_norm;
      out.trace.push_back(rec);
    }
  }
  return out;
}

TrainedModel two_stage_train(const DomainPair& pair, const StrategyConfig& strategy,
                             const Hyper& h_source, const Hyper& h_target, std::uint64_t seed) {
  EvalSets evals{&pair.source_eval, &pair.target_eval};
  TrainOptions stage1_opts;
  stage1_opts.source_counts = pair.source_train.domain_feature_histogram();
  const TrainedModel stage1 =
      train(pair.source_train, evals, Uniform{}, h_source, seed, stage1_opts);

  TrainOptions stage2_opts;
  stage2_opts.source_counts = pair.source_train.domain_feature_histogram();
  stage2_opts.start = &stage1.params;
  TrainedModel out = train(pair.target_train, evals, strategy, h_target,
                           mix_seed(seed, kStageTwoTag), stage2_opts);
  out.seed = seed;
  return out;
}

ModelParams train_prefix(const Dataset& ds, const StrategyConfig& strategy, const Hyper& h,
                         std::uint64_t seed, int epochs_to_run, int total_epochs,
                         const TrainOptions& opts) {
  if (ds.empty()) throw DataError("train_prefix: empty dataset");
  validate(h);
  validate(strategy);
  if (epochs_to_run < 0 || total_epochs < 1) {
    throw ConfigError("train_prefix: need epochs_to_run >= 0 and total_epochs >= 1");
  }

  ModelParams params = opts.start != nullptr
                           ? *opts.start
                           : init_params(ds.feature_dim(), ds.class_count(), seed, opts.init_scale);
  const ModelParams initial = params;
  const std::vector<long> source_counts =
      opts.source_counts.empty() ? ds.domain_feature_histogram() : opts.source_counts;
  std::optional<std::vector<double>> difficulty_cache;
  std::mt19937_64 rng(seed);
  for (int e = 0; e < epochs_to_run; ++e) {
    run_epoch(params, ds, strategy, h, e, total_epochs, initial, source_counts, difficulty_cache,
              rng);
  }
  return params;
}

}  // namespace repsel
