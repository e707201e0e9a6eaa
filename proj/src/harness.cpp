#include "repsel/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "repsel/datagen.hpp"
#include "repsel/rng.hpp"

namespace repsel {

namespace {

double population_std(std::span<const double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size()));
}

}  // namespace

std::vector<std::string> study_config_violations(const StudyConfig& cfg) {
  std::vector<std::string> out;
  auto collect = [&out](const auto& value, const char* where) {
    try {
      validate(value);
    } catch (const ConfigError& err) {
      out.emplace_back(std::string(where) + ": " + err.what());
    }
  };
  if (cfg.seeds.size() < 2) out.emplace_back("seeds: need at least 2 seeds");
  if (!(cfg.epsilon > 0)) out.emplace_back("epsilon: must be > 0");
  if (!(cfg.histogram_bin_width > 0)) out.emplace_back("histogram_bin_width: must be > 0");
  if (!(cfg.t_pace > 0)) out.emplace_back("t_pace: must be > 0");
  if (!(cfg.rho_target > 0 && cfg.rho_target < 1)) out.emplace_back("rho_target: must be in (0,1)");
  collect(cfg.strategy, "strategy");
  collect(cfg.hyper, "hyper");
  collect(cfg.hyper_source, "hyper_source");
  if (const auto* synth = std::get_if<SynthConfig>(&cfg.data)) {
    collect(*synth, "data.synth");
  } else {
    const auto& paths = std::get<CsvPaths>(cfg.data);
    if (paths.source_train.empty() || paths.source_eval.empty() || paths.target_train.empty() ||
        paths.target_eval.empty()) {
      out.emplace_back("data.csv: all four dataset paths are required");
    }
  }
  if (cfg.sensitivity.enabled) {
    if (cfg.sensitivity.settings.candidates_per_index < 1) {
      out.emplace_back("sensitivity.candidates_per_index: must be >= 1");
    }
    if (cfg.sensitivity.pool_size < 1) out.emplace_back("sensitivity.pool_size: must be >= 1");
    if (cfg.sensitivity.settings.mode == SensitivityMode::retrained &&
        !cfg.sensitivity.settings.retrain_hyper.has_value()) {
      out.emplace_back("sensitivity: retrained mode needs retrain_hyper");
    }
  }
  return out;
}

void validate(const StudyConfig& cfg) {
  const std::vector<std::string> violations = study_config_violations(cfg);
  if (violations.empty()) return;
  std::string msg = "invalid study config:";
  for (const std::string& v : violations) msg += "\n  - " + v;
  throw ConfigError(msg);
}

std::pair<double, std::vector<double>> pairwise_failure_rate(std::span<const double> accuracies,
                                                             double epsilon) {
  if (accuracies.size() < 2) throw DataError("pairwise_failure_rate: need at least 2 values");
  if (!(epsilon > 0)) throw ConfigError("pairwise_failure_rate: epsilon must be > 0");
  std::vector<double> diffs;
  diffs.reserve(accuracies.size() * (accuracies.size() - 1) / 2);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < accuracies.size(); ++i) {
    for (std::size_t j = i + 1; j < accuracies.size(); ++j) {
      const double diff = std::abs(accuracies[i] - accuracies[j]);
      diffs.push_back(diff);
      if (diff > epsilon) ++failures;  // strict: a tie at epsilon is replicable
    }
  }
  return {static_cast<double>(failures) / static_cast<double>(diffs.size()), std::move(diffs)};
}

std::vector<EpochDynamics> weight_dynamics(const std::vector<TrainTrace>& traces) {
  if (traces.empty()) throw DataError("weight_dynamics: no traces");
  const std::size_t epochs = traces.front().size();
  for (const TrainTrace& t : traces) {
    if (t.size() != epochs) throw DataError("weight_dynamics: ragged traces");
  }
  std::vector<EpochDynamics> out(epochs);
  for (std::size_t e = 0; e < epochs; ++e) {
    EpochDynamics& dyn = out[e];
    dyn.epoch = traces.front()[e].epoch;
    dyn.run_min.reserve(traces.size());
    for (const TrainTrace& t : traces) {
      dyn.run_min.push_back(t[e].weight_min);
      dyn.run_max.push_back(t[e].weight_max);
      dyn.run_std.push_back(t[e].weight_std);
    }
    dyn.max_weight_spread = population_std(dyn.run_max);
  }
  return out;
}

HistogramReport histogram(std::span<const double> diffs, double bin_width, double epsilon) {
  if (diffs.empty()) throw DataError("histogram: empty diffs");
  if (!(bin_width > 0)) throw ConfigError("histogram: bin_width must be > 0");
  HistogramReport h;
  h.bin_width = bin_width;
  h.epsilon = epsilon;
  const double max_diff = *std::max_element(diffs.begin(), diffs.end());
  const auto bins = static_cast<std::size_t>(std::floor(max_diff / bin_width)) + 1;
  h.counts.assign(bins, 0);
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = static_cast<double>(b) * bin_width;
  std::size_t exceed = 0;
  for (double d : diffs) {
    const auto idx =
        std::min(static_cast<std::size_t>(std::floor(d / bin_width)), bins - 1);
    ++h.counts[idx];
    if (d > epsilon) ++exceed;
  }
  h.exceed_fraction = static_cast<double>(exceed) / static_cast<double>(diffs.size());
  return h;
}

namespace {

struct StudyData {
  // one entry when the dataset is shared, one per seed when resampling
  std::vector<DomainPair> pairs;
  const DomainPair& for_run(std::size_t run) const {
    return pairs.size() == 1 ? pairs.front() : pairs[run];
  }
};

StudyData prepare_data(const StudyConfig& cfg) {
  StudyData data;
  if (const auto* synth = std::get_if<SynthConfig>(&cfg.data)) {
    if (cfg.resample_per_seed) {
      data.pairs.reserve(cfg.seeds.size());
      for (std::uint64_t seed : cfg.seeds) {
        SynthConfig per_seed = *synth;
        per_seed.seed = mix_seed(synth->seed, seed);
        data.pairs.push_back(generate_synthetic(per_seed));
      }
    } else {
      data.pairs.push_back(generate_synthetic(*synth));
    }
  } else {
    const auto& paths = std::get<CsvPaths>(cfg.data);
    DomainPair pair;
    pair.source_train = load_csv(paths.source_train);
    pair.source_eval = load_csv(paths.source_eval);
    pair.target_train = load_csv(paths.target_train);
    pair.target_eval = load_csv(paths.target_eval);
    data.pairs.push_back(std::move(pair));  // nothing to resample from
  }
  return data;
}

TrainedModel run_one(const StudyConfig& cfg, const DomainPair& pair, std::uint64_t seed) {
  if (cfg.protocol == Protocol::two_stage) {
    return two_stage_train(pair, cfg.strategy, cfg.hyper_source, cfg.hyper, seed);
  }
  EvalSets evals{&pair.source_eval, &pair.target_eval};
  TrainOptions opts;
  opts.source_counts = pair.source_train.domain_feature_histogram();
  return train(pair.target_train, evals, cfg.strategy, cfg.hyper, seed, opts);
}

}  // namespace

ReplicationStudy run_study(const StudyConfig& cfg) {
  validate(cfg);
  ReplicationStudy study;
  study.config = cfg;
  if (study.config.name.empty()) study.config.name = strategy_name(cfg.strategy);

  const StudyData data = prepare_data(cfg);
  const std::size_t runs = cfg.seeds.size();
  std::vector<TrainedModel> models(runs);
  std::vector<std::string> run_errors(runs);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long r = 0; r < static_cast<long long>(runs); ++r) {
    const auto run = static_cast<std::size_t>(r);
    try {
      models[run] = run_one(cfg, data.for_run(run), cfg.seeds[run]);
    } catch (const std::exception& err) {
      run_errors[run] = err.what();
    }
  }
  for (std::size_t run = 0; run < runs; ++run) {
    if (!run_errors[run].empty()) {
      throw DataError("run with seed " + std::to_string(cfg.seeds[run]) + " failed: " +
                      run_errors[run]);
    }
  }

  std::vector<double> accs(runs);
  std::vector<TrainTrace> traces(runs);
  for (std::size_t run = 0; run < runs; ++run) {
    RunRecord rec;
    rec.seed = cfg.seeds[run];
    rec.trace = models[run].trace;
    rec.acc_source = models[run].trace.back().acc_source;
    rec.acc_target = models[run].trace.back().acc_target;
    accs[run] = rec.acc_target;
    traces[run] = models[run].trace;
    study.runs.push_back(std::move(rec));
  }

  auto [rate, diffs] = pairwise_failure_rate(accs, cfg.epsilon);
  study.failure_rate = rate;
  std::size_t pair_idx = 0;
  for (std::size_t i = 0; i < runs; ++i) {
    for (std::size_t j = i + 1; j < runs; ++j) {
      study.pairs.push_back({i, j, diffs[pair_idx++]});
    }
  }
  study.histogram = histogram(diffs, cfg.histogram_bin_width, cfg.epsilon);
  study.dynamics = weight_dynamics(traces);

  const DomainPair& first_pair = data.for_run(0);
  if (cfg.sensitivity.enabled) {
    const Dataset& pool_src = first_pair.target_eval;
    std::vector<Example> pool;
    const std::size_t pool_n = std::min(cfg.sensitivity.pool_size, pool_src.size());
    pool.reserve(pool_n);
    for (std::size_t i = 0; i < pool_n; ++i) pool.push_back(pool_src[i]);

    const std::vector<long> source_counts = first_pair.source_train.domain_feature_histogram();
    EpochContext ctx;
    ctx.epoch = cfg.hyper.epochs - 1;
    ctx.total_epochs = cfg.hyper.epochs;
    ctx.model = &models[0].params;
    ctx.initial_model = &models[0].initial;
    ctx.loss_cap = cfg.hyper.loss_cap;
    ctx.source_counts = &source_counts;
    study.sensitivity = empirical_sensitivity(cfg.strategy, first_pair.target_train, ctx, pool,
                                              cfg.sensitivity.settings);
  }

  BoundReport& br = study.bounds;
  br.delta_closed = theoretical_sensitivity(cfg.strategy, cfg.t_pace);
  if (study.sensitivity.has_value()) br.delta_hat = study.sensitivity->delta_hat;
  StabilityConstants best{};
  for (const TrainedModel& m : models) {
    const StabilityConstants sc = estimate_c(m.trace, cfg.hyper);
    if (sc.c() >= best.c()) best = sc;
  }
  br.c_est = best.c();
  br.M = best.M;
  br.G = best.G;
  br.eta = best.eta;
  br.E = best.E;
  br.n = static_cast<double>(first_pair.target_train.size());
  if (br.c_est > 0) {
    br.bound_theorem = replicability_bound({cfg.epsilon, br.n, br.c_est, br.delta_closed});
    br.bound_strategy = strategy_bound(cfg.strategy, cfg.epsilon, br.n, br.c_est, cfg.t_pace);
    br.required_n = required_sample_size(cfg.rho_target, cfg.epsilon, br.c_est, br.delta_closed);
  }
  return study;
}

SweepReport sweep(const std::vector<StudyConfig>& cfgs) {
  if (cfgs.empty()) throw ConfigError("sweep: empty config list");
  SweepReport report;
  report.studies.reserve(cfgs.size());
  for (const StudyConfig& cfg : cfgs) {
    try {
      report.studies.push_back(run_study(cfg));
    } catch (const std::exception& err) {
      const std::string name = cfg.name.empty() ? strategy_name(cfg.strategy) : cfg.name;
      throw DataError("study '" + name + "' failed: " + err.what());
    }
  }
  for (const ReplicationStudy& study : report.studies) {
    SweepRow row;
    row.name = study.config.name;
    row.strategy = strategy_name(study.config.strategy);
    row.protocol = study.config.protocol == Protocol::two_stage ? "two_stage" : "direct";
    row.n_target = study.bounds.n;
    std::vector<double> accs;
    accs.reserve(study.runs.size());
    for (const RunRecord& r : study.runs) accs.push_back(r.acc_target);
    row.mean_acc = std::accumulate(accs.begin(), accs.end(), 0.0) / static_cast<double>(accs.size());
    row.std_acc = population_std(accs);
    row.failure_rate = study.failure_rate;
    row.delta_closed = study.bounds.delta_closed;
    row.delta_hat = study.bounds.delta_hat;
    row.bound_theorem = study.bounds.bound_theorem;
    row.bound_strategy = study.bounds.bound_strategy;
    row.c_est = study.bounds.c_est;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace repsel
