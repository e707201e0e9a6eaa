#include "repsel/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "repsel/kernels.hpp"
#include "repsel/rng.hpp"

namespace repsel {

namespace {
constexpr double kProbFloor = 1e-12;
}

ModelParams init_params(int d, int C, std::uint64_t seed, double scale) {
  if (d < 1 || C < 1) throw ConfigError("init_params: d and C must be >= 1");
  ModelParams p;
  p.d = d;
  p.C = C;
  p.W.resize(static_cast<std::size_t>(C) * d);
  p.b.resize(static_cast<std::size_t>(C));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (double& v : p.W) v = scale * unit(rng);
  for (double& v : p.b) v = scale * unit(rng);
  return p;
}

std::vector<double> predict_proba(const ModelParams& p, std::span<const double> x) {
  if (static_cast<int>(x.size()) != p.d) {
    throw DataError("predict_proba: feature length " + std::to_string(x.size()) + " != d = " +
                    std::to_string(p.d));
  }
  std::vector<double> logits(static_cast<std::size_t>(p.C));
  for (int c = 0; c < p.C; ++c) {
    double s = p.b[static_cast<std::size_t>(c)];
    const double* row = p.W.data() + static_cast<std::size_t>(c) * p.d;
    for (int j = 0; j < p.d; ++j) s += row[j] * x[static_cast<std::size_t>(j)];
    logits[static_cast<std::size_t>(c)] = s;
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& l : logits) {
    l = std::exp(l - m);
    z += l;
  }
  for (double& l : logits) l /= z;
  return logits;
}

double cross_entropy(const ModelParams& p, const Example& e) {
  const std::vector<double> probs = predict_proba(p, e.features);
  return -std::log(std::max(probs[static_cast<std::size_t>(e.label)], kProbFloor));
}

double bounded_loss_from_prob(double true_class_prob, double cap) {
  const double ce = -std::log(std::max(true_class_prob, kProbFloor));
  return std::min(ce, cap) / cap;
}

double bounded_loss(const ModelParams& p, const Example& e, double cap) {
  const std::vector<double> probs = predict_proba(p, e.features);
  return bounded_loss_from_prob(probs[static_cast<std::size_t>(e.label)], cap);
}

ExampleGradient per_example_gradient(const ModelParams& p, const Example& e) {
  ExampleGradient g;
  std::vector<double> residual = predict_proba(p, e.features);
  residual[static_cast<std::size_t>(e.label)] -= 1.0;

  g.dW.resize(static_cast<std::size_t>(p.C) * p.d);
  g.db = residual;
  double x2 = 0.0;
  for (int j = 0; j < p.d; ++j) {
    const double xj = e.features[static_cast<std::size_t>(j)];
    x2 += xj * xj;
  }
  double r2 = 0.0;
  for (int c = 0; c < p.C; ++c) {
    const double rc = residual[static_cast<std::size_t>(c)];
    r2 += rc * rc;
    double* row = g.dW.data() + static_cast<std::size_t>(c) * p.d;
    for (int j = 0; j < p.d; ++j) row[j] = rc * e.features[static_cast<std::size_t>(j)];
  }
  g.norm = std::sqrt(r2 * (x2 + 1.0));
  return g;
}

double per_example_gradient_norm(const ModelParams& p, const Example& e) {
  std::vector<double> residual = predict_proba(p, e.features);
  residual[static_cast<std::size_t>(e.label)] -= 1.0;
  double r2 = 0.0;
  for (double rc : residual) r2 += rc * rc;
  double x2 = 0.0;
  for (double xj : e.features) x2 += xj * xj;
  return std::sqrt(r2 * (x2 + 1.0));
}

EvalResult evaluate(const ModelParams& p, const Dataset& ds, double loss_cap) {
  if (ds.empty()) throw DataError("evaluate: empty dataset");
  const std::vector<std::uint8_t> correct = kernels::correct_predictions(p, ds);
  const std::vector<double> losses = kernels::bounded_losses(p, ds, loss_cap);
  long hits = 0;
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    hits += correct[i];
    loss_sum += losses[i];
  }
  return {static_cast<double>(hits) / static_cast<double>(ds.size()),
          loss_sum / static_cast<double>(ds.size())};
}

}  // namespace repsel
