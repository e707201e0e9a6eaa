#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "repsel/types.hpp"

namespace repsel {

/// Linear softmax classifier: logits = W x + b.
struct ModelParams {
  int d = 0;
  int C = 0;
  std::vector<double> W;  // C x d, row-major
  std::vector<double> b;  // C

  double& w(int c, int j) { return W[static_cast<std::size_t>(c) * d + j]; }
  double w(int c, int j) const { return W[static_cast<std::size_t>(c) * d + j]; }
  bool operator==(const ModelParams&) const = default;
};

/// Entries ~ Normal(0, scale^2), deterministic per seed; scale 0 gives zeros.
ModelParams init_params(int d, int C, std::uint64_t seed, double scale = 0.01);

/// Softmax probabilities; entries positive and summing to 1 within 1e-12.
std::vector<double> predict_proba(const ModelParams& p, std::span<const double> x);

/// Raw cross-entropy of the true class, probabilities floored at 1e-12.
double cross_entropy(const ModelParams& p, const Example& e);

/// min(cross_entropy, cap)/cap, the [0,1] loss the theory assumes.
double bounded_loss(const ModelParams& p, const Example& e, double cap);

/// Scalar form, for callers that already have the true-class probability.
double bounded_loss_from_prob(double true_class_prob, double cap);

struct ExampleGradient {
  std::vector<double> dW;  // C x d, row-major
  std::vector<double> db;  // C
  double norm = 0.0;       // L2 norm of the full flattened gradient
};

/// Gradient of raw cross-entropy: dW = (probs - onehot(y)) x^T, db = probs -
/// onehot(y). norm equals ||residual||_2 * sqrt(||x||_2^2 + 1), which is the
/// flattened L2 norm in closed form.
ExampleGradient per_example_gradient(const ModelParams& p, const Example& e);

/// norm field of per_example_gradient without materializing the matrices.
double per_example_gradient_norm(const ModelParams& p, const Example& e);

struct EvalResult {
  double accuracy = 0.0;
  double mean_loss = 0.0;  // mean bounded_loss
};

/// Throws DataError on an empty dataset.
EvalResult evaluate(const ModelParams& p, const Dataset& ds, double loss_cap = 4.0);

}  // namespace repsel
