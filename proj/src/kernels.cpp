#include "repsel/kernels.hpp"

#include <atomic>
#include <cmath>

namespace repsel::kernels {

namespace {

std::atomic<Exec> g_default_exec{
#ifdef _OPENMP
    Exec::parallel
#else
    Exec::serial
#endif
};

// Runs body(i) for i in [0, n). The parallel path writes each result to its
// own slot inside body, so output is bit-identical to the serial loop.
template <typename Body>
void for_each_index(std::size_t n, Exec ex, const Body& body) {
#ifdef _OPENMP
  if (ex == Exec::parallel) {
    const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < nn; ++i) {
      body(static_cast<std::size_t>(i));
    }
    return;
  }
#else
  (void)ex;
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace

Exec default_exec() { return g_default_exec.load(std::memory_order_relaxed); }
void set_default_exec(Exec e) { g_default_exec.store(e, std::memory_order_relaxed); }

std::vector<double> confidences(const ModelParams& p, const Dataset& ds, Exec ex) {
  std::vector<double> out(ds.size());
  for_each_index(ds.size(), ex, [&](std::size_t i) {
    const Example& e = ds[i];
    out[i] = predict_proba(p, e.features)[static_cast<std::size_t>(e.label)];
  });
  return out;
}

std::vector<double> bounded_losses(const ModelParams& p, const Dataset& ds, double cap, Exec ex) {
  std::vector<double> out(ds.size());
  for_each_index(ds.size(), ex, [&](std::size_t i) { out[i] = bounded_loss(p, ds[i], cap); });
  return out;
}

std::vector<double> gradient_norms(const ModelParams& p, const Dataset& ds, Exec ex) {
  std::vector<double> out(ds.size());
  for_each_index(ds.size(), ex,
                 [&](std::size_t i) { out[i] = per_example_gradient_norm(p, ds[i]); });
  return out;
}

std::vector<std::uint8_t> correct_predictions(const ModelParams& p, const Dataset& ds, Exec ex) {
  std::vector<std::uint8_t> out(ds.size());
  for_each_index(ds.size(), ex, [&](std::size_t i) {
    const Example& e = ds[i];
    // argmax of logits; softmax is monotone so probabilities are not needed
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < p.C; ++c) {
      double s = p.b[static_cast<std::size_t>(c)];
      const double* row = p.W.data() + static_cast<std::size_t>(c) * p.d;
      for (int j = 0; j < p.d; ++j) s += row[j] * e.features[static_cast<std::size_t>(j)];
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    out[i] = best == e.label ? 1 : 0;
  });
  return out;
}

std::vector<double> confidences(const ModelParams& p, const Dataset& ds) {
  return confidences(p, ds, default_exec());
}
std::vector<double> bounded_losses(const ModelParams& p, const Dataset& ds, double cap) {
  return bounded_losses(p, ds, cap, default_exec());
}
std::vector<double> gradient_norms(const ModelParams& p, const Dataset& ds) {
  return gradient_norms(p, ds, default_exec());
}
std::vector<std::uint8_t> correct_predictions(const ModelParams& p, const Dataset& ds) {
  return correct_predictions(p, ds, default_exec());
}

}  // namespace repsel::kernels
