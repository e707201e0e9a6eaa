#pragma once

#include <optional>

#include "repsel/strategies.hpp"
#include "repsel/trainer.hpp"

namespace repsel {

struct BoundInputs {
  double epsilon = 0.01;
  double n = 1;        // sample size
  double c = 1.0;      // stability constant M * eta * E * G
  double delta_q = 0;  // selection sensitivity
};

/// One-example stability bound: c * delta_q / n. Throws on n = 0.
double stability_bound(double c, double delta_q, double n);

/// min(1, 4 exp(-eps^2 n / (2 c^2 delta_q^2))); exactly 0 when delta_q = 0.
double replicability_bound(const BoundInputs& b);

/// Per-strategy bound with the 2-prefactor forms: IW 2exp(-2 eps^2 n l^2/c^2),
/// CBS 2exp(-eps^2 n tau^2/(2c^2)), CL 2exp(-eps^2 n t_pace^2/(1.28 c^2)),
/// uniform 0; UCL and GB go through replicability_bound with their closed-form
/// sensitivity. Clamped to [0,1]. Curriculum requires t_pace.
double strategy_bound(const StrategyConfig& cfg, double epsilon, double n, double c,
                      std::optional<double> t_pace = {});

/// ceil(2 c^2 delta_q^2 ln(2/rho) / eps^2); 0 when delta_q = 0.
/// Throws ConfigError unless rho_target is in (0,1) and epsilon > 0.
long long required_sample_size(double rho_target, double epsilon, double c, double delta_q);

struct StabilityConstants {
  double M = 0;    // loss Lipschitz constant (defaults to G)
  double eta = 0;  // learning rate
  int E = 0;       // epochs
  double G = 0;    // gradient-norm bound
  bool degenerate = false;  // all observed gradients were zero

  double c() const { return M * eta * E * G; }
};

/// Empirical instantiation of the stability constants: G is the max observed
/// per-example gradient norm in the trace, eta and E come from the hyper, and
/// M defaults to G unless a hint is supplied. Throws DataError on an empty
/// trace.
StabilityConstants estimate_c(const TrainTrace& trace, const Hyper& h,
                              std::optional<double> M_hint = {});

}  // namespace repsel
