#pragma once

#include <cstdint>
#include <vector>

#include "repsel/model.hpp"
#include "repsel/types.hpp"

// Per-example maps over a dataset. Each element is computed independently and
// written to its own slot, so the OpenMP path is bit-identical to the serial
// reference for any thread count. Reductions on top of these arrays are done
// serially in index order to keep results deterministic.
namespace repsel::kernels {

enum class Exec { serial, parallel };

/// Process-wide default used when no policy is passed explicitly.
/// Starts as parallel when built with OpenMP, serial otherwise.
Exec default_exec();
void set_default_exec(Exec e);

/// p[y_i] per example: the model's confidence on the true class.
std::vector<double> confidences(const ModelParams& p, const Dataset& ds, Exec ex);
std::vector<double> confidences(const ModelParams& p, const Dataset& ds);

std::vector<double> bounded_losses(const ModelParams& p, const Dataset& ds, double cap, Exec ex);
std::vector<double> bounded_losses(const ModelParams& p, const Dataset& ds, double cap);

std::vector<double> gradient_norms(const ModelParams& p, const Dataset& ds, Exec ex);
std::vector<double> gradient_norms(const ModelParams& p, const Dataset& ds);

/// 1 where argmax logit equals the label (lowest index wins ties), else 0.
std::vector<std::uint8_t> correct_predictions(const ModelParams& p, const Dataset& ds, Exec ex);
std::vector<std::uint8_t> correct_predictions(const ModelParams& p, const Dataset& ds);

}  // namespace repsel::kernels
