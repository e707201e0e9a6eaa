#include "repsel/types.hpp"

#include <sstream>
#include <unordered_set>

namespace repsel {

Dataset::Dataset(std::vector<Example> examples, int d, int C, int F)
    : examples_(std::move(examples)), d_(d), C_(C), F_(F) {
  if (d_ < 1 || C_ < 1 || F_ < 1) {
    throw DataError("Dataset: d, C, F must all be >= 1");
  }
  std::unordered_set<long> ids;
  ids.reserve(examples_.size());
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const Example& e = examples_[i];
    if (static_cast<int>(e.features.size()) != d_) {
      throw DataError("Dataset: example " + std::to_string(i) + " has " +
                      std::to_string(e.features.size()) + " features, expected " +
                      std::to_string(d_));
    }
    if (e.label < 0 || e.label >= C_) {
      throw DataError("Dataset: example " + std::to_string(i) + " label " +
                      std::to_string(e.label) + " out of range [0," + std::to_string(C_) + ")");
    }
    if (e.domain_feature < 0 || e.domain_feature >= F_) {
      throw DataError("Dataset: example " + std::to_string(i) + " domain_feature " +
                      std::to_string(e.domain_feature) + " out of range [0," + std::to_string(F_) +
                      ")");
    }
    if (!ids.insert(e.id).second) {
      throw DataError("Dataset: duplicate id " + std::to_string(e.id) + " at example " +
                      std::to_string(i));
    }
  }
}

std::vector<long> Dataset::domain_feature_histogram() const {
  std::vector<long> counts(static_cast<std::size_t>(F_), 0);
  for (const Example& e : examples_) {
    ++counts[static_cast<std::size_t>(e.domain_feature)];
  }
  return counts;
}

void validate(const SynthConfig& cfg) {
  std::ostringstream bad;
  auto flag = [&bad](const std::string& msg) {
    if (bad.tellp() > 0) bad << "; ";
    bad << msg;
  };
  if (cfg.d < 1) flag("d must be >= 1");
  if (cfg.C < 1) flag("C must be >= 1");
  if (cfg.F < 1) flag("F must be >= 1");
  if (cfg.n_source < 1) flag("n_source must be > 0");
  if (cfg.n_target < 1) flag("n_target must be > 0");
  if (cfg.n_eval < 1) flag("n_eval must be > 0");
  if (cfg.shift_strength < 0) flag("shift_strength must be >= 0");
  if (cfg.label_noise < 0 || cfg.label_noise > 1) flag("label_noise must be in [0,1]");
  if (bad.tellp() > 0) {
    throw ConfigError("invalid synth config: " + bad.str());
  }
}

}  // namespace repsel
