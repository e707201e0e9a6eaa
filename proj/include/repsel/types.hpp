#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace repsel {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Example {
  std::vector<double> features;
  int label = 0;
  int domain_feature = 0;
  long id = 0;
  bool operator==(const Example&) const = default;
};

/// Ordered collection of examples. The position i is the support of the
/// selection distributions, so order is part of the value. Immutable after
/// construction; safe to share across concurrent readers.
class Dataset {
 public:
  Dataset() = default;
  /// Validates: consistent feature dimension d, label < C, domain_feature < F,
  /// unique ids. Throws DataError.
  Dataset(std::vector<Example> examples, int d, int C, int F);

  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  const Example& operator[](std::size_t i) const { return examples_[i]; }
  const std::vector<Example>& examples() const { return examples_; }
  int feature_dim() const { return d_; }
  int class_count() const { return C_; }
  int domain_feature_count() const { return F_; }

  /// Count of examples per domain-feature value, length F.
  std::vector<long> domain_feature_histogram() const;

  bool operator==(const Dataset&) const = default;

 private:
  friend Dataset replace_example(const Dataset& ds, std::size_t j, Example e);

  std::vector<Example> examples_;
  int d_ = 0;
  int C_ = 0;
  int F_ = 0;
};

struct DomainPair {
  Dataset source_train;
  Dataset source_eval;
  Dataset target_train;
  Dataset target_eval;
  bool operator==(const DomainPair&) const = default;
};

struct SynthConfig {
  int d = 20;
  int C = 3;
  int F = 5;
  int n_source = 4000;
  int n_target = 2000;
  int n_eval = 2000;
  double shift_strength = 2.0;  // mean displacement between domain clusters
  double label_noise = 0.1;     // probability of flipping a label
  std::uint64_t seed = 1;
  bool operator==(const SynthConfig&) const = default;
};

/// Throws ConfigError listing every violated field.
void validate(const SynthConfig& cfg);

}  // namespace repsel
