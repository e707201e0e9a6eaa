#pragma once

#include <string>

#include "repsel/model.hpp"
#include "repsel/types.hpp"

namespace repsel {

/// Synthetic domain pair with controlled shift: one Gaussian feature cluster
/// per domain-feature value, target clusters translated by shift_strength
/// along a seeded unit direction, labels from a fixed linear rule shared by
/// both domains plus label_noise flips. Deterministic per cfg (byte-identical
/// replays). Ids are unique across the four datasets.
DomainPair generate_synthetic(const SynthConfig& cfg);

/// The generating linear rule used by generate_synthetic for the same cfg.
/// With label_noise = 0 it attains training accuracy 1 on every split.
ModelParams synthetic_label_rule(const SynthConfig& cfg);

struct CsvSchema {
  std::string feature_prefix = "f";
  std::string label_column = "label";
  std::string domain_column = "domain";
  std::string id_column = "id";  // optional in the file; missing -> row index
};

/// Header row `f0..f{d-1},label,domain[,id]` in any column order. Row order
/// is preserved as index order; d, C, F are inferred and validated.
Dataset load_csv(const std::string& path, const CsvSchema& schema = {});

/// Inverse of load_csv up to numeric precision (doubles are written with 17
/// significant digits, so the round-trip is exact).
void save_csv(const Dataset& ds, const std::string& path, const CsvSchema& schema = {});

/// Neighboring dataset: equals ds except position j holds e. e must be
/// dimension-compatible (feature length, label < C, domain_feature < F);
/// the id is taken as given, uniqueness is the caller's concern.
Dataset replace_example(const Dataset& ds, std::size_t j, Example e);

}  // namespace repsel
