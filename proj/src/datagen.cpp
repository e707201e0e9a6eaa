#include "repsel/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "repsel/rng.hpp"

namespace repsel {

namespace {

// Seed stream tags; the label rule stream must stay reconstructible on its
// own for synthetic_label_rule.
enum : std::uint64_t {
  kTagRule = 1,
  kTagClusters = 2,
  kTagShift = 3,
  kTagSource = 4,
  kTagTarget = 5,
};

constexpr double kClusterSpread = 2.0;  // std of cluster centers around the origin

struct Generator {
  const SynthConfig& cfg;
  std::vector<double> rule_W;   // C x d
  std::vector<double> rule_b;   // C
  std::vector<double> centers;  // F x d source cluster centers
  std::vector<double> shift;    // length d, norm = shift_strength

  explicit Generator(const SynthConfig& c) : cfg(c) {
    std::mt19937_64 rule_rng(mix_seed(cfg.seed, kTagRule));
    std::normal_distribution<double> unit(0.0, 1.0);
    rule_W.resize(static_cast<std::size_t>(cfg.C) * cfg.d);
    rule_b.resize(static_cast<std::size_t>(cfg.C));
    for (double& v : rule_W) v = unit(rule_rng);
    for (double& v : rule_b) v = unit(rule_rng);

    std::mt19937_64 cluster_rng(mix_seed(cfg.seed, kTagClusters));
    centers.resize(static_cast<std::size_t>(cfg.F) * cfg.d);
    for (double& v : centers) v = kClusterSpread * unit(cluster_rng);

    std::mt19937_64 shift_rng(mix_seed(cfg.seed, kTagShift));
    shift.resize(static_cast<std::size_t>(cfg.d));
    double norm2 = 0.0;
    for (double& v : shift) {
      v = unit(shift_rng);
      norm2 += v * v;
    }
    const double norm = std::sqrt(norm2);
    for (double& v : shift) v = norm > 0 ? v / norm * cfg.shift_strength : 0.0;
  }

  int label_of(const std::vector<double>& x) const {
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < cfg.C; ++c) {
      double s = rule_b[static_cast<std::size_t>(c)];
      for (int j = 0; j < cfg.d; ++j) {
        s += rule_W[static_cast<std::size_t>(c) * cfg.d + j] * x[static_cast<std::size_t>(j)];
      }
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    return best;
  }

  Dataset draw(std::mt19937_64& rng, int n, bool shifted, long& next_id) const {
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<Example> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Example e;
      e.domain_feature = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.F));
      e.features.resize(static_cast<std::size_t>(cfg.d));
      for (int j = 0; j < cfg.d; ++j) {
        double v = centers[static_cast<std::size_t>(e.domain_feature) * cfg.d + j] + unit(rng);
        if (shifted) v += shift[static_cast<std::size_t>(j)];
        e.features[static_cast<std::size_t>(j)] = v;
      }
      e.label = label_of(e.features);
      if (cfg.label_noise > 0 && cfg.C > 1 && uniform01(rng) < cfg.label_noise) {
        // flip to a uniformly chosen other class
        int offset = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.C - 1));
        e.label = (e.label + offset) % cfg.C;
      }
      e.id = next_id++;
      rows.push_back(std::move(e));
    }
    return Dataset(std::move(rows), cfg.d, cfg.C, cfg.F);
  }
};

}  // namespace

DomainPair generate_synthetic(const SynthConfig& cfg) {
  validate(cfg);
  Generator gen(cfg);
  long next_id = 0;
  std::mt19937_64 source_rng(mix_seed(cfg.seed, kTagSource));
  std::mt19937_64 target_rng(mix_seed(cfg.seed, kTagTarget));
  DomainPair pair;
  pair.source_train = gen.draw(source_rng, cfg.n_source, false, next_id);
  pair.source_eval = gen.draw(source_rng, cfg.n_eval, false, next_id);
  pair.target_train = gen.draw(target_rng, cfg.n_target, true, next_id);
  pair.target_eval = gen.draw(target_rng, cfg.n_eval, true, next_id);
  return pair;
}

ModelParams synthetic_label_rule(const SynthConfig& cfg) {
  validate(cfg);
  Generator gen(cfg);
  ModelParams p;
  p.d = cfg.d;
  p.C = cfg.C;
  p.W = gen.rule_W;
  p.b = gen.rule_b;
  return p;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

long parse_integer(const std::string& cell, const char* what, std::size_t line_no) {
  const std::string v = strip(cell);
  std::size_t pos = 0;
  long out = 0;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw DataError(std::string("csv line ") + std::to_string(line_no) + ": unreadable " + what +
                    " '" + v + "'");
  }
  if (pos != v.size()) {
    throw DataError(std::string("csv line ") + std::to_string(line_no) + ": unreadable " + what +
                    " '" + v + "'");
  }
  return out;
}

double parse_real(const std::string& cell, std::size_t col, std::size_t line_no) {
  const std::string v = strip(cell);
  std::size_t pos = 0;
  double out = 0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw DataError("csv line " + std::to_string(line_no) + ": unreadable feature in column " +
                    std::to_string(col) + " ('" + v + "')");
  }
  if (pos != v.size()) {
    throw DataError("csv line " + std::to_string(line_no) + ": unreadable feature in column " +
                    std::to_string(col) + " ('" + v + "')");
  }
  return out;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string header;
  if (!std::getline(in, header)) throw DataError(path + ": empty file");
  const std::vector<std::string> names = split_csv_line(header);

  // map header names to roles
  std::vector<int> feature_col_of;  // feature index -> column
  int label_col = -1, domain_col = -1, id_col = -1;
  std::vector<std::pair<int, int>> feature_cols;  // (feature index, column)
  for (std::size_t c = 0; c < names.size(); ++c) {
    const std::string name = strip(names[c]);
    if (name == schema.label_column) {
      label_col = static_cast<int>(c);
    } else if (name == schema.domain_column) {
      domain_col = static_cast<int>(c);
    } else if (name == schema.id_column) {
      id_col = static_cast<int>(c);
    } else if (name.rfind(schema.feature_prefix, 0) == 0) {
      const std::string idx = name.substr(schema.feature_prefix.size());
      try {
        feature_cols.emplace_back(std::stoi(idx), static_cast<int>(c));
      } catch (const std::exception&) {
        throw DataError(path + ": unrecognized column '" + name + "'");
      }
    } else {
      throw DataError(path + ": unrecognized column '" + name + "'");
    }
  }
  if (label_col < 0) throw DataError(path + ": missing '" + schema.label_column + "' column");
  if (domain_col < 0) throw DataError(path + ": missing '" + schema.domain_column + "' column");
  if (feature_cols.empty()) throw DataError(path + ": no feature columns");
  std::sort(feature_cols.begin(), feature_cols.end());
  const int d = static_cast<int>(feature_cols.size());
  for (int k = 0; k < d; ++k) {
    if (feature_cols[static_cast<std::size_t>(k)].first != k) {
      throw DataError(path + ": feature columns must be " + schema.feature_prefix + "0.." +
                      schema.feature_prefix + std::to_string(d - 1));
    }
  }

  std::vector<Example> rows;
  std::string line;
  std::size_t line_no = 1;  // header was line 1
  long max_label = -1, max_domain = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != names.size()) {
      throw DataError("csv line " + std::to_string(line_no) + ": expected " +
                      std::to_string(names.size()) + " cells, got " + std::to_string(cells.size()));
    }
    Example e;
    e.features.resize(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      const int col = feature_cols[static_cast<std::size_t>(k)].second;
      e.features[static_cast<std::size_t>(k)] =
          parse_real(cells[static_cast<std::size_t>(col)], static_cast<std::size_t>(col), line_no);
    }
    const long label = parse_integer(cells[static_cast<std::size_t>(label_col)], "label", line_no);
    if (label < 0) {
      throw DataError("csv line " + std::to_string(line_no) + ": unknown label " +
                      std::to_string(label));
    }
    const long domain =
        parse_integer(cells[static_cast<std::size_t>(domain_col)], "domain", line_no);
    if (domain < 0) {
      throw DataError("csv line " + std::to_string(line_no) + ": negative domain feature");
    }
    e.label = static_cast<int>(label);
    e.domain_feature = static_cast<int>(domain);
    e.id = id_col >= 0 ? parse_integer(cells[static_cast<std::size_t>(id_col)], "id", line_no)
                       : static_cast<long>(rows.size());
    max_label = std::max(max_label, label);
    max_domain = std::max(max_domain, domain);
    rows.push_back(std::move(e));
  }
  if (rows.empty()) throw DataError(path + ": no data rows");
  return Dataset(std::move(rows), d, static_cast<int>(max_label + 1),
                 static_cast<int>(max_domain + 1));
}

void save_csv(const Dataset& ds, const std::string& path, const CsvSchema& schema) {
  std::ostringstream out;
  for (int j = 0; j < ds.feature_dim(); ++j) {
    out << schema.feature_prefix << j << ',';
  }
  out << schema.label_column << ',' << schema.domain_column << ',' << schema.id_column << '\n';
  char buf[40];
  for (const Example& e : ds.examples()) {
    for (double v : e.features) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ',';
    }
    out << e.label << ',' << e.domain_feature << ',' << e.id << '\n';
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  f << out.str();
}

Dataset replace_example(const Dataset& ds, std::size_t j, Example e) {
  if (j >= ds.size()) {
    throw std::out_of_range("replace_example: index " + std::to_string(j) + " >= n = " +
                            std::to_string(ds.size()));
  }
  if (static_cast<int>(e.features.size()) != ds.feature_dim()) {
    throw DataError("replace_example: feature length " + std::to_string(e.features.size()) +
                    " != d = " + std::to_string(ds.feature_dim()));
  }
  if (e.label < 0 || e.label >= ds.class_count()) {
    throw DataError("replace_example: label out of range");
  }
  if (e.domain_feature < 0 || e.domain_feature >= ds.domain_feature_count()) {
    throw DataError("replace_example: domain_feature out of range");
  }
  Dataset out = ds;
  out.examples_[j] = std::move(e);
  return out;
}

}  // namespace repsel
