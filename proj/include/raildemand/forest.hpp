#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "raildemand/tree.hpp"

namespace raildemand {

struct EnsembleConfig {
  TreeConfig tree;
  long n_trees = 2000;
  double subsample_fraction = 0.75;
  std::uint64_t seed = 0;
  // false: random subsets without replacement (the operative scheme; with
  // B=2000 and 75% subsamples each record is out-of-bag for ~500 trees).
  // true: classical bootstrap resampling.
  bool with_replacement = false;
  int threads = 0;  // 0 = hardware concurrency
};

struct BaggedForest {
  EnsembleConfig config;
  std::size_t n_records = 0;
  std::vector<ModelTree> trees;
  // per-tree training rows, ascending (with replacement: sorted draw list)
  std::vector<std::vector<std::uint32_t>> memberships;
  // per-tree bitmap over records for O(1) in-bag tests
  std::vector<std::vector<std::uint64_t>> in_bag;

  bool tree_contains(std::size_t tree_idx, std::uint32_t row) const {
    return (in_bag[tree_idx][row >> 6] >> (row & 63)) & 1u;
  }
  void rebuild_bitmaps();
};

struct ImportanceTable {
  // variable -> share of all splits, descending by share then by name
  std::vector<std::pair<std::string, double>> entries;
  std::map<std::string, long> counts;
  long total_partitions = 0;
};

// Trains n_trees model trees, each on round(fraction * N) rows drawn with the
// per-tree generator seeded seed + tree index. Trees may be trained
// concurrently; results are identical for any thread count.
BaggedForest fit_forest(const Frame& frame, const EnsembleConfig& config);

// Mean prediction of the trees whose training subsample excludes the record;
// nullopt when every tree saw it.
std::optional<double> oob_predict(const BaggedForest& forest, const Frame& frame,
                                  std::uint32_t record_index);

// Mean prediction over all trees (counterfactual/new records).
double predict_mean(const BaggedForest& forest, const Frame& frame, std::uint32_t row,
                    int override_column = -1, double override_value = 0.0);
double predict_mean(const BaggedForest& forest,
                    const std::unordered_map<std::string, double>& record);

// 1 - sum((y - oob)^2) / sum((y - mean)^2) over records with a defined OOB
// prediction; throws when none is defined.
double cv_r2(const BaggedForest& forest, const Frame& frame);

// Share of all splits per variable across the ensemble.
ImportanceTable variable_importance(const BaggedForest& forest);

// Directory persistence: manifest.json (config, seed, memberships, dataset
// fingerprint) plus one JSON file per tree.
void save_forest(const BaggedForest& forest, const std::string& dir,
                 std::uint64_t dataset_fingerprint);
BaggedForest load_forest(const std::string& dir, const Frame& frame,
                         std::uint64_t expected_fingerprint);

}  // namespace raildemand
