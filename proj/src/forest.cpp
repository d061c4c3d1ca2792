#include "raildemand/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "raildemand/common.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace raildemand {

void BaggedForest::rebuild_bitmaps() {
  const std::size_t words = (n_records + 63) / 64;
  in_bag.assign(memberships.size(), std::vector<std::uint64_t>(words, 0));
  for (std::size_t b = 0; b < memberships.size(); ++b)
    for (const std::uint32_t row : memberships[b]) in_bag[b][row >> 6] |= 1ULL << (row & 63);
}

BaggedForest fit_forest(const Frame& frame, const EnsembleConfig& config) {
  const std::size_t n = frame.n_rows;
  if (config.n_trees < 1) fail("forest", "n_trees must be >= 1");
  if (!(config.subsample_fraction > 0.0) || config.subsample_fraction > 1.0)
    fail("forest", "subsample fraction must be in (0, 1]");
  const auto k =
      static_cast<std::uint32_t>(std::llround(config.subsample_fraction * static_cast<double>(n)));
  if (k == 0) fail("forest", "subsample fraction yields an empty training set");

  BaggedForest forest;
  forest.config = config;
  forest.n_records = n;
  forest.trees.resize(static_cast<std::size_t>(config.n_trees));
  forest.memberships.resize(static_cast<std::size_t>(config.n_trees));

  parallel_for(static_cast<std::size_t>(config.n_trees), config.threads, [&](std::size_t b) {
    SplitMix64 rng(config.seed + static_cast<std::uint64_t>(b));
    std::vector<std::uint32_t> rows =
        config.with_replacement
            ? sample_with_replacement(static_cast<std::uint32_t>(n), k, rng)
            : sample_without_replacement(static_cast<std::uint32_t>(n), k, rng);
    forest.trees[b] = grow_tree(frame, rows, config.tree, config.seed + b);
    forest.memberships[b] = std::move(rows);
  });

  forest.rebuild_bitmaps();
  return forest;
}

std::optional<double> oob_predict(const BaggedForest& forest, const Frame& frame,
                                  std::uint32_t record_index) {
  double sum = 0.0;
  long count = 0;
  for (std::size_t b = 0; b < forest.trees.size(); ++b) {
    if (forest.tree_contains(b, record_index)) continue;
    sum += predict_row(forest.trees[b], frame, record_index);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

double predict_mean(const BaggedForest& forest, const Frame& frame, std::uint32_t row,
                    int override_column, double override_value) {
  double sum = 0.0;
  for (const auto& tree : forest.trees)
    sum += predict_row(tree, frame, row, override_column, override_value);
  return sum / static_cast<double>(forest.trees.size());
}

double predict_mean(const BaggedForest& forest,
                    const std::unordered_map<std::string, double>& record) {
  double sum = 0.0;
  for (const auto& tree : forest.trees) sum += predict(tree, record);
  return sum / static_cast<double>(forest.trees.size());
}

double cv_r2(const BaggedForest& forest, const Frame& frame) {
  const std::vector<double>& y = frame.cols[static_cast<std::size_t>(
      frame.col_checked(forest.trees.empty() ? std::string(kColLogTickets)
                                             : forest.trees.front().response))];
  std::vector<double> oob(frame.n_rows);
  std::vector<char> defined(frame.n_rows, 0);
  double mean = 0.0;
  long m = 0;
  for (std::uint32_t i = 0; i < frame.n_rows; ++i) {
    const auto p = oob_predict(forest, frame, i);
    if (!p) continue;
    oob[i] = *p;
    defined[i] = 1;
    mean += y[i];
    ++m;
  }
  if (m == 0) fail("forest", "no record has a defined out-of-bag prediction");
  mean /= static_cast<double>(m);
  double rss = 0.0, tss = 0.0;
  for (std::uint32_t i = 0; i < frame.n_rows; ++i) {
    if (!defined[i]) continue;
    rss += (y[i] - oob[i]) * (y[i] - oob[i]);
    tss += (y[i] - mean) * (y[i] - mean);
  }
  if (tss == 0.0) return rss == 0.0 ? 1.0 : 0.0;
  return 1.0 - rss / tss;
}

ImportanceTable variable_importance(const BaggedForest& forest) {
  ImportanceTable table;
  for (const auto& tree : forest.trees)
    for (const auto& node : tree.nodes)
      if (node.column >= 0) {
        ++table.counts[node.variable];
        ++table.total_partitions;
      }
  for (const auto& [name, count] : table.counts)
    table.entries.emplace_back(name,
                               static_cast<double>(count) /
                                   static_cast<double>(table.total_partitions));
  std::sort(table.entries.begin(), table.entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return table;
}

namespace {
std::string tree_file_name(std::size_t b) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "tree_%05zu.json", b);
  return buf;
}

std::string bitmap_hex(const std::vector<std::uint32_t>& rows, std::size_t n) {
  std::vector<std::uint8_t> bytes((n + 7) / 8, 0);
  for (const std::uint32_t r : rows) bytes[r >> 3] |= static_cast<std::uint8_t>(1u << (r & 7));
  std::string hex;
  hex.reserve(bytes.size() * 2);
  static const char* digits = "0123456789abcdef";
  for (const std::uint8_t byte : bytes) {
    hex.push_back(digits[byte >> 4]);
    hex.push_back(digits[byte & 15]);
  }
  return hex;
}
}  // namespace

void save_forest(const BaggedForest& forest, const std::string& dir,
                 std::uint64_t dataset_fingerprint) {
  fs::create_directories(dir);
  json manifest;
  manifest["format"] = "raildemand-forest-v1";
  manifest["dataset_fingerprint"] = hex64(dataset_fingerprint);
  manifest["n_records"] = forest.n_records;
  manifest["n_trees"] = forest.config.n_trees;
  manifest["subsample_fraction"] = forest.config.subsample_fraction;
  manifest["seed"] = forest.config.seed;
  manifest["with_replacement"] = forest.config.with_replacement;
  manifest["tree_config"] = json{{"leaf_regressors", forest.config.tree.leaf_regressors},
                                 {"split_candidates", forest.config.tree.split_candidates},
                                 {"max_splits", forest.config.tree.max_splits},
                                 {"min_leaf_size", forest.config.tree.min_leaf_size},
                                 {"improvement_tolerance", forest.config.tree.improvement_tolerance},
                                 {"allow_price_splits", forest.config.tree.allow_price_splits},
                                 {"response", forest.config.tree.response},
                                 {"price_column", forest.config.tree.price_column}};
  manifest["memberships"] = json::array();
  for (const auto& rows : forest.memberships)
    manifest["memberships"].push_back(bitmap_hex(rows, forest.n_records));

  std::ofstream mf(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!mf) fail("io", "cannot write forest manifest in " + dir);
  mf << manifest.dump(2) << "\n";

  for (std::size_t b = 0; b < forest.trees.size(); ++b) {
    std::ofstream tf(fs::path(dir) / tree_file_name(b), std::ios::binary);
    if (!tf) fail("io", "cannot write tree file in " + dir);
    tf << tree_to_json(forest.trees[b]).dump();
  }
}

BaggedForest load_forest(const std::string& dir, const Frame& frame,
                         std::uint64_t expected_fingerprint) {
  std::ifstream mf(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!mf) fail("io", "cannot open forest manifest in " + dir);
  json manifest;
  try {
    mf >> manifest;
  } catch (const std::exception& e) {
    fail("forest", std::string("malformed forest manifest: ") + e.what());
  }
  if (manifest.value("format", "") != "raildemand-forest-v1")
    fail("forest", dir + " is not a raildemand forest directory");
  if (manifest.at("dataset_fingerprint").get<std::string>() != hex64(expected_fingerprint))
    fail("forest", "forest was trained on a different dataset (fingerprint mismatch)");

  BaggedForest forest;
  forest.n_records = manifest.at("n_records").get<std::size_t>();
  if (forest.n_records != frame.n_rows)
    fail("forest", "forest record count does not match the dataset");
  forest.config.n_trees = manifest.at("n_trees").get<long>();
  forest.config.subsample_fraction = manifest.at("subsample_fraction").get<double>();
  forest.config.seed = manifest.at("seed").get<std::uint64_t>();
  forest.config.with_replacement = manifest.at("with_replacement").get<bool>();
  const json& tc = manifest.at("tree_config");
  forest.config.tree.leaf_regressors = tc.at("leaf_regressors").get<std::vector<std::string>>();
  forest.config.tree.split_candidates =
      tc.at("split_candidates").get<std::vector<std::string>>();
  forest.config.tree.max_splits = tc.at("max_splits").get<long>();
  forest.config.tree.min_leaf_size = tc.at("min_leaf_size").get<long>();
  forest.config.tree.improvement_tolerance = tc.at("improvement_tolerance").get<double>();
  forest.config.tree.allow_price_splits = tc.at("allow_price_splits").get<bool>();
  forest.config.tree.response = tc.at("response").get<std::string>();
  forest.config.tree.price_column = tc.at("price_column").get<std::string>();

  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    fail("forest", "malformed membership bitmap");
  };
  for (const auto& hex : manifest.at("memberships")) {
    const std::string s = hex.get<std::string>();
    if (s.size() != 2 * ((forest.n_records + 7) / 8))
      fail("forest", "membership bitmap length mismatch");
    std::vector<std::uint32_t> rows;
    for (std::uint32_t r = 0; r < forest.n_records; ++r) {
      const std::size_t byte_idx = r >> 3;
      const int byte = nibble(s[2 * byte_idx]) * 16 + nibble(s[2 * byte_idx + 1]);
      if ((byte >> (r & 7)) & 1) rows.push_back(r);
    }
    forest.memberships.push_back(std::move(rows));
  }

  for (std::size_t b = 0; b < static_cast<std::size_t>(forest.config.n_trees); ++b) {
    std::ifstream tf(fs::path(dir) / tree_file_name(b), std::ios::binary);
    if (!tf) fail("io", "missing tree file " + tree_file_name(b) + " in " + dir);
    json j;
    try {
      tf >> j;
    } catch (const std::exception& e) {
      fail("forest", "malformed tree file " + tree_file_name(b) + ": " + e.what());
    }
    forest.trees.push_back(tree_from_json(j, frame));
  }
  forest.rebuild_bitmaps();
  return forest;
}

}  // namespace raildemand
