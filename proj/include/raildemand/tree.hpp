#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "raildemand/frame.hpp"
#include "raildemand/linreg.hpp"

namespace raildemand {

struct TreeConfig {
  std::vector<std::string> leaf_regressors;   // intercept is implicit
  std::vector<std::string> split_candidates;  // variables eligible for splitting
  long max_splits = std::numeric_limits<long>::max();
  long min_leaf_size = 0;  // 0 = automatic (see effective rule below)
  // Minimum SSE improvement for a split to be accepted, relative to the root
  // node RSS.
  double improvement_tolerance = 1e-9;
  bool allow_price_splits = false;
  std::string response = kColLogTickets;
  std::string price_column = kColLogRealFare;
};

// Effective stopping rules, applied at grow time:
//   splits  <= min(config.max_splits, ceil(N^(1/3)))
//   leaf n  >= max(config.min_leaf_size, p^2, p+1)   with p = 1 + |leaf_regressors|
long ceil_cbrt(std::size_t n);

struct SplitChoice {
  int column = -1;  // frame column
  std::string variable;
  double threshold = 0.0;
  double sse = 0.0;          // sse_left + sse_right
  double improvement = 0.0;  // node RSS - sse
};

struct SplitLogEntry {
  std::string variable;
  double threshold = 0.0;
  double sse_before = 0.0;
  double sse_after = 0.0;
};

struct LeafModel {
  OlsFit fit;                              // on [intercept | leaf_regressors]
  std::vector<std::uint32_t> record_indices;  // frame rows in this leaf
  std::vector<double> coef;                // aligned [1 + |leaf_regressors|], 0 for dropped
};

struct TreeNode {
  int column = -1;  // frame column of the split variable; -1 for terminal nodes
  std::string variable;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int leaf = -1;  // index into ModelTree::leaves for terminal nodes
};

struct ModelTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::vector<LeafModel> leaves;
  std::vector<SplitLogEntry> split_log;
  long split_count = 0;
  double root_rss = 0.0;
  long effective_min_leaf = 0;
  long effective_max_splits = 0;
  std::vector<std::string> leaf_regressors;
  std::vector<int> leaf_columns;  // frame columns of leaf_regressors
  std::string response;

  bool is_single_leaf() const { return nodes.size() == 1; }
};

// Summed RSS of one OLS fit per half-plane {value <= threshold} /
// {value > threshold} on the leaf regressors; nullopt when either side is
// smaller than the effective minimum leaf size.
std::optional<double> split_sse(const Frame& frame, std::span<const std::uint32_t> rows,
                                const std::string& variable, double threshold,
                                const TreeConfig& config);

// Exhaustive search over every split candidate and every midpoint between
// consecutive distinct values. Ties break to the earliest candidate, then the
// smallest threshold. nullopt when no feasible split improves the node RSS by
// more than the tolerance.
std::optional<SplitChoice> best_split(const Frame& frame, std::span<const std::uint32_t> rows,
                                      const TreeConfig& config);

// Grows a tree by best-improvement-first frontier expansion. The result is
// deterministic for fixed inputs; rng_seed is recorded for reproducibility
// but the procedure itself is deterministic.
ModelTree grow_tree(const Frame& frame, std::span<const std::uint32_t> rows,
                    const TreeConfig& config, std::uint64_t rng_seed = 0);

// Routes a frame row through the split rules (<= goes left) and evaluates the
// leaf model. When override_column >= 0, that column reads override_value
// instead of the stored value (used for counterfactual prices).
double predict_row(const ModelTree& tree, const Frame& frame, std::uint32_t row,
                   int override_column = -1, double override_value = 0.0);

// Name-addressed prediction for records outside the training frame; throws
// naming the first missing field.
double predict(const ModelTree& tree, const std::unordered_map<std::string, double>& record);

nlohmann::json tree_to_json(const ModelTree& tree);
ModelTree tree_from_json(const nlohmann::json& j, const Frame& frame);

}  // namespace raildemand
