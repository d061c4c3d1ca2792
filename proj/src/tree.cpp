#include "raildemand/tree.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include <nlohmann/json.hpp>

#include "raildemand/common.hpp"

using nlohmann::json;

namespace raildemand {

long ceil_cbrt(std::size_t n) {
  if (n == 0) return 0;
  long k = static_cast<long>(std::llround(std::cbrt(static_cast<double>(n))));
  if (k < 1) k = 1;
  while (k * k * k < static_cast<long>(n)) ++k;
  while (k > 1 && (k - 1) * (k - 1) * (k - 1) >= static_cast<long>(n)) --k;
  return k;
}

namespace {

constexpr double kSweepTolerance = 1e-10;

// Augmented sums-of-squares-and-cross-products accumulator for the leaf
// design [intercept | regressors] plus the response; lower triangle only.
struct NormalStats {
  int q = 0;  // p + 1
  std::vector<double> m;

  void reset(int q_) {
    q = q_;
    m.assign(static_cast<std::size_t>(q) * q, 0.0);
  }

  // z has p entries, z[0] == 1. Rows of dummy-heavy designs are sparse, so
  // rows with z[i] == 0 skip their triangle row entirely.
  inline void add(const double* z, int p, double y) {
    for (int i = 0; i < p; ++i) {
      const double zi = z[i];
      if (zi == 0.0) continue;
      double* row = &m[static_cast<std::size_t>(i) * q];
      for (int j = 0; j <= i; ++j) row[j] += zi * z[j];
    }
    double* yrow = &m[static_cast<std::size_t>(p) * q];
    for (int j = 0; j < p; ++j) yrow[j] += y * z[j];
    yrow[p] += y * y;
  }

  static void diff(const NormalStats& a, const NormalStats& b, NormalStats& out) {
    out.q = a.q;
    out.m.resize(a.m.size());
    const int q = a.q;
    for (int i = 0; i < q; ++i) {
      const std::size_t base = static_cast<std::size_t>(i) * q;
      for (int j = 0; j <= i; ++j) out.m[base + j] = a.m[base + j] - b.m[base + j];
    }
  }
};

// Sweep-based least squares on the augmented SSCP matrix. Pivots are
// processed in column order; a pivot whose residual diagonal falls below the
// relative tolerance is skipped, which is equivalent to dropping that column.
// Returns the residual sum of squares; optionally the coefficients (zero for
// dropped columns).
double sweep_rss(const NormalStats& stats, int p, std::vector<double>& work,
                 std::vector<double>* coef_out = nullptr) {
  const int q = p + 1;
  work.assign(static_cast<std::size_t>(q) * q, 0.0);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = stats.m[static_cast<std::size_t>(i) * q + j];
      work[static_cast<std::size_t>(i) * q + j] = v;
      work[static_cast<std::size_t>(j) * q + i] = v;
    }

  double diag0[512];
  for (int k = 0; k < p; ++k) diag0[k] = work[static_cast<std::size_t>(k) * q + k];

  std::vector<bool> swept(static_cast<std::size_t>(p), false);
  for (int k = 0; k < p; ++k) {
    const double d = work[static_cast<std::size_t>(k) * q + k];
    if (!(diag0[k] > 0.0) || !(d > kSweepTolerance * diag0[k])) continue;
    const double inv = 1.0 / d;
    const double* rowk = &work[static_cast<std::size_t>(k) * q];
    for (int i = 0; i < q; ++i) {
      if (i == k) continue;
      double* rowi = &work[static_cast<std::size_t>(i) * q];
      const double aik = rowi[k];
      if (aik == 0.0) continue;
      const double f = aik * inv;
      for (int j = 0; j < q; ++j) rowi[j] -= f * rowk[j];
      rowi[k] = f;
    }
    double* rk = &work[static_cast<std::size_t>(k) * q];
    for (int j = 0; j < q; ++j) rk[j] *= inv;
    rk[k] = -inv;
    swept[static_cast<std::size_t>(k)] = true;
  }

  if (coef_out) {
    coef_out->assign(static_cast<std::size_t>(p), 0.0);
    for (int k = 0; k < p; ++k)
      if (swept[static_cast<std::size_t>(k)])
        (*coef_out)[static_cast<std::size_t>(k)] = work[static_cast<std::size_t>(k) * q + p];
  }
  const double rss = work[static_cast<std::size_t>(p) * q + p];
  return rss > 0.0 ? rss : 0.0;
}

struct Resolved {
  const TreeConfig* cfg = nullptr;
  int response_col = -1;
  std::vector<int> leaf_cols;
  std::vector<int> cand_cols;
  int p = 0;  // intercept + leaf regressors
  long min_leaf = 0;
  long max_splits = 0;
};

Resolved resolve_config(const Frame& frame, const TreeConfig& cfg, std::size_t n_rows) {
  if (static_cast<std::size_t>(cfg.leaf_regressors.size()) + 1 >= 500)
    fail("tree", "too many leaf regressors");
  Resolved rc;
  rc.cfg = &cfg;
  rc.response_col = frame.col(cfg.response);
  if (rc.response_col < 0) fail("tree", "response column '" + cfg.response + "' not in frame");
  for (const auto& name : cfg.leaf_regressors) {
    const int c = frame.col(name);
    if (c < 0) fail("tree", "leaf regressor '" + name + "' not in frame");
    rc.leaf_cols.push_back(c);
  }
  if (!cfg.price_column.empty() && frame.col(cfg.price_column) >= 0) {
    if (std::find(cfg.leaf_regressors.begin(), cfg.leaf_regressors.end(), cfg.price_column) ==
        cfg.leaf_regressors.end())
      fail("tree", "leaf regressors must include the price column '" + cfg.price_column + "'");
  }
  for (const auto& name : cfg.split_candidates) {
    const int c = frame.col(name);
    if (c < 0) fail("tree", "split candidate '" + name + "' not in frame");
    if (!cfg.allow_price_splits && name == cfg.price_column)
      fail("tree", "price splits are disabled; set allow_price_splits to split on '" + name + "'");
    rc.cand_cols.push_back(c);
  }
  rc.p = 1 + static_cast<int>(rc.leaf_cols.size());
  rc.min_leaf = std::max<long>({cfg.min_leaf_size, static_cast<long>(rc.p) * rc.p,
                                static_cast<long>(rc.p) + 1});
  rc.max_splits = std::min<long>(cfg.max_splits, ceil_cbrt(n_rows));
  if (cfg.improvement_tolerance < 0) fail("tree", "improvement tolerance must be nonnegative");
  return rc;
}

// Evaluation workspace shared across the nodes of one tree.
class NodeEvaluator {
public:
  NodeEvaluator(const Frame& frame, const Resolved& rc) : frame_(frame), rc_(rc) {}

  // Fills node design buffers and returns the unsplit-node RSS.
  double node_rss(std::span<const std::uint32_t> rows) {
    const std::size_t m = rows.size();
    const int p = rc_.p;
    z_.resize(m * static_cast<std::size_t>(p));
    y_.resize(m);
    const std::vector<double>& resp = frame_.cols[static_cast<std::size_t>(rc_.response_col)];
    for (std::size_t i = 0; i < m; ++i) {
      double* z = &z_[i * static_cast<std::size_t>(p)];
      z[0] = 1.0;
      for (std::size_t k = 0; k < rc_.leaf_cols.size(); ++k)
        z[k + 1] = frame_.cols[static_cast<std::size_t>(rc_.leaf_cols[k])][rows[i]];
      y_[i] = resp[rows[i]];
    }
    total_.reset(p + 1);
    for (std::size_t i = 0; i < m; ++i) total_.add(&z_[i * static_cast<std::size_t>(p)], p, y_[i]);
    return sweep_rss(total_, p, work_);
  }

  // Exhaustive scan; assumes node_rss() ran for the same rows.
  std::optional<SplitChoice> scan(std::span<const std::uint32_t> rows) {
    const std::size_t m = rows.size();
    const int p = rc_.p;
    if (static_cast<long>(m) < 2 * rc_.min_leaf) return std::nullopt;

    std::optional<SplitChoice> best;
    for (std::size_t ci = 0; ci < rc_.cand_cols.size(); ++ci) {
      const int col = rc_.cand_cols[ci];
      const std::vector<double>& cv = frame_.cols[static_cast<std::size_t>(col)];
      vals_.resize(m);
      double vmin = cv[rows[0]], vmax = cv[rows[0]];
      for (std::size_t i = 0; i < m; ++i) {
        const double v = cv[rows[i]];
        vals_[i] = {v, static_cast<std::uint32_t>(i)};
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
      if (vmin == vmax) continue;

      bool binary = true;
      for (std::size_t i = 0; i < m; ++i)
        if (vals_[i].first != vmin && vals_[i].first != vmax) {
          binary = false;
          break;
        }

      if (binary) {
        left_.reset(p + 1);
        long nleft = 0;
        for (std::size_t i = 0; i < m; ++i)
          if (vals_[i].first == vmin) {
            left_.add(&z_[i * static_cast<std::size_t>(p)], p, y_[i]);
            ++nleft;
          }
        if (nleft >= rc_.min_leaf && static_cast<long>(m) - nleft >= rc_.min_leaf)
          consider(best, ci, col, (vmin + vmax) * 0.5, p);
        continue;
      }

      std::sort(vals_.begin(), vals_.end());
      left_.reset(p + 1);
      std::size_t k = 0;
      while (k < m) {
        const double v = vals_[k].first;
        std::size_t j = k;
        while (j < m && vals_[j].first == v) {
          left_.add(&z_[static_cast<std::size_t>(vals_[j].second) * p], p,
                    y_[vals_[j].second]);
          ++j;
        }
        if (j == m) break;
        const long nleft = static_cast<long>(j);
        if (nleft > static_cast<long>(m) - rc_.min_leaf) break;
        if (nleft >= rc_.min_leaf)
          consider(best, ci, col, (v + vals_[j].first) * 0.5, p);
        k = j;
      }
    }
    return best;
  }

private:
  void consider(std::optional<SplitChoice>& best, std::size_t ci, int col, double threshold,
                int p) {
    NormalStats::diff(total_, left_, right_);
    const double sse = sweep_rss(left_, p, work_) + sweep_rss(right_, p, work_);
    if (!best || sse < best->sse) {
      SplitChoice c;
      c.column = col;
      c.variable = frame_.names[static_cast<std::size_t>(col)];
      c.threshold = threshold;
      c.sse = sse;
      best = c;
    }
    (void)ci;
  }

  const Frame& frame_;
  const Resolved& rc_;
  std::vector<double> z_, y_, work_;
  std::vector<std::pair<double, std::uint32_t>> vals_;
  NormalStats total_, left_, right_;
};

OlsFit fit_leaf(const Frame& frame, const Resolved& rc, std::span<const std::uint32_t> rows) {
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(rc.p);
  Eigen::MatrixXd X(m, p);
  Eigen::VectorXd y(m);
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(p));
  names.push_back("(intercept)");
  for (const auto& n : rc.cfg->leaf_regressors) names.push_back(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    X(i, 0) = 1.0;
    for (std::size_t k = 0; k < rc.leaf_cols.size(); ++k)
      X(i, static_cast<Eigen::Index>(k + 1)) =
          frame.cols[static_cast<std::size_t>(rc.leaf_cols[k])][rows[static_cast<std::size_t>(i)]];
    y(i) = frame.cols[static_cast<std::size_t>(rc.response_col)][rows[static_cast<std::size_t>(i)]];
  }
  return fit_ols(X, y, names);
}

LeafModel make_leaf(const Frame& frame, const Resolved& rc, std::span<const std::uint32_t> rows) {
  LeafModel leaf;
  leaf.fit = fit_leaf(frame, rc, rows);
  leaf.record_indices.assign(rows.begin(), rows.end());
  leaf.coef.assign(static_cast<std::size_t>(rc.p), 0.0);
  std::vector<std::string> names;
  names.push_back("(intercept)");
  for (const auto& n : rc.cfg->leaf_regressors) names.push_back(n);
  for (std::size_t k = 0; k < names.size(); ++k)
    if (leaf.fit.has(names[k])) leaf.coef[k] = leaf.fit.coefficient(names[k]);
  return leaf;
}

}  // namespace

std::optional<double> split_sse(const Frame& frame, std::span<const std::uint32_t> rows,
                                const std::string& variable, double threshold,
                                const TreeConfig& config) {
  if (rows.empty()) fail("tree", "split_sse requires a nonempty record set");
  const Resolved rc = resolve_config(frame, config, rows.size());
  const int col = frame.col_checked(variable);
  const int p = rc.p;
  const std::vector<double>& cv = frame.cols[static_cast<std::size_t>(col)];
  const std::vector<double>& resp = frame.cols[static_cast<std::size_t>(rc.response_col)];

  NormalStats left, right;
  left.reset(p + 1);
  right.reset(p + 1);
  std::vector<double> z(static_cast<std::size_t>(p));
  long nleft = 0, nright = 0;
  for (const std::uint32_t row : rows) {
    z[0] = 1.0;
    for (std::size_t k = 0; k < rc.leaf_cols.size(); ++k)
      z[k + 1] = frame.cols[static_cast<std::size_t>(rc.leaf_cols[k])][row];
    if (cv[row] <= threshold) {
      left.add(z.data(), p, resp[row]);
      ++nleft;
    } else {
      right.add(z.data(), p, resp[row]);
      ++nright;
    }
  }
  if (nleft < rc.min_leaf || nright < rc.min_leaf) return std::nullopt;
  std::vector<double> work;
  return sweep_rss(left, p, work) + sweep_rss(right, p, work);
}

std::optional<SplitChoice> best_split(const Frame& frame, std::span<const std::uint32_t> rows,
                                      const TreeConfig& config) {
  if (rows.empty()) return std::nullopt;
  const Resolved rc = resolve_config(frame, config, rows.size());
  NodeEvaluator eval(frame, rc);
  const double rss = eval.node_rss(rows);
  auto best = eval.scan(rows);
  if (!best) return std::nullopt;
  best->improvement = rss - best->sse;
  if (!(best->improvement > config.improvement_tolerance * rss)) return std::nullopt;
  return best;
}

ModelTree grow_tree(const Frame& frame, std::span<const std::uint32_t> rows,
                    const TreeConfig& config, std::uint64_t rng_seed) {
  (void)rng_seed;  // growth is deterministic; the seed is part of the ensemble contract
  const Resolved rc = resolve_config(frame, config, rows.size());
  if (static_cast<long>(rows.size()) < std::max<long>(rc.min_leaf, rc.p + 1)) {
    std::ostringstream msg;
    msg << "grow_tree needs at least " << std::max<long>(rc.min_leaf, rc.p + 1)
        << " records, got " << rows.size();
    fail("tree", msg.str());
  }

  ModelTree tree;
  tree.leaf_regressors = config.leaf_regressors;
  tree.leaf_columns = rc.leaf_cols;
  tree.response = config.response;
  tree.effective_min_leaf = rc.min_leaf;
  tree.effective_max_splits = rc.max_splits;

  std::vector<std::uint32_t> node_rows(rows.begin(), rows.end());
  NodeEvaluator eval(frame, rc);

  struct NodeRange {
    std::size_t begin = 0, end = 0;
    double rss = 0.0;
    std::optional<SplitChoice> best;
  };
  std::vector<NodeRange> ranges;

  struct FrontierItem {
    double improvement;
    long seq;
    int node;
    bool operator<(const FrontierItem& other) const {
      if (improvement != other.improvement) return improvement < other.improvement;
      return seq > other.seq;
    }
  };
  std::priority_queue<FrontierItem> frontier;
  long seq = 0;

  auto make_node = [&](std::size_t begin, std::size_t end, double tol_abs) -> int {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    NodeRange range;
    range.begin = begin;
    range.end = end;
    std::span<const std::uint32_t> span(node_rows.data() + begin, end - begin);
    range.rss = eval.node_rss(span);
    if (static_cast<long>(end - begin) >= 2 * rc.min_leaf) {
      auto best = eval.scan(span);
      if (best) {
        best->improvement = range.rss - best->sse;
        if (best->improvement > tol_abs) range.best = best;
      }
    }
    ranges.push_back(range);
    if (range.best) frontier.push({range.best->improvement, seq++, id});
    return id;
  };

  // root
  {
    std::span<const std::uint32_t> all(node_rows.data(), node_rows.size());
    NodeRange root;
    root.begin = 0;
    root.end = node_rows.size();
    root.rss = eval.node_rss(all);
    tree.root_rss = root.rss;
    tree.nodes.emplace_back();
    if (static_cast<long>(node_rows.size()) >= 2 * rc.min_leaf && rc.max_splits > 0) {
      auto best = eval.scan(all);
      if (best) {
        best->improvement = root.rss - best->sse;
        if (best->improvement > config.improvement_tolerance * root.rss) root.best = best;
      }
    }
    ranges.push_back(root);
    if (root.best) frontier.push({root.best->improvement, seq++, 0});
  }
  const double tol_abs = config.improvement_tolerance * tree.root_rss;

  while (tree.split_count < rc.max_splits && !frontier.empty()) {
    const FrontierItem item = frontier.top();
    frontier.pop();
    // copies: make_node reallocates both tree.nodes and ranges
    const SplitChoice choice = *ranges[static_cast<std::size_t>(item.node)].best;
    const std::size_t b = ranges[static_cast<std::size_t>(item.node)].begin;
    const std::size_t e = ranges[static_cast<std::size_t>(item.node)].end;
    const double node_rss = ranges[static_cast<std::size_t>(item.node)].rss;

    const std::vector<double>& cv = frame.cols[static_cast<std::size_t>(choice.column)];
    auto mid = std::stable_partition(node_rows.begin() + static_cast<std::ptrdiff_t>(b),
                                     node_rows.begin() + static_cast<std::ptrdiff_t>(e),
                                     [&](std::uint32_t r) { return cv[r] <= choice.threshold; });
    const std::size_t mid_idx = static_cast<std::size_t>(mid - node_rows.begin());

    tree.split_log.push_back({choice.variable, choice.threshold, node_rss, choice.sse});
    ++tree.split_count;

    const int left_id = make_node(b, mid_idx, tol_abs);
    const int right_id = make_node(mid_idx, e, tol_abs);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(item.node)];
    node.column = choice.column;
    node.variable = choice.variable;
    node.threshold = choice.threshold;
    node.left = left_id;
    node.right = right_id;
  }

  // remaining frontier nodes and natural terminals become leaves
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    TreeNode& node = tree.nodes[id];
    if (node.column >= 0) continue;
    const NodeRange& range = ranges[id];
    std::span<const std::uint32_t> span(node_rows.data() + range.begin, range.end - range.begin);
    node.leaf = static_cast<int>(tree.leaves.size());
    tree.leaves.push_back(make_leaf(frame, rc, span));
  }
  return tree;
}

double predict_row(const ModelTree& tree, const Frame& frame, std::uint32_t row,
                   int override_column, double override_value) {
  auto value_of = [&](int col) {
    return (col == override_column) ? override_value
                                    : frame.cols[static_cast<std::size_t>(col)][row];
  };
  int id = 0;
  while (tree.nodes[static_cast<std::size_t>(id)].column >= 0) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
    id = value_of(node.column) <= node.threshold ? node.left : node.right;
  }
  const LeafModel& leaf =
      tree.leaves[static_cast<std::size_t>(tree.nodes[static_cast<std::size_t>(id)].leaf)];
  double pred = leaf.coef[0];
  for (std::size_t k = 0; k < tree.leaf_columns.size(); ++k)
    pred += leaf.coef[k + 1] * value_of(tree.leaf_columns[k]);
  return pred;
}

double predict(const ModelTree& tree, const std::unordered_map<std::string, double>& record) {
  auto value_of = [&](const std::string& name) {
    auto it = record.find(name);
    if (it == record.end()) fail("predict", "record is missing field '" + name + "'");
    return it->second;
  };
  int id = 0;
  while (tree.nodes[static_cast<std::size_t>(id)].column >= 0) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
    id = value_of(node.variable) <= node.threshold ? node.left : node.right;
  }
  const LeafModel& leaf =
      tree.leaves[static_cast<std::size_t>(tree.nodes[static_cast<std::size_t>(id)].leaf)];
  double pred = leaf.coef[0];
  for (std::size_t k = 0; k < tree.leaf_regressors.size(); ++k)
    pred += leaf.coef[k + 1] * value_of(tree.leaf_regressors[k]);
  return pred;
}

namespace {
json node_to_json(const ModelTree& tree, int id) {
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
  if (node.column < 0) {
    const LeafModel& leaf = tree.leaves[static_cast<std::size_t>(node.leaf)];
    json coefs;
    coefs["(intercept)"] = leaf.coef[0];
    for (std::size_t k = 0; k < tree.leaf_regressors.size(); ++k)
      coefs[tree.leaf_regressors[k]] = leaf.coef[k + 1];
    return json{{"leaf", json{{"coefficients", coefs},
                              {"n_obs", leaf.fit.n_obs},
                              {"rss", leaf.fit.residual_sum_squares}}}};
  }
  return json{{"variable", node.variable},
              {"threshold", node.threshold},
              {"left", node_to_json(tree, node.left)},
              {"right", node_to_json(tree, node.right)}};
}

int node_from_json(const json& j, const Frame& frame, ModelTree& tree) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("leaf")) {
    const json& leaf_json = j.at("leaf");
    LeafModel leaf;
    leaf.coef.assign(tree.leaf_regressors.size() + 1, 0.0);
    const json& coefs = leaf_json.at("coefficients");
    leaf.coef[0] = coefs.at("(intercept)").get<double>();
    for (std::size_t k = 0; k < tree.leaf_regressors.size(); ++k)
      leaf.coef[k + 1] = coefs.at(tree.leaf_regressors[k]).get<double>();
    leaf.fit.n_obs = leaf_json.at("n_obs").get<long>();
    leaf.fit.residual_sum_squares = leaf_json.value("rss", 0.0);
    tree.nodes[static_cast<std::size_t>(id)].leaf = static_cast<int>(tree.leaves.size());
    tree.leaves.push_back(std::move(leaf));
    return id;
  }
  const std::string variable = j.at("variable").get<std::string>();
  const int left = node_from_json(j.at("left"), frame, tree);
  const int right = node_from_json(j.at("right"), frame, tree);
  TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
  node.variable = variable;
  node.column = frame.col_checked(variable);
  node.threshold = j.at("threshold").get<double>();
  node.left = left;
  node.right = right;
  return id;
}
}  // namespace

json tree_to_json(const ModelTree& tree) {
  json j;
  j["response"] = tree.response;
  j["leaf_regressors"] = tree.leaf_regressors;
  j["split_count"] = tree.split_count;
  j["root_rss"] = tree.root_rss;
  j["effective_min_leaf"] = tree.effective_min_leaf;
  j["effective_max_splits"] = tree.effective_max_splits;
  j["split_log"] = json::array();
  for (const auto& e : tree.split_log)
    j["split_log"].push_back(json{{"variable", e.variable},
                                  {"threshold", e.threshold},
                                  {"sse_before", e.sse_before},
                                  {"sse_after", e.sse_after}});
  j["root"] = node_to_json(tree, 0);
  return j;
}

ModelTree tree_from_json(const json& j, const Frame& frame) {
  ModelTree tree;
  tree.response = j.at("response").get<std::string>();
  tree.leaf_regressors = j.at("leaf_regressors").get<std::vector<std::string>>();
  for (const auto& name : tree.leaf_regressors)
    tree.leaf_columns.push_back(frame.col_checked(name));
  tree.split_count = j.at("split_count").get<long>();
  tree.root_rss = j.at("root_rss").get<double>();
  tree.effective_min_leaf = j.value("effective_min_leaf", 0L);
  tree.effective_max_splits = j.value("effective_max_splits", 0L);
  for (const auto& e : j.at("split_log"))
    tree.split_log.push_back({e.at("variable").get<std::string>(),
                              e.at("threshold").get<double>(),
                              e.at("sse_before").get<double>(),
                              e.at("sse_after").get<double>()});
  node_from_json(j.at("root"), frame, tree);
  return tree;
}

}  // namespace raildemand
