#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "raildemand/forest.hpp"
#include "raildemand/frame.hpp"
#include "raildemand/ingest.hpp"
#include "raildemand/synth.hpp"
#include "support.hpp"

using namespace raildemand;
using namespace testsupport;

namespace {

Frame noisy_frame(SplitMix64& rng, std::size_t n) {
  std::vector<double> y(n), x(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform(-2, 2);
    w[i] = rng.uniform(-5, 5);
    y[i] = (w[i] > 0 ? 2.0 : 0.5) * x[i] + 0.3 * rng.normal();
  }
  return make_frame({{"y", y}, {"x", x}, {"w", w}});
}

TreeConfig simple_cfg() {
  TreeConfig cfg;
  cfg.response = "y";
  cfg.leaf_regressors = {"x"};
  cfg.split_candidates = {"w"};
  return cfg;
}

// single-leaf tree with fixed coefficients [intercept, slope on "x"]
ModelTree constant_tree(double intercept, double slope) {
  ModelTree tree;
  tree.response = "y";
  tree.leaf_regressors = {"x"};
  tree.leaf_columns = {};
  TreeNode node;
  node.leaf = 0;
  tree.nodes.push_back(node);
  LeafModel leaf;
  leaf.coef = {intercept, slope};
  leaf.fit.n_obs = 1;
  tree.leaves.push_back(leaf);
  return tree;
}

void bind_to_frame(ModelTree& tree, const Frame& frame) {
  tree.leaf_columns.clear();
  for (const auto& name : tree.leaf_regressors)
    tree.leaf_columns.push_back(frame.col_checked(name));
}

}  // namespace

TEST_CASE("single full-sample tree equals grow_tree") {
  SplitMix64 rng(1);
  const Frame frame = noisy_frame(rng, 120);
  EnsembleConfig cfg;
  cfg.tree = simple_cfg();
  cfg.n_trees = 1;
  cfg.subsample_fraction = 1.0;
  cfg.seed = 9;
  const BaggedForest forest = fit_forest(frame, cfg);
  CHECK(forest.memberships[0].size() == frame.n_rows);

  const ModelTree direct = grow_tree(frame, all_rows(frame.n_rows), cfg.tree);
  REQUIRE(forest.trees[0].split_log.size() == direct.split_log.size());
  for (std::size_t i = 0; i < direct.split_log.size(); ++i) {
    CHECK(forest.trees[0].split_log[i].variable == direct.split_log[i].variable);
    CHECK(forest.trees[0].split_log[i].threshold == direct.split_log[i].threshold);
  }
  for (std::uint32_t r = 0; r < frame.n_rows; ++r)
    CHECK(predict_row(forest.trees[0], frame, r) == predict_row(direct, frame, r));
}

TEST_CASE("membership sizes and determinism") {
  SplitMix64 rng(2);
  const Frame frame = noisy_frame(rng, 201);
  EnsembleConfig cfg;
  cfg.tree = simple_cfg();
  cfg.n_trees = 24;
  cfg.subsample_fraction = 0.75;
  cfg.seed = 42;
  cfg.threads = 2;
  const BaggedForest a = fit_forest(frame, cfg);
  const auto k = static_cast<std::size_t>(std::llround(0.75 * 201));
  for (const auto& membership : a.memberships) {
    CHECK(membership.size() == k);
    CHECK(std::is_sorted(membership.begin(), membership.end()));
  }

  SUBCASE("same seed reproduces memberships and split logs") {
    const BaggedForest b = fit_forest(frame, cfg);
    CHECK(a.memberships == b.memberships);
    for (std::size_t t = 0; t < a.trees.size(); ++t) {
      REQUIRE(a.trees[t].split_log.size() == b.trees[t].split_log.size());
      for (std::size_t i = 0; i < a.trees[t].split_log.size(); ++i) {
        CHECK(a.trees[t].split_log[i].variable == b.trees[t].split_log[i].variable);
        CHECK(a.trees[t].split_log[i].threshold == b.trees[t].split_log[i].threshold);
        CHECK(a.trees[t].split_log[i].sse_after == b.trees[t].split_log[i].sse_after);
      }
    }
  }
  SUBCASE("thread count does not change the result") {
    EnsembleConfig serial = cfg;
    serial.threads = 1;
    const BaggedForest b = fit_forest(frame, serial);
    CHECK(a.memberships == b.memberships);
    for (std::uint32_t r = 0; r < frame.n_rows; ++r)
      CHECK(predict_mean(a, frame, r) == predict_mean(b, frame, r));
  }
  SUBCASE("expected out-of-bag count is exact for fixed subsample sizes") {
    double total_oob = 0;
    for (std::uint32_t r = 0; r < frame.n_rows; ++r)
      for (std::size_t t = 0; t < a.trees.size(); ++t)
        if (!a.tree_contains(t, r)) total_oob += 1;
    const double mean_oob = total_oob / static_cast<double>(frame.n_rows);
    CHECK(mean_oob ==
          doctest::Approx(24.0 * (201.0 - double(k)) / 201.0).epsilon(1e-12));
  }
}

TEST_CASE("oob_predict follows its definition") {
  SplitMix64 rng(3);
  const Frame frame = noisy_frame(rng, 90);
  EnsembleConfig cfg;
  cfg.tree = simple_cfg();
  cfg.n_trees = 6;
  cfg.subsample_fraction = 0.6;
  cfg.seed = 5;
  const BaggedForest forest = fit_forest(frame, cfg);

  for (std::uint32_t r = 0; r < frame.n_rows; ++r) {
    double sum = 0;
    long count = 0;
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
      if (std::binary_search(forest.memberships[t].begin(), forest.memberships[t].end(), r))
        continue;
      sum += predict_row(forest.trees[t], frame, r);
      ++count;
    }
    const auto got = oob_predict(forest, frame, r);
    if (count == 0) {
      CHECK_FALSE(got.has_value());
    } else {
      REQUIRE(got.has_value());
      CHECK(*got == sum / double(count));
    }
  }

  SUBCASE("full-sample trees leave no out-of-bag records") {
    EnsembleConfig full = cfg;
    full.subsample_fraction = 1.0;
    const BaggedForest f = fit_forest(frame, full);
    CHECK_FALSE(oob_predict(f, frame, 0).has_value());
    CHECK_THROWS_AS(cv_r2(f, frame), RdError);
  }
}

TEST_CASE("noise-free forest collapses to the common regression") {
  SplitMix64 rng(4);
  const std::size_t n = 80;
  std::vector<double> y(n), x(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform(-2, 2);
    w[i] = rng.uniform(-1, 1);
    y[i] = 2.0 + 3.0 * x[i];  // exact line, every subsample fits it exactly
  }
  const Frame frame = make_frame({{"y", y}, {"x", x}, {"w", w}});
  EnsembleConfig cfg;
  cfg.tree = simple_cfg();
  cfg.tree.min_leaf_size = 40;  // equals the subsample size: single-leaf trees
  cfg.n_trees = 8;
  cfg.subsample_fraction = 0.5;
  cfg.seed = 19;
  const BaggedForest forest = fit_forest(frame, cfg);
  for (std::uint32_t r = 0; r < frame.n_rows; ++r) {
    const auto oob = oob_predict(forest, frame, r);
    REQUIRE(oob.has_value());
    CHECK(*oob == doctest::Approx(y[r]).epsilon(1e-9));
  }
  CHECK(cv_r2(forest, frame) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("predict_mean over hand-built trees") {
  const Frame frame = make_frame({{"y", {0.0, 0.0}}, {"x", {1.0, 2.0}}});
  BaggedForest forest;
  forest.n_records = 2;
  forest.config.n_trees = 2;
  ModelTree t1 = constant_tree(1.0, 0.0);
  ModelTree t2 = constant_tree(3.0, 0.0);
  bind_to_frame(t1, frame);
  bind_to_frame(t2, frame);
  forest.trees = {t1, t2};
  forest.memberships = {{0, 1}, {0, 1}};
  forest.rebuild_bitmaps();

  CHECK(predict_mean(forest, frame, 0) == doctest::Approx(2.0));
  std::swap(forest.trees[0], forest.trees[1]);
  CHECK(predict_mean(forest, frame, 0) == doctest::Approx(2.0));  // order invariance
  CHECK(predict_mean(forest, {{"x", 5.0}}) == doctest::Approx(2.0));
}

TEST_CASE("cv_r2 limit cases") {
  // trees that reproduce the response exactly: slope 1 on x == y
  const std::size_t n = 12;
  std::vector<double> y(n), x(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] = 0.5 * double(i) - 2.0;
  const Frame frame = make_frame({{"y", y}, {"x", x}});

  BaggedForest forest;
  forest.n_records = n;
  forest.config.n_trees = 2;
  ModelTree exact = constant_tree(0.0, 1.0);
  bind_to_frame(exact, frame);
  forest.trees = {exact, exact};
  forest.memberships = {{0, 1, 2, 3, 4, 5}, {6, 7, 8, 9, 10, 11}};
  forest.rebuild_bitmaps();
  CHECK(cv_r2(forest, frame) == doctest::Approx(1.0));

  // trees that predict the global mean exactly give zero
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
  ModelTree flat = constant_tree(mean, 0.0);
  bind_to_frame(flat, frame);
  forest.trees = {flat, flat};
  CHECK(cv_r2(forest, frame) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
}

TEST_CASE("variable importance counts splits") {
  SUBCASE("hand-built tree shares") {
    ModelTree tree;
    tree.response = "y";
    tree.nodes.resize(5);
    tree.nodes[0] = {0, "distance", 1.0, 1, 2, -1};
    tree.nodes[1] = {0, "distance", 0.5, 3, 4, -1};
    tree.nodes[2].leaf = 0;
    tree.nodes[3].leaf = 1;
    tree.nodes[4].leaf = 2;
    tree.nodes[1].column = 0;
    tree.nodes[1].variable = "direction";  // second split on a different variable
    tree.nodes[0].variable = "distance";
    // rebuild: nodes[0] and an extra split on "distance"
    ModelTree tree2 = tree;
    tree2.nodes[1].variable = "distance";

    BaggedForest forest;
    forest.n_records = 0;
    forest.trees = {tree, tree2};
    // splits: tree: distance, direction; tree2: distance, distance
    const ImportanceTable table = variable_importance(forest);
    CHECK(table.total_partitions == 4);
    CHECK(table.counts.at("distance") == 3);
    CHECK(table.counts.at("direction") == 1);
    CHECK(table.entries.front().first == "distance");
    CHECK(table.entries.front().second == doctest::Approx(0.75));
    double sum = 0;
    for (const auto& [name, share] : table.entries) sum += share;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("forest of single-leaf trees has an empty table") {
    BaggedForest forest;
    ModelTree leaf_only = constant_tree(1.0, 0.0);
    forest.trees = {leaf_only};
    const ImportanceTable table = variable_importance(forest);
    CHECK(table.total_partitions == 0);
    CHECK(table.entries.empty());
  }

  SUBCASE("segment variable dominates under tolerance pruning") {
    SynthConfig scfg = two_segment_preset();
    scfg.target_records = 2500;
    scfg.seed = 7011;
    const auto [ds, truth] = generate(scfg);
    const Frame frame = build_frame(ds);
    EnsembleConfig cfg;
    cfg.n_trees = 10;
    cfg.seed = 3;
    cfg.threads = 2;
    cfg.tree.leaf_regressors = default_leaf_regressors(ds);
    cfg.tree.leaf_regressors.insert(cfg.tree.leaf_regressors.begin() + 1, "zone");
    cfg.tree.split_candidates = default_split_candidates(ds);
    cfg.tree.improvement_tolerance = 0.005;
    const BaggedForest forest = fit_forest(frame, cfg);
    const ImportanceTable table = variable_importance(forest);
    REQUIRE_FALSE(table.entries.empty());
    CHECK(table.entries.front().first == "dir:GornozavodskBranch");
    double sum = 0;
    for (const auto& [name, share] : table.entries) sum += share;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("forest persistence round trip") {
  SynthConfig scfg = confounded_preset();
  scfg.target_records = 900;
  const auto [ds, truth] = generate(scfg);
  const Frame frame = build_frame(ds);
  EnsembleConfig cfg;
  cfg.n_trees = 6;
  cfg.seed = 77;
  cfg.threads = 2;
  cfg.tree.leaf_regressors = default_leaf_regressors(ds);
  cfg.tree.split_candidates = default_split_candidates(ds);
  const BaggedForest forest = fit_forest(frame, cfg);

  const auto dir = fresh_dir("forest_io");
  const std::uint64_t fp = dataset_fingerprint(ds);
  save_forest(forest, dir.string(), fp);
  const BaggedForest loaded = load_forest(dir.string(), frame, fp);
  CHECK(loaded.memberships == forest.memberships);
  CHECK(loaded.config.seed == forest.config.seed);
  for (std::uint32_t r = 0; r < frame.n_rows; ++r)
    CHECK(predict_mean(loaded, frame, r) == doctest::Approx(predict_mean(forest, frame, r))
                                                .epsilon(1e-14));
  CHECK_THROWS_WITH_AS(load_forest(dir.string(), frame, fp + 1),
                       doctest::Contains("fingerprint"), RdError);
}

TEST_CASE("with-replacement resampling keeps the draw count") {
  SplitMix64 rng(6);
  const Frame frame = noisy_frame(rng, 100);
  EnsembleConfig cfg;
  cfg.tree = simple_cfg();
  cfg.n_trees = 4;
  cfg.subsample_fraction = 0.75;
  cfg.with_replacement = true;
  cfg.seed = 8;
  const BaggedForest forest = fit_forest(frame, cfg);
  for (const auto& membership : forest.memberships) CHECK(membership.size() == 75);
  // duplicates are possible; the distinct count must not exceed the draw count
  for (const auto& membership : forest.memberships) {
    std::set<std::uint32_t> distinct(membership.begin(), membership.end());
    CHECK(distinct.size() <= membership.size());
  }
}
