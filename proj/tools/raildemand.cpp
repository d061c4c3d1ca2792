// raildemand: batch estimation of heterogeneous price elasticity for local
// rail ticket sales, with tariff recommendations.
//
// Subcommands: synth, ingest, describe, ols, fit, elasticity, price, replay.
// Every command writes <out>/run_manifest.json with input hashes, the full
// parameter set, the seed and the tool version; `replay` re-executes a
// manifest and reproduces outputs byte-identically.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "raildemand/common.hpp"
#include "raildemand/csv.hpp"
#include "raildemand/design.hpp"
#include "raildemand/elasticity.hpp"
#include "raildemand/forest.hpp"
#include "raildemand/frame.hpp"
#include "raildemand/ingest.hpp"
#include "raildemand/linreg.hpp"
#include "raildemand/pricing.hpp"
#include "raildemand/synth.hpp"
#include "raildemand/tree.hpp"
#include "raildemand/types.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace raildemand;

namespace {

constexpr const char* kToolVersion = "raildemand 0.1.0";

struct RunContext {
  std::string command;
  json params;
  fs::path out_dir;
  json input_hashes = json::object();

  void note_input(const std::string& path) { input_hashes[path] = hex64(hash_file(path)); }

  fs::path out(const std::string& name) const { return out_dir / name; }

  void write_text(const std::string& name, const std::string& content) const {
    std::ofstream f(out(name), std::ios::binary);
    if (!f) fail("io", "cannot write " + (out_dir / name).string());
    f << content;
    if (!f) fail("io", "write failed: " + (out_dir / name).string());
  }

  void finish() const {
    json manifest;
    manifest["tool"] = kToolVersion;
    manifest["command"] = command;
    // output location and thread count are execution details, not analysis
    // parameters; omitting them keeps manifests identical across re-runs
    json recorded = params;
    recorded.erase("out");
    recorded.erase("threads");
    manifest["parameters"] = recorded;
    manifest["inputs"] = input_hashes;
    json outputs = json::object();
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(out_dir))
      if (entry.is_regular_file() && entry.path().filename() != "run_manifest.json")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files)
      outputs[fs::relative(f, out_dir).generic_string()] = hex64(hash_file(f.string()));
    manifest["outputs"] = outputs;
    std::ofstream f(out_dir / "run_manifest.json", std::ios::binary);
    if (!f) fail("io", "cannot write run manifest");
    f << manifest.dump(2) << "\n";
  }
};

RunContext make_context(const std::string& command, const json& params) {
  RunContext ctx;
  ctx.command = command;
  ctx.params = params;
  ctx.out_dir = params.at("out").get<std::string>();
  fs::create_directories(ctx.out_dir);
  return ctx;
}

std::string csv_optional(const std::optional<double>& v, int decimals) {
  return v ? format_fixed(*v, decimals) : std::string();
}

// ---------------------------------------------------------------------------
// command implementations over a parameter object (shared with replay)

void run_synth(const json& params) {
  RunContext ctx = make_context("synth", params);
  SynthConfig config = preset_by_name(params.value("preset", "paper"));
  if (params.contains("seed")) config.seed = params.at("seed").get<std::uint64_t>();
  if (params.contains("records")) config.target_records = params.at("records").get<long>();
  if (params.contains("noise")) config.noise_sigma = params.at("noise").get<double>();
  auto [ds, truth] = generate(config);
  write_csv_bundle(ds, truth, ctx.out_dir.string());
  std::cout << "synth: " << ds.stations.size() << " stations, " << ds.routes.size()
            << " routes, " << ds.records.size() << " records\n";
  ctx.finish();
}

void run_ingest(const json& params) {
  RunContext ctx = make_context("ingest", params);
  IngestPaths paths;
  paths.tickets = params.at("tickets").get<std::string>();
  paths.stations = params.at("stations").get<std::string>();
  paths.tariffs = params.at("tariffs").get<std::string>();
  paths.cpi = params.at("cpi").get<std::string>();
  paths.zones = params.at("zones").get<std::string>();
  for (const auto& p : {paths.tickets, paths.stations, paths.tariffs, paths.cpi, paths.zones})
    ctx.note_input(p);
  IngestSummary summary;
  Dataset ds = ingest(paths, {}, &summary);
  save_dataset(ds, ctx.out("dataset.json").string());
  for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "stations: " << summary.stations << "\nroutes: " << summary.routes
            << "\nrecords: " << summary.records << "\n";
  ctx.finish();
}

void run_describe(const json& params) {
  RunContext ctx = make_context("describe", params);
  const std::string archive = params.at("archive").get<std::string>();
  ctx.note_input(archive);
  Dataset ds = load_dataset(archive);
  const Grouping grouping = parse_grouping(params.at("grouping").get<std::string>());

  const auto table = share_growth_table(ds, grouping);
  {
    CsvWriter w(ctx.out("share_growth.csv").string());
    w.row({"group", "year", "tickets", "growth_pct", "share_pct"});
    for (const auto& row : table)
      w.row({row.group, std::to_string(row.year), std::to_string(row.count),
             csv_optional(row.growth_pct, 1), format_fixed(row.share_pct, 4)});
  }

  if (grouping == Grouping::SettlementPair) {
    // share-of-tickets matrix over (origin class, destination class)
    double total = 0.0;
    double cells[kSizeClassCount][kSizeClassCount] = {};
    for (const auto& r : ds.records) {
      const Station& from = ds.origin_of(r);
      const Station& to = ds.destination_of(r);
      const int a = static_cast<int>(classify_settlement(from.population_5km,
                                                         from.population_5km > 0));
      const int b =
          static_cast<int>(classify_settlement(to.population_5km, to.population_5km > 0));
      cells[a][b] += static_cast<double>(r.tickets);
      total += static_cast<double>(r.tickets);
    }
    CsvWriter w(ctx.out("settlement_matrix.csv").string());
    std::vector<std::string> header{"from/to"};
    for (int b = 0; b < kSizeClassCount; ++b)
      header.push_back(size_class_name(static_cast<SizeClass>(b)));
    header.push_back("Total");
    w.row(header);
    for (int a = 0; a < kSizeClassCount; ++a) {
      std::vector<std::string> row{size_class_name(static_cast<SizeClass>(a))};
      double row_total = 0.0;
      for (int b = 0; b < kSizeClassCount; ++b) {
        const double share = total > 0 ? 100.0 * cells[a][b] / total : 0.0;
        row.push_back(format_fixed(share, 2));
        row_total += share;
      }
      row.push_back(format_fixed(row_total, 2));
      w.row(row);
    }
  }
  std::cout << "describe: " << table.size() << " rows (" << grouping_name(grouping) << ")\n";
  ctx.finish();
}

json fit_to_json(const OlsFit& fit) {
  json coefs = json::object();
  for (std::size_t i = 0; i < fit.names.size(); ++i)
    coefs[fit.names[i]] = json{{"estimate", fit.coefficients(static_cast<Eigen::Index>(i))},
                               {"stderr", fit.standard_errors(static_cast<Eigen::Index>(i))}};
  return json{{"coefficients", coefs}, {"r2", fit.r2},
              {"r2_adjusted", fit.r2_adjusted},      {"n_obs", fit.n_obs},
              {"n_params", fit.n_params},            {"rss", fit.residual_sum_squares},
              {"dropped_columns", fit.dropped}};
}

void run_ols(const json& params) {
  RunContext ctx = make_context("ols", params);
  const std::string archive = params.at("archive").get<std::string>();
  ctx.note_input(archive);
  Dataset ds = load_dataset(archive);
  const Specification spec = parse_specification(params.value("spec", "IV"));

  json report;
  report["specification"] = specification_name(spec);
  if (params.value("per_category", false)) {
    std::vector<std::string> notices;
    const auto fits = fit_by_fare_category(ds, spec, &notices);
    json by_cat = json::object();
    for (const auto& [category, fit] : fits)
      by_cat[fare_category_name(category)] = fit_to_json(fit);
    report["categories"] = by_cat;
    report["notices"] = notices;
    for (const auto& n : notices) std::cerr << "notice: " << n << "\n";
  } else {
    std::vector<std::uint32_t> rows;
    if (params.contains("fare_category")) {
      const FareCategory cat = parse_fare_category(params.at("fare_category").get<std::string>());
      for (std::size_t i = 0; i < ds.records.size(); ++i)
        if (ds.records[i].category == cat) rows.push_back(static_cast<std::uint32_t>(i));
      if (rows.empty()) fail("ols", "no records for the requested fare category");
    } else {
      rows.resize(ds.records.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<std::uint32_t>(i);
    }
    const DesignMatrix design = build_design_matrix(ds, spec, rows);
    const OlsFit fit = fit_ols(design, response_vector(ds, rows));
    report["fit"] = fit_to_json(fit);
    report["notes"] = design.notes;
    std::cout << "ols " << specification_name(spec)
              << ": alpha=" << format_fixed(fit.coefficient(kColLogRealFare), 4) << " (se "
              << format_fixed(fit.standard_error(kColLogRealFare), 4)
              << "), r2=" << format_fixed(fit.r2, 4) << ", n=" << fit.n_obs << "\n";
  }
  ctx.write_text("ols_report.json", report.dump(2) + "\n");
  ctx.finish();
}

EnsembleConfig ensemble_from_params(const json& params, const Dataset& ds) {
  EnsembleConfig config;
  config.n_trees = params.value("trees", 2000L);
  config.subsample_fraction = params.value("subsample", 0.75);
  config.seed = params.value("seed", std::uint64_t{0});
  config.with_replacement = params.value("with_replacement", false);
  config.threads = static_cast<int>(params.value("threads", 0L));
  config.tree.improvement_tolerance = params.value("tolerance", 1e-9);
  config.tree.min_leaf_size = params.value("min_leaf", 0L);
  config.tree.max_splits = params.value("max_splits", std::numeric_limits<long>::max());
  config.tree.allow_price_splits = params.value("allow_price_splits", false);

  auto parse_list = [&](const std::string& key,
                        std::vector<std::string> fallback) -> std::vector<std::string> {
    if (!params.contains(key) || params.at(key).get<std::string>() == "auto") return fallback;
    std::vector<std::string> names;
    std::stringstream ss(params.at(key).get<std::string>());
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) names.push_back(item);
    return names;
  };
  std::vector<std::string> default_regs = default_leaf_regressors(ds);
  default_regs.insert(default_regs.begin() + 1, "zone");  // linear zone control
  config.tree.leaf_regressors = parse_list("leaf_regressors", default_regs);
  config.tree.split_candidates = parse_list("split_candidates", default_split_candidates(ds));
  return config;
}

void run_fit(const json& params) {
  RunContext ctx = make_context("fit", params);
  const std::string archive = params.at("archive").get<std::string>();
  ctx.note_input(archive);
  Dataset ds = load_dataset(archive);
  const Frame frame = build_frame(ds);
  const EnsembleConfig config = ensemble_from_params(params, ds);

  BaggedForest forest = fit_forest(frame, config);
  save_forest(forest, ctx.out("forest").string(), dataset_fingerprint(ds));

  const double cv = cv_r2(forest, frame);
  const ImportanceTable importance = variable_importance(forest);
  {
    CsvWriter w(ctx.out("importance.csv").string());
    w.row({"variable", "splits", "share"});
    for (const auto& [name, share] : importance.entries)
      w.row({name, std::to_string(importance.counts.at(name)), format_fixed(share, 6)});
  }
  {
    CsvWriter w(ctx.out("oob_predictions.csv").string());
    w.row({"record_key", "log_tickets", "oob_prediction", "oob_trees"});
    for (std::uint32_t i = 0; i < frame.n_rows; ++i) {
      const auto oob = oob_predict(forest, frame, i);
      long n_oob = 0;
      for (std::size_t b = 0; b < forest.trees.size(); ++b)
        if (!forest.tree_contains(b, i)) ++n_oob;
      w.row({record_key(ds, ds.records[i]), format_fixed(ds.records[i].log_tickets, 9),
             oob ? format_fixed(*oob, 9) : std::string(), std::to_string(n_oob)});
    }
  }
  json report{{"cv_r2", cv},
              {"n_trees", config.n_trees},
              {"subsample_fraction", config.subsample_fraction},
              {"seed", config.seed},
              {"total_partitions", importance.total_partitions}};
  ctx.write_text("fit_report.json", report.dump(2) + "\n");
  std::cout << "fit: " << config.n_trees << " trees, cv_r2=" << format_fixed(cv, 4)
            << ", partitions=" << importance.total_partitions << "\n";
  ctx.finish();
}

DistanceBands bands_from_string(const std::string& spec) {
  // "fromto:1-4,5-8,9-17;out:1-3,4-6,7-17;within:1,2"
  DistanceBands bands;
  if (spec.empty() || spec == "auto") return bands;
  std::stringstream groups(spec);
  std::string group;
  while (std::getline(groups, group, ';')) {
    const auto colon = group.find(':');
    if (colon == std::string::npos) fail("args", "malformed bands spec near '" + group + "'");
    const std::string key = group.substr(0, colon);
    std::vector<std::pair<int, int>> ranges;
    std::stringstream items(group.substr(colon + 1));
    std::string item;
    while (std::getline(items, item, ',')) {
      const auto dash = item.find('-');
      const int lo = std::stoi(item.substr(0, dash));
      const int hi = dash == std::string::npos ? lo : std::stoi(item.substr(dash + 1));
      ranges.emplace_back(lo, hi);
    }
    if (key == "fromto") bands.from_to_perm = ranges;
    else if (key == "out") bands.out_of_perm = ranges;
    else if (key == "within") bands.within_perm = ranges;
    else fail("args", "unknown bands group '" + key + "' (valid: fromto, out, within)");
  }
  return bands;
}

struct LoadedForest {
  Dataset ds;
  Frame frame;
  BaggedForest forest;
};

LoadedForest load_pipeline(RunContext& ctx, const json& params) {
  const std::string archive = params.at("archive").get<std::string>();
  const std::string forest_dir = params.at("forest").get<std::string>();
  ctx.note_input(archive);
  ctx.note_input((fs::path(forest_dir) / "manifest.json").string());
  LoadedForest lf{load_dataset(archive), {}, {}};
  lf.frame = build_frame(lf.ds);
  lf.forest = load_forest(forest_dir, lf.frame, dataset_fingerprint(lf.ds));
  return lf;
}

void run_elasticity(const json& params) {
  RunContext ctx = make_context("elasticity", params);
  LoadedForest lf = load_pipeline(ctx, params);

  ElasticityConfig config;
  config.perturbation = params.value("perturbation", 0.10);
  config.bins = static_cast<int>(params.value("bins", 40L));
  config.inelastic_tolerance = params.value("tol0", 0.05);
  config.threads = static_cast<int>(params.value("threads", 0L));

  const ElasticityReport report = elasticity_distribution(lf.forest, lf.frame, lf.ds, config);
  const DistanceBands bands = bands_from_string(params.value("bands", "auto"));
  const GroupElasticityTable groups = group_elasticity(report, lf.ds, bands);

  {
    CsvWriter w(ctx.out("elasticities.csv").string());
    w.row({"record_key", "elasticity"});
    for (std::size_t i = 0; i < report.keys.size(); ++i)
      w.row({report.keys[i], format_fixed(report.per_record[i], 6)});
  }
  {
    json dist{{"mean", report.mean},
              {"shares",
               {{"elastic", report.elastic_share},
                {"weakly_elastic", report.weakly_elastic_share},
                {"inelastic", report.inelastic_share}}},
              {"perturbation", config.perturbation},
              {"inelastic_tolerance", config.inelastic_tolerance},
              {"histogram",
               {{"edges", report.histogram_edges}, {"counts", report.histogram_counts}}}};
    ctx.write_text("distribution.json", dist.dump(2) + "\n");
  }
  ctx.write_text("histogram.svg", histogram_svg(report));
  {
    CsvWriter w(ctx.out("groups.csv").string());
    for (const auto& row : group_table_rows(groups)) w.row(row);
  }
  std::cout << "elasticity: mean=" << format_fixed(report.mean, 4)
            << ", elastic=" << format_fixed(100 * report.elastic_share, 1)
            << "%, weakly=" << format_fixed(100 * report.weakly_elastic_share, 1)
            << "%, inelastic=" << format_fixed(100 * report.inelastic_share, 1) << "%\n";
  ctx.finish();
}

void run_price(const json& params) {
  RunContext ctx = make_context("price", params);
  LoadedForest lf = load_pipeline(ctx, params);

  TariffSchedule baseline = params.contains("baseline")
                                ? load_schedule(params.at("baseline").get<std::string>())
                                : schedule_from_dataset(lf.ds);
  if (params.contains("baseline")) ctx.note_input(params.at("baseline").get<std::string>());
  TariffSchedule proposed = params.contains("schedule")
                                ? load_schedule(params.at("schedule").get<std::string>())
                                : baseline;
  if (params.contains("schedule")) ctx.note_input(params.at("schedule").get<std::string>());
  if (params.contains("bounds")) {
    ctx.note_input(params.at("bounds").get<std::string>());
    load_bounds(proposed, params.at("bounds").get<std::string>());
    load_bounds(baseline, params.at("bounds").get<std::string>());
  }
  validate_schedule(proposed, lf.ds);

  ElasticityConfig econfig;
  econfig.perturbation = params.value("perturbation", 0.10);
  econfig.threads = static_cast<int>(params.value("threads", 0L));
  const ElasticityReport report = elasticity_distribution(lf.forest, lf.frame, lf.ds, econfig);
  const GroupElasticityTable groups =
      group_elasticity(report, lf.ds, bands_from_string(params.value("bands", "auto")));
  const double hold_band = params.value("hold_band", 0.05);
  const auto recommendations = recommend_schedule(groups, lf.ds, baseline, hold_band);
  const RevenueDeltaReport delta = revenue_delta(lf.forest, lf.frame, lf.ds, proposed, baseline);

  {
    CsvWriter w(ctx.out("recommendations.csv").string());
    w.row({"group", "elasticity", "records", "action", "reference_fare", "optimal_fare",
           "predicted_revenue_change_pct"});
    for (const auto& r : recommendations)
      w.row({r.group, format_fixed(r.elasticity, 4), std::to_string(r.records),
             price_action_name(r.action), format_fixed(r.reference_fare, 2),
             format_fixed(r.optimal_fare, 2), format_fixed(r.predicted_revenue_change_pct, 2)});
  }
  {
    CsvWriter w(ctx.out("revenue_delta.csv").string());
    w.row({"group", "revenue_baseline", "revenue_proposed", "delta_pct"});
    for (const auto& g : delta.by_direction)
      if (g.revenue_baseline > 0)
        w.row({g.label, format_fixed(g.revenue_baseline, 2), format_fixed(g.revenue_proposed, 2),
               format_fixed(g.delta_pct(), 4)});
    w.row({delta.total.label, format_fixed(delta.total.revenue_baseline, 2),
           format_fixed(delta.total.revenue_proposed, 2),
           format_fixed(delta.total.delta_pct(), 4)});
  }
  {
    std::ostringstream text;
    text << "tariff recommendations (hold band " << format_fixed(hold_band, 2) << ")\n";
    for (const auto& r : recommendations)
      text << "  " << r.group << ": elasticity " << format_fixed(r.elasticity, 2) << " -> "
           << price_action_name(r.action) << " (fare " << format_fixed(r.reference_fare, 2)
           << " -> " << format_fixed(r.optimal_fare, 2) << ", revenue "
           << (r.predicted_revenue_change_pct >= 0 ? "+" : "")
           << format_fixed(r.predicted_revenue_change_pct, 1) << "%)\n";
    text << "proposed schedule total revenue change: "
         << (delta.total.delta_pct() >= 0 ? "+" : "") << format_fixed(delta.total.delta_pct(), 2)
         << "%\n";
    ctx.write_text("summary.txt", text.str());
    std::cout << text.str();
  }
  ctx.finish();
}

void dispatch(const std::string& command, const json& params);

void run_replay(const json& params) {
  const std::string manifest_path = params.at("manifest").get<std::string>();
  std::ifstream f(manifest_path, std::ios::binary);
  if (!f) fail("io", "cannot open manifest " + manifest_path);
  json manifest;
  try {
    f >> manifest;
  } catch (const std::exception& e) {
    fail("replay", std::string("malformed manifest: ") + e.what());
  }
  // verify inputs before re-running
  for (const auto& [path, hash] : manifest.at("inputs").items()) {
    if (!fs::exists(path)) fail("replay", "input no longer exists: " + path);
    if (hex64(hash_file(path)) != hash.get<std::string>())
      fail("replay", "input changed since the original run: " + path);
  }
  json run_params = manifest.at("parameters");
  if (!params.contains("out")) fail("args", "replay requires --out");
  run_params["out"] = params.at("out").get<std::string>();
  if (params.contains("threads")) run_params["threads"] = params.at("threads");
  dispatch(manifest.at("command").get<std::string>(), run_params);
}

void dispatch(const std::string& command, const json& params) {
  if (command == "synth") run_synth(params);
  else if (command == "ingest") run_ingest(params);
  else if (command == "describe") run_describe(params);
  else if (command == "ols") run_ols(params);
  else if (command == "fit") run_fit(params);
  else if (command == "elasticity") run_elasticity(params);
  else if (command == "price") run_price(params);
  else fail("args", "unknown command in manifest: " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heterogeneous demand estimation and tariff analysis for local rail"};
  app.set_config("--config", "", "INI config file with per-subcommand sections");
  app.require_subcommand(1);

  json p_synth, p_ingest, p_describe, p_ols, p_fit, p_elast, p_price, p_replay;

  auto add_out = [](CLI::App* cmd, json& params) {
    cmd->add_option_function<std::string>(
           "--out", [&params](const std::string& v) { params["out"] = v; }, "output directory")
        ->required();
  };
  auto opt_str = [](CLI::App* cmd, json& params, const std::string& flag, const char* help,
                    bool required = false) {
    const std::string key = flag.substr(2);
    auto* opt = cmd->add_option_function<std::string>(
        flag, [&params, key](const std::string& v) { params[key] = v; }, help);
    if (required) opt->required();
    return opt;
  };
  auto opt_double = [](CLI::App* cmd, json& params, const std::string& flag, const char* help) {
    const std::string key = flag.substr(2);
    return cmd->add_option_function<double>(
        flag, [&params, key](double v) { params[key] = v; }, help);
  };
  auto opt_long = [](CLI::App* cmd, json& params, const std::string& flag, const char* help) {
    const std::string key = flag.substr(2);
    return cmd->add_option_function<long>(
        flag, [&params, key](long v) { params[key] = v; }, help);
  };
  auto opt_flag = [](CLI::App* cmd, json& params, const std::string& flag, const char* help) {
    const std::string key = flag.substr(2);
    return cmd->add_flag_function(
        flag, [&params, key](std::int64_t v) { params[key] = v > 0; }, help);
  };

  {
    auto* cmd = app.add_subcommand("synth", "generate a synthetic CSV bundle with ground truth");
    opt_str(cmd, p_synth, "--preset", "paper | two-segment | confounded | ols-recovery");
    opt_long(cmd, p_synth, "--seed", "generator seed");
    opt_long(cmd, p_synth, "--records", "approximate record count");
    opt_double(cmd, p_synth, "--noise", "log-demand noise sigma");
    add_out(cmd, p_synth);
  }
  {
    auto* cmd = app.add_subcommand("ingest", "aggregate raw CSVs into a dataset archive");
    opt_str(cmd, p_ingest, "--tickets", "tickets.csv", true);
    opt_str(cmd, p_ingest, "--stations", "stations.csv", true);
    opt_str(cmd, p_ingest, "--tariffs", "tariffs.csv", true);
    opt_str(cmd, p_ingest, "--cpi", "cpi.csv", true);
    opt_str(cmd, p_ingest, "--zones", "zones.csv", true);
    add_out(cmd, p_ingest);
  }
  {
    auto* cmd = app.add_subcommand("describe", "ticket share and growth tables");
    opt_str(cmd, p_describe, "--archive", "dataset archive", true);
    opt_str(cmd, p_describe, "--grouping", "direction | zone | settlement_pair", true);
    add_out(cmd, p_describe);
  }
  {
    auto* cmd = app.add_subcommand("ols", "least-squares demand fits");
    opt_str(cmd, p_ols, "--archive", "dataset archive", true);
    opt_str(cmd, p_ols, "--spec", "specification I|II|III|IV (default IV)");
    opt_str(cmd, p_ols, "--fare-category", "restrict to one fare category");
    opt_flag(cmd, p_ols, "--per-category", "fit every category separately");
    add_out(cmd, p_ols);
  }
  {
    auto* cmd = app.add_subcommand("fit", "train the bagged model-tree ensemble");
    opt_str(cmd, p_fit, "--archive", "dataset archive", true);
    opt_long(cmd, p_fit, "--trees", "ensemble size (default 2000)");
    opt_double(cmd, p_fit, "--subsample", "training fraction per tree (default 0.75)");
    opt_long(cmd, p_fit, "--seed", "ensemble seed");
    opt_long(cmd, p_fit, "--threads", "worker threads (0 = all cores)");
    opt_long(cmd, p_fit, "--min-leaf", "minimum leaf size (0 = parameter-count rule)");
    opt_long(cmd, p_fit, "--max-splits", "split budget per tree (default: cube-root rule)");
    opt_double(cmd, p_fit, "--tolerance", "relative SSE improvement tolerance");
    opt_flag(cmd, p_fit, "--allow-price-splits", "let trees split on the price column");
    opt_flag(cmd, p_fit, "--with-replacement", "classical bootstrap resampling");
    opt_str(cmd, p_fit, "--leaf-regressors", "comma list or 'auto'");
    opt_str(cmd, p_fit, "--split-candidates", "comma list or 'auto'");
    add_out(cmd, p_fit);
  }
  {
    auto* cmd = app.add_subcommand("elasticity", "per-record elasticities and group tables");
    opt_str(cmd, p_elast, "--archive", "dataset archive", true);
    opt_str(cmd, p_elast, "--forest", "forest directory from fit", true);
    opt_double(cmd, p_elast, "--perturbation", "price perturbation (default 0.10)");
    opt_long(cmd, p_elast, "--bins", "histogram bins (default 40)");
    opt_double(cmd, p_elast, "--tol0", "inelastic threshold (default 0.05)");
    opt_str(cmd, p_elast, "--bands", "zone bands, e.g. fromto:1-4,5-8,9-17;out:...;within:1,2");
    opt_long(cmd, p_elast, "--threads", "worker threads");
    add_out(cmd, p_elast);
  }
  {
    auto* cmd = app.add_subcommand("price", "tariff recommendations and revenue deltas");
    opt_str(cmd, p_price, "--archive", "dataset archive", true);
    opt_str(cmd, p_price, "--forest", "forest directory from fit", true);
    opt_str(cmd, p_price, "--schedule", "proposed tariffs.csv (default: baseline)");
    opt_str(cmd, p_price, "--baseline", "baseline tariffs.csv (default: archive tariffs)");
    opt_str(cmd, p_price, "--bounds", "RST upper bounds CSV (zone, full_fare)");
    opt_double(cmd, p_price, "--hold-band", "hold band around unit elasticity (default 0.05)");
    opt_double(cmd, p_price, "--perturbation", "price perturbation for elasticities");
    opt_str(cmd, p_price, "--bands", "zone bands for grouping");
    opt_long(cmd, p_price, "--threads", "worker threads");
    add_out(cmd, p_price);
  }
  {
    auto* cmd = app.add_subcommand("replay", "re-run a command from its run manifest");
    opt_str(cmd, p_replay, "--manifest", "run_manifest.json from a previous run", true);
    opt_str(cmd, p_replay, "--out", "output directory for the re-run", true);
    opt_long(cmd, p_replay, "--threads", "worker threads for the re-run");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("synth")) run_synth(p_synth);
    else if (app.got_subcommand("ingest")) run_ingest(p_ingest);
    else if (app.got_subcommand("describe")) run_describe(p_describe);
    else if (app.got_subcommand("ols")) run_ols(p_ols);
    else if (app.got_subcommand("fit")) run_fit(p_fit);
    else if (app.got_subcommand("elasticity")) run_elasticity(p_elast);
    else if (app.got_subcommand("price")) run_price(p_price);
    else if (app.got_subcommand("replay")) run_replay(p_replay);
  } catch (const RdError& e) {
    std::cerr << "error[" << e.category() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
