#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "raildemand/design.hpp"
#include "raildemand/frame.hpp"
#include "raildemand/ingest.hpp"
#include "raildemand/synth.hpp"
#include "support.hpp"

using namespace raildemand;
using namespace testsupport;

namespace {

const char* kStationsCsv =
    "id,name,direction,lat,lon,population_5km,dist_settlement1_km,dist_settlement2_km,"
    "dist_bus_km,dist_highway_km,summer_gardens,is_perm,is_agglomeration\n"
    "A,Alpha,Western,58.0,56.25,1050000,1.0,2.0,0.5,1.0,0,1,1\n"
    "B,Beta,Western,58.0,56.43,5000,2.0,3.0,1.5,2.0,1,0,0\n"
    "C,Gamma,Kungur,57.9,56.25,800,,,,,0,0,0\n"
    "D,Delta,Kungur,57.8,56.25,90,1.0,5.0,2.0,3.0,1,0,0\n";

const char* kZonesCsv = "zone,upper_km\n1,13\n2,25\n3,38\n4,50\n5,65\n";

std::string cpi_csv() {
  std::string s = "year,month,index\n";
  for (int m = 1; m <= 12; ++m) s += "2013," + std::to_string(m) + ",100\n";
  for (int m = 1; m <= 12; ++m) s += "2014," + std::to_string(m) + ",108.5\n";
  return s;
}

const char* kTariffsCsv = "year,zone,full_fare\n2013,1,26\n2014,1,28\n2013,2,40\n2014,2,43\n";

IngestPaths fixture_paths(const std::filesystem::path& dir, const std::string& tickets) {
  write_file(dir / "stations.csv", kStationsCsv);
  write_file(dir / "zones.csv", kZonesCsv);
  write_file(dir / "cpi.csv", cpi_csv());
  write_file(dir / "tariffs.csv", kTariffsCsv);
  write_file(dir / "tickets.csv", tickets);
  IngestPaths p;
  p.stations = (dir / "stations.csv").string();
  p.zones = (dir / "zones.csv").string();
  p.cpi = (dir / "cpi.csv").string();
  p.tariffs = (dir / "tariffs.csv").string();
  p.tickets = (dir / "tickets.csv").string();
  return p;
}

const char* kTicketsHeader = "origin_id,destination_id,date,fare_category,quantity,nominal_fare\n";

}  // namespace

TEST_CASE("zone_of_distance boundaries and errors") {
  const std::vector<double> table{13, 25, 38};
  CHECK(zone_of_distance(5, table) == 1);
  CHECK(zone_of_distance(13, table) == 1);  // upper-inclusive
  CHECK(zone_of_distance(13.0001, table) == 2);
  CHECK(zone_of_distance(26, table) == 3);
  CHECK_THROWS_AS(zone_of_distance(38.5, table), RdError);
  CHECK_THROWS_AS(zone_of_distance(0.0, table), RdError);
  CHECK_THROWS_AS(zone_of_distance(5, std::vector<double>{13, 13}), RdError);
}

TEST_CASE("classify_settlement classes and monotonicity") {
  CHECK(classify_settlement(123456, false) == SizeClass::None);
  CHECK(classify_settlement(50, true) == SizeClass::Small);
  CHECK(classify_settlement(100, true) == SizeClass::Small);
  CHECK(classify_settlement(100.5, true) == SizeClass::Middle);
  CHECK(classify_settlement(1000, true) == SizeClass::Middle);
  CHECK(classify_settlement(5000, true) == SizeClass::Large);
  CHECK(classify_settlement(10000, true) == SizeClass::Large);
  CHECK(classify_settlement(10001, true) == SizeClass::Huge);

  SplitMix64 rng(9);
  std::vector<double> pops;
  for (int i = 0; i < 200; ++i) pops.push_back(rng.uniform(0, 20000));
  std::sort(pops.begin(), pops.end());
  for (std::size_t i = 1; i < pops.size(); ++i)
    CHECK(static_cast<int>(classify_settlement(pops[i], true)) >=
          static_cast<int>(classify_settlement(pops[i - 1], true)));
}

TEST_CASE("deflate arithmetic") {
  CpiSeries cpi;
  cpi.base_year = 2013;
  cpi.base_month = 1;
  cpi.values[CpiSeries::key(2013, 1)] = 100;
  cpi.values[CpiSeries::key(2014, 6)] = 108.5;

  CHECK(deflate(26, 2013, 1, cpi, {2013, 1}) == doctest::Approx(26.0));
  CHECK(deflate(26, 2014, 6, cpi, {2013, 1}) == doctest::Approx(2600.0 / 108.5).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(deflate(26, 2015, 3, cpi, {2013, 1}), doctest::Contains("2015-03"),
                       RdError);

  // fares and CPI growing at the same rate leave the real fare constant
  CpiSeries growing;
  growing.base_year = 2012;
  growing.base_month = 1;
  double index = 100.0;
  for (int y = 2012; y <= 2017; ++y) {
    growing.values[CpiSeries::key(y, 1)] = index;
    index *= 1.085;
  }
  double fare = 26.0;
  for (int y = 2012; y <= 2017; ++y) {
    CHECK(deflate(fare, y, 1, growing, {2012, 1}) == doctest::Approx(26.0).epsilon(1e-12));
    fare *= 1.085;
  }
}

TEST_CASE("ingest aggregates ticket rows into monthly records") {
  const auto dir = fresh_dir("ingest_agg");
  // 10 tickets over 2 routes x 2 months
  struct Raw {
    const char* o;
    const char* d;
    const char* date;
    long long q;
  };
  const std::vector<Raw> raws = {
      {"A", "B", "2013-01-05", 2}, {"A", "B", "2013-01-20", 1}, {"A", "B", "2013-02-05", 3},
      {"C", "D", "2013-01-09", 1}, {"C", "D", "2013-02-11", 2}, {"C", "D", "2013-02-15", 1},
  };
  std::string tickets = kTicketsHeader;
  for (const auto& r : raws)
    tickets += std::string(r.o) + "," + r.d + "," + r.date + ",FullSingle," +
               std::to_string(r.q) + ",26\n";
  IngestSummary summary;
  const Dataset ds = ingest(fixture_paths(dir, tickets), {}, &summary);

  // hand-count oracle over the fixture rows
  std::map<std::string, long long> expected;
  long long total = 0;
  for (const auto& r : raws) {
    expected[std::string(r.o) + r.d + std::string(r.date).substr(0, 7)] += r.q;
    total += r.q;
  }
  CHECK(ds.records.size() == expected.size());
  CHECK(ds.records.size() == 4);
  long long got_total = 0;
  for (const auto& rec : ds.records) got_total += rec.tickets;
  CHECK(got_total == total);
  CHECK(total == 10);

  for (const auto& rec : ds.records) {
    CHECK(rec.log_tickets == doctest::Approx(std::log(double(rec.tickets))).epsilon(1e-15));
    const Route& route = ds.route_of(rec);
    CHECK(route.zone == zone_of_distance(route.distance_km, ds.zone_table));
  }
  // records sorted by (origin, destination, year, month, category)
  for (std::size_t i = 1; i < ds.records.size(); ++i) {
    const auto key_of = [&](const MonthlyDemandRecord& r) {
      return std::make_tuple(ds.route_of(r).origin_id, ds.route_of(r).destination_id, r.year,
                             r.month, static_cast<int>(r.category));
    };
    CHECK(key_of(ds.records[i - 1]) < key_of(ds.records[i]));
  }
  // missing distances imputed with the sentinel and flagged
  const Station& gamma = ds.stations[static_cast<std::size_t>(ds.station_index.at("C"))];
  CHECK(gamma.missing_distances);
  CHECK(gamma.dist_settlement1_km == doctest::Approx(99.0));

  SUBCASE("same-key rows merge into one record") {
    long long ab_jan = 0;
    for (const auto& rec : ds.records)
      if (ds.route_of(rec).origin_id == "A" && rec.month == 1) ab_jan = rec.tickets;
    CHECK(ab_jan == 3);
  }
}

TEST_CASE("ingest edge cases and errors") {
  SUBCASE("empty tickets file") {
    const auto dir = fresh_dir("ingest_empty");
    IngestSummary summary;
    const Dataset ds = ingest(fixture_paths(dir, kTicketsHeader), {}, &summary);
    CHECK(ds.records.empty());
    CHECK(summary.warnings.size() == 1);
  }
  SUBCASE("malformed row reports the line number") {
    const auto dir = fresh_dir("ingest_malformed");
    const std::string tickets = std::string(kTicketsHeader) +
                                "A,B,2013-01-05,FullSingle,2,26\n" +
                                "A,B,2013-01-06,FullSingle,oops,26\n";
    CHECK_THROWS_WITH_AS(ingest(fixture_paths(dir, tickets)), doctest::Contains(":3"), RdError);
  }
  SUBCASE("unknown station") {
    const auto dir = fresh_dir("ingest_unknown");
    const std::string tickets = std::string(kTicketsHeader) + "A,Z,2013-01-05,FullSingle,2,26\n";
    CHECK_THROWS_WITH_AS(ingest(fixture_paths(dir, tickets)), doctest::Contains("'Z'"), RdError);
  }
  SUBCASE("duplicate station id") {
    const auto dir = fresh_dir("ingest_dup");
    auto paths = fixture_paths(dir, kTicketsHeader);
    std::string dup = kStationsCsv;
    dup += "A,AlphaAgain,Western,58.1,56.3,100,1,2,3,4,0,0,0\n";
    write_file(dir / "stations.csv", dup);
    CHECK_THROWS_WITH_AS(ingest(paths), doctest::Contains("duplicate station id"), RdError);
  }
  SUBCASE("stations from different directions cannot form a route") {
    const auto dir = fresh_dir("ingest_dirmix");
    const std::string tickets = std::string(kTicketsHeader) + "A,C,2013-01-05,FullSingle,2,26\n";
    CHECK_THROWS_WITH_AS(ingest(fixture_paths(dir, tickets)),
                         doctest::Contains("different directions"), RdError);
  }
  SUBCASE("bad date and bad quantity") {
    const auto dir = fresh_dir("ingest_baddate");
    const std::string tickets = std::string(kTicketsHeader) + "A,B,2013/01/05,FullSingle,2,26\n";
    CHECK_THROWS_AS(ingest(fixture_paths(dir, tickets)), RdError);
    const std::string zero_q = std::string(kTicketsHeader) + "A,B,2013-01-05,FullSingle,0,26\n";
    CHECK_THROWS_AS(ingest(fixture_paths(fresh_dir("ingest_zq"), zero_q)), RdError);
  }
}

TEST_CASE("share_growth_table reproduces published growth rates") {
  TinyWorld world;
  const int w1 = world.station("W1", Direction::Western, 1000, false, 58.0, 56.0);
  const int w2 = world.station("W2", Direction::Western, 1000, false, 58.0, 56.1);
  const int k1 = world.station("K1", Direction::Kungur, 1000, false, 57.9, 56.0);
  const int k2 = world.station("K2", Direction::Kungur, 1000, false, 57.9, 56.1);
  const int a1 = world.station("A1", Direction::Agglomeration, 1000, true, 58.0, 56.2);
  const int a2 = world.station("A2", Direction::Agglomeration, 1000, true, 58.0, 56.3);
  const int rw = world.route(w1, w2, 10);
  const int rk = world.route(k1, k2, 10);
  const int ra = world.route(a1, a2, 10);
  world.record(rw, 2013, 1, FareCategory::FullSingle, 514382, 26);
  world.record(rw, 2014, 1, FareCategory::FullSingle, 578336, 28);
  world.record(rk, 2013, 1, FareCategory::FullSingle, 242235, 26);
  world.record(rk, 2014, 1, FareCategory::FullSingle, 285495, 28);
  world.record(ra, 2013, 1, FareCategory::FullSingle, 385072, 26);
  world.record(ra, 2014, 1, FareCategory::FullSingle, 493979, 28);

  const auto table = share_growth_table(world.ds, Grouping::Direction);
  std::map<std::string, double> growth_2014;
  double share_sum = 0.0;
  for (const auto& row : table) {
    if (row.year == 2014) {
      REQUIRE(row.growth_pct.has_value());
      growth_2014[row.group] = *row.growth_pct;
      share_sum += row.share_pct;  // one row per group in 2014
    } else {
      CHECK_FALSE(row.growth_pct.has_value());
    }
  }
  CHECK(format_fixed(growth_2014.at("Western"), 1) == "12.4");
  CHECK(format_fixed(growth_2014.at("Kungur"), 1) == "17.9");
  CHECK(format_fixed(growth_2014.at("Agglomeration"), 1) == "28.3");
  CHECK(share_sum == doctest::Approx(100.0).epsilon(1e-9));

  SUBCASE("single-year dataset has no growth column") {
    TinyWorld single;
    const int s1 = single.station("S1", Direction::Western, 1000, false, 58.0, 56.0);
    const int s2 = single.station("S2", Direction::Western, 1000, false, 58.0, 56.1);
    const int r = single.route(s1, s2, 12);
    single.record(r, 2013, 1, FareCategory::FullSingle, 10, 26);
    single.record(r, 2013, 2, FareCategory::FullSingle, 20, 26);
    const auto rows = share_growth_table(single.ds, Grouping::Zone);
    double total_share = 0.0;
    for (const auto& row : rows) {
      CHECK_FALSE(row.growth_pct.has_value());
      total_share += row.share_pct;
    }
    CHECK(total_share == doctest::Approx(100.0).epsilon(1e-9));
  }
}

TEST_CASE("share sums hold for every grouping on generated data") {
  SynthConfig cfg = two_segment_preset();
  cfg.target_records = 1500;
  const auto [ds, truth] = generate(cfg);
  for (const Grouping g : {Grouping::Direction, Grouping::Zone, Grouping::SettlementPair}) {
    const auto table = share_growth_table(ds, g);
    std::map<std::string, double> per_group;
    for (const auto& row : table) per_group[row.group] = row.share_pct;
    double sum = 0.0;
    for (const auto& [group, share] : per_group) sum += share;
    CHECK(sum == doctest::Approx(100.0).epsilon(1e-9));
  }
}

TEST_CASE("design matrix layouts per specification") {
  SUBCASE("spec I is intercept plus log fare") {
    TinyWorld world;
    const int s1 = world.station("S1", Direction::Western, 1000, false, 58.0, 56.0);
    const int s2 = world.station("S2", Direction::Western, 1000, false, 58.0, 56.1);
    const int r = world.route(s1, s2, 12);
    world.record(r, 2013, 1, FareCategory::FullSingle, 10, 26);
    world.record(r, 2013, 1, FareCategory::FullReturn, 12, 23);
    const DesignMatrix d = build_design_matrix(world.ds, Specification::I);
    CHECK(d.column_names == std::vector<std::string>{"(intercept)", "log_real_fare"});
    CHECK(d.X.cols() == 2);
  }

  SUBCASE("degenerate spec II collapses to two columns") {
    TinyWorld world;
    const int s1 = world.station("S1", Direction::Western, 1000, false, 58.0, 56.0);
    const int s2 = world.station("S2", Direction::Western, 1000, false, 58.0, 56.1);
    const int r = world.route(s1, s2, 12);
    world.record(r, 2013, 1, FareCategory::FullSingle, 10, 26);
    world.record(r, 2013, 1, FareCategory::FullReturn, 12, 23);
    const DesignMatrix d = build_design_matrix(world.ds, Specification::II);
    CHECK(d.X.cols() == 2);  // one year, one month, one zone: every dummy drops
  }

  SUBCASE("spec IV column count follows the block formula") {
    SynthConfig cfg = paper_calibrated_preset();
    cfg.target_records = 3000;
    const auto [ds, truth] = generate(cfg);
    const DesignMatrix d = build_design_matrix(ds, Specification::IV);

    // independent recount of observed levels
    std::set<int> years, months, zones, dirs, from_sizes, to_sizes;
    bool any_from_missing = false, any_to_missing = false;
    bool any_from_summer = false, any_to_summer = false;
    bool any_from_perm = false, any_to_perm = false;
    for (const auto& rec : ds.records) {
      years.insert(rec.year);
      months.insert(rec.month);
      zones.insert(ds.route_of(rec).zone);
      dirs.insert(static_cast<int>(ds.route_of(rec).direction));
      const Station& from = ds.origin_of(rec);
      const Station& to = ds.destination_of(rec);
      from_sizes.insert(
          static_cast<int>(classify_settlement(from.population_5km, from.population_5km > 0)));
      to_sizes.insert(
          static_cast<int>(classify_settlement(to.population_5km, to.population_5km > 0)));
      any_from_missing |= from.missing_distances;
      any_to_missing |= to.missing_distances;
      any_from_summer |= from.summer_gardens;
      any_to_summer |= to.summer_gardens;
      any_from_perm |= from.is_perm;
      any_to_perm |= to.is_perm;
    }
    std::size_t expected = 2;  // intercept + log fare
    expected += years.size() - 1 + months.size() - 1 + zones.size() - 1 + dirs.size() - 1;
    expected += 1;  // distance_km
    expected += from_sizes.size() - 1 + to_sizes.size() - 1;
    expected += 8;  // four distance fields per end
    expected += (any_from_summer ? 1 : 0) + (any_to_summer ? 1 : 0);
    expected += (any_from_perm ? 1 : 0) + (any_to_perm ? 1 : 0);
    expected += 4;  // lat/lon both ends
    expected += (any_from_missing ? 1 : 0) + (any_to_missing ? 1 : 0);
    CHECK(static_cast<std::size_t>(d.X.cols()) == expected);

    for (Eigen::Index c = 0; c < d.X.cols(); ++c)
      CHECK(d.X.col(c).cwiseAbs().maxCoeff() > 0.0);

    const DesignMatrix d2 = build_design_matrix(ds, Specification::IV);
    CHECK(d.column_names == d2.column_names);
    CHECK((d.X - d2.X).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("dataset archive round trip") {
  SynthConfig cfg = confounded_preset();
  cfg.target_records = 600;
  const auto [ds, truth] = generate(cfg);
  const auto dir = fresh_dir("archive");
  save_dataset(ds, (dir / "dataset.json").string());
  const Dataset loaded = load_dataset((dir / "dataset.json").string());
  CHECK(dataset_fingerprint(loaded) == dataset_fingerprint(ds));
  CHECK(loaded.records.size() == ds.records.size());
}
