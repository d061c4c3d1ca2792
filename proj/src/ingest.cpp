#include "raildemand/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "raildemand/common.hpp"
#include "raildemand/csv.hpp"

using nlohmann::json;

namespace raildemand {

namespace {
constexpr double kMissingDistanceSentinelKm = 99.0;

bool parse_bool_field(const CsvTable& t, std::size_t row, int col, const std::string& what) {
  const long long v = parse_int_field(t, row, col, what);
  if (v != 0 && v != 1) {
    std::ostringstream msg;
    msg << t.path << ":" << t.line_numbers[row] << ": " << what << " must be 0 or 1";
    fail("csv", msg.str());
  }
  return v == 1;
}

// distance fields may be empty; empty -> sentinel + missing flag
double parse_distance_or_missing(const CsvTable& t, std::size_t row, int col,
                                 const std::string& what, bool& missing) {
  const std::string& s = t.rows[row][static_cast<std::size_t>(col)];
  if (s.empty()) {
    missing = true;
    return kMissingDistanceSentinelKm;
  }
  const double v = parse_double_field(t, row, col, what);
  if (v < 0) fail("ingest", t.path + ": negative distance for " + what);
  return v;
}
}  // namespace

double deflate(double nominal_fare, int year, int month, const CpiSeries& cpi,
               std::pair<int, int> base_period) {
  const double base = cpi.at(base_period.first, base_period.second);
  const double current = cpi.at(year, month);
  if (base <= 0 || current <= 0) fail("cpi", "CPI values must be positive");
  return nominal_fare * base / current;
}

SizeClass classify_settlement(double population_within_5km, bool settlement_exists) {
  if (population_within_5km < 0) fail("ingest", "population must be nonnegative");
  if (!settlement_exists) return SizeClass::None;
  if (population_within_5km <= 100) return SizeClass::Small;
  if (population_within_5km <= 1000) return SizeClass::Middle;
  if (population_within_5km <= 10000) return SizeClass::Large;
  return SizeClass::Huge;
}

int zone_of_distance(double distance_km, std::span<const double> zone_table) {
  if (distance_km <= 0) fail("zone", "distance must be positive");
  if (zone_table.empty()) fail("zone", "zone table is empty");
  for (std::size_t i = 0; i + 1 < zone_table.size(); ++i)
    if (zone_table[i] >= zone_table[i + 1]) fail("zone", "zone table must be strictly increasing");
  for (std::size_t i = 0; i < zone_table.size(); ++i)
    if (distance_km <= zone_table[i]) return static_cast<int>(i) + 1;
  std::ostringstream msg;
  msg << "distance " << distance_km << " km exceeds the last zone breakpoint "
      << zone_table.back() << " km";
  fail("zone", msg.str());
}

Dataset ingest(const IngestPaths& paths, const IngestOptions& options, IngestSummary* summary) {
  Dataset ds;
  IngestSummary local;
  IngestSummary& sum = summary ? *summary : local;

  // stations
  {
    const CsvTable t = read_csv(paths.stations);
    const int c_id = t.column("id"), c_name = t.column("name"), c_dir = t.column("direction");
    const int c_lat = t.column("lat"), c_lon = t.column("lon");
    const int c_pop = t.column("population_5km");
    const int c_d1 = t.column("dist_settlement1_km"), c_d2 = t.column("dist_settlement2_km");
    const int c_bus = t.column("dist_bus_km"), c_hwy = t.column("dist_highway_km");
    const int c_sg = t.column("summer_gardens"), c_perm = t.column("is_perm");
    const int c_agg = t.column("is_agglomeration");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      Station s;
      s.id = t.rows[r][static_cast<std::size_t>(c_id)];
      if (s.id.empty()) fail("ingest", paths.stations + ": empty station id");
      if (ds.station_index.count(s.id)) {
        std::ostringstream msg;
        msg << paths.stations << ":" << t.line_numbers[r] << ": duplicate station id '" << s.id
            << "'";
        fail("ingest", msg.str());
      }
      s.name = t.rows[r][static_cast<std::size_t>(c_name)];
      s.direction = parse_direction(t.rows[r][static_cast<std::size_t>(c_dir)]);
      s.lat = parse_double_field(t, r, c_lat, "lat");
      s.lon = parse_double_field(t, r, c_lon, "lon");
      s.population_5km = parse_double_field(t, r, c_pop, "population_5km");
      if (s.population_5km < 0) fail("ingest", paths.stations + ": negative population_5km");
      bool missing = false;
      s.dist_settlement1_km = parse_distance_or_missing(t, r, c_d1, "dist_settlement1_km", missing);
      s.dist_settlement2_km = parse_distance_or_missing(t, r, c_d2, "dist_settlement2_km", missing);
      s.dist_bus_km = parse_distance_or_missing(t, r, c_bus, "dist_bus_km", missing);
      s.dist_highway_km = parse_distance_or_missing(t, r, c_hwy, "dist_highway_km", missing);
      s.missing_distances = missing;
      s.summer_gardens = parse_bool_field(t, r, c_sg, "summer_gardens");
      s.is_perm = parse_bool_field(t, r, c_perm, "is_perm");
      s.is_agglomeration = parse_bool_field(t, r, c_agg, "is_agglomeration");
      ds.station_index[s.id] = static_cast<int>(ds.stations.size());
      ds.stations.push_back(std::move(s));
    }
    sum.stations = ds.stations.size();
  }

  // zone table
  {
    const CsvTable t = read_csv(paths.zones);
    const int c_zone = t.column("zone"), c_upper = t.column("upper_km");
    std::map<int, double> by_zone;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const int zone = static_cast<int>(parse_int_field(t, r, c_zone, "zone"));
      by_zone[zone] = parse_double_field(t, r, c_upper, "upper_km");
    }
    int expect = 1;
    for (const auto& [zone, upper] : by_zone) {
      if (zone != expect++) fail("ingest", paths.zones + ": zones must be contiguous from 1");
      if (!ds.zone_table.empty() && upper <= ds.zone_table.back())
        fail("ingest", paths.zones + ": zone breakpoints must be strictly increasing");
      ds.zone_table.push_back(upper);
    }
    if (ds.zone_table.empty()) fail("ingest", paths.zones + ": no zones defined");
  }

  // CPI
  {
    const CsvTable t = read_csv(paths.cpi);
    const int c_y = t.column("year"), c_m = t.column("month"), c_i = t.column("index");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const int y = static_cast<int>(parse_int_field(t, r, c_y, "year"));
      const int m = static_cast<int>(parse_int_field(t, r, c_m, "month"));
      if (m < 1 || m > 12) fail("ingest", paths.cpi + ": month out of range");
      const double v = parse_double_field(t, r, c_i, "index");
      if (v <= 0) fail("ingest", paths.cpi + ": CPI index must be positive");
      ds.cpi.values[CpiSeries::key(y, m)] = v;
    }
    if (ds.cpi.values.empty()) fail("ingest", paths.cpi + ": empty CPI series");
    if (options.cpi_base) {
      ds.cpi.base_year = options.cpi_base->first;
      ds.cpi.base_month = options.cpi_base->second;
      if (!ds.cpi.has(ds.cpi.base_year, ds.cpi.base_month))
        fail("ingest", paths.cpi + ": requested base period not present in CPI series");
    } else {
      const int first = ds.cpi.values.begin()->first;
      ds.cpi.base_year = first / 100;
      ds.cpi.base_month = first % 100;
    }
  }

  // tariffs
  {
    const CsvTable t = read_csv(paths.tariffs);
    const int c_y = t.column("year"), c_z = t.column("zone"), c_f = t.column("full_fare");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const int y = static_cast<int>(parse_int_field(t, r, c_y, "year"));
      const int z = static_cast<int>(parse_int_field(t, r, c_z, "zone"));
      const double f = parse_double_field(t, r, c_f, "full_fare");
      if (f <= 0) fail("ingest", paths.tariffs + ": full_fare must be positive");
      ds.tariffs.full_fare[{y, z}] = f;
    }
  }

  // tickets: aggregate to (route, year, month, category)
  {
    const CsvTable t = read_csv(paths.tickets);
    const int c_o = t.column("origin_id"), c_d = t.column("destination_id");
    const int c_date = t.column("date"), c_cat = t.column("fare_category");
    const int c_q = t.column("quantity"), c_f = t.column("nominal_fare");
    sum.raw_ticket_rows = t.rows.size();

    struct Cell {
      long long tickets = 0;
      double fare_weighted = 0.0;  // quantity-weighted nominal fare
    };
    // key: (origin_id, destination_id, year, month, category)
    std::map<std::tuple<std::string, std::string, int, int, int>, Cell> cells;
    std::map<std::pair<std::string, std::string>, int> route_index;

    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const std::string& origin = t.rows[r][static_cast<std::size_t>(c_o)];
      const std::string& dest = t.rows[r][static_cast<std::size_t>(c_d)];
      auto check_station = [&](const std::string& id) -> int {
        auto it = ds.station_index.find(id);
        if (it == ds.station_index.end()) {
          std::ostringstream msg;
          msg << paths.tickets << ":" << t.line_numbers[r] << ": unknown station '" << id << "'";
          fail("ingest", msg.str());
        }
        return it->second;
      };
      const int oi = check_station(origin);
      const int di = check_station(dest);
      if (oi == di) {
        std::ostringstream msg;
        msg << paths.tickets << ":" << t.line_numbers[r]
            << ": origin and destination must differ";
        fail("ingest", msg.str());
      }
      const std::string& date = t.rows[r][static_cast<std::size_t>(c_date)];
      int y = 0, m = 0, d = 0;
      if (std::sscanf(date.c_str(), "%d-%d-%d", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
          d > 31) {
        std::ostringstream msg;
        msg << paths.tickets << ":" << t.line_numbers[r] << ": malformed date '" << date
            << "' (expected YYYY-MM-DD)";
        fail("ingest", msg.str());
      }
      FareCategory cat;
      try {
        cat = parse_fare_category(t.rows[r][static_cast<std::size_t>(c_cat)]);
      } catch (const RdError& e) {
        std::ostringstream msg;
        msg << paths.tickets << ":" << t.line_numbers[r] << ": " << e.what();
        fail("ingest", msg.str());
      }
      const long long q = parse_int_field(t, r, c_q, "quantity");
      if (q < 1) {
        std::ostringstream msg;
        msg << paths.tickets << ":" << t.line_numbers[r] << ": quantity must be >= 1";
        fail("ingest", msg.str());
      }
      const double fare = parse_double_field(t, r, c_f, "nominal_fare");
      if (fare <= 0) {
        std::ostringstream msg;
        msg << paths.tickets << ":" << t.line_numbers[r] << ": nominal_fare must be positive";
        fail("ingest", msg.str());
      }
      auto& cell = cells[{origin, dest, y, m, static_cast<int>(cat)}];
      cell.tickets += q;
      cell.fare_weighted += fare * static_cast<double>(q);

      if (!route_index.count({origin, dest})) {
        Route route;
        route.origin = oi;
        route.destination = di;
        route.origin_id = origin;
        route.destination_id = dest;
        const Station& so = ds.stations[static_cast<std::size_t>(oi)];
        const Station& sd = ds.stations[static_cast<std::size_t>(di)];
        if (so.direction != sd.direction) {
          std::ostringstream msg;
          msg << paths.tickets << ":" << t.line_numbers[r] << ": stations '" << origin << "' and '"
              << dest << "' belong to different directions";
          fail("ingest", msg.str());
        }
        route.direction = so.direction;
        route.distance_km = haversine_km(so.lat, so.lon, sd.lat, sd.lon);
        route.zone = zone_of_distance(route.distance_km, ds.zone_table);
        route_index[{origin, dest}] = static_cast<int>(ds.routes.size());
        ds.routes.push_back(std::move(route));
      }
    }

    // cells map iterates in key order, which is the required record order
    const std::pair<int, int> base{ds.cpi.base_year, ds.cpi.base_month};
    for (const auto& [key, cell] : cells) {
      const auto& [origin, dest, y, m, cat] = key;
      MonthlyDemandRecord rec;
      rec.route = route_index.at({origin, dest});
      rec.year = y;
      rec.month = m;
      rec.category = static_cast<FareCategory>(cat);
      rec.tickets = cell.tickets;
      rec.log_tickets = std::log(static_cast<double>(cell.tickets));
      rec.nominal_fare = cell.fare_weighted / static_cast<double>(cell.tickets);
      rec.real_fare = deflate(rec.nominal_fare, y, m, ds.cpi, base);
      rec.log_real_fare = std::log(rec.real_fare);
      ds.records.push_back(rec);
    }
    if (ds.records.empty()) sum.warnings.push_back("tickets file produced no records");
    sum.records = ds.records.size();
    sum.routes = ds.routes.size();
  }

  return ds;
}

Grouping parse_grouping(const std::string& s) {
  if (s == "direction") return Grouping::Direction;
  if (s == "zone") return Grouping::Zone;
  if (s == "settlement_pair") return Grouping::SettlementPair;
  fail("args", "unknown grouping '" + s + "' (valid: direction, zone, settlement_pair)");
}

const char* grouping_name(Grouping g) {
  switch (g) {
    case Grouping::Direction: return "direction";
    case Grouping::Zone: return "zone";
    case Grouping::SettlementPair: return "settlement_pair";
  }
  return "?";
}

std::vector<ShareGrowthRow> share_growth_table(const Dataset& ds, Grouping grouping) {
  auto group_of = [&](const MonthlyDemandRecord& r) -> std::string {
    switch (grouping) {
      case Grouping::Direction:
        return direction_name(ds.route_of(r).direction);
      case Grouping::Zone: {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "zone %02d", ds.route_of(r).zone);
        return buf;
      }
      case Grouping::SettlementPair: {
        const Station& from = ds.origin_of(r);
        const Station& to = ds.destination_of(r);
        const SizeClass a =
            classify_settlement(from.population_5km, from.population_5km > 0);
        const SizeClass b = classify_settlement(to.population_5km, to.population_5km > 0);
        return std::string(size_class_name(a)) + ">" + size_class_name(b);
      }
    }
    return "?";
  };

  std::map<std::string, std::map<int, long long>> counts;
  long long grand_total = 0;
  for (const auto& r : ds.records) {
    counts[group_of(r)][r.year] += r.tickets;
    grand_total += r.tickets;
  }

  std::vector<ShareGrowthRow> out;
  for (const auto& [group, by_year] : counts) {
    long long group_total = 0;
    for (const auto& [y, c] : by_year) group_total += c;
    std::optional<long long> prev;
    for (const auto& [year, count] : by_year) {
      ShareGrowthRow row;
      row.group = group;
      row.year = year;
      row.count = count;
      if (prev && *prev > 0)
        row.growth_pct = 100.0 * (static_cast<double>(count) / static_cast<double>(*prev) - 1.0);
      row.share_pct =
          grand_total > 0
              ? 100.0 * static_cast<double>(group_total) / static_cast<double>(grand_total)
              : 0.0;
      out.push_back(std::move(row));
      prev = count;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// dataset archive

namespace {
json station_to_json(const Station& s) {
  return json{{"id", s.id},
              {"name", s.name},
              {"direction", direction_name(s.direction)},
              {"lat", s.lat},
              {"lon", s.lon},
              {"population_5km", s.population_5km},
              {"dist_settlement1_km", s.dist_settlement1_km},
              {"dist_settlement2_km", s.dist_settlement2_km},
              {"dist_bus_km", s.dist_bus_km},
              {"dist_highway_km", s.dist_highway_km},
              {"summer_gardens", s.summer_gardens},
              {"is_perm", s.is_perm},
              {"is_agglomeration", s.is_agglomeration},
              {"missing_distances", s.missing_distances}};
}

Station station_from_json(const json& j) {
  Station s;
  s.id = j.at("id").get<std::string>();
  s.name = j.at("name").get<std::string>();
  s.direction = parse_direction(j.at("direction").get<std::string>());
  s.lat = j.at("lat").get<double>();
  s.lon = j.at("lon").get<double>();
  s.population_5km = j.at("population_5km").get<double>();
  s.dist_settlement1_km = j.at("dist_settlement1_km").get<double>();
  s.dist_settlement2_km = j.at("dist_settlement2_km").get<double>();
  s.dist_bus_km = j.at("dist_bus_km").get<double>();
  s.dist_highway_km = j.at("dist_highway_km").get<double>();
  s.summer_gardens = j.at("summer_gardens").get<bool>();
  s.is_perm = j.at("is_perm").get<bool>();
  s.is_agglomeration = j.at("is_agglomeration").get<bool>();
  s.missing_distances = j.at("missing_distances").get<bool>();
  return s;
}
}  // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
  json j;
  j["format"] = "raildemand-dataset-v1";
  j["stations"] = json::array();
  for (const auto& s : ds.stations) j["stations"].push_back(station_to_json(s));
  j["zone_table"] = ds.zone_table;
  j["cpi"] = json{{"base_year", ds.cpi.base_year},
                  {"base_month", ds.cpi.base_month},
                  {"entries", json::array()}};
  for (const auto& [k, v] : ds.cpi.values)
    j["cpi"]["entries"].push_back(json::array({k / 100, k % 100, v}));
  j["tariffs"] = json::array();
  for (const auto& [k, v] : ds.tariffs.full_fare)
    j["tariffs"].push_back(json::array({k.first, k.second, v}));
  j["routes"] = json::array();
  for (const auto& r : ds.routes)
    j["routes"].push_back(json::array({r.origin_id, r.destination_id, r.distance_km, r.zone,
                                       std::string(direction_name(r.direction))}));
  j["records"] = json::array();
  for (const auto& r : ds.records)
    j["records"].push_back(json::array({r.route, r.year, r.month, static_cast<int>(r.category),
                                        r.tickets, r.log_tickets, r.nominal_fare, r.real_fare,
                                        r.log_real_fare}));
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("io", "cannot open " + path + " for writing");
  out << j.dump();
  if (!out) fail("io", "write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("io", "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail("archive", path + ": " + e.what());
  }
  if (!j.contains("format") || j["format"] != "raildemand-dataset-v1")
    fail("archive", path + ": not a raildemand dataset archive");

  Dataset ds;
  for (const auto& js : j.at("stations")) {
    Station s = station_from_json(js);
    ds.station_index[s.id] = static_cast<int>(ds.stations.size());
    ds.stations.push_back(std::move(s));
  }
  ds.zone_table = j.at("zone_table").get<std::vector<double>>();
  ds.cpi.base_year = j.at("cpi").at("base_year").get<int>();
  ds.cpi.base_month = j.at("cpi").at("base_month").get<int>();
  for (const auto& e : j.at("cpi").at("entries"))
    ds.cpi.values[CpiSeries::key(e[0].get<int>(), e[1].get<int>())] = e[2].get<double>();
  for (const auto& e : j.at("tariffs"))
    ds.tariffs.full_fare[{e[0].get<int>(), e[1].get<int>()}] = e[2].get<double>();
  for (const auto& e : j.at("routes")) {
    Route r;
    r.origin_id = e[0].get<std::string>();
    r.destination_id = e[1].get<std::string>();
    auto io = ds.station_index.find(r.origin_id);
    auto id = ds.station_index.find(r.destination_id);
    if (io == ds.station_index.end() || id == ds.station_index.end())
      fail("archive", path + ": route references unknown station");
    r.origin = io->second;
    r.destination = id->second;
    r.distance_km = e[2].get<double>();
    r.zone = e[3].get<int>();
    r.direction = parse_direction(e[4].get<std::string>());
    ds.routes.push_back(std::move(r));
  }
  for (const auto& e : j.at("records")) {
    MonthlyDemandRecord r;
    r.route = e[0].get<int>();
    r.year = e[1].get<int>();
    r.month = e[2].get<int>();
    r.category = static_cast<FareCategory>(e[3].get<int>());
    r.tickets = e[4].get<long long>();
    r.log_tickets = e[5].get<double>();
    r.nominal_fare = e[6].get<double>();
    r.real_fare = e[7].get<double>();
    r.log_real_fare = e[8].get<double>();
    if (r.route < 0 || r.route >= static_cast<int>(ds.routes.size()))
      fail("archive", path + ": record references unknown route");
    ds.records.push_back(r);
  }
  return ds;
}

}  // namespace raildemand
