#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace raildemand {

enum class Direction {
  Western,
  Kungur,
  GornozavodskChusovoy,
  GornozavodskKizel,
  GornozavodskBranch,
  Agglomeration,
};
inline constexpr int kDirectionCount = 6;
const char* direction_name(Direction d);
Direction parse_direction(const std::string& s);

enum class FareCategory {
  FullSingle,
  FullReturn,
  Children,
  PpkRrEmployee,
  FederalDiscount,
  RegionalDiscount,
  Season,
  Student,
  Military,
};
inline constexpr int kFareCategoryCount = 9;
const char* fare_category_name(FareCategory c);
FareCategory parse_fare_category(const std::string& s);

// Discount multipliers relative to the full single fare. FullSingle is 1 and
// Children is 0.2 by construction; the rest are configurable defaults.
std::map<FareCategory, double> default_category_multipliers();

enum class SizeClass { None, Small, Middle, Large, Huge };
inline constexpr int kSizeClassCount = 5;
const char* size_class_name(SizeClass s);

struct Station {
  std::string id;
  std::string name;
  Direction direction = Direction::Western;
  double lat = 0.0;
  double lon = 0.0;
  double population_5km = 0.0;
  double dist_settlement1_km = 0.0;
  double dist_settlement2_km = 0.0;
  double dist_bus_km = 0.0;
  double dist_highway_km = 0.0;
  bool summer_gardens = false;
  bool is_perm = false;
  bool is_agglomeration = false;
  // true when any distance field was imputed (sentinel 99 km)
  bool missing_distances = false;
};

struct Route {
  int origin = -1;       // index into Dataset::stations
  int destination = -1;  // index into Dataset::stations
  std::string origin_id;
  std::string destination_id;
  double distance_km = 0.0;
  int zone = 0;
  Direction direction = Direction::Western;
};

struct MonthlyDemandRecord {
  int route = -1;  // index into Dataset::routes
  int year = 0;
  int month = 0;
  FareCategory category = FareCategory::FullSingle;
  long long tickets = 0;
  double log_tickets = 0.0;
  double nominal_fare = 0.0;
  double real_fare = 0.0;
  double log_real_fare = 0.0;
};

struct CpiSeries {
  // key: year * 100 + month
  std::map<int, double> values;
  int base_year = 0;
  int base_month = 0;

  static int key(int year, int month) { return year * 100 + month; }
  bool has(int year, int month) const { return values.count(key(year, month)) > 0; }
  double at(int year, int month) const;  // throws naming the period when absent
  double base_value() const { return at(base_year, base_month); }
};

struct TariffTable {
  // (year, zone) -> full single fare
  std::map<std::pair<int, int>, double> full_fare;
  bool has(int year, int zone) const { return full_fare.count({year, zone}) > 0; }
  double at(int year, int zone) const;
};

struct Dataset {
  std::vector<Station> stations;
  std::vector<Route> routes;
  std::vector<MonthlyDemandRecord> records;
  std::vector<double> zone_table;  // strictly increasing upper bounds, km
  CpiSeries cpi;
  TariffTable tariffs;
  std::unordered_map<std::string, int> station_index;

  const Station& origin_of(const MonthlyDemandRecord& r) const {
    return stations[static_cast<std::size_t>(routes[static_cast<std::size_t>(r.route)].origin)];
  }
  const Station& destination_of(const MonthlyDemandRecord& r) const {
    return stations[static_cast<std::size_t>(
        routes[static_cast<std::size_t>(r.route)].destination)];
  }
  const Route& route_of(const MonthlyDemandRecord& r) const {
    return routes[static_cast<std::size_t>(r.route)];
  }
};

// "origin>destination|YYYY-MM|category" — stable identifier used by reports
// and ground-truth files.
std::string record_key(const Dataset& ds, const MonthlyDemandRecord& r);

// Order-sensitive content hash over stations, zones, CPI and records; used to
// tie saved forests to the dataset they were trained on.
std::uint64_t dataset_fingerprint(const Dataset& ds);

// Great-circle distance in kilometers; the project-wide definition of route
// distance (documented in the data-format reference).
double haversine_km(double lat1, double lon1, double lat2, double lon2);

}  // namespace raildemand
