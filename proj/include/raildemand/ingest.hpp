#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "raildemand/types.hpp"

namespace raildemand {

struct IngestPaths {
  std::string tickets;
  std::string stations;
  std::string tariffs;
  std::string cpi;
  std::string zones;
};

struct IngestOptions {
  // Deflation base period; defaults to the earliest period in the CPI file.
  std::optional<std::pair<int, int>> cpi_base;
};

struct IngestSummary {
  std::size_t raw_ticket_rows = 0;
  std::size_t records = 0;
  std::size_t routes = 0;
  std::size_t stations = 0;
  std::vector<std::string> warnings;
};

// Reads the five CSV inputs, aggregates ticket rows to
// (route, year, month, fare category) cells and returns an immutable Dataset.
// Records are sorted by (origin, destination, year, month, category).
Dataset ingest(const IngestPaths& paths, const IngestOptions& options = {},
               IngestSummary* summary = nullptr);

// real = nominal * cpi(base) / cpi(period)
double deflate(double nominal_fare, int year, int month, const CpiSeries& cpi,
               std::pair<int, int> base_period);

// Settlement size classes use lower-exclusive/upper-inclusive intervals:
// Small (0,100], Middle (100,1000], Large (1000,10000], Huge (10000,inf).
SizeClass classify_settlement(double population_within_5km, bool settlement_exists);

// 1-based index of the first breakpoint >= distance (upper-inclusive).
// Throws when the distance exceeds the last breakpoint.
int zone_of_distance(double distance_km, std::span<const double> zone_table);

enum class Grouping { Direction, Zone, SettlementPair };
Grouping parse_grouping(const std::string& s);
const char* grouping_name(Grouping g);

struct ShareGrowthRow {
  std::string group;
  int year = 0;
  long long count = 0;
  std::optional<double> growth_pct;  // empty for each group's first year
  double share_pct = 0.0;            // group total over grand total, all years
};

// Ticket counts, year-over-year growth and overall shares per group.
std::vector<ShareGrowthRow> share_growth_table(const Dataset& ds, Grouping grouping);

// Dataset archive (single JSON file).
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace raildemand
