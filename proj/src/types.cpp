#include "raildemand/types.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "raildemand/common.hpp"

namespace raildemand {

namespace {
constexpr const char* kDirectionNames[kDirectionCount] = {
    "Western",           "Kungur",
    "GornozavodskChusovoy", "GornozavodskKizel",
    "GornozavodskBranch", "Agglomeration",
};
constexpr const char* kFareCategoryNames[kFareCategoryCount] = {
    "FullSingle",      "FullReturn",       "Children",
    "PpkRrEmployee",   "FederalDiscount",  "RegionalDiscount",
    "Season",          "Student",          "Military",
};
constexpr const char* kSizeClassNames[kSizeClassCount] = {
    "None", "Small", "Middle", "Large", "Huge",
};
}  // namespace

const char* direction_name(Direction d) { return kDirectionNames[static_cast<int>(d)]; }

Direction parse_direction(const std::string& s) {
  for (int i = 0; i < kDirectionCount; ++i)
    if (s == kDirectionNames[i]) return static_cast<Direction>(i);
  fail("parse", "unknown direction '" + s + "'");
}

const char* fare_category_name(FareCategory c) { return kFareCategoryNames[static_cast<int>(c)]; }

FareCategory parse_fare_category(const std::string& s) {
  for (int i = 0; i < kFareCategoryCount; ++i)
    if (s == kFareCategoryNames[i]) return static_cast<FareCategory>(i);
  fail("parse", "unknown fare category '" + s + "'");
}

std::map<FareCategory, double> default_category_multipliers() {
  return {
      {FareCategory::FullSingle, 1.0},   {FareCategory::FullReturn, 0.9},
      {FareCategory::Children, 0.2},     {FareCategory::PpkRrEmployee, 0.1},
      {FareCategory::FederalDiscount, 0.5}, {FareCategory::RegionalDiscount, 0.5},
      {FareCategory::Season, 0.6},       {FareCategory::Student, 0.5},
      {FareCategory::Military, 0.5},
  };
}

const char* size_class_name(SizeClass s) { return kSizeClassNames[static_cast<int>(s)]; }

double CpiSeries::at(int year, int month) const {
  auto it = values.find(key(year, month));
  if (it == values.end()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
    fail("cpi", std::string("CPI entry missing for period ") + buf);
  }
  return it->second;
}

double TariffTable::at(int year, int zone) const {
  auto it = full_fare.find({year, zone});
  if (it == full_fare.end()) {
    std::ostringstream msg;
    msg << "tariff missing for year " << year << ", zone " << zone;
    fail("tariff", msg.str());
  }
  return it->second;
}

std::string record_key(const Dataset& ds, const MonthlyDemandRecord& r) {
  const Route& route = ds.route_of(r);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", r.year, r.month);
  return route.origin_id + ">" + route.destination_id + "|" + buf + "|" +
         fare_category_name(r.category);
}

namespace {
void mix(std::uint64_t& h, const void* data, std::size_t size) { h = fnv1a64(data, size, h); }
void mix_d(std::uint64_t& h, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  mix(h, &bits, sizeof(bits));
}
void mix_i(std::uint64_t& h, long long v) { mix(h, &v, sizeof(v)); }
void mix_s(std::uint64_t& h, const std::string& s) { mix(h, s.data(), s.size()); }
}  // namespace

std::uint64_t dataset_fingerprint(const Dataset& ds) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& s : ds.stations) {
    mix_s(h, s.id);
    mix_s(h, s.name);
    mix_i(h, static_cast<int>(s.direction));
    mix_d(h, s.lat);
    mix_d(h, s.lon);
    mix_d(h, s.population_5km);
    mix_d(h, s.dist_settlement1_km);
    mix_d(h, s.dist_settlement2_km);
    mix_d(h, s.dist_bus_km);
    mix_d(h, s.dist_highway_km);
    mix_i(h, s.summer_gardens);
    mix_i(h, s.is_perm);
    mix_i(h, s.is_agglomeration);
    mix_i(h, s.missing_distances);
  }
  for (double z : ds.zone_table) mix_d(h, z);
  mix_i(h, ds.cpi.base_year * 100 + ds.cpi.base_month);
  for (const auto& [k, v] : ds.cpi.values) {
    mix_i(h, k);
    mix_d(h, v);
  }
  for (const auto& [k, v] : ds.tariffs.full_fare) {
    mix_i(h, k.first * 1000 + k.second);
    mix_d(h, v);
  }
  for (const auto& r : ds.records) {
    const Route& route = ds.routes[static_cast<std::size_t>(r.route)];
    mix_s(h, route.origin_id);
    mix_s(h, route.destination_id);
    mix_i(h, r.year * 100 + r.month);
    mix_i(h, static_cast<int>(r.category));
    mix_i(h, r.tickets);
    mix_d(h, r.log_tickets);
    mix_d(h, r.nominal_fare);
    mix_d(h, r.real_fare);
  }
  return h;
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kEarthRadiusKm = 6371.0088;
  constexpr double kDeg = 0.017453292519943295;
  const double phi1 = lat1 * kDeg, phi2 = lat2 * kDeg;
  const double dphi = (lat2 - lat1) * kDeg;
  const double dlam = (lon2 - lon1) * kDeg;
  const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) * std::sin(dlam / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

}  // namespace raildemand
