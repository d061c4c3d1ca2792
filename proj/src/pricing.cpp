#include "raildemand/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "raildemand/common.hpp"
#include "raildemand/csv.hpp"
#include "raildemand/ingest.hpp"

namespace raildemand {

double TariffSchedule::fare(int year, int zone) const {
  if (full_fare.empty()) fail("schedule", "empty tariff schedule");
  auto yit = full_fare.find(year);
  if (yit == full_fare.end()) {
    if (full_fare.size() == 1)
      yit = full_fare.begin();  // single-year schedules apply to every record
    else {
      std::ostringstream msg;
      msg << "schedule has no fares for year " << year;
      fail("schedule", msg.str());
    }
  }
  auto zit = yit->second.find(zone);
  if (zit == yit->second.end()) {
    std::ostringstream msg;
    msg << "schedule has no fare for zone " << zone << " (year " << year << ")";
    fail("schedule", msg.str());
  }
  return zit->second;
}

std::optional<double> TariffSchedule::bound(int zone) const {
  auto it = rst_upper_bound.find(zone);
  if (it == rst_upper_bound.end()) return std::nullopt;
  return it->second;
}

TariffSchedule load_schedule(const std::string& tariffs_csv) {
  const CsvTable t = read_csv(tariffs_csv);
  const int c_y = t.column("year"), c_z = t.column("zone"), c_f = t.column("full_fare");
  TariffSchedule schedule;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int y = static_cast<int>(parse_int_field(t, r, c_y, "year"));
    const int z = static_cast<int>(parse_int_field(t, r, c_z, "zone"));
    const double f = parse_double_field(t, r, c_f, "full_fare");
    if (f <= 0) fail("schedule", tariffs_csv + ": full_fare must be positive");
    schedule.full_fare[y][z] = f;
  }
  if (schedule.full_fare.empty()) fail("schedule", tariffs_csv + ": no fares");
  return schedule;
}

void load_bounds(TariffSchedule& schedule, const std::string& bounds_csv) {
  const CsvTable t = read_csv(bounds_csv);
  const int c_z = t.column("zone"), c_f = t.column("full_fare");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int z = static_cast<int>(parse_int_field(t, r, c_z, "zone"));
    schedule.rst_upper_bound[z] = parse_double_field(t, r, c_f, "full_fare");
  }
}

TariffSchedule schedule_from_dataset(const Dataset& ds) {
  TariffSchedule schedule;
  for (const auto& [key, fare] : ds.tariffs.full_fare) schedule.full_fare[key.first][key.second] = fare;
  if (schedule.full_fare.empty())
    fail("schedule", "dataset has no tariff table to use as a baseline schedule");
  return schedule;
}

void validate_schedule(const TariffSchedule& schedule, const Dataset& ds) {
  std::set<int> zones;
  for (const auto& r : ds.routes) zones.insert(r.zone);
  std::set<int> years;
  for (const auto& rec : ds.records) years.insert(rec.year);

  for (const int year : years) {
    double prev = 0.0;
    for (const int zone : zones) {
      const double fare = schedule.fare(year, zone);  // throws when uncovered
      if (fare <= 0) {
        std::ostringstream msg;
        msg << "non-positive fare for zone " << zone;
        fail("schedule", msg.str());
      }
      if (const auto bound = schedule.bound(zone); bound && fare > *bound + 1e-9) {
        std::ostringstream msg;
        msg << "fare " << fare << " for zone " << zone << " exceeds the RST upper bound "
            << *bound;
        fail("schedule", msg.str());
      }
      if (fare < prev - 1e-9) {
        std::ostringstream msg;
        msg << "fare is not non-decreasing in zone at zone " << zone;
        fail("schedule", msg.str());
      }
      prev = fare;
    }
  }
}

const char* price_action_name(PriceAction a) {
  switch (a) {
    case PriceAction::Reduce: return "Reduce";
    case PriceAction::Hold: return "Hold";
    case PriceAction::Increase: return "Increase";
  }
  return "?";
}

PriceAction recommend_direction(double elasticity, double hold_band) {
  if (!std::isfinite(elasticity)) fail("pricing", "elasticity must be finite");
  if (elasticity < -1.0 - hold_band) return PriceAction::Reduce;
  if (elasticity > -1.0 + hold_band) return PriceAction::Increase;
  return PriceAction::Hold;
}

double optimal_tariff(double scale, double alpha, double p_min, double p_max,
                      double marginal_cost, double current_price) {
  if (!(scale > 0)) fail("pricing", "demand scale must be positive");
  if (!(p_min <= p_max) || !(p_min > 0)) fail("pricing", "invalid price bounds");
  if (alpha > 0) fail("pricing", "elasticity must be nonpositive");
  if (marginal_cost < 0) fail("pricing", "marginal cost must be nonnegative");

  if (alpha > -1.0) return p_max;  // margin grows faster than demand shrinks
  if (alpha == -1.0) {
    if (marginal_cost > 0) return p_max;  // profit (p-c)A/p increasing in p
    return std::clamp(current_price > 0 ? current_price : p_min, p_min, p_max);
  }
  // alpha < -1: interior optimum of (p - c) p^alpha at p = c*alpha/(1+alpha)
  const double interior = marginal_cost * alpha / (1.0 + alpha);
  return std::clamp(interior, p_min, p_max);
}

RevenueDeltaReport revenue_delta(const BaggedForest& forest, const Frame& frame,
                                 const Dataset& ds, const TariffSchedule& proposed,
                                 const TariffSchedule& baseline) {
  validate_schedule(proposed, ds);
  validate_schedule(baseline, ds);
  const int price_col = frame.col_checked(kColLogRealFare);
  const std::pair<int, int> base_period{ds.cpi.base_year, ds.cpi.base_month};

  RevenueDeltaReport report;
  report.by_direction.resize(kDirectionCount);
  for (int d = 0; d < kDirectionCount; ++d)
    report.by_direction[static_cast<std::size_t>(d)].label =
        direction_name(static_cast<Direction>(d));
  report.total.label = "total";

  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const MonthlyDemandRecord& r = ds.records[i];
    const Route& route = ds.route_of(r);
    const double multiplier = [&] {
      auto it = proposed.category_multipliers.find(r.category);
      return it != proposed.category_multipliers.end() ? it->second : 1.0;
    }();

    auto arm = [&](const TariffSchedule& schedule) {
      const double nominal = schedule.fare(r.year, route.zone) * multiplier;
      const double real = deflate(nominal, r.year, r.month, ds.cpi, base_period);
      const double qhat = std::exp(predict_mean(forest, frame, static_cast<std::uint32_t>(i),
                                                price_col, std::log(real)));
      return qhat * real;
    };
    const double rev_base = arm(baseline);
    const double rev_prop = arm(proposed);

    auto& group = report.by_direction[static_cast<std::size_t>(route.direction)];
    group.revenue_baseline += rev_base;
    group.revenue_proposed += rev_prop;
    report.total.revenue_baseline += rev_base;
    report.total.revenue_proposed += rev_prop;
  }
  return report;
}

double category_revenue_projection(double full_fare_change, FareCategory category,
                                   const std::map<FareCategory, CategoryElasticity>& elasticities) {
  if (!(full_fare_change > -1.0)) fail("pricing", "fare change must be > -100%");
  double e = 0.0;
  auto it = elasticities.find(category);
  if (it != elasticities.end()) {
    // treat statistically-zero elasticities as exact zeros
    const bool insignificant = std::abs(it->second.estimate) <= 1.96 * it->second.stderr_;
    e = insignificant ? 0.0 : it->second.estimate;
  }
  return std::pow(1.0 + full_fare_change, 1.0 + e) - 1.0;
}

std::vector<PricingRecommendation> recommend_schedule(const GroupElasticityTable& table,
                                                      const Dataset& ds,
                                                      const TariffSchedule& baseline,
                                                      double hold_band, double floor_fraction,
                                                      double cap_fraction) {
  // busiest zone and latest year per (direction, trip type)
  struct ZoneCount {
    std::map<int, long> zones;
  };
  std::vector<ZoneCount> zone_counts(kDirectionCount * kTripTypeCount);
  int latest_year = 0;
  for (const auto& r : ds.records) {
    latest_year = std::max(latest_year, r.year);
    const int d = static_cast<int>(ds.route_of(r).direction);
    const int t = static_cast<int>(trip_type_of(ds, r));
    ++zone_counts[static_cast<std::size_t>(d * kTripTypeCount + t)].zones[ds.route_of(r).zone];
  }

  std::vector<PricingRecommendation> out;
  for (int d = 0; d < kDirectionCount; ++d) {
    for (int t = 0; t < kTripTypeCount; ++t) {
      const GroupCell& cell =
          table.by_type[static_cast<std::size_t>(t)][static_cast<std::size_t>(d)];
      if (cell.count == 0) continue;
      const auto& zones = zone_counts[static_cast<std::size_t>(d * kTripTypeCount + t)].zones;
      int top_zone = zones.begin()->first;
      long top_count = 0;
      for (const auto& [zone, count] : zones)
        if (count > top_count) {
          top_zone = zone;
          top_count = count;
        }

      PricingRecommendation rec;
      rec.group = std::string(direction_name(static_cast<Direction>(d))) + "/" +
                  trip_type_name(static_cast<TripType>(t));
      rec.elasticity = cell.mean();
      rec.records = cell.count;
      rec.action = recommend_direction(rec.elasticity, hold_band);
      rec.reference_fare = baseline.fare(latest_year, top_zone);
      double p_max = cap_fraction * rec.reference_fare;
      if (const auto bound = baseline.bound(top_zone)) p_max = std::min(p_max, *bound);
      const double p_min = floor_fraction * rec.reference_fare;
      rec.optimal_fare = optimal_tariff(1.0, std::min(rec.elasticity, 0.0), p_min,
                                        std::max(p_min, p_max), 0.0, rec.reference_fare);
      // constant-elasticity revenue ratio (p1/p0)^(1+e)
      rec.predicted_revenue_change_pct =
          100.0 * (std::pow(rec.optimal_fare / rec.reference_fare, 1.0 + rec.elasticity) - 1.0);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace raildemand
