#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "raildemand/elasticity.hpp"
#include "raildemand/forest.hpp"
#include "raildemand/types.hpp"

namespace raildemand {

struct TariffSchedule {
  // year -> zone -> full single fare (nominal)
  std::map<int, std::map<int, double>> full_fare;
  // regulator upper bound per zone; empty map = unbounded
  std::map<int, double> rst_upper_bound;
  std::map<FareCategory, double> category_multipliers = default_category_multipliers();

  // Fare for (year, zone); a single-year schedule applies to every year.
  double fare(int year, int zone) const;
  std::optional<double> bound(int zone) const;
};

// Loads zone fares from a tariffs.csv-shaped file.
TariffSchedule load_schedule(const std::string& tariffs_csv);
// Loads regulator bounds into an existing schedule (same schema; full_fare
// column read as the bound).
void load_bounds(TariffSchedule& schedule, const std::string& bounds_csv);
TariffSchedule schedule_from_dataset(const Dataset& ds);

// Checks zone coverage, bound compliance and monotonicity in zone; throws
// naming the first offending zone.
void validate_schedule(const TariffSchedule& schedule, const Dataset& ds);

enum class PriceAction { Reduce, Hold, Increase };
const char* price_action_name(PriceAction a);

// Reduce when demand is elastic beyond the hold band, Increase when weakly
// elastic, Hold around unit elasticity.
PriceAction recommend_direction(double elasticity, double hold_band = 0.05);

// Maximizes (p - c) * A * p^alpha on [p_min, p_max] for constant-elasticity
// demand. current_price is returned when revenue is flat in p (alpha == -1,
// c == 0).
double optimal_tariff(double scale, double alpha, double p_min, double p_max,
                      double marginal_cost = 0.0, double current_price = 0.0);

struct RevenueGroup {
  std::string label;
  double revenue_baseline = 0.0;
  double revenue_proposed = 0.0;
  double delta_pct() const {
    return revenue_baseline != 0.0
               ? 100.0 * (revenue_proposed - revenue_baseline) / revenue_baseline
               : 0.0;
  }
};

struct RevenueDeltaReport {
  std::vector<RevenueGroup> by_direction;
  RevenueGroup total;
};

// Counterfactual revenue comparison: both arms use exp(predicted log demand)
// under the respective schedule, so retransformation bias cancels. All fares
// are deflated with the record's CPI period before prediction; revenue is in
// base-period (real) terms.
RevenueDeltaReport revenue_delta(const BaggedForest& forest, const Frame& frame,
                                 const Dataset& ds, const TariffSchedule& proposed,
                                 const TariffSchedule& baseline);

struct CategoryElasticity {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

// Revenue change fraction for a category under a full-fare change; categories
// whose elasticity CI covers zero (children, employees) pass the fare change
// through proportionally.
double category_revenue_projection(double full_fare_change, FareCategory category,
                                   const std::map<FareCategory, CategoryElasticity>& elasticities);

struct PricingRecommendation {
  std::string group;
  double elasticity = 0.0;
  long records = 0;
  PriceAction action = PriceAction::Hold;
  double reference_fare = 0.0;  // baseline fare of the group's busiest zone
  double optimal_fare = 0.0;
  double predicted_revenue_change_pct = 0.0;
};

// Per-(direction, trip type) recommendations from a group elasticity table.
// Bounds for the optimal fare are [floor_fraction * fare, min(cap_fraction *
// fare, RST bound)].
std::vector<PricingRecommendation> recommend_schedule(const GroupElasticityTable& table,
                                                      const Dataset& ds,
                                                      const TariffSchedule& baseline,
                                                      double hold_band = 0.05,
                                                      double floor_fraction = 0.5,
                                                      double cap_fraction = 1.25);

}  // namespace raildemand
