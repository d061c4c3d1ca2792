#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "raildemand/elasticity.hpp"
#include "raildemand/types.hpp"

namespace raildemand {

// One homogeneous demand regime. A route belongs to the first (and only)
// segment whose predicate matches; predicates must partition the route space.
struct SegmentSpec {
  std::string name;
  std::vector<Direction> directions;  // empty = any direction
  int zone_min = 1;
  int zone_max = 1 << 20;
  std::optional<TripType> trip_type;
  double alpha = -1.5;                  // true price elasticity
  std::optional<double> scale;          // log-demand intercept; empty = calibrated
  double month_amplitude = 0.3;         // seasonal cosine amplitude
  double year_drift = 0.0;              // additive log-demand drift per year
};

struct CategorySpec {
  FareCategory category = FareCategory::FullSingle;
  std::optional<double> alpha_override;  // e.g. 0 for price-insensitive categories
  double volume_offset = 0.0;            // additive log-demand shift
};

struct FareRule {
  double zone1_fare = 18.0;
  double zone_exponent = 0.8;      // ln fare = ln zone1_fare + exponent * ln zone
  double annual_growth = 0.085;
  double zone_year_jitter = 0.12;  // sd of ln-fare deviations per (zone, year)
};

struct ConfoundingRule {
  bool enabled = true;
  double zone_coef = 0.12;  // direct effect of the zone index on log demand
};

struct SynthConfig {
  std::uint64_t seed = 17;
  std::map<Direction, int> stations_per_direction;
  std::map<Direction, double> direction_weights;  // record-share quotas. empty = pooled
  int year_lo = 2012;
  int year_hi = 2016;
  std::vector<double> zone_table;
  std::vector<SegmentSpec> segments;
  std::vector<CategorySpec> categories{{}};
  double noise_sigma = 0.3;
  FareRule fare;
  ConfoundingRule confounding;
  long target_records = 20000;
  double target_mean_tickets = 150.0;  // calibration level for automatic scales
  double missing_prob = 0.04;          // chance a station's distance fields are absent
  double monthly_cpi_rate = 0.0068;    // ~8.5% annual
  double cpi_jitter = 0.002;
};

std::vector<double> default_zone_table();

struct GroundTruth {
  std::vector<std::string> keys;  // aligned with Dataset records
  std::vector<int> segment;
  std::vector<double> true_elasticity;
  std::vector<double> noiseless_log_demand;
};

// Generates stations, routes and monthly records under the configured
// regimes. The in-memory dataset keeps the exact simulated log demand in
// log_tickets; integer ticket counts are round(exp(log demand)) floored at 1,
// which is what the CSV bundle carries.
std::pair<Dataset, GroundTruth> generate(const SynthConfig& config);

// Writes tickets/stations/tariffs/cpi/zones CSVs plus ground_truth.csv.
void write_csv_bundle(const Dataset& ds, const GroundTruth& truth, const std::string& dir);

// Per-direction elasticities and record shares mirroring the published group
// estimates; ~75% of records fall in segments with elasticity below -1.
SynthConfig paper_calibrated_preset();
// Two regimes (alpha -2 vs -0.5, 75%/25%) separated by one direction dummy.
SynthConfig two_segment_preset();
// Single regime with a strong zone-driven demand effect correlated with the
// fare, for omitted-variable-bias demonstrations.
SynthConfig confounded_preset();
// Single clean regime with alpha = -1.981 and ample fare variation.
SynthConfig ols_recovery_preset();

SynthConfig preset_by_name(const std::string& name);

}  // namespace raildemand
