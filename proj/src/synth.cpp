#include "raildemand/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "raildemand/common.hpp"
#include "raildemand/csv.hpp"
#include "raildemand/ingest.hpp"

namespace fs = std::filesystem;

namespace raildemand {

std::vector<double> default_zone_table() {
  return {13, 25, 35, 45, 55, 65, 75, 85, 95, 107, 119, 131, 143, 155, 167, 180, 193};
}

namespace {

constexpr double kPermLat = 58.00;
constexpr double kPermLon = 56.25;
constexpr double kTau = 6.283185307179586476925286766559;

double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

struct DirectionGeometry {
  double angle_deg;
  double spacing_lo, spacing_hi;
};

DirectionGeometry geometry_of(Direction d) {
  switch (d) {
    case Direction::Western: return {255.0, 8.0, 13.0};
    case Direction::Kungur: return {200.0, 8.0, 13.0};
    case Direction::GornozavodskChusovoy: return {60.0, 8.0, 13.0};
    case Direction::GornozavodskKizel: return {20.0, 8.0, 13.0};
    case Direction::GornozavodskBranch: return {40.0, 5.0, 8.0};
    case Direction::Agglomeration: return {320.0, 3.0, 5.0};
  }
  return {0.0, 8.0, 13.0};
}

int match_segment(const SynthConfig& cfg, Direction dir, int zone, TripType type) {
  int found = -1;
  for (std::size_t s = 0; s < cfg.segments.size(); ++s) {
    const SegmentSpec& seg = cfg.segments[s];
    if (!seg.directions.empty() &&
        std::find(seg.directions.begin(), seg.directions.end(), dir) == seg.directions.end())
      continue;
    if (zone < seg.zone_min || zone > seg.zone_max) continue;
    if (seg.trip_type && *seg.trip_type != type) continue;
    if (found >= 0) {
      fail("synth", "segments overlap: '" + cfg.segments[static_cast<std::size_t>(found)].name +
                        "' and '" + seg.name + "' both match a generated route");
    }
    found = static_cast<int>(s);
  }
  if (found < 0) {
    std::ostringstream msg;
    msg << "segments fail to cover a generated route (direction " << direction_name(dir)
        << ", zone " << zone << ", trip type " << trip_type_name(type) << ")";
    fail("synth", msg.str());
  }
  return found;
}

}  // namespace

std::pair<Dataset, GroundTruth> generate(const SynthConfig& config) {
  if (config.segments.empty()) fail("synth", "config needs at least one segment");
  if (config.categories.empty()) fail("synth", "config needs at least one fare category");
  if (config.noise_sigma < 0) fail("synth", "noise_sigma must be nonnegative");
  if (config.year_hi < config.year_lo) fail("synth", "invalid year range");

  SplitMix64 rng(config.seed);
  Dataset ds;
  ds.zone_table = config.zone_table.empty() ? default_zone_table() : config.zone_table;

  // CPI path: geometric drift with monthly jitter; base = first period
  ds.cpi.base_year = config.year_lo;
  ds.cpi.base_month = 1;
  {
    double ln_cpi = std::log(100.0);
    for (int y = config.year_lo; y <= config.year_hi; ++y)
      for (int m = 1; m <= 12; ++m) {
        ds.cpi.values[CpiSeries::key(y, m)] = std::exp(ln_cpi);
        ln_cpi += config.monthly_cpi_rate + config.cpi_jitter * rng.normal();
      }
  }

  // stations, chains per direction
  std::map<Direction, std::vector<int>> chain;  // direction -> station indices
  {
    int counter = 0;
    for (int d = 0; d < kDirectionCount; ++d) {
      const Direction dir = static_cast<Direction>(d);
      auto it = config.stations_per_direction.find(dir);
      if (it == config.stations_per_direction.end() || it->second <= 0) continue;
      const int count = it->second;
      const DirectionGeometry geom = geometry_of(dir);
      double radial = 0.5;
      for (int k = 0; k < count; ++k) {
        Station s;
        char id[16];
        std::snprintf(id, sizeof(id), "S%03d", ++counter);
        s.id = id;
        s.name = std::string(direction_name(dir)) + "-" + std::to_string(k + 1);
        s.direction = dir;
        const double angle =
            (geom.angle_deg + rng.uniform(-6.0, 6.0)) * 0.017453292519943295;
        s.lat = round_to(kPermLat + radial * std::cos(angle) / 111.32, 6);
        s.lon = round_to(
            kPermLon + radial * std::sin(angle) / (111.32 * std::cos(kPermLat * 0.01745329)), 6);
        const bool near_city = k < 2;
        s.is_perm = near_city;
        s.is_agglomeration = near_city || dir == Direction::Agglomeration;
        if (s.is_perm) {
          s.population_5km = 1050000;
        } else if (rng.uniform() < 0.04) {
          s.population_5km = 0;  // no settlement within 5 km
        } else {
          s.population_5km =
              std::floor(std::exp(6.2 - 0.012 * radial + 1.5 * rng.normal())) + 1;
        }
        if (rng.uniform() < config.missing_prob) {
          s.missing_distances = true;
          s.dist_settlement1_km = 99.0;
          s.dist_settlement2_km = 99.0;
          s.dist_bus_km = 99.0;
          s.dist_highway_km = 99.0;
        } else {
          s.dist_settlement1_km = round_to(rng.uniform(0.1, 6.0), 3);
          s.dist_settlement2_km = round_to(s.dist_settlement1_km + rng.uniform(0.5, 8.0), 3);
          s.dist_bus_km = round_to(rng.uniform(0.1, 12.0), 3);
          s.dist_highway_km = round_to(rng.uniform(0.1, 25.0), 3);
        }
        const double summer_p = dir == Direction::Kungur ? 0.55 : 0.25;
        s.summer_gardens = rng.uniform() < summer_p;
        chain[dir].push_back(static_cast<int>(ds.stations.size()));
        ds.station_index[s.id] = static_cast<int>(ds.stations.size());
        ds.stations.push_back(std::move(s));
        radial += rng.uniform(geom.spacing_lo, geom.spacing_hi);
      }
    }
  }
  if (ds.stations.empty()) fail("synth", "config generated no stations");

  // candidate routes per direction: ordered pairs within a chain, within the
  // zone table's reach
  const long cells_per_route = static_cast<long>(config.year_hi - config.year_lo + 1) * 12 *
                               static_cast<long>(config.categories.size());
  const long routes_needed =
      std::max<long>(1, (config.target_records + cells_per_route - 1) / cells_per_route);

  std::vector<Route> picked;
  for (int d = 0; d < kDirectionCount; ++d) {
    const Direction dir = static_cast<Direction>(d);
    auto it = chain.find(dir);
    if (it == chain.end()) continue;
    const std::vector<int>& members = it->second;
    std::vector<Route> candidates;
    for (const int a : members)
      for (const int b : members) {
        if (a == b) continue;
        const Station& sa = ds.stations[static_cast<std::size_t>(a)];
        const Station& sb = ds.stations[static_cast<std::size_t>(b)];
        const double dist = haversine_km(sa.lat, sa.lon, sb.lat, sb.lon);
        if (dist <= 0 || dist > ds.zone_table.back()) continue;
        Route r;
        r.origin = a;
        r.destination = b;
        r.origin_id = sa.id;
        r.destination_id = sb.id;
        r.distance_km = dist;
        r.zone = zone_of_distance(dist, ds.zone_table);
        r.direction = dir;
        candidates.push_back(std::move(r));
      }
    // deterministic shuffle, then quota
    for (std::size_t i = candidates.size(); i > 1; --i)
      std::swap(candidates[i - 1], candidates[rng.below(i)]);
    long quota;
    auto w = config.direction_weights.find(dir);
    if (w != config.direction_weights.end())
      quota = static_cast<long>(std::llround(w->second * static_cast<double>(routes_needed)));
    else if (config.direction_weights.empty())
      quota = routes_needed;  // pooled; trimmed globally below
    else
      quota = 0;
    quota = std::min<long>(quota, static_cast<long>(candidates.size()));
    picked.insert(picked.end(), candidates.begin(), candidates.begin() + quota);
  }
  if (config.direction_weights.empty() && static_cast<long>(picked.size()) > routes_needed) {
    for (std::size_t i = picked.size(); i > 1; --i)
      std::swap(picked[i - 1], picked[rng.below(i)]);
    picked.resize(static_cast<std::size_t>(routes_needed));
  }
  if (picked.empty()) fail("synth", "no feasible routes under the zone table");

  std::sort(picked.begin(), picked.end(), [](const Route& a, const Route& b) {
    if (a.origin_id != b.origin_id) return a.origin_id < b.origin_id;
    return a.destination_id < b.destination_id;
  });
  ds.routes = std::move(picked);

  // per-(zone, year) fare jitter and the tariff table; fares stay monotone
  // non-decreasing in zone within each year (tariff schedule invariant)
  const int n_zones = static_cast<int>(ds.zone_table.size());
  std::map<std::pair<int, int>, double> fare_of;  // (year, zone) -> nominal full fare
  for (int z = 1; z <= n_zones; ++z) {
    for (int y = config.year_lo; y <= config.year_hi; ++y) {
      const double ln_fare = std::log(config.fare.zone1_fare) +
                             config.fare.zone_exponent * std::log(static_cast<double>(z)) +
                             static_cast<double>(y - config.year_lo) *
                                 std::log1p(config.fare.annual_growth) +
                             config.fare.zone_year_jitter * rng.normal();
      fare_of[{y, z}] = std::exp(ln_fare);
    }
  }
  for (int y = config.year_lo; y <= config.year_hi; ++y) {
    double prev = 0.0;
    for (int z = 1; z <= n_zones; ++z) {
      double fare = std::max(fare_of.at({y, z}), prev * 1.005);
      fare = round_to(fare, 4);
      fare_of[{y, z}] = fare;
      ds.tariffs.full_fare[{y, z}] = fare;
      prev = fare;
    }
  }

  // segment assignment per route
  std::vector<int> route_segment(ds.routes.size());
  std::vector<TripType> route_type(ds.routes.size());
  for (std::size_t i = 0; i < ds.routes.size(); ++i) {
    const Route& r = ds.routes[i];
    const bool from_perm = ds.stations[static_cast<std::size_t>(r.origin)].is_perm;
    const bool to_perm = ds.stations[static_cast<std::size_t>(r.destination)].is_perm;
    route_type[i] = from_perm && to_perm ? TripType::WithinPerm
                    : (from_perm || to_perm) ? TripType::FromToPerm
                                             : TripType::OutOfPerm;
    route_segment[i] = match_segment(config, r.direction, r.zone, route_type[i]);
  }

  const std::pair<int, int> base_period{ds.cpi.base_year, ds.cpi.base_month};
  const auto multipliers = default_category_multipliers();

  // calibrate automatic segment scales against the mean log fare
  std::vector<double> scale(config.segments.size());
  {
    std::vector<double> lnp_sum(config.segments.size(), 0.0);
    std::vector<long> lnp_n(config.segments.size(), 0);
    for (std::size_t i = 0; i < ds.routes.size(); ++i) {
      const int seg = route_segment[i];
      for (int y = config.year_lo; y <= config.year_hi; ++y)
        for (int m = 1; m <= 12; ++m)
          for (const auto& cat : config.categories) {
            const double nominal =
                fare_of.at({y, ds.routes[i].zone}) * multipliers.at(cat.category);
            lnp_sum[static_cast<std::size_t>(seg)] +=
                std::log(deflate(nominal, y, m, ds.cpi, base_period));
            ++lnp_n[static_cast<std::size_t>(seg)];
          }
    }
    for (std::size_t s = 0; s < config.segments.size(); ++s) {
      if (config.segments[s].scale) {
        scale[s] = *config.segments[s].scale;
      } else {
        const double mean_lnp =
            lnp_n[s] > 0 ? lnp_sum[s] / static_cast<double>(lnp_n[s]) : std::log(20.0);
        scale[s] = std::log(config.target_mean_tickets) - config.segments[s].alpha * mean_lnp;
      }
    }
  }

  // records, generated directly in (origin, destination, year, month,
  // category) order
  GroundTruth truth;
  for (std::size_t i = 0; i < ds.routes.size(); ++i) {
    const Route& route = ds.routes[i];
    const int seg_idx = route_segment[i];
    const SegmentSpec& seg = config.segments[static_cast<std::size_t>(seg_idx)];
    for (int y = config.year_lo; y <= config.year_hi; ++y) {
      for (int m = 1; m <= 12; ++m) {
        for (const auto& cat : config.categories) {
          const double nominal = fare_of.at({y, route.zone}) * multipliers.at(cat.category);
          const double real = deflate(nominal, y, m, ds.cpi, base_period);
          const double lnp = std::log(real);
          const double alpha = cat.alpha_override.value_or(seg.alpha);
          double mu = scale[static_cast<std::size_t>(seg_idx)] + cat.volume_offset +
                      alpha * lnp +
                      seg.month_amplitude * std::cos(kTau * (m - 7) / 12.0) +
                      seg.year_drift * static_cast<double>(y - config.year_lo);
          if (config.confounding.enabled)
            mu += config.confounding.zone_coef * static_cast<double>(route.zone);
          const double eps = config.noise_sigma > 0 ? config.noise_sigma * rng.normal() : 0.0;
          const double logq = mu + eps;

          MonthlyDemandRecord rec;
          rec.route = static_cast<int>(i);
          rec.year = y;
          rec.month = m;
          rec.category = cat.category;
          rec.tickets = std::max<long long>(1, std::llround(std::exp(logq)));
          rec.log_tickets = logq;
          rec.nominal_fare = nominal;
          rec.real_fare = real;
          rec.log_real_fare = lnp;
          ds.records.push_back(rec);

          truth.segment.push_back(seg_idx);
          truth.true_elasticity.push_back(alpha);
          truth.noiseless_log_demand.push_back(mu);
        }
      }
    }
  }
  truth.keys.reserve(ds.records.size());
  for (const auto& rec : ds.records) truth.keys.push_back(record_key(ds, rec));
  return {std::move(ds), std::move(truth)};
}

void write_csv_bundle(const Dataset& ds, const GroundTruth& truth, const std::string& dir) {
  fs::create_directories(dir);

  {
    CsvWriter w((fs::path(dir) / "stations.csv").string());
    w.row({"id", "name", "direction", "lat", "lon", "population_5km", "dist_settlement1_km",
           "dist_settlement2_km", "dist_bus_km", "dist_highway_km", "summer_gardens", "is_perm",
           "is_agglomeration"});
    for (const auto& s : ds.stations) {
      auto dist = [&](double v) { return s.missing_distances ? std::string() : format_fixed(v, 3); };
      w.row({s.id, s.name, direction_name(s.direction), format_fixed(s.lat, 6),
             format_fixed(s.lon, 6), format_fixed(s.population_5km, 0),
             dist(s.dist_settlement1_km), dist(s.dist_settlement2_km), dist(s.dist_bus_km),
             dist(s.dist_highway_km), s.summer_gardens ? "1" : "0", s.is_perm ? "1" : "0",
             s.is_agglomeration ? "1" : "0"});
    }
  }
  {
    CsvWriter w((fs::path(dir) / "zones.csv").string());
    w.row({"zone", "upper_km"});
    for (std::size_t z = 0; z < ds.zone_table.size(); ++z)
      w.row({std::to_string(z + 1), format_fixed(ds.zone_table[z], 3)});
  }
  {
    CsvWriter w((fs::path(dir) / "cpi.csv").string());
    w.row({"year", "month", "index"});
    for (const auto& [key, value] : ds.cpi.values)
      w.row({std::to_string(key / 100), std::to_string(key % 100), format_fixed(value, 6)});
  }
  {
    CsvWriter w((fs::path(dir) / "tariffs.csv").string());
    w.row({"year", "zone", "full_fare"});
    for (const auto& [key, fare] : ds.tariffs.full_fare)
      w.row({std::to_string(key.first), std::to_string(key.second), format_fixed(fare, 4)});
  }
  {
    CsvWriter w((fs::path(dir) / "tickets.csv").string());
    w.row({"origin_id", "destination_id", "date", "fare_category", "quantity", "nominal_fare"});
    for (const auto& r : ds.records) {
      char date[16];
      std::snprintf(date, sizeof(date), "%04d-%02d-15", r.year, r.month);
      const Route& route = ds.route_of(r);
      w.row({route.origin_id, route.destination_id, date, fare_category_name(r.category),
             std::to_string(r.tickets), format_fixed(r.nominal_fare, 4)});
    }
  }
  {
    CsvWriter w((fs::path(dir) / "ground_truth.csv").string());
    w.row({"record_key", "segment", "true_elasticity", "noiseless_log_demand"});
    for (std::size_t i = 0; i < truth.keys.size(); ++i)
      w.row({truth.keys[i], std::to_string(truth.segment[i]),
             format_fixed(truth.true_elasticity[i], 6),
             format_fixed(truth.noiseless_log_demand[i], 9)});
  }
}

SynthConfig paper_calibrated_preset() {
  SynthConfig cfg;
  cfg.seed = 2012;
  cfg.stations_per_direction = {
      {Direction::Western, 16},          {Direction::Kungur, 14},
      {Direction::GornozavodskChusovoy, 14}, {Direction::GornozavodskKizel, 10},
      {Direction::GornozavodskBranch, 16},   {Direction::Agglomeration, 12},
  };
  // the branch segment (weakly elastic) carries 25% of records
  cfg.direction_weights = {
      {Direction::Western, 0.20},          {Direction::Kungur, 0.15},
      {Direction::GornozavodskChusovoy, 0.15}, {Direction::GornozavodskKizel, 0.10},
      {Direction::GornozavodskBranch, 0.25},   {Direction::Agglomeration, 0.15},
  };
  auto seg = [](const char* name, Direction d, double alpha, double amp) {
    SegmentSpec s;
    s.name = name;
    s.directions = {d};
    s.alpha = alpha;
    s.month_amplitude = amp;
    return s;
  };
  // seasonal amplitudes spread apart so every regime differs in shape as
  // well as in price response (garden-season traffic differs by direction)
  cfg.segments = {
      seg("western", Direction::Western, -1.75, 0.15),
      seg("kungur", Direction::Kungur, -1.34, 0.45),
      seg("gorno-chusovoy", Direction::GornozavodskChusovoy, -1.26, 0.30),
      seg("gorno-kizel", Direction::GornozavodskKizel, -1.26, 0.60),
      seg("gorno-branch", Direction::GornozavodskBranch, -0.89, 0.05),
      seg("agglomeration", Direction::Agglomeration, -1.21, 0.75),
  };
  cfg.target_records = 50000;
  cfg.confounding = {true, 0.12};
  cfg.fare.zone_year_jitter = 0.20;
  return cfg;
}

SynthConfig two_segment_preset() {
  SynthConfig cfg = paper_calibrated_preset();
  cfg.seed = 41;
  cfg.direction_weights = {
      {Direction::Western, 0.20},          {Direction::Kungur, 0.15},
      {Direction::GornozavodskChusovoy, 0.15}, {Direction::GornozavodskKizel, 0.10},
      {Direction::GornozavodskBranch, 0.25},   {Direction::Agglomeration, 0.15},
  };
  SegmentSpec weak;
  weak.name = "branch-weak";
  weak.directions = {Direction::GornozavodskBranch};
  weak.alpha = -0.5;
  weak.month_amplitude = 0.45;
  SegmentSpec strong;
  strong.name = "rest-elastic";
  strong.directions = {Direction::Western, Direction::Kungur, Direction::GornozavodskChusovoy,
                       Direction::GornozavodskKizel, Direction::Agglomeration};
  strong.alpha = -2.0;
  strong.month_amplitude = 0.25;
  cfg.segments = {weak, strong};
  cfg.target_records = 20000;
  cfg.fare.zone_year_jitter = 0.15;
  return cfg;
}

SynthConfig confounded_preset() {
  SynthConfig cfg;
  cfg.seed = 7;
  cfg.stations_per_direction = {
      {Direction::Western, 12},
      {Direction::Kungur, 10},
      {Direction::GornozavodskChusovoy, 10},
  };
  SegmentSpec all;
  all.name = "pooled";
  all.alpha = -1.981;
  cfg.segments = {all};
  cfg.target_records = 6000;
  cfg.confounding = {true, 0.15};
  cfg.fare.zone_year_jitter = 0.05;
  return cfg;
}

SynthConfig ols_recovery_preset() {
  SynthConfig cfg;
  cfg.seed = 1981;
  cfg.stations_per_direction = {
      {Direction::Western, 14},
      {Direction::Kungur, 12},
      {Direction::GornozavodskChusovoy, 12},
      {Direction::Agglomeration, 8},
  };
  SegmentSpec all;
  all.name = "pooled";
  all.alpha = -1.981;
  cfg.segments = {all};
  cfg.target_records = 10000;
  cfg.confounding = {false, 0.0};
  cfg.fare.zone_year_jitter = 0.12;
  return cfg;
}

SynthConfig preset_by_name(const std::string& name) {
  if (name == "paper") return paper_calibrated_preset();
  if (name == "two-segment") return two_segment_preset();
  if (name == "confounded") return confounded_preset();
  if (name == "ols-recovery") return ols_recovery_preset();
  fail("args",
       "unknown preset '" + name + "' (valid: paper, two-segment, confounded, ols-recovery)");
}

}  // namespace raildemand
