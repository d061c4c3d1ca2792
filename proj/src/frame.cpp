#include "raildemand/frame.hpp"

#include <algorithm>
#include <set>

#include "raildemand/common.hpp"
#include "raildemand/ingest.hpp"

namespace raildemand {

int Frame::col_checked(const std::string& name) const {
  const int c = col(name);
  if (c < 0) fail("frame", "unknown column '" + name + "'");
  return c;
}

void Frame::add_column(std::string name, std::vector<double> values) {
  if (n_rows == 0 && cols.empty()) n_rows = values.size();
  if (values.size() != n_rows) fail("frame", "column length mismatch for '" + name + "'");
  index[name] = static_cast<int>(cols.size());
  names.push_back(std::move(name));
  cols.push_back(std::move(values));
}

std::vector<int> observed_years(const Dataset& ds) {
  std::set<int> years;
  for (const auto& r : ds.records) years.insert(r.year);
  return {years.begin(), years.end()};
}

std::vector<int> observed_months(const Dataset& ds) {
  std::set<int> months;
  for (const auto& r : ds.records) months.insert(r.month);
  return {months.begin(), months.end()};
}

std::string year_dummy_name(int year) { return "year:" + std::to_string(year); }
std::string month_dummy_name(int month) { return "month:" + std::to_string(month); }
std::string direction_dummy_name(Direction d) {
  return std::string("dir:") + direction_name(d);
}
std::string size_dummy_name(bool origin_end, SizeClass s) {
  return std::string(origin_end ? "from_size:" : "to_size:") + size_class_name(s);
}

Frame build_frame(const Dataset& ds) {
  const std::size_t n = ds.records.size();
  Frame f;
  f.n_rows = n;

  auto column = [&](const std::string& name, auto&& getter) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = getter(ds.records[i]);
    f.add_column(name, std::move(v));
  };

  column(kColLogTickets, [](const MonthlyDemandRecord& r) { return r.log_tickets; });
  column(kColLogRealFare, [](const MonthlyDemandRecord& r) { return r.log_real_fare; });
  column("year", [](const MonthlyDemandRecord& r) { return double(r.year); });
  column("month", [](const MonthlyDemandRecord& r) { return double(r.month); });
  column("zone", [&](const MonthlyDemandRecord& r) { return double(ds.route_of(r).zone); });
  column("distance_km",
         [&](const MonthlyDemandRecord& r) { return ds.route_of(r).distance_km; });
  column("fare_category_code",
         [](const MonthlyDemandRecord& r) { return double(static_cast<int>(r.category)); });

  for (int d = 0; d < kDirectionCount; ++d) {
    column(direction_dummy_name(static_cast<Direction>(d)), [&](const MonthlyDemandRecord& r) {
      return ds.route_of(r).direction == static_cast<Direction>(d) ? 1.0 : 0.0;
    });
  }
  for (int year : observed_years(ds)) {
    column(year_dummy_name(year),
           [&](const MonthlyDemandRecord& r) { return r.year == year ? 1.0 : 0.0; });
  }
  for (int month = 1; month <= 12; ++month) {
    column(month_dummy_name(month),
           [&](const MonthlyDemandRecord& r) { return r.month == month ? 1.0 : 0.0; });
  }

  auto station_cols = [&](bool origin_end) {
    const std::string prefix = origin_end ? "from_" : "to_";
    auto st = [&, origin_end](const MonthlyDemandRecord& r) -> const Station& {
      return origin_end ? ds.origin_of(r) : ds.destination_of(r);
    };
    column(prefix + "population", [&](const MonthlyDemandRecord& r) {
      return st(r).population_5km;
    });
    for (int s = 0; s < kSizeClassCount; ++s) {
      column(size_dummy_name(origin_end, static_cast<SizeClass>(s)),
             [&, s](const MonthlyDemandRecord& r) {
               const Station& station = st(r);
               const SizeClass cls = classify_settlement(station.population_5km,
                                                         station.population_5km > 0);
               return cls == static_cast<SizeClass>(s) ? 1.0 : 0.0;
             });
    }
    column(prefix + "dist_settlement1_km",
           [&](const MonthlyDemandRecord& r) { return st(r).dist_settlement1_km; });
    column(prefix + "dist_settlement2_km",
           [&](const MonthlyDemandRecord& r) { return st(r).dist_settlement2_km; });
    column(prefix + "dist_bus_km",
           [&](const MonthlyDemandRecord& r) { return st(r).dist_bus_km; });
    column(prefix + "dist_highway_km",
           [&](const MonthlyDemandRecord& r) { return st(r).dist_highway_km; });
    column(prefix + "lat", [&](const MonthlyDemandRecord& r) { return st(r).lat; });
    column(prefix + "lon", [&](const MonthlyDemandRecord& r) { return st(r).lon; });
    column(prefix + "summer_gardens",
           [&](const MonthlyDemandRecord& r) { return st(r).summer_gardens ? 1.0 : 0.0; });
    column(prefix + "is_perm",
           [&](const MonthlyDemandRecord& r) { return st(r).is_perm ? 1.0 : 0.0; });
    column(prefix + "is_agglomeration",
           [&](const MonthlyDemandRecord& r) { return st(r).is_agglomeration ? 1.0 : 0.0; });
    column(prefix + "missing_dist",
           [&](const MonthlyDemandRecord& r) { return st(r).missing_distances ? 1.0 : 0.0; });
  };
  station_cols(true);
  station_cols(false);

  return f;
}

std::vector<std::string> default_leaf_regressors(const Dataset& ds) {
  std::vector<std::string> regs{kColLogRealFare};
  const auto years = observed_years(ds);
  for (std::size_t i = 1; i < years.size(); ++i) regs.push_back(year_dummy_name(years[i]));
  const auto months = observed_months(ds);
  for (std::size_t i = 1; i < months.size(); ++i) regs.push_back(month_dummy_name(months[i]));
  return regs;
}

std::vector<std::string> default_split_candidates(const Dataset& ds) {
  std::vector<std::string> c;
  for (int d = 0; d < kDirectionCount; ++d)
    c.push_back(direction_dummy_name(static_cast<Direction>(d)));
  c.insert(c.end(), {"distance_km", "zone", "year", "month"});
  for (const char* prefix : {"from_", "to_"}) {
    const std::string p = prefix;
    c.push_back(p + "population");
    for (int s = 0; s < kSizeClassCount; ++s)
      c.push_back(size_dummy_name(p == "from_", static_cast<SizeClass>(s)));
    c.insert(c.end(), {p + "dist_settlement1_km", p + "dist_settlement2_km", p + "dist_bus_km",
                       p + "dist_highway_km", p + "lon", p + "summer_gardens", p + "is_perm"});
  }
  (void)ds;
  return c;
}

}  // namespace raildemand
