#include "raildemand/design.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "raildemand/common.hpp"
#include "raildemand/frame.hpp"
#include "raildemand/ingest.hpp"

namespace raildemand {

Specification parse_specification(const std::string& s) {
  if (s == "I" || s == "1") return Specification::I;
  if (s == "II" || s == "2") return Specification::II;
  if (s == "III" || s == "3") return Specification::III;
  if (s == "IV" || s == "4") return Specification::IV;
  fail("args", "unknown specification '" + s + "' (valid: I, II, III, IV)");
}

const char* specification_name(Specification s) {
  switch (s) {
    case Specification::I: return "I";
    case Specification::II: return "II";
    case Specification::III: return "III";
    case Specification::IV: return "IV";
  }
  return "?";
}

namespace {

struct Builder {
  const Dataset& ds;
  const std::vector<std::uint32_t>& rows;
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  std::vector<std::string> notes;

  void add(const std::string& name, auto&& getter) {
    std::vector<double> v(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) v[i] = getter(ds.records[rows[i]]);
    names.push_back(name);
    cols.push_back(std::move(v));
  }

  // drop-one dummy block over observed levels
  template <typename Key, typename Getter>
  void dummy_block(const std::string& label, const std::vector<Key>& observed,
                   const Key& preferred_reference, Getter&& level_of,
                   const std::function<std::string(const Key&)>& name_of) {
    if (observed.empty()) return;
    Key reference = preferred_reference;
    if (std::find(observed.begin(), observed.end(), reference) == observed.end())
      reference = observed.front();
    notes.push_back(label + " reference level: " + name_of(reference));
    for (const Key& level : observed) {
      if (level == reference) continue;
      add(name_of(level), [&, level](const MonthlyDemandRecord& r) {
        return level_of(r) == level ? 1.0 : 0.0;
      });
    }
  }
};

}  // namespace

DesignMatrix build_design_matrix(const Dataset& ds, Specification spec,
                                 const std::vector<std::uint32_t>& rows) {
  if (rows.empty()) fail("design", "cannot build a design matrix from an empty dataset");

  Builder b{ds, rows, {}, {}, {}};
  b.add("(intercept)", [](const MonthlyDemandRecord&) { return 1.0; });
  b.add(kColLogRealFare, [](const MonthlyDemandRecord& r) { return r.log_real_fare; });

  auto observed_of = [&](auto&& keyfn) {
    std::set<decltype(keyfn(ds.records[0]))> seen;
    for (auto i : rows) seen.insert(keyfn(ds.records[i]));
    return std::vector<std::decay_t<decltype(*seen.begin())>>(seen.begin(), seen.end());
  };

  if (spec != Specification::I) {
    const auto years = observed_of([](const MonthlyDemandRecord& r) { return r.year; });
    b.dummy_block<int>("year", years, years.front(),
                       [](const MonthlyDemandRecord& r) { return r.year; },
                       [](const int& y) { return year_dummy_name(y); });
    const auto months = observed_of([](const MonthlyDemandRecord& r) { return r.month; });
    b.dummy_block<int>("month", months, 1,
                       [](const MonthlyDemandRecord& r) { return r.month; },
                       [](const int& m) { return month_dummy_name(m); });
    const auto zones =
        observed_of([&](const MonthlyDemandRecord& r) { return ds.route_of(r).zone; });
    b.dummy_block<int>("zone", zones, 1,
                       [&](const MonthlyDemandRecord& r) { return ds.route_of(r).zone; },
                       [](const int& z) { return "zone:" + std::to_string(z); });
  }
  if (spec == Specification::III || spec == Specification::IV) {
    const auto dirs = observed_of(
        [&](const MonthlyDemandRecord& r) { return static_cast<int>(ds.route_of(r).direction); });
    b.dummy_block<int>(
        "direction", dirs, static_cast<int>(Direction::Western),
        [&](const MonthlyDemandRecord& r) { return static_cast<int>(ds.route_of(r).direction); },
        [](const int& d) { return direction_dummy_name(static_cast<Direction>(d)); });
  }
  if (spec == Specification::IV) {
    b.add("distance_km", [&](const MonthlyDemandRecord& r) { return ds.route_of(r).distance_km; });
    for (bool origin_end : {true, false}) {
      auto st = [&, origin_end](const MonthlyDemandRecord& r) -> const Station& {
        return origin_end ? ds.origin_of(r) : ds.destination_of(r);
      };
      auto size_of = [&](const MonthlyDemandRecord& r) {
        const Station& s = st(r);
        return static_cast<int>(classify_settlement(s.population_5km, s.population_5km > 0));
      };
      const std::string prefix = origin_end ? "from_" : "to_";
      const auto sizes = observed_of(size_of);
      b.dummy_block<int>(prefix + "size", sizes, static_cast<int>(SizeClass::Huge), size_of,
                         [origin_end](const int& s) {
                           return size_dummy_name(origin_end, static_cast<SizeClass>(s));
                         });
      b.add(prefix + "dist_settlement1_km",
            [&](const MonthlyDemandRecord& r) { return st(r).dist_settlement1_km; });
      b.add(prefix + "dist_settlement2_km",
            [&](const MonthlyDemandRecord& r) { return st(r).dist_settlement2_km; });
      b.add(prefix + "dist_bus_km",
            [&](const MonthlyDemandRecord& r) { return st(r).dist_bus_km; });
      b.add(prefix + "dist_highway_km",
            [&](const MonthlyDemandRecord& r) { return st(r).dist_highway_km; });
      b.add(prefix + "summer_gardens",
            [&](const MonthlyDemandRecord& r) { return st(r).summer_gardens ? 1.0 : 0.0; });
      b.add(prefix + "is_perm",
            [&](const MonthlyDemandRecord& r) { return st(r).is_perm ? 1.0 : 0.0; });
      b.add(prefix + "lat", [&](const MonthlyDemandRecord& r) { return st(r).lat; });
      b.add(prefix + "lon", [&](const MonthlyDemandRecord& r) { return st(r).lon; });
      b.add(prefix + "missing_dist",
            [&](const MonthlyDemandRecord& r) { return st(r).missing_distances ? 1.0 : 0.0; });
    }
  }

  // remove constant-zero columns (possible for flag columns)
  DesignMatrix out;
  out.specification = spec;
  out.notes = std::move(b.notes);
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < b.cols.size(); ++c) {
    const bool all_zero =
        std::all_of(b.cols[c].begin(), b.cols[c].end(), [](double v) { return v == 0.0; });
    if (all_zero) {
      out.notes.push_back("dropped constant-zero column: " + b.names[c]);
    } else {
      keep.push_back(c);
    }
  }
  out.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(keep.size()));
  out.column_names.reserve(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.column_names.push_back(b.names[keep[k]]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      out.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = b.cols[keep[k]][i];
  }
  return out;
}

DesignMatrix build_design_matrix(const Dataset& ds, Specification spec) {
  std::vector<std::uint32_t> rows(ds.records.size());
  std::iota(rows.begin(), rows.end(), 0u);
  return build_design_matrix(ds, spec, rows);
}

Eigen::VectorXd response_vector(const Dataset& ds, const std::vector<std::uint32_t>& rows) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    y(static_cast<Eigen::Index>(i)) = ds.records[rows[i]].log_tickets;
  return y;
}

Eigen::VectorXd response_vector(const Dataset& ds) {
  std::vector<std::uint32_t> rows(ds.records.size());
  std::iota(rows.begin(), rows.end(), 0u);
  return response_vector(ds, rows);
}

}  // namespace raildemand
