#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately avoid the library's computation paths: OLS goes through
// Eigen's QR directly on materialized per-side matrices, and the split
// search enumerates thresholds by brute force.

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "raildemand/frame.hpp"
#include "raildemand/ingest.hpp"
#include "raildemand/tree.hpp"
#include "raildemand/types.hpp"

namespace testsupport {

using namespace raildemand;

inline std::filesystem::path fresh_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("raildemand_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
}

inline Frame make_frame(const std::vector<std::pair<std::string, std::vector<double>>>& cols) {
  Frame f;
  for (const auto& [name, values] : cols) f.add_column(name, values);
  return f;
}

inline std::vector<std::uint32_t> all_rows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<std::uint32_t>(i);
  return rows;
}

// Independent least squares: residual sum of squares of y ~ [1, regressors]
// on the selected rows, via Eigen QR on the materialized matrix.
inline double oracle_rss(const Frame& frame, const std::vector<std::uint32_t>& rows,
                         const std::vector<std::string>& regressors,
                         const std::string& response) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(regressors.size()) + 1;
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::uint32_t r = rows[static_cast<std::size_t>(i)];
    X(i, 0) = 1.0;
    for (std::size_t k = 0; k < regressors.size(); ++k)
      X(i, static_cast<Eigen::Index>(k) + 1) =
          frame.cols[static_cast<std::size_t>(frame.col_checked(regressors[k]))][r];
    y(i) = frame.cols[static_cast<std::size_t>(frame.col_checked(response))][r];
  }
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  return (y - X * beta).squaredNorm();
}

struct BruteSplit {
  std::string variable;
  double value_lo = 0.0;  // the threshold lies strictly between these
  double value_hi = 0.0;
  double threshold = 0.0;
  double sse = 0.0;
};

// Exhaustive reference search: every candidate variable, every midpoint
// between consecutive distinct values, per-side OLS via oracle_rss.
inline std::optional<BruteSplit> brute_force_best_split(const Frame& frame,
                                                        const std::vector<std::uint32_t>& rows,
                                                        const TreeConfig& cfg) {
  const long p = static_cast<long>(cfg.leaf_regressors.size()) + 1;
  const long min_leaf = std::max<long>({cfg.min_leaf_size, p * p, p + 1});
  std::optional<BruteSplit> best;
  for (const auto& var : cfg.split_candidates) {
    const auto& col = frame.cols[static_cast<std::size_t>(frame.col_checked(var))];
    std::set<double> distinct;
    for (const auto r : rows) distinct.insert(col[r]);
    std::vector<double> values(distinct.begin(), distinct.end());
    for (std::size_t v = 0; v + 1 < values.size(); ++v) {
      const double threshold = (values[v] + values[v + 1]) * 0.5;
      std::vector<std::uint32_t> left, right;
      for (const auto r : rows) (col[r] <= threshold ? left : right).push_back(r);
      if (static_cast<long>(left.size()) < min_leaf || static_cast<long>(right.size()) < min_leaf)
        continue;
      const double sse = oracle_rss(frame, left, cfg.leaf_regressors, cfg.response) +
                         oracle_rss(frame, right, cfg.leaf_regressors, cfg.response);
      if (!best || sse < best->sse)
        best = BruteSplit{var, values[v], values[v + 1], threshold, sse};
    }
  }
  return best;
}

// Tiny hand-built dataset for data-model and report tests.
struct TinyWorld {
  Dataset ds;

  TinyWorld() { ds.zone_table = {13, 25, 38, 50, 65, 80, 95, 110, 130, 150, 170, 190, 210}; }

  int station(const std::string& id, Direction dir, double pop, bool is_perm, double lat,
              double lon) {
    Station s;
    s.id = id;
    s.name = id;
    s.direction = dir;
    s.population_5km = pop;
    s.is_perm = is_perm;
    s.lat = lat;
    s.lon = lon;
    s.dist_settlement1_km = 1.0;
    s.dist_settlement2_km = 2.0;
    s.dist_bus_km = 3.0;
    s.dist_highway_km = 4.0;
    const int idx = static_cast<int>(ds.stations.size());
    ds.station_index[s.id] = idx;
    ds.stations.push_back(std::move(s));
    return idx;
  }

  int route(int origin, int destination, double distance_km) {
    Route r;
    r.origin = origin;
    r.destination = destination;
    r.origin_id = ds.stations[static_cast<std::size_t>(origin)].id;
    r.destination_id = ds.stations[static_cast<std::size_t>(destination)].id;
    r.distance_km = distance_km;
    r.zone = zone_of_distance(distance_km, ds.zone_table);
    r.direction = ds.stations[static_cast<std::size_t>(origin)].direction;
    ds.routes.push_back(std::move(r));
    return static_cast<int>(ds.routes.size()) - 1;
  }

  void record(int route, int year, int month, FareCategory cat, long long tickets,
              double real_fare) {
    MonthlyDemandRecord r;
    r.route = route;
    r.year = year;
    r.month = month;
    r.category = cat;
    r.tickets = tickets;
    r.log_tickets = std::log(static_cast<double>(tickets));
    r.nominal_fare = real_fare;
    r.real_fare = real_fare;
    r.log_real_fare = std::log(real_fare);
    ds.records.push_back(r);
  }
};

}  // namespace testsupport
