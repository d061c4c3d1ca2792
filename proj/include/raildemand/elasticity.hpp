#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "raildemand/forest.hpp"
#include "raildemand/types.hpp"

namespace raildemand {

enum class TripType { FromToPerm, OutOfPerm, WithinPerm };
inline constexpr int kTripTypeCount = 3;
const char* trip_type_name(TripType t);
TripType trip_type_of(const Dataset& ds, const MonthlyDemandRecord& r);

struct ElasticityConfig {
  double perturbation = 0.10;
  int bins = 40;
  double inelastic_tolerance = 0.05;  // |e| band treated as zero elasticity
  int threads = 0;
  int density_points = 201;
};

struct ElasticityReport {
  std::vector<double> per_record;  // aligned with dataset records
  std::vector<std::string> keys;
  std::vector<double> histogram_edges;  // bins + 1 entries
  std::vector<long> histogram_counts;
  std::vector<double> density_x;  // Gaussian KDE, Silverman bandwidth
  std::vector<double> density_y;
  double elastic_share = 0.0;         // e < -1
  double weakly_elastic_share = 0.0;  // -1 <= e < -tol
  double inelastic_share = 0.0;       // e >= -tol (includes nonnegative estimates)
  double mean = 0.0;
};

// Log-difference elasticity under a price perturbation: in a log-log model
// this returns the leaf price coefficient exactly, for any perturbation.
double point_elasticity(const BaggedForest& forest, const Frame& frame, std::uint32_t row,
                        double perturbation = 0.10);

ElasticityReport elasticity_distribution(const BaggedForest& forest, const Frame& frame,
                                         const Dataset& ds, const ElasticityConfig& config = {});

// Distance bands (zone intervals, inclusive) per trip type.
struct DistanceBands {
  std::vector<std::pair<int, int>> from_to_perm{{1, 4}, {5, 8}, {9, 17}};
  std::vector<std::pair<int, int>> out_of_perm{{1, 3}, {4, 6}, {7, 17}};
  std::vector<std::pair<int, int>> within_perm{{1, 1}, {2, 2}};

  const std::vector<std::pair<int, int>>& for_type(TripType t) const;
};

struct GroupCell {
  double sum = 0.0;
  long count = 0;
  double mean() const { return count > 0 ? sum / static_cast<double>(count) : 0.0; }
};

struct GroupElasticityTable {
  DistanceBands bands;
  // all_types[direction]
  std::array<GroupCell, kDirectionCount> all_types{};
  // by_type[type][direction] marginals over bands
  std::array<std::array<GroupCell, kDirectionCount>, kTripTypeCount> by_type{};
  // by_band[type][band][direction]
  std::array<std::vector<std::array<GroupCell, kDirectionCount>>, kTripTypeCount> by_band{};
  GroupCell overall{};
};

// Mean elasticity per (direction, trip type, distance band) cell plus
// marginals; throws when an observed zone is not covered by its type's bands.
GroupElasticityTable group_elasticity(const ElasticityReport& report, const Dataset& ds,
                                      const DistanceBands& bands = {});

// Table-8-shaped CSV: directions as columns, "-" for empty cells.
std::vector<std::vector<std::string>> group_table_rows(const GroupElasticityTable& table);

// Standalone histogram SVG (bars plus the KDE overlay).
std::string histogram_svg(const ElasticityReport& report, int width = 720, int height = 440);

}  // namespace raildemand
