#include "raildemand/elasticity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "raildemand/common.hpp"

namespace raildemand {

const char* trip_type_name(TripType t) {
  switch (t) {
    case TripType::FromToPerm: return "FromToPerm";
    case TripType::OutOfPerm: return "OutOfPerm";
    case TripType::WithinPerm: return "WithinPerm";
  }
  return "?";
}

TripType trip_type_of(const Dataset& ds, const MonthlyDemandRecord& r) {
  const bool from_perm = ds.origin_of(r).is_perm;
  const bool to_perm = ds.destination_of(r).is_perm;
  if (from_perm && to_perm) return TripType::WithinPerm;
  if (from_perm || to_perm) return TripType::FromToPerm;
  return TripType::OutOfPerm;
}

double point_elasticity(const BaggedForest& forest, const Frame& frame, std::uint32_t row,
                        double perturbation) {
  if (!(perturbation > -1.0) || perturbation == 0.0)
    fail("elasticity", "perturbation must be > -1 and nonzero");
  const int price_col = frame.col_checked(kColLogRealFare);
  const double dlnp = std::log1p(perturbation);
  const double base = predict_mean(forest, frame, row);
  const double bumped = predict_mean(forest, frame, row, price_col,
                                     frame.value(price_col, row) + dlnp);
  return (bumped - base) / dlnp;
}

ElasticityReport elasticity_distribution(const BaggedForest& forest, const Frame& frame,
                                         const Dataset& ds, const ElasticityConfig& config) {
  if (frame.n_rows == 0) fail("elasticity", "empty dataset");
  if (config.bins < 1) fail("elasticity", "bins must be >= 1");
  const double tol = config.inelastic_tolerance;

  ElasticityReport report;
  report.per_record.resize(frame.n_rows);
  report.keys.resize(frame.n_rows);
  parallel_for(frame.n_rows, config.threads, [&](std::size_t i) {
    report.per_record[i] =
        point_elasticity(forest, frame, static_cast<std::uint32_t>(i), config.perturbation);
  });
  for (std::size_t i = 0; i < frame.n_rows; ++i) report.keys[i] = record_key(ds, ds.records[i]);

  const std::size_t n = report.per_record.size();
  long n_elastic = 0, n_weak = 0, n_inelastic = 0;
  double sum = 0.0;
  for (const double e : report.per_record) {
    sum += e;
    if (e < -1.0)
      ++n_elastic;
    else if (e < -tol)
      ++n_weak;
    else
      ++n_inelastic;
  }
  report.mean = sum / static_cast<double>(n);
  report.elastic_share = static_cast<double>(n_elastic) / static_cast<double>(n);
  report.weakly_elastic_share = static_cast<double>(n_weak) / static_cast<double>(n);
  report.inelastic_share = static_cast<double>(n_inelastic) / static_cast<double>(n);

  // histogram
  double lo = *std::min_element(report.per_record.begin(), report.per_record.end());
  double hi = *std::max_element(report.per_record.begin(), report.per_record.end());
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const int bins = config.bins;
  report.histogram_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b)
    report.histogram_edges[static_cast<std::size_t>(b)] =
        lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  report.histogram_counts.assign(static_cast<std::size_t>(bins), 0);
  for (const double e : report.per_record) {
    int b = static_cast<int>(std::floor((e - lo) / (hi - lo) * bins));
    b = std::clamp(b, 0, bins - 1);
    ++report.histogram_counts[static_cast<std::size_t>(b)];
  }

  // Gaussian KDE, Silverman bandwidth
  if (n >= 2) {
    const double mean = report.mean;
    double var = 0.0;
    for (const double e : report.per_record) var += (e - mean) * (e - mean);
    var /= static_cast<double>(n - 1);
    std::vector<double> sorted(report.per_record);
    std::sort(sorted.begin(), sorted.end());
    const double q1 = sorted[static_cast<std::size_t>(0.25 * static_cast<double>(n - 1))];
    const double q3 = sorted[static_cast<std::size_t>(0.75 * static_cast<double>(n - 1))];
    const double iqr = q3 - q1;
    double spread = std::sqrt(var);
    if (iqr > 0) spread = std::min(spread, iqr / 1.34);
    const double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
    if (h > 0) {
      const int points = std::max(2, config.density_points);
      const double xlo = sorted.front() - 3 * h, xhi = sorted.back() + 3 * h;
      report.density_x.resize(static_cast<std::size_t>(points));
      report.density_y.resize(static_cast<std::size_t>(points));
      const double norm = 1.0 / (static_cast<double>(n) * h * std::sqrt(2 * 3.14159265358979323846));
      for (int i = 0; i < points; ++i) {
        const double x =
            xlo + (xhi - xlo) * static_cast<double>(i) / static_cast<double>(points - 1);
        double density = 0.0;
        for (const double e : sorted) {
          const double u = (x - e) / h;
          density += std::exp(-0.5 * u * u);
        }
        report.density_x[static_cast<std::size_t>(i)] = x;
        report.density_y[static_cast<std::size_t>(i)] = density * norm;
      }
    }
  }
  return report;
}

const std::vector<std::pair<int, int>>& DistanceBands::for_type(TripType t) const {
  switch (t) {
    case TripType::FromToPerm: return from_to_perm;
    case TripType::OutOfPerm: return out_of_perm;
    case TripType::WithinPerm: return within_perm;
  }
  return from_to_perm;
}

GroupElasticityTable group_elasticity(const ElasticityReport& report, const Dataset& ds,
                                      const DistanceBands& bands) {
  if (report.per_record.size() != ds.records.size())
    fail("elasticity", "report does not match the dataset");
  GroupElasticityTable table;
  table.bands = bands;
  for (int t = 0; t < kTripTypeCount; ++t)
    table.by_band[static_cast<std::size_t>(t)].resize(
        bands.for_type(static_cast<TripType>(t)).size());

  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const MonthlyDemandRecord& r = ds.records[i];
    const double e = report.per_record[i];
    const int d = static_cast<int>(ds.route_of(r).direction);
    const TripType type = trip_type_of(ds, r);
    const auto& type_bands = bands.for_type(type);
    const int zone = ds.route_of(r).zone;
    int band = -1;
    for (std::size_t b = 0; b < type_bands.size(); ++b)
      if (zone >= type_bands[b].first && zone <= type_bands[b].second) {
        band = static_cast<int>(b);
        break;
      }
    if (band < 0) {
      std::ostringstream msg;
      msg << "zone " << zone << " of a " << trip_type_name(type)
          << " trip is not covered by the distance bands";
      fail("elasticity", msg.str());
    }
    auto bump = [&](GroupCell& cell) {
      cell.sum += e;
      ++cell.count;
    };
    bump(table.overall);
    bump(table.all_types[static_cast<std::size_t>(d)]);
    bump(table.by_type[static_cast<std::size_t>(type)][static_cast<std::size_t>(d)]);
    bump(table.by_band[static_cast<std::size_t>(type)][static_cast<std::size_t>(band)]
                      [static_cast<std::size_t>(d)]);
  }
  return table;
}

namespace {
std::string cell_str(const GroupCell& cell) {
  return cell.count > 0 ? format_fixed(cell.mean(), 4) : "-";
}
}  // namespace

std::vector<std::vector<std::string>> group_table_rows(const GroupElasticityTable& table) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"group"};
  for (int d = 0; d < kDirectionCount; ++d)
    header.push_back(direction_name(static_cast<Direction>(d)));
  rows.push_back(header);

  std::vector<std::string> all{"All types"};
  for (int d = 0; d < kDirectionCount; ++d)
    all.push_back(cell_str(table.all_types[static_cast<std::size_t>(d)]));
  rows.push_back(all);

  static const char* kTypeLabels[kTripTypeCount] = {"From/to Perm", "Out of Perm", "Within Perm"};
  for (int t = 0; t < kTripTypeCount; ++t) {
    std::vector<std::string> type_row{kTypeLabels[t]};
    for (int d = 0; d < kDirectionCount; ++d)
      type_row.push_back(cell_str(table.by_type[static_cast<std::size_t>(t)]
                                               [static_cast<std::size_t>(d)]));
    rows.push_back(type_row);
    const auto& bands = table.bands.for_type(static_cast<TripType>(t));
    for (std::size_t b = 0; b < bands.size(); ++b) {
      std::ostringstream label;
      label << "  zones " << bands[b].first;
      if (bands[b].second != bands[b].first) label << "-" << bands[b].second;
      std::vector<std::string> band_row{label.str()};
      for (int d = 0; d < kDirectionCount; ++d)
        band_row.push_back(cell_str(
            table.by_band[static_cast<std::size_t>(t)][b][static_cast<std::size_t>(d)]));
      rows.push_back(band_row);
    }
  }
  return rows;
}

std::string histogram_svg(const ElasticityReport& report, int width, int height) {
  const int margin_left = 60, margin_right = 20, margin_top = 20, margin_bottom = 50;
  const double plot_w = width - margin_left - margin_right;
  const double plot_h = height - margin_top - margin_bottom;
  const double xlo = report.histogram_edges.front();
  const double xhi = report.histogram_edges.back();
  long max_count = 1;
  for (const long c : report.histogram_counts) max_count = std::max(max_count, c);

  auto sx = [&](double x) { return margin_left + (x - xlo) / (xhi - xlo) * plot_w; };
  auto sy = [&](double frac) { return margin_top + (1.0 - frac) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

  for (std::size_t b = 0; b < report.histogram_counts.size(); ++b) {
    const double x0 = sx(report.histogram_edges[b]);
    const double x1 = sx(report.histogram_edges[b + 1]);
    const double frac =
        static_cast<double>(report.histogram_counts[b]) / static_cast<double>(max_count);
    svg << "<rect x=\"" << format_fixed(x0, 2) << "\" y=\"" << format_fixed(sy(frac), 2)
        << "\" width=\"" << format_fixed(std::max(0.5, x1 - x0 - 0.5), 2) << "\" height=\""
        << format_fixed(frac * plot_h, 2) << "\" fill=\"#4878a8\"/>\n";
  }

  if (!report.density_x.empty()) {
    double max_density = 0.0;
    for (const double d : report.density_y) max_density = std::max(max_density, d);
    if (max_density > 0) {
      svg << "<polyline fill=\"none\" stroke=\"#c04040\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < report.density_x.size(); ++i) {
        const double x = std::clamp(report.density_x[i], xlo, xhi);
        svg << format_fixed(sx(x), 2) << "," << format_fixed(sy(report.density_y[i] / max_density), 2)
            << " ";
      }
      svg << "\"/>\n";
    }
  }

  // axes
  svg << "<line x1=\"" << margin_left << "\" y1=\"" << (margin_top + (int)plot_h) << "\" x2=\""
      << (margin_left + (int)plot_w) << "\" y2=\"" << (margin_top + (int)plot_h)
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << margin_left << "\" y1=\"" << margin_top << "\" x2=\"" << margin_left
      << "\" y2=\"" << (margin_top + (int)plot_h) << "\" stroke=\"black\"/>\n";
  const int ticks = 8;
  for (int i = 0; i <= ticks; ++i) {
    const double x = xlo + (xhi - xlo) * static_cast<double>(i) / ticks;
    svg << "<text x=\"" << format_fixed(sx(x), 2) << "\" y=\"" << (height - margin_bottom + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">"
        << format_fixed(x, 2) << "</text>\n";
  }
  svg << "<text x=\"" << (margin_left + (int)(plot_w / 2)) << "\" y=\"" << (height - 12)
      << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">"
      << "price elasticity of demand</text>\n";
  svg << "<text x=\"18\" y=\"" << (margin_top + (int)(plot_h / 2))
      << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "transform=\"rotate(-90 18 " << (margin_top + (int)(plot_h / 2)) << ")\">records</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace raildemand
