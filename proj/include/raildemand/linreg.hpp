#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "raildemand/design.hpp"
#include "raildemand/types.hpp"

namespace raildemand {

struct OlsFit {
  std::vector<std::string> names;   // retained columns, original order
  Eigen::VectorXd coefficients;     // aligned with names
  Eigen::VectorXd standard_errors;  // classical (homoskedastic)
  std::vector<std::string> dropped; // columns removed by rank detection
  double r2 = 0.0;
  double r2_adjusted = 0.0;
  double residual_sum_squares = 0.0;
  double total_sum_squares = 0.0;
  long n_obs = 0;
  long n_params = 0;  // retained columns

  // 0 for rank-dropped columns; throws for unknown names.
  double coefficient(const std::string& name) const;
  double standard_error(const std::string& name) const;
  bool has(const std::string& name) const;
};

// Least squares via column-pivoted Householder QR with relative rank
// tolerance 1e-10. Rank-deficient designs drop dependent columns (reported in
// OlsFit::dropped). Throws when n_obs <= retained parameter count.
OlsFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const std::vector<std::string>& column_names);
OlsFit fit_ols(const DesignMatrix& design, const Eigen::VectorXd& y);

// One independent fit per fare category present in the dataset. Categories
// whose record count cannot support the specification are skipped with a
// notice; throws when every category is skipped.
std::map<FareCategory, OlsFit> fit_by_fare_category(const Dataset& ds, Specification spec,
                                                    std::vector<std::string>* notices = nullptr);

inline constexpr double kRankTolerance = 1e-10;

}  // namespace raildemand
