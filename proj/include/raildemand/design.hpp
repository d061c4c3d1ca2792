#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "raildemand/types.hpp"

namespace raildemand {

enum class Specification { I, II, III, IV };
Specification parse_specification(const std::string& s);
const char* specification_name(Specification s);

// Regressor layout per specification:
//   I   intercept + log_real_fare
//   II  I + year, month and zone fixed effects
//   III II + direction fixed effects
//   IV  III + trip/station characteristics
// Dummy blocks are drop-one encoded over levels observed in the selected
// rows; reference levels: earliest year, month 1, zone 1, Western direction,
// Huge settlement class (falling back to the first observed level when the
// reference is absent). Constant-zero columns are removed and noted.
struct DesignMatrix {
  Eigen::MatrixXd X;
  std::vector<std::string> column_names;
  Specification specification = Specification::I;
  std::vector<std::string> notes;  // reference levels, dropped columns
};

DesignMatrix build_design_matrix(const Dataset& ds, Specification spec);
// Restricted to a record subset (row indices into ds.records).
DesignMatrix build_design_matrix(const Dataset& ds, Specification spec,
                                 const std::vector<std::uint32_t>& rows);

// Response vector (log tickets) for the same row selection.
Eigen::VectorXd response_vector(const Dataset& ds);
Eigen::VectorXd response_vector(const Dataset& ds, const std::vector<std::uint32_t>& rows);

}  // namespace raildemand
