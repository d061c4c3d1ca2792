#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "raildemand/types.hpp"

namespace raildemand {

// Column-major table of named numeric columns derived from a Dataset, one row
// per record. This is the regressor/split-variable space the estimators work
// in; categorical fields are materialized as one-hot columns.
struct Frame {
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  std::size_t n_rows = 0;
  std::unordered_map<std::string, int> index;

  int col(const std::string& name) const {
    auto it = index.find(name);
    return it == index.end() ? -1 : it->second;
  }
  int col_checked(const std::string& name) const;  // throws naming the column
  double value(int c, std::size_t row) const { return cols[static_cast<std::size_t>(c)][row]; }
  void add_column(std::string name, std::vector<double> values);
};

inline constexpr const char* kColLogTickets = "log_tickets";
inline constexpr const char* kColLogRealFare = "log_real_fare";

Frame build_frame(const Dataset& ds);

// Years observed in the dataset, ascending; months analogously.
std::vector<int> observed_years(const Dataset& ds);
std::vector<int> observed_months(const Dataset& ds);

std::string year_dummy_name(int year);
std::string month_dummy_name(int month);
std::string direction_dummy_name(Direction d);
std::string size_dummy_name(bool origin_end, SizeClass s);

// Default leaf regressor set for the tree estimator: log fare plus year and
// month dummies (reference levels excluded so the intercept stays
// identified). The intercept itself is implicit.
std::vector<std::string> default_leaf_regressors(const Dataset& ds);

// Default split candidate set: trip and station descriptors, excluding the
// price column (see TreeConfig::allow_price_splits).
std::vector<std::string> default_split_candidates(const Dataset& ds);

}  // namespace raildemand
