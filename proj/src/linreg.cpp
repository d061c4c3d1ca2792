#include "raildemand/linreg.hpp"

#include <algorithm>
#include <sstream>

#include "raildemand/common.hpp"

namespace raildemand {

double OlsFit::coefficient(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return coefficients(static_cast<Eigen::Index>(i));
  if (std::find(dropped.begin(), dropped.end(), name) != dropped.end()) return 0.0;
  fail("linreg", "unknown coefficient '" + name + "'");
}

double OlsFit::standard_error(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return standard_errors(static_cast<Eigen::Index>(i));
  if (std::find(dropped.begin(), dropped.end(), name) != dropped.end()) return 0.0;
  fail("linreg", "unknown coefficient '" + name + "'");
}

bool OlsFit::has(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

OlsFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const std::vector<std::string>& column_names) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p0 = X.cols();
  if (y.size() != n) fail("linreg", "design and response row counts differ");
  if (static_cast<std::size_t>(p0) != column_names.size())
    fail("linreg", "design and column-name counts differ");
  if (p0 == 0) fail("linreg", "design has no columns");

  OlsFit fit;
  fit.n_obs = n;

  // rank detection pass
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(kRankTolerance);
  const Eigen::Index rank = qr.rank();

  std::vector<Eigen::Index> retained;
  if (rank == p0) {
    retained.resize(static_cast<std::size_t>(p0));
    for (Eigen::Index j = 0; j < p0; ++j) retained[static_cast<std::size_t>(j)] = j;
  } else {
    const auto& perm = qr.colsPermutation().indices();
    std::vector<bool> keep(static_cast<std::size_t>(p0), false);
    for (Eigen::Index k = 0; k < rank; ++k) keep[static_cast<std::size_t>(perm(k))] = true;
    for (Eigen::Index j = 0; j < p0; ++j) {
      if (keep[static_cast<std::size_t>(j)])
        retained.push_back(j);
      else
        fit.dropped.push_back(column_names[static_cast<std::size_t>(j)]);
    }
  }
  const Eigen::Index p = static_cast<Eigen::Index>(retained.size());
  if (n <= p) {
    std::ostringstream msg;
    msg << "insufficient observations: n=" << n << " <= params=" << p;
    fail("linreg", msg.str());
  }

  Eigen::MatrixXd Xr;
  const Eigen::MatrixXd* Xp = &X;
  if (p != p0) {
    Xr.resize(n, p);
    for (Eigen::Index k = 0; k < p; ++k) Xr.col(k) = X.col(retained[static_cast<std::size_t>(k)]);
    Xp = &Xr;
  }
  for (Eigen::Index k = 0; k < p; ++k)
    fit.names.push_back(column_names[static_cast<std::size_t>(retained[static_cast<std::size_t>(k)])]);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr2(*Xp);
  qr2.setThreshold(kRankTolerance);
  fit.coefficients = qr2.solve(y);

  const Eigen::VectorXd residuals = y - (*Xp) * fit.coefficients;
  fit.residual_sum_squares = residuals.squaredNorm();
  const double mean_y = y.mean();
  fit.total_sum_squares = (y.array() - mean_y).square().sum();

  // classical covariance via the R factor: (X'X)^-1 = P R^-1 R^-T P'
  const double sigma2 = fit.residual_sum_squares / static_cast<double>(n - p);
  const Eigen::MatrixXd R =
      qr2.matrixQR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd Rinv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd M = Rinv * Rinv.transpose();
  const auto& perm2 = qr2.colsPermutation().indices();
  fit.standard_errors.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    // position of column j in the pivoted order
    Eigen::Index pos = 0;
    for (Eigen::Index k = 0; k < p; ++k)
      if (perm2(k) == j) {
        pos = k;
        break;
      }
    fit.standard_errors(j) = std::sqrt(sigma2 * M(pos, pos));
  }

  fit.n_params = p;
  if (fit.total_sum_squares > 0.0) {
    fit.r2 = 1.0 - fit.residual_sum_squares / fit.total_sum_squares;
  } else {
    fit.r2 = 1.0;  // constant response fitted exactly by the intercept
  }
  fit.r2 = std::clamp(fit.r2, 0.0, 1.0);
  fit.r2_adjusted =
      1.0 - (1.0 - fit.r2) * static_cast<double>(n - 1) / static_cast<double>(n - p);
  return fit;
}

OlsFit fit_ols(const DesignMatrix& design, const Eigen::VectorXd& y) {
  return fit_ols(design.X, y, design.column_names);
}

std::map<FareCategory, OlsFit> fit_by_fare_category(const Dataset& ds, Specification spec,
                                                    std::vector<std::string>* notices) {
  std::map<FareCategory, std::vector<std::uint32_t>> rows_by_category;
  for (std::size_t i = 0; i < ds.records.size(); ++i)
    rows_by_category[ds.records[i].category].push_back(static_cast<std::uint32_t>(i));

  std::map<FareCategory, OlsFit> fits;
  for (const auto& [category, rows] : rows_by_category) {
    try {
      DesignMatrix design = build_design_matrix(ds, spec, rows);
      fits[category] = fit_ols(design, response_vector(ds, rows));
    } catch (const RdError& e) {
      if (notices) {
        std::ostringstream msg;
        msg << fare_category_name(category) << ": not estimated due to the insufficient number"
            << " of observations (" << e.what() << ")";
        notices->push_back(msg.str());
      }
    }
  }
  if (fits.empty()) fail("linreg", "no fare category has enough observations to estimate");
  return fits;
}

}  // namespace raildemand
