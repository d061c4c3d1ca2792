#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "raildemand/design.hpp"
#include "raildemand/linreg.hpp"
#include "raildemand/synth.hpp"
#include "support.hpp"

using namespace raildemand;
using namespace testsupport;

namespace {
Eigen::MatrixXd with_intercept(const std::vector<std::vector<double>>& cols) {
  const Eigen::Index n = static_cast<Eigen::Index>(cols.front().size());
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(cols.size()) + 1);
  X.col(0).setOnes();
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (Eigen::Index i = 0; i < n; ++i)
      X(i, static_cast<Eigen::Index>(c) + 1) = cols[c][static_cast<std::size_t>(i)];
  return X;
}

std::vector<std::string> names_for(int p) {
  std::vector<std::string> names{"(intercept)"};
  for (int i = 1; i < p; ++i) names.push_back("x" + std::to_string(i));
  return names;
}
}  // namespace

TEST_CASE("exact line fit") {
  const Eigen::MatrixXd X = with_intercept({{1, 2, 3}});
  Eigen::Vector3d y(2, 4, 6);
  const OlsFit fit = fit_ols(X, y, names_for(2));
  CHECK(fit.coefficient("x1") == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.coefficient("(intercept)") == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hand-computed normal equations") {
  // x = 1,2,3; y = 1,2,2 -> slope 1/2, intercept 2/3, r2 3/4
  const Eigen::MatrixXd X = with_intercept({{1, 2, 3}});
  Eigen::Vector3d y(1, 2, 2);
  const OlsFit fit = fit_ols(X, y, names_for(2));
  CHECK(fit.coefficient("x1") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.coefficient("(intercept)") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("noise-free recovery of generating coefficients") {
  SplitMix64 rng(3);
  const int n = 60;
  std::vector<std::vector<double>> cols(3, std::vector<double>(n));
  Eigen::VectorXd y(n);
  const double b0 = 1.25, b1 = -2.5, b2 = 0.75, b3 = 4.0;
  for (int i = 0; i < n; ++i) {
    cols[0][static_cast<std::size_t>(i)] = rng.uniform(-1, 1);
    cols[1][static_cast<std::size_t>(i)] = rng.uniform(0, 5);
    cols[2][static_cast<std::size_t>(i)] = rng.normal();
    y(i) = b0 + b1 * cols[0][static_cast<std::size_t>(i)] +
           b2 * cols[1][static_cast<std::size_t>(i)] + b3 * cols[2][static_cast<std::size_t>(i)];
  }
  const OlsFit fit = fit_ols(with_intercept(cols), y, names_for(4));
  CHECK(fit.coefficient("(intercept)") == doctest::Approx(b0).epsilon(1e-10));
  CHECK(fit.coefficient("x1") == doctest::Approx(b1).epsilon(1e-10));
  CHECK(fit.coefficient("x2") == doctest::Approx(b2).epsilon(1e-10));
  CHECK(fit.coefficient("x3") == doctest::Approx(b3).epsilon(1e-10));
  CHECK(fit.residual_sum_squares == doctest::Approx(0.0).scale(1).epsilon(1e-12));
}

TEST_CASE("adding a column never increases the residual sum of squares") {
  SplitMix64 rng(11);
  const int n = 50;
  std::vector<std::vector<double>> cols(4, std::vector<double>(n));
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (auto& c : cols) c[static_cast<std::size_t>(i)] = rng.normal();
    y(i) = rng.normal();
  }
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= cols.size(); ++k) {
    const std::vector<std::vector<double>> subset(cols.begin(),
                                                  cols.begin() + static_cast<std::ptrdiff_t>(k));
    const OlsFit fit =
        fit_ols(with_intercept(subset), y, names_for(static_cast<int>(k) + 1));
    CHECK(fit.residual_sum_squares <= previous * (1 + 1e-12) + 1e-12);
    previous = fit.residual_sum_squares;
  }
}

TEST_CASE("r2 equals an independent recomputation from residuals") {
  SplitMix64 rng(21);
  const int n = 80;
  std::vector<std::vector<double>> cols(2, std::vector<double>(n));
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    cols[0][static_cast<std::size_t>(i)] = rng.normal();
    cols[1][static_cast<std::size_t>(i)] = rng.uniform(0, 3);
    y(i) = 1 + cols[0][static_cast<std::size_t>(i)] + rng.normal();
  }
  const Eigen::MatrixXd X = with_intercept(cols);
  const OlsFit fit = fit_ols(X, y, names_for(3));

  Eigen::VectorXd beta(3);
  beta << fit.coefficient("(intercept)"), fit.coefficient("x1"), fit.coefficient("x2");
  const Eigen::VectorXd resid = y - X * beta;
  const double rss = resid.squaredNorm();
  const double tss = (y.array() - y.mean()).square().sum();
  CHECK(fit.r2 == doctest::Approx(1.0 - rss / tss).epsilon(1e-12));
  CHECK(fit.r2_adjusted <= fit.r2);
  CHECK(fit.r2_adjusted ==
        doctest::Approx(1.0 - (1.0 - fit.r2) * (n - 1) / double(n - 3)).epsilon(1e-12));
}

TEST_CASE("standard errors match explicit covariance inversion") {
  SplitMix64 rng(31);
  const int n = 40;
  std::vector<std::vector<double>> cols(3, std::vector<double>(n));
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    cols[0][static_cast<std::size_t>(i)] = rng.normal();
    cols[1][static_cast<std::size_t>(i)] = rng.uniform(-2, 2);
    cols[2][static_cast<std::size_t>(i)] = rng.uniform(0, 1);
    y(i) = 2 - cols[0][static_cast<std::size_t>(i)] + rng.normal() * 0.5;
  }
  const Eigen::MatrixXd X = with_intercept(cols);
  const OlsFit fit = fit_ols(X, y, names_for(4));

  const Eigen::VectorXd beta = (X.transpose() * X).inverse() * X.transpose() * y;
  const double sigma2 = (y - X * beta).squaredNorm() / double(n - 4);
  const Eigen::MatrixXd cov = sigma2 * (X.transpose() * X).inverse();
  for (int j = 0; j < 4; ++j)
    CHECK(fit.standard_errors(j) == doctest::Approx(std::sqrt(cov(j, j))).epsilon(1e-8));
}

TEST_CASE("rank-deficient designs drop dependent columns") {
  SplitMix64 rng(41);
  const int n = 30;
  std::vector<std::vector<double>> cols(2, std::vector<double>(n));
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    cols[0][static_cast<std::size_t>(i)] = rng.normal();
    cols[1][static_cast<std::size_t>(i)] = 2.0 * cols[0][static_cast<std::size_t>(i)];  // duplicate
    y(i) = 1 + cols[0][static_cast<std::size_t>(i)] + 0.1 * rng.normal();
  }
  const OlsFit fit = fit_ols(with_intercept(cols), y, names_for(3));
  CHECK(fit.dropped.size() == 1);
  CHECK(fit.n_params == 2);

  const std::vector<std::vector<double>> reduced{cols[0]};
  const OlsFit base = fit_ols(with_intercept(reduced), y, names_for(2));
  CHECK(fit.residual_sum_squares == doctest::Approx(base.residual_sum_squares).epsilon(1e-10));
}

TEST_CASE("insufficient observations raise an error") {
  const Eigen::MatrixXd X = with_intercept({{1, 2}});
  Eigen::Vector2d y(1, 2);
  CHECK_THROWS_AS(fit_ols(X, y, names_for(2)), RdError);
}

TEST_CASE("omitted-variable bias shrinks the fare coefficient") {
  SynthConfig cfg = confounded_preset();
  cfg.target_records = 3000;
  cfg.seed = 99;
  const auto [ds, truth] = generate(cfg);
  const OlsFit spec1 = fit_ols(build_design_matrix(ds, Specification::I), response_vector(ds));
  const OlsFit spec2 = fit_ols(build_design_matrix(ds, Specification::II), response_vector(ds));
  CHECK(std::abs(spec1.coefficient(kColLogRealFare)) <
        std::abs(spec2.coefficient(kColLogRealFare)));
  CHECK(spec2.coefficient(kColLogRealFare) == doctest::Approx(-1.981).epsilon(0.08));
}

TEST_CASE("per-category fits") {
  SUBCASE("single category yields one entry") {
    TinyWorld world;
    const int s1 = world.station("S1", Direction::Western, 1000, false, 58.0, 56.0);
    const int s2 = world.station("S2", Direction::Western, 1000, false, 58.0, 56.1);
    const int r = world.route(s1, s2, 12);
    SplitMix64 rng(5);
    for (int i = 0; i < 20; ++i)
      world.record(r, 2013, 1 + i % 12, FareCategory::FullSingle, 10 + i, 20 + rng.uniform(0, 10));
    const auto fits = fit_by_fare_category(world.ds, Specification::I);
    CHECK(fits.size() == 1);
    CHECK(fits.count(FareCategory::FullSingle) == 1);
  }

  SUBCASE("under-populated categories are skipped with a notice") {
    TinyWorld world;
    const int s1 = world.station("S1", Direction::Western, 1000, false, 58.0, 56.0);
    const int s2 = world.station("S2", Direction::Western, 1000, false, 58.0, 56.1);
    const int r = world.route(s1, s2, 12);
    SplitMix64 rng(6);
    for (int i = 0; i < 20; ++i)
      world.record(r, 2013, 1 + i % 12, FareCategory::FullSingle, 10 + i, 20 + rng.uniform(0, 10));
    world.record(r, 2013, 1, FareCategory::Student, 5, 13);
    world.record(r, 2013, 2, FareCategory::Student, 6, 13.5);
    std::vector<std::string> notices;
    const auto fits = fit_by_fare_category(world.ds, Specification::I, &notices);
    CHECK(fits.count(FareCategory::Student) == 0);
    REQUIRE(notices.size() == 1);
    CHECK(notices[0].find("Student") != std::string::npos);
    CHECK(notices[0].find("insufficient") != std::string::npos);
  }

  SUBCASE("error when every category is under-populated") {
    TinyWorld world;
    const int s1 = world.station("S1", Direction::Western, 1000, false, 58.0, 56.0);
    const int s2 = world.station("S2", Direction::Western, 1000, false, 58.0, 56.1);
    const int r = world.route(s1, s2, 12);
    world.record(r, 2013, 1, FareCategory::FullSingle, 5, 20);
    world.record(r, 2013, 2, FareCategory::FullSingle, 6, 21);
    CHECK_THROWS_AS(fit_by_fare_category(world.ds, Specification::I), RdError);
  }

  SUBCASE("zero-elasticity category recovered as statistically zero") {
    SynthConfig cfg = ols_recovery_preset();
    cfg.seed = 300;
    cfg.target_records = 8000;
    cfg.categories = {{FareCategory::FullSingle, std::nullopt, 0.0},
                      {FareCategory::Children, 0.0, -1.0}};
    const auto [ds, truth] = generate(cfg);
    const auto fits = fit_by_fare_category(ds, Specification::II);
    REQUIRE(fits.count(FareCategory::Children) == 1);
    REQUIRE(fits.count(FareCategory::FullSingle) == 1);
    const OlsFit& children = fits.at(FareCategory::Children);
    const OlsFit& full = fits.at(FareCategory::FullSingle);
    const double ci = 2.58 * children.standard_error(kColLogRealFare);
    CHECK(std::abs(children.coefficient(kColLogRealFare)) <= ci);
    const double ci_full = 2.58 * full.standard_error(kColLogRealFare);
    CHECK(std::abs(full.coefficient(kColLogRealFare) - (-1.981)) <= ci_full);
  }
}
