#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ragq/data_model.hpp"
#include "ragq/errors.hpp"
#include "ragq/metrics.hpp"
#include "ragq/rng.hpp"

using namespace ragq;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed, double lo = 1.0, double hi = 10.0) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("hand-computed example") {
  const std::vector<double> y = {50, 60}, yhat = {55, 55};
  const MetricsRow m = regression_metrics(y, yhat);
  CHECK(m.mse == doctest::Approx(25).epsilon(1e-9));
  CHECK(m.rmse == doctest::Approx(5).epsilon(1e-9));
  CHECK(m.mae == doctest::Approx(5).epsilon(1e-9));
  CHECK(m.mape == doctest::Approx(9.166666666666666).epsilon(1e-9));
  CHECK(std::abs(m.r2) < 1e-9);
}

TEST_CASE("perfect prediction") {
  const std::vector<double> y = {1, 4, 2, 8};
  const MetricsRow m = regression_metrics(y, y);
  CHECK(m.mse == 0.0);
  CHECK(m.rmse == 0.0);
  CHECK(m.mae == 0.0);
  CHECK(m.mape == 0.0);
  CHECK(m.r2 == 1.0);
}

TEST_CASE("reference table rmse is the root of mse") {
  CHECK(std::sqrt(12.230) == doctest::Approx(3.498).epsilon(5e-4));
  CHECK(std::sqrt(30.728) == doctest::Approx(5.543).epsilon(5e-4));
}

TEST_CASE("metric relations hold on random data (property)") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto y = noise(30, seed), yhat = noise(30, seed + 1000);
    const MetricsRow m = regression_metrics(y, yhat);
    REQUIRE(m.rmse * m.rmse == doctest::Approx(m.mse).epsilon(1e-9));
    REQUIRE(m.mae <= m.rmse + 1e-12);
    REQUIRE(m.r2 <= 1.0);
  }
}

TEST_CASE("pearson identities") {
  const auto x = noise(20, 1), y = noise(20, 2);
  CHECK(pearson_corr(x, x) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> a = {1, 2, 3}, b = {3, 2, 1};
  CHECK(pearson_corr(a, b) == doctest::Approx(-1.0).epsilon(1e-12));
  const double r = pearson_corr(x, y);
  CHECK(pearson_corr(y, x) == r);
  std::vector<double> scaled(x.size()), flipped(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    scaled[i] = 3.5 * x[i] - 7.0;
    flipped[i] = -0.25 * x[i] + 1.0;
  }
  CHECK(pearson_corr(scaled, y) == doctest::Approx(r).epsilon(1e-12));
  CHECK(pearson_corr(flipped, y) == doctest::Approx(-r).epsilon(1e-12));
}

TEST_CASE("pearson over the sample rows matches the spreadsheet value") {
  const Dataset ds = embedded_sample();
  const auto rel = ds.features().column(FeatureSchema::doc_relevance);
  CHECK(pearson_corr(rel, ds.target()) == doctest::Approx(0.5337555514723976).epsilon(1e-12));
}

TEST_CASE("pearson errors") {
  const std::vector<double> c = {2, 2, 2}, v = {1, 2, 3};
  CHECK_THROWS_AS(pearson_corr(c, v), CorrelationUndefinedError);
  CHECK_THROWS_AS(pearson_corr(v, std::vector<double>{1, 2}), ArgumentError);
  CHECK_THROWS_AS(pearson_corr(std::vector<double>{1}, std::vector<double>{2}), InsufficientDataError);
}

TEST_CASE("r2 of reference predictors") {
  const auto y = noise(25, 3);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  CHECK(r2_score(y, std::vector<double>(y.size(), mean)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  std::vector<double> worse(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) worse[i] = -y[i] + 2 * mean;
  CHECK(r2_score(y, worse) < 0.0);
  CHECK(r2_score(y, worse) == doctest::Approx(-3.0));
}

TEST_CASE("mape is unit-free") {
  const auto y = noise(40, 4), yhat = noise(40, 5);
  std::vector<double> ys(y.size()), yhs(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    ys[i] = 12.5 * y[i];
    yhs[i] = 12.5 * yhat[i];
  }
  CHECK(regression_metrics(ys, yhs).mape == doctest::Approx(regression_metrics(y, yhat).mape).epsilon(1e-12));
}

TEST_CASE("joint permutation changes nothing") {
  const auto y = noise(30, 6), yhat = noise(30, 7);
  std::vector<std::size_t> idx(30);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(8);
  rng.shuffle(idx.begin(), idx.end());
  const auto yp = select<double>(y, idx), yhp = select<double>(yhat, idx);
  const MetricsRow a = regression_metrics(y, yhat), b = regression_metrics(yp, yhp);
  CHECK(a.mse == doctest::Approx(b.mse).epsilon(1e-12));
  CHECK(a.mae == doctest::Approx(b.mae).epsilon(1e-12));
  CHECK(a.mape == doctest::Approx(b.mape).epsilon(1e-12));
  CHECK(a.r2 == doctest::Approx(b.r2).epsilon(1e-12));
}

TEST_CASE("undefined metrics") {
  const std::vector<double> zero_y = {0.0, 1.0, 2.0}, yhat = {0.5, 1.0, 2.5};
  CHECK_THROWS_AS(regression_metrics(zero_y, yhat), MapeUndefinedError);
  const PartialMetrics p = regression_metrics_partial(zero_y, yhat);
  CHECK_FALSE(p.mape.has_value());
  REQUIRE(p.r2.has_value());
  CHECK(p.mse == doctest::Approx(0.5 / 3));

  const std::vector<double> flat = {3, 3, 3};
  CHECK_THROWS_AS(regression_metrics(flat, yhat), R2UndefinedError);
  const PartialMetrics q = regression_metrics_partial(flat, yhat);
  CHECK_FALSE(q.r2.has_value());
  CHECK(q.mape.has_value());

  CHECK_THROWS_AS(regression_metrics(std::vector<double>{1, 2}, std::vector<double>{1}), ArgumentError);
  CHECK_THROWS(regression_metrics(std::vector<double>{1}, std::vector<double>{1}));
}

TEST_CASE("correlation matrix") {
  const Dataset ds = synthesize(300, 3);
  const CorrelationMatrix m = correlation_matrix(ds);
  REQUIRE(m.size() == 8);
  CHECK(m.labels.front() == "query_complexity");
  CHECK(m.labels.back() == "answer_quality");
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(m.values[i][i] == 1.0);
    for (std::size_t j = 0; j < 8; ++j) {
      CHECK(m.values[i][j] == m.values[j][i]);
      CHECK(std::abs(m.values[i][j]) <= 1.0);
    }
  }
  CHECK(m.at("doc_relevance", "answer_quality") == m.at("answer_quality", "doc_relevance"));
  const std::string csv = correlation_csv(m);
  CHECK(csv.rfind(",query_complexity,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);

  Matrix f = ds.features();
  for (std::size_t r = 0; r < f.rows(); ++r) f(r, FeatureSchema::redundancy) = 0.5;
  const Dataset flat = Dataset::from_schema(f, ds.target());
  try {
    correlation_matrix(flat);
    FAIL("expected an error");
  } catch (const CorrelationUndefinedError& e) {
    CHECK(std::string(e.what()).find("redundancy") != std::string::npos);
  }
}
