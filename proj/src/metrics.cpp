#include "ragq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ragq/errors.hpp"

namespace ragq {

namespace {

constexpr double kMapeFloor = 1e-8;

void check_pair(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size())
    throw ArgumentError("metrics: length mismatch (" + std::to_string(y.size()) + " vs " +
                        std::to_string(yhat.size()) + ")");
  if (y.size() < 2) throw InsufficientDataError("metrics: need at least 2 values");
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::optional<double> try_mape(std::span<const double> y, std::span<const double> yhat) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::abs(y[i]) < kMapeFloor) return std::nullopt;
    s += std::abs(y[i] - yhat[i]) / std::abs(y[i]);
  }
  return 100.0 * s / static_cast<double>(y.size());
}

std::optional<double> try_r2(std::span<const double> y, std::span<const double> yhat) {
  const double m = mean(y);
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_tot += (y[i] - m) * (y[i] - m);
    ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  }
  if (ss_tot == 0.0) return std::nullopt;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace

PartialMetrics regression_metrics_partial(std::span<const double> y, std::span<const double> yhat) {
  check_pair(y, yhat);
  PartialMetrics out;
  double se = 0.0, ae = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - yhat[i];
    se += d * d;
    ae += std::abs(d);
  }
  const auto n = static_cast<double>(y.size());
  out.mse = se / n;
  out.rmse = std::sqrt(out.mse);
  out.mae = ae / n;
  out.mape = try_mape(y, yhat);
  out.r2 = try_r2(y, yhat);
  return out;
}

MetricsRow regression_metrics(std::span<const double> y, std::span<const double> yhat) {
  const PartialMetrics p = regression_metrics_partial(y, yhat);
  if (!p.mape) throw MapeUndefinedError("metrics: MAPE undefined, a target is within 1e-8 of zero");
  if (!p.r2) throw R2UndefinedError("metrics: R2 undefined, targets have zero variance");
  return {p.mse, p.rmse, p.mae, *p.mape, *p.r2};
}

double r2_score(std::span<const double> y, std::span<const double> yhat) {
  check_pair(y, yhat);
  const auto r2 = try_r2(y, yhat);
  if (!r2) throw R2UndefinedError("metrics: R2 undefined, targets have zero variance");
  return *r2;
}

double pearson_corr(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw CorrelationUndefinedError("pearson: constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double CorrelationMatrix::at(std::string_view a, std::string_view b) const {
  const auto find = [&](std::string_view name) {
    const auto it = std::find(labels.begin(), labels.end(), name);
    if (it == labels.end()) throw ArgumentError("correlation matrix: no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - labels.begin());
  };
  return values[find(a)][find(b)];
}

CorrelationMatrix correlation_matrix(const Dataset& ds) {
  if (ds.row_count() < 2) throw InsufficientDataError("correlation: need at least 2 rows");
  CorrelationMatrix m;
  m.labels = ds.feature_names();
  std::vector<std::vector<double>> cols;
  for (std::size_t c = 0; c < ds.feature_count(); ++c) cols.push_back(ds.features().column(c));
  m.labels.push_back(ds.target_name());
  cols.push_back(ds.target());

  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto [lo, hi] = std::minmax_element(cols[c].begin(), cols[c].end());
    if (*lo == *hi) throw CorrelationUndefinedError("correlation: column '" + m.labels[c] + "' is constant");
  }
  const std::size_t k = cols.size();
  m.values.assign(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) m.values[i][j] = m.values[j][i] = pearson_corr(cols[i], cols[j]);
  return m;
}

std::string correlation_csv(const CorrelationMatrix& m) {
  std::string out;
  for (const auto& l : m.labels) out += "," + l;
  out += "\n";
  char buf[32];
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += m.labels[i];
    for (double v : m.values[i]) {
      std::snprintf(buf, sizeof buf, ",%.2f", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace ragq
