#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ragq/data_model.hpp"

namespace ragq {

// MAPE is in percent.
struct MetricsRow {
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  double mape = 0.0;
  double r2 = 0.0;
};

// Throws MapeUndefinedError when some |y| < 1e-8 and R2UndefinedError when y
// is constant.
MetricsRow regression_metrics(std::span<const double> y, std::span<const double> yhat);

// Same metrics, leaving out the ones that are undefined for this input.
struct PartialMetrics {
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  std::optional<double> mape;
  std::optional<double> r2;
};
PartialMetrics regression_metrics_partial(std::span<const double> y, std::span<const double> yhat);

double r2_score(std::span<const double> y, std::span<const double> yhat);

double pearson_corr(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;

  std::size_t size() const noexcept { return labels.size(); }
  double at(std::string_view a, std::string_view b) const;
};

// Features in dataset order, then the target.
CorrelationMatrix correlation_matrix(const Dataset& ds);

// Labels as header and first column, values with 2 decimals.
std::string correlation_csv(const CorrelationMatrix& m);

}  // namespace ragq
