#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ragq/metrics.hpp"
#include "ragq/pipeline.hpp"

namespace ragq {

void write_text_file(const std::filesystem::path& path, std::string_view content);

// Fixed-point with `digits` decimals; never prints a negative zero.
std::string format_fixed(double v, int digits);

// `Model,MSE,RMSE,MAE,MAPE,R2`, one row per model in report order, 3 decimals.
// Failed models print NA in every metric column.
std::string report_csv(const EvalReport& report);

struct ParsedReportRow {
  std::string model;
  std::optional<MetricsRow> metrics;
};
std::vector<ParsedReportRow> parse_report_csv(std::string_view text);

// Diverging blue-white-red scale over [-1, 1] as #rrggbb.
std::string diverging_color(double v);

std::string heatmap_svg(const CorrelationMatrix& m);

// Writes the SVG and a CSV sidecar next to it (same stem, .csv).
void render_heatmap(const CorrelationMatrix& m, const std::filesystem::path& svg_path);

enum class Metric { mse, rmse, mae, mape, r2 };
inline constexpr std::array<Metric, 5> kMetrics = {Metric::mse, Metric::rmse, Metric::mae, Metric::mape,
                                                   Metric::r2};
std::string metric_label(Metric m);
double metric_value(const MetricsRow& row, Metric m);

// One bar per successful row. Throws NothingToRenderError when none succeeded.
std::string bar_chart_svg(const EvalReport& report, Metric m);

// bar_mse.svg, bar_rmse.svg, bar_mae.svg, bar_mape.svg, bar_r2.svg and
// report.csv in `dir`. Returns the written paths.
std::vector<std::filesystem::path> render_bar_charts(const EvalReport& report, const std::filesystem::path& dir);

// Human-readable run summary including wall times.
std::string run_log_text(const PipelineConfig& cfg, const EvalReport& report);

}  // namespace ragq
