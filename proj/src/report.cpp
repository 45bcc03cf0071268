#include "ragq/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ragq/errors.hpp"

namespace ragq {

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

// ---------------------------------------------------------------------------
// Report table

std::string report_csv(const EvalReport& report) {
  std::string out = "Model,MSE,RMSE,MAE,MAPE,R2\n";
  for (const auto& r : report.rows) {
    out += r.model;
    for (Metric m : kMetrics) out += "," + (r.ok() ? format_fixed(metric_value(*r.metrics, m), 3) : "NA");
    out += "\n";
  }
  return out;
}

std::vector<ParsedReportRow> parse_report_csv(std::string_view text) {
  std::vector<ParsedReportRow> rows;
  bool header = true;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    for (std::size_t start = 0;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (header) {
      if (line != "Model,MSE,RMSE,MAE,MAPE,R2") throw ParseError("report: unexpected header", 1, 0);
      header = false;
      continue;
    }
    if (cells.size() != 6) throw ParseError("report: expected 6 cells", line_no - 1, cells.size());
    ParsedReportRow row{std::string(cells[0]), std::nullopt};
    if (cells[1] != "NA") {
      std::array<double, 5> v{};
      for (std::size_t i = 0; i < 5; ++i) {
        const auto c = cells[i + 1];
        const auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v[i]);
        if (ec != std::errc() || p != c.data() + c.size())
          throw ParseError("report: bad number '" + std::string(c) + "'", line_no - 1, i + 2);
      }
      row.metrics = MetricsRow{v[0], v[1], v[2], v[3], v[4]};
    }
    rows.push_back(std::move(row));
  }
  if (header) throw EmptyInputError("report: empty input");
  return rows;
}

// ---------------------------------------------------------------------------
// SVG helpers

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) { return format_fixed(v, 2); }

struct Rgb {
  double r, g, b;
};

constexpr Rgb kNegative{33, 102, 172};   // #2166ac
constexpr Rgb kNeutral{247, 247, 247};   // #f7f7f7
constexpr Rgb kPositive{178, 24, 43};    // #b2182b

Rgb lerp(Rgb a, Rgb b, double t) { return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t}; }

std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c.r)),
                static_cast<int>(std::lround(c.g)), static_cast<int>(std::lround(c.b)));
  return buf;
}

}  // namespace

std::string diverging_color(double v) {
  v = std::clamp(std::isfinite(v) ? v : 0.0, -1.0, 1.0);
  return hex(v >= 0.0 ? lerp(kNeutral, kPositive, v) : lerp(kNeutral, kNegative, -v));
}

// ---------------------------------------------------------------------------
// Heatmap

std::string heatmap_svg(const CorrelationMatrix& m) {
  const std::size_t k = m.size();
  if (k == 0 || m.values.size() != k) throw ArgumentError("heatmap: empty or ragged matrix");
  constexpr int cell = 60, left = 170, top = 20, legend_w = 20;
  const int grid = cell * static_cast<int>(k);
  const int bottom = 170;
  const int width = left + grid + 80, height = top + grid + bottom;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
       std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect class=\"background\" width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double v = m.values[i][j];
      const int x = left + cell * static_cast<int>(j), y = top + cell * static_cast<int>(i);
      s += "<rect class=\"cell\" x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
           std::to_string(cell) + "\" height=\"" + std::to_string(cell) + "\" fill=\"" + diverging_color(v) +
           "\"/>\n";
      const char* ink = std::abs(v) > 0.6 ? "#ffffff" : "#000000";
      s += "<text class=\"value\" x=\"" + std::to_string(x + cell / 2) + "\" y=\"" + std::to_string(y + cell / 2 + 4) +
           "\" text-anchor=\"middle\" fill=\"" + ink + "\">" + num(v) + "</text>\n";
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    const int c = top + cell * static_cast<int>(i) + cell / 2 + 4;
    s += "<text class=\"label\" x=\"" + std::to_string(left - 6) + "\" y=\"" + std::to_string(c) +
         "\" text-anchor=\"end\">" + escape(m.labels[i]) + "</text>\n";
    const int cx = left + cell * static_cast<int>(i) + cell / 2, cy = top + grid + 8;
    s += "<text class=\"label\" x=\"" + std::to_string(cx) + "\" y=\"" + std::to_string(cy) +
         "\" text-anchor=\"end\" transform=\"rotate(-60 " + std::to_string(cx) + " " + std::to_string(cy) + ")\">" +
         escape(m.labels[i]) + "</text>\n";
  }
  // Legend: 21 swatches from +1 (top) to -1 (bottom).
  const int lx = left + grid + 20;
  const double step = static_cast<double>(grid) / 21.0;
  for (int t = 0; t <= 20; ++t) {
    const double v = 1.0 - 0.1 * t;
    s += "<rect class=\"legend\" x=\"" + std::to_string(lx) + "\" y=\"" + num(top + step * t) + "\" width=\"" +
         std::to_string(legend_w) + "\" height=\"" + num(step + 0.5) + "\" fill=\"" + diverging_color(v) + "\"/>\n";
  }
  s += "<text class=\"legend-label\" x=\"" + std::to_string(lx + legend_w + 4) + "\" y=\"" + std::to_string(top + 10) +
       "\">1</text>\n";
  s += "<text class=\"legend-label\" x=\"" + std::to_string(lx + legend_w + 4) + "\" y=\"" + std::to_string(top + grid) +
       "\">-1</text>\n";
  s += "</svg>\n";
  return s;
}

void render_heatmap(const CorrelationMatrix& m, const std::filesystem::path& svg_path) {
  const std::string svg = heatmap_svg(m);
  write_text_file(svg_path, svg);
  auto csv_path = svg_path;
  csv_path.replace_extension(".csv");
  write_text_file(csv_path, correlation_csv(m));
}

// ---------------------------------------------------------------------------
// Bar charts

std::string metric_label(Metric m) {
  switch (m) {
    case Metric::mse: return "MSE";
    case Metric::rmse: return "RMSE";
    case Metric::mae: return "MAE";
    case Metric::mape: return "MAPE";
    case Metric::r2: return "R2";
  }
  return "";
}

double metric_value(const MetricsRow& row, Metric m) {
  switch (m) {
    case Metric::mse: return row.mse;
    case Metric::rmse: return row.rmse;
    case Metric::mae: return row.mae;
    case Metric::mape: return row.mape;
    case Metric::r2: return row.r2;
  }
  return 0.0;
}

std::string bar_chart_svg(const EvalReport& report, Metric metric) {
  std::vector<std::pair<std::string, double>> bars;
  for (const auto& r : report.rows)
    if (r.ok()) bars.emplace_back(r.model, metric_value(*r.metrics, metric));
  if (bars.empty()) throw NothingToRenderError("bar chart: every model failed");

  double hi = 0.0, lo = 0.0;
  for (const auto& [_, v] : bars) {
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  if (hi == lo) hi = lo + 1.0;

  constexpr int bar_w = 70, gap = 30, left = 60, top = 40, plot_h = 300, bottom = 90;
  const int n = static_cast<int>(bars.size());
  const int plot_w = n * (bar_w + gap) + gap;
  const int width = left + plot_w + 20, height = top + plot_h + bottom;
  const auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };
  const double zero_y = y_of(0.0);

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
       std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect class=\"background\" width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  s += "<text class=\"title\" x=\"" + std::to_string(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">" +
       metric_label(metric) + "</text>\n";
  for (int i = 0; i < n; ++i) {
    const auto& [name, v] = bars[static_cast<std::size_t>(i)];
    const int x = left + gap + i * (bar_w + gap);
    const double y0 = std::min(zero_y, y_of(v)), h = std::abs(y_of(v) - zero_y);
    const bool proposed = name.rfind("VMD-PSO-", 0) == 0;
    s += "<rect class=\"bar\" x=\"" + std::to_string(x) + "\" y=\"" + num(y0) + "\" width=\"" + std::to_string(bar_w) +
         "\" height=\"" + num(h) + "\" fill=\"" + (proposed ? "#b2182b" : "#4393c3") + "\"/>\n";
    const double ty = v >= 0.0 ? y0 - 4 : y0 + h + 14;
    s += "<text class=\"value\" x=\"" + std::to_string(x + bar_w / 2) + "\" y=\"" + num(ty) +
         "\" text-anchor=\"middle\">" + format_fixed(v, 3) + "</text>\n";
    s += "<text class=\"label\" x=\"" + std::to_string(x + bar_w / 2) + "\" y=\"" + std::to_string(top + plot_h + 20) +
         "\" text-anchor=\"middle\">" + escape(name) + "</text>\n";
  }
  s += "<line class=\"axis\" x1=\"" + std::to_string(left) + "\" y1=\"" + num(zero_y) + "\" x2=\"" +
       std::to_string(left + plot_w) + "\" y2=\"" + num(zero_y) + "\" stroke=\"#000000\"/>\n";
  s += "<line class=\"axis\" x1=\"" + std::to_string(left) + "\" y1=\"" + std::to_string(top) + "\" x2=\"" +
       std::to_string(left) + "\" y2=\"" + std::to_string(top + plot_h) + "\" stroke=\"#000000\"/>\n";
  s += "</svg>\n";
  return s;
}

std::vector<std::filesystem::path> render_bar_charts(const EvalReport& report, const std::filesystem::path& dir) {
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  for (Metric m : kMetrics) {
    std::string name = metric_label(m);
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    files.emplace_back(dir / ("bar_" + name + ".svg"), bar_chart_svg(report, m));
  }
  files.emplace_back(dir / "report.csv", report_csv(report));
  std::vector<std::filesystem::path> written;
  for (const auto& [path, content] : files) {
    write_text_file(path, content);
    written.push_back(path);
  }
  return written;
}

std::string run_log_text(const PipelineConfig& cfg, const EvalReport& report) {
  std::string s;
  s += "seed: " + std::to_string(report.seed) + "\n";
  s += "data: " + cfg.data.describe() + "\n";
  s += "split: " + std::to_string(report.train_size) + " train / " + std::to_string(report.validation_size) +
       " validation" + (report.split_adjusted ? " (adjusted)" : "") + "\n";
  s += "split digest: " + report.split_digest + "\n";
  s += "config digest: " + report.config_digest + "\n";
  if (!report.tuned_hyperparameters.empty()) s += "tuned: " + report.tuned_hyperparameters + "\n";
  if (report.pso) {
    s += "pso best fitness history:";
    for (double v : report.pso->best_history) s += " " + format_fixed(v, 6);
    s += "\n";
  }
  s += "models:\n";
  for (const auto& r : report.rows) {
    s += "  " + r.model + ": " + (r.ok() ? "ok" : "failed: " + r.failure) + " (" + format_fixed(r.seconds, 3) +
         " s)\n";
  }
  s += "\nconfig:\n" + dump_config(cfg);
  return s;
}

}  // namespace ragq
