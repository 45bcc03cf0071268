#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "ragq/config.hpp"
#include "ragq/errors.hpp"
#include "ragq/metrics.hpp"
#include "ragq/pipeline.hpp"
#include "ragq/report.hpp"

using namespace ragq;
namespace fs = std::filesystem;

namespace {

PipelineConfig fast_embedded(std::uint64_t seed = 42) {
  PipelineConfig cfg;
  cfg.data = DataSource::parse("embedded");
  cfg.seed = seed;
  cfg.apply_fast();
  return cfg;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ragq_test_" + name);
  fs::remove_all(dir);
  return dir;
}

MetricsRow row(double mse, double r2) {
  return {mse, std::sqrt(mse), 0.8 * std::sqrt(mse), 5.0, r2};
}

}  // namespace

TEST_CASE("full pipeline on the sample rows") {
  const PipelineConfig cfg = fast_embedded();
  const PipelineResult r = run_full_pipeline(cfg);
  REQUIRE(r.model != nullptr);
  CHECK(r.model->kind() == "bilstm");
  CHECK(r.pso.best_history.size() == 3);
  CHECK(std::isfinite(r.metrics.mse));
  CHECK(r.metrics.rmse * r.metrics.rmse == doctest::Approx(r.metrics.mse).epsilon(1e-9));
}

TEST_CASE("benchmark rows, order and shared split") {
  const PipelineConfig cfg = fast_embedded();
  const EvalReport rep = run_benchmark(cfg);
  REQUIRE(rep.rows.size() == 6);
  const std::vector<std::string> names = {"DecisionTrees", "AdaBoost", "GBDT", "ExtraTrees", "KNN", "VMD-PSO-BiLSTM"};
  for (std::size_t i = 0; i < 6; ++i) CHECK(rep.rows[i].model == names[i]);
  CHECK(rep.train_size + rep.validation_size == 8);
  CHECK(rep.split_digest.size() == 16);
  CHECK(rep.config_digest == config_digest(cfg));
  REQUIRE(rep.pso.has_value());
  for (const auto& r : rep.rows) {
    if (!r.ok()) continue;
    CHECK(r.metrics->rmse * r.metrics->rmse == doctest::Approx(r.metrics->mse).epsilon(1e-9));
  }
}

TEST_CASE("benchmark is deterministic") {
  const PipelineConfig cfg = fast_embedded(5);
  const EvalReport a = run_benchmark(cfg), b = run_benchmark(cfg);
  CHECK(report_csv(a) == report_csv(b));
  CHECK(a.split_digest == b.split_digest);
  CHECK(a.tuned_hyperparameters == b.tuned_hyperparameters);
  for (Metric m : kMetrics) CHECK(bar_chart_svg(a, m) == bar_chart_svg(b, m));
}

TEST_CASE("gbt as the tuned model") {
  PipelineConfig cfg = fast_embedded();
  cfg.model = ModelChoice::gbt;
  const EvalReport rep = run_benchmark(cfg);
  REQUIRE(rep.rows.size() == 6);
  CHECK(rep.rows.back().model == "VMD-PSO-GBT");
  CHECK(rep.rows.back().ok());
  CHECK(rep.tuned_hyperparameters.find("learning_rate=") != std::string::npos);
}

TEST_CASE("a failing baseline becomes a failed row") {
  PipelineConfig cfg = fast_embedded();
  apply_setting(cfg, "baseline.knn.k", "50");
  const EvalReport rep = run_benchmark(cfg);
  REQUIRE(rep.rows.size() == 6);
  int failed = 0;
  for (const auto& r : rep.rows) failed += r.ok() ? 0 : 1;
  CHECK(failed == 1);
  CHECK_FALSE(rep.rows[4].ok());
  CHECK(rep.rows[4].failure.find("k") != std::string::npos);
  const std::string csv = report_csv(rep);
  CHECK(csv.find("KNN,NA,NA,NA,NA,NA") != std::string::npos);
  CHECK(bar_chart_svg(rep, Metric::r2).find("KNN") == std::string::npos);
}

TEST_CASE("stage errors name the stage") {
  PipelineConfig cfg;
  cfg.data = DataSource::parse("/nonexistent/rag.csv");
  try {
    prepare_data(cfg);
    FAIL("expected an error");
  } catch (const StageError& e) {
    CHECK(std::string(e.what()).find("load") != std::string::npos);
    CHECK(e.error_class() == ErrorClass::data);
  }
}

TEST_CASE("report csv") {
  EvalReport rep;
  rep.rows.push_back({"DecisionTrees", row(30.728, 0.615), "", 0.1});
  rep.rows.push_back({"VMD-PSO-BiLSTM", row(12.230, 0.847), "", 0.1});
  rep.rows.push_back({"KNN", std::nullopt, "boom", 0.1});
  const std::string csv = report_csv(rep);
  CHECK(csv.rfind("Model,MSE,RMSE,MAE,MAPE,R2\n", 0) == 0);
  CHECK(csv.find("DecisionTrees,30.728,5.543,") != std::string::npos);
  const auto parsed = parse_report_csv(csv);
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[0].model == "DecisionTrees");
  CHECK_FALSE(parsed[2].metrics.has_value());
  for (std::size_t i = 0; i < 2; ++i) {
    const MetricsRow& m = *parsed[i].metrics;
    // Three decimals keep rmse^2 = mse to about 1e-4 relative at these magnitudes.
    CHECK(m.rmse * m.rmse == doctest::Approx(m.mse).epsilon(2e-4));
  }
  CHECK_THROWS_AS(parse_report_csv("Model,MSE\nx,1\n"), ParseError);
}

TEST_CASE("report csv from a real run re-parses consistently") {
  PipelineConfig cfg = fast_embedded();
  cfg.data = DataSource::parse("synthetic:60");
  const EvalReport rep = run_benchmark(cfg);
  for (const auto& p : parse_report_csv(report_csv(rep))) {
    if (!p.metrics) continue;
    CAPTURE(p.model);
    // Values are printed with 3 decimals, so the identity holds up to that rounding.
    const MetricsRow& m = *p.metrics;
    CHECK(std::abs(m.rmse * m.rmse - m.mse) <= 2 * m.rmse * 5e-4 + 1e-6);
  }
}

TEST_CASE("format_fixed") {
  CHECK(format_fixed(1.23456, 3) == "1.235");
  CHECK(format_fixed(-0.0001, 3) == "0.000");
  CHECK(format_fixed(-0.0, 2) == "0.00");
  CHECK(format_fixed(-1.5, 1) == "-1.5");
}

TEST_CASE("diverging color anchors") {
  CHECK(diverging_color(1.0) == "#b2182b");
  CHECK(diverging_color(0.0) == "#f7f7f7");
  CHECK(diverging_color(-1.0) == "#2166ac");
  CHECK(diverging_color(7.0) == "#b2182b");
}

TEST_CASE("heatmap structure") {
  CorrelationMatrix m;
  for (int i = 0; i < 8; ++i) m.labels.push_back("c" + std::to_string(i));
  m.values.assign(8, std::vector<double>(8, 0.0));
  for (int i = 0; i < 8; ++i) m.values[i][i] = 1.0;
  const std::string svg = heatmap_svg(m);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(count(svg, "<rect class=\"cell\"") == 64);
  CHECK(count(svg, "<text class=\"value\"") == 64);
  std::vector<std::string> fills;
  const std::regex cell("<rect class=\"cell\"[^>]*fill=\"(#[0-9a-f]{6})\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), cell); it != std::sregex_iterator(); ++it)
    fills.push_back((*it)[1]);
  REQUIRE(fills.size() == 64);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) CHECK(fills[i * 8 + j] == (i == j ? "#b2182b" : "#f7f7f7"));
  }
  CHECK(count(svg, ">1.00</text>") == 8);
  CHECK(count(svg, ">0.00</text>") == 56);
  CHECK(count(svg, ">-0.00</text>") == 0);
  CHECK(svg.find(">c3</text>") != std::string::npos);
}

TEST_CASE("heatmap files") {
  const auto dir = scratch("heatmap");
  const Dataset ds = synthesize(200, 1);
  const CorrelationMatrix m = correlation_matrix(ds);
  render_heatmap(m, dir / "heatmap.svg");
  CHECK(fs::exists(dir / "heatmap.svg"));
  const std::string csv = slurp(dir / "heatmap.csv");
  CHECK(csv == correlation_csv(m));
  CHECK_THROWS_AS(render_heatmap(m, "/proc/ragq/denied/heatmap.svg"), IoError);
}

TEST_CASE("bar charts") {
  EvalReport six;
  for (const char* name : {"DecisionTrees", "AdaBoost", "GBDT", "ExtraTrees", "KNN", "VMD-PSO-BiLSTM"})
    six.rows.push_back({name, row(20.0, 0.5), "", 0.0});
  const auto dir = scratch("bars");
  const auto files = render_bar_charts(six, dir);
  CHECK(files.size() == 6);
  for (const char* stem : {"bar_mse", "bar_rmse", "bar_mae", "bar_mape", "bar_r2"}) {
    const std::string svg = slurp(dir / (std::string(stem) + ".svg"));
    CHECK(count(svg, "<rect class=\"bar\"") == 6);
    CHECK(svg.find("KNN") != std::string::npos);
  }
  CHECK(fs::exists(dir / "report.csv"));

  EvalReport one;
  one.rows.push_back({"KNN", row(3.0, -0.2), "", 0.0});
  for (Metric m : kMetrics) CHECK(count(bar_chart_svg(one, m), "<rect class=\"bar\"") == 1);

  EvalReport none;
  none.rows.push_back({"KNN", std::nullopt, "failed", 0.0});
  CHECK_THROWS_AS(bar_chart_svg(none, Metric::mse), NothingToRenderError);
  CHECK_THROWS_AS(render_bar_charts(none, scratch("bars_none")), NothingToRenderError);
}

TEST_CASE("config text") {
  PipelineConfig cfg;
  apply_config_text(cfg,
                    "# comment\n"
                    "vmd.alpha = 712\n"
                    "pso.population=6\n"
                    "pso.model = gbt\n"
                    "bilstm.seq_layout = flat_steps\n"
                    "baseline.knn.k = 3\n"
                    "run.seed = 9\n");
  CHECK(cfg.vmd.alpha == 712.0);
  CHECK(cfg.pso.population == 6);
  CHECK(cfg.model == ModelChoice::gbt);
  CHECK(cfg.bilstm.seq_layout == SeqLayout::flat_steps);
  CHECK(cfg.seed == 9u);

  PipelineConfig back;
  apply_config_text(back, dump_config(cfg));
  CHECK(dump_config(back) == dump_config(cfg));
  CHECK(config_digest(back) == config_digest(cfg));
  back.out_dir = "elsewhere";
  CHECK(config_digest(back) == config_digest(cfg));
  back.seed = 10;
  CHECK(config_digest(back) != config_digest(cfg));

  PipelineConfig bad;
  CHECK_THROWS_AS(apply_config_text(bad, "vmd.alpha = 1\nno.such.key = 3\n"), ArgumentError);
  try {
    apply_config_text(bad, "\n\npso.iterations = many\n");
    FAIL("expected an error");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  CHECK_THROWS_AS(apply_config_file(bad, "/nonexistent/ragq.conf"), IoError);
}

TEST_CASE("config validation") {
  PipelineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.tuning_epochs = 600;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  cfg = PipelineConfig{};
  cfg.split_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  cfg = PipelineConfig{};
  cfg.apply_fast();
  CHECK(cfg.pso.population == 4);
  CHECK(cfg.pso.iterations == 3);
  CHECK(cfg.tuning_epochs == 30);
  CHECK_NOTHROW(cfg.validate());
  const BilstmConfig b = PipelineConfig{}.bilstm_for_epochs(500);
  CHECK(b.max_epochs == 500);
  CHECK(b.lr_drop_epoch == 350);
}

TEST_CASE("KNN is not the top model on synthetic data" * doctest::may_fail()) {
  PipelineConfig cfg;
  cfg.data = DataSource::parse("synthetic:500");
  cfg.seed = 42;
  cfg.apply_fast();
  const EvalReport rep = run_benchmark(cfg);
  REQUIRE(rep.rows.size() == 6);
  std::size_t best = 0;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    if (rep.rows[i].ok() && (!rep.rows[best].ok() || rep.rows[i].metrics->r2 > rep.rows[best].metrics->r2)) best = i;
  }
  MESSAGE("top R2: " << rep.rows[best].model << " " << rep.rows[best].metrics->r2);
  CHECK(rep.rows[best].model != "KNN");
}
