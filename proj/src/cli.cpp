#include "ragq/cli.hpp"

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ragq/errors.hpp"
#include "ragq/log.hpp"
#include "ragq/metrics.hpp"
#include "ragq/pipeline.hpp"
#include "ragq/report.hpp"

namespace ragq {

namespace {

struct Options {
  std::string data;
  std::string out;
  std::uint64_t seed = 42;
  std::string config;
  bool fast = false;
  std::size_t rows = 500;
  std::string model;
};

int exit_code(ErrorClass c) {
  switch (c) {
    case ErrorClass::usage: return kExitUsage;
    case ErrorClass::data: return kExitData;
    case ErrorClass::runtime: return kExitRuntime;
  }
  return kExitRuntime;
}

void write_or_print(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty())
    out << text;
  else
    write_text_file(out_path, text);
}

std::string omegas_csv(const Expansion& e, const Dataset& standardized) {
  std::string s = "feature";
  const std::size_t k = e.columns.empty() ? 0 : e.columns.front().omegas.size();
  for (std::size_t i = 1; i <= k; ++i) s += ",omega_" + std::to_string(i);
  s += ",iterations\n";
  for (std::size_t c = 0; c < e.columns.size(); ++c) {
    s += standardized.feature_names()[c];
    for (double w : e.columns[c].omegas) s += "," + format_fixed(w, 8);
    s += "," + std::to_string(e.columns[c].iterations_used) + "\n";
  }
  return s;
}

int run_analyze(const PipelineConfig& cfg, std::ostream& out) {
  const Dataset ds = load_data(cfg.data, cfg.seed);
  const CorrelationMatrix m = correlation_matrix(ds);
  render_heatmap(m, cfg.out_dir / "heatmap.svg");
  out << correlation_csv(m);
  return kExitOk;
}

int run_decompose(const PipelineConfig& cfg, const std::string& out_path, std::ostream& out) {
  const Dataset ds = load_data(cfg.data, cfg.seed);
  const auto [standardized, stats] = standardize(ds);
  const Expansion e = expand_features_detailed(standardized, cfg.vmd);
  write_or_print(to_csv(e.dataset), out_path, out);
  if (!out_path.empty()) {
    std::filesystem::path sidecar = out_path;
    sidecar.replace_extension(".omegas.csv");
    write_text_file(sidecar, omegas_csv(e, standardized));
  }
  return kExitOk;
}

int run_tune(const PipelineConfig& cfg, bool write_log, std::ostream& out) {
  const PreparedData data = prepare_data(cfg);
  const PsoResult res = tune(cfg, data);
  out << "model=" << to_string(cfg.model) << "\n";
  out << describe_position(cfg.model, res.best_position) << "\n";
  out << "validation_r2=" << format_fixed(res.best_fitness, 6) << "\n";
  if (write_log) write_pso_log(res, cfg.out_dir / "pso_log.csv");
  return kExitOk;
}

int run_benchmark_cmd(const PipelineConfig& cfg, std::ostream& out) {
  const BenchmarkRun run = run_benchmark_detailed(cfg);
  const auto& dir = cfg.out_dir;
  render_bar_charts(run.report, dir);
  try {
    render_heatmap(correlation_matrix(run.data.raw), dir / "heatmap.svg");
  } catch (const CorrelationUndefinedError& e) {
    logger()->warn("heatmap skipped: {}", e.what());
  }
  if (run.report.pso) write_pso_log(*run.report.pso, dir / "pso_log.csv");
  if (run.proposed) run.proposed->save(dir / "model.bin");
  write_text_file(dir / "run.log", run_log_text(cfg, run.report));
  out << report_csv(run.report);
  return kExitOk;
}

int run_synth(const PipelineConfig& cfg, std::size_t rows, const std::string& out_path, std::ostream& out) {
  write_or_print(to_csv(synthesize(rows, cfg.seed)), out_path, out);
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"VMD + PSO retrieval-quality regression benchmark", "ragq"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  auto* data_opt = app.add_option("--data", opt.data, "CSV path, 'embedded' or 'synthetic[:rows]'");
  auto* out_opt = app.add_option("--out", opt.out, "output directory (file for decompose/synth)");
  auto* seed_opt = app.add_option("--seed", opt.seed, "root random seed");
  app.add_option("--config", opt.config, "key-value config file");
  app.add_flag("--fast", opt.fast, "reduced population and epochs");

  auto* analyze = app.add_subcommand("analyze", "correlation matrix and heatmap");
  auto* decompose = app.add_subcommand("decompose", "VMD-expand the features to CSV");
  auto* tune_cmd = app.add_subcommand("tune", "PSO search only; prints the best hyperparameters");
  auto* bench = app.add_subcommand("benchmark", "six-model comparison with report and figures");
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  synth->add_option("--rows", opt.rows, "row count")->check(CLI::PositiveNumber);
  for (auto* sub : {tune_cmd, bench})
    sub->add_option("--model", opt.model, "tuned model")->check(CLI::IsMember({"bilstm", "gbt"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    PipelineConfig cfg;
    if (!opt.config.empty()) apply_config_file(cfg, opt.config);
    if (data_opt->count() > 0) cfg.data = DataSource::parse(opt.data);
    if (seed_opt->count() > 0) cfg.seed = opt.seed;
    if (!opt.model.empty()) apply_setting(cfg, "pso.model", opt.model);
    const bool has_out = out_opt->count() > 0;
    // decompose and synth treat --out as a file path instead.
    if (has_out && (analyze->parsed() || tune_cmd->parsed() || bench->parsed())) cfg.out_dir = opt.out;
    if (opt.fast) cfg.apply_fast();
    cfg.validate();
    logger()->debug("config digest {}", config_digest(cfg));

    if (analyze->parsed()) return run_analyze(cfg, out);
    if (decompose->parsed()) return run_decompose(cfg, has_out ? opt.out : "", out);
    if (tune_cmd->parsed()) return run_tune(cfg, has_out, out);
    if (bench->parsed()) return run_benchmark_cmd(cfg, out);
    if (synth->parsed()) return run_synth(cfg, opt.rows, has_out ? opt.out : "", out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.error_class());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace ragq
