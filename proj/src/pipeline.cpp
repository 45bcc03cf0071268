#include "ragq/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ragq/baselines.hpp"
#include "ragq/bilstm.hpp"
#include "ragq/errors.hpp"
#include "ragq/gbt.hpp"
#include "ragq/log.hpp"
#include "ragq/parallel.hpp"
#include "ragq/rng.hpp"

namespace ragq {

namespace {

template <class F>
auto stage(const std::string& name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string hex16(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

Dataset load_data(const DataSource& source, std::uint64_t seed) {
  switch (source.kind) {
    case DataSourceKind::embedded: return embedded_sample();
    case DataSourceKind::synthetic: return synthesize(source.rows, seed);
    case DataSourceKind::path: return load_csv(source.path);
  }
  throw ArgumentError("unknown data source");
}

PreparedData prepare_data(const PipelineConfig& cfg) {
  return prepare_data(cfg, stage("load", [&] { return load_data(cfg.data, cfg.seed); }));
}

PreparedData prepare_data(const PipelineConfig& cfg, Dataset raw) {
  if (!raw.has_target()) throw StageError("load", SchemaError("dataset has no answer_quality column"));
  auto [standardized, stats] = stage("standardize", [&] { return standardize(raw); });
  Expansion expansion = stage("vmd", [&] { return expand_features_detailed(standardized, cfg.vmd); });
  SplitIndices idx =
      stage("split", [&] { return split(raw.row_count(), cfg.split_fraction, derive_seed(cfg.seed, "split")); });
  logger()->info("data: {} rows, {} expanded features, split {}/{}", raw.row_count(),
                 expansion.dataset.feature_count(), idx.train.size(), idx.validation.size());
  return PreparedData{std::move(raw), std::move(standardized), std::move(stats), std::move(expansion),
                      std::move(idx)};
}

std::string split_digest(const SplitIndices& split) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto feed = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (auto i : split.train) feed(i);
  feed(~0ULL);
  for (auto i : split.validation) feed(i);
  return hex16(h);
}

SplitData take_split(const Dataset& ds, const SplitIndices& split) {
  const auto& y = ds.target();
  return {ds.features().select_rows(split.train), select<double>(y, split.train),
          ds.features().select_rows(split.validation), select<double>(y, split.validation)};
}

SearchSpace search_space(ModelChoice model) {
  return model == ModelChoice::bilstm ? bilstm_search_space() : gbt_search_space();
}

std::string describe_position(ModelChoice model, std::span<const double> p) {
  char buf[160];
  if (model == ModelChoice::bilstm)
    std::snprintf(buf, sizeof buf, "l2_coefficient=%.6g initial_lr=%.6g hidden_units=%d", p[0], p[1],
                  static_cast<int>(std::lround(p[2])));
  else
    std::snprintf(buf, sizeof buf, "learning_rate=%.6g max_depth=%d leaf_l2=%.6g", p[0],
                  static_cast<int>(std::lround(p[1])), p[2]);
  return buf;
}

RegressorPtr train_candidate(const PipelineConfig& cfg, std::span<const double> position, int epochs,
                             std::uint64_t seed, const Matrix& x, std::span<const double> y) {
  if (cfg.model == ModelChoice::bilstm) {
    BilstmConfig b = BilstmConfig::from_position(position, cfg.bilstm_for_epochs(epochs));
    b.seed = seed;
    return bilstm_fit(x, y, b);
  }
  GbtConfig g = GbtConfig::from_position(position, cfg.gbt);
  g.seed = seed;
  return gbt_fit(x, y, g);
}

PsoResult tune(const PipelineConfig& cfg, const PreparedData& data) {
  return stage("pso", [&] {
    const SplitData s = take_split(data.expansion.dataset, data.split);
    const FitnessFn fitness = [&](std::span<const double> pos, std::uint64_t eval_seed) {
      const auto model = train_candidate(cfg, pos, cfg.tuning_epochs, eval_seed, s.x_train, s.y_train);
      const double r2 = r2_score(s.y_valid, model->predict(s.x_valid));
      logger()->debug("pso: {} -> R2 {:.6f}", describe_position(cfg.model, pos), r2);
      return r2;
    };
    PsoResult res = optimize(search_space(cfg.model), fitness, cfg.pso, derive_seed(cfg.seed, "pso"));
    logger()->info("pso: best {} (validation R2 {:.4f})", describe_position(cfg.model, res.best_position),
                   res.best_fitness);
    return res;
  });
}

PipelineResult run_full_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  return run_full_pipeline(cfg, prepare_data(cfg));
}

PipelineResult run_full_pipeline(const PipelineConfig& cfg, const PreparedData& data) {
  PsoResult pso = tune(cfg, data);
  const SplitData s = take_split(data.expansion.dataset, data.split);
  RegressorPtr model = stage("train", [&] {
    return train_candidate(cfg, pso.best_position, cfg.final_epochs, derive_seed(cfg.seed, "model.final"),
                           s.x_train, s.y_train);
  });
  const MetricsRow m = stage("evaluate", [&] { return regression_metrics(s.y_valid, model->predict(s.x_valid)); });
  return {std::move(model), std::move(pso), m};
}

BenchmarkRun run_benchmark_detailed(const PipelineConfig& cfg) {
  cfg.validate();
  PreparedData data = prepare_data(cfg);

  EvalReport report;
  report.seed = cfg.seed;
  report.train_size = data.split.train.size();
  report.validation_size = data.split.validation.size();
  report.split_adjusted = data.split.adjusted;
  report.split_digest = split_digest(data.split);
  report.config_digest = config_digest(cfg);

  const Dataset& baseline_features = cfg.baselines_on_expanded ? data.expansion.dataset : data.standardized;
  const SplitData base = take_split(baseline_features, data.split);

  std::vector<ReportRow> rows(cfg.baselines.size());
  parallel_for(default_exec(), rows.size(), [&](std::size_t i) {
    BaselineConfig bc = cfg.baselines[i];
    bc.seed = derive_seed(cfg.seed, "baseline." + to_string(bc.kind));
    ReportRow& row = rows[i];
    row.model = display_name(bc.kind);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto model = baseline_fit(base.x_train, base.y_train, bc);
      row.metrics = regression_metrics(base.y_valid, model->predict(base.x_valid));
    } catch (const std::exception& e) {
      row.failure = e.what();
    }
    row.seconds = seconds_since(t0);
  });

  ReportRow proposed;
  proposed.model = proposed_model_name(cfg.model);
  RegressorPtr proposed_model;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    PipelineResult r = run_full_pipeline(cfg, data);
    proposed.metrics = r.metrics;
    report.tuned_hyperparameters = describe_position(cfg.model, r.pso.best_position);
    report.pso = std::move(r.pso);
    proposed_model = std::move(r.model);
  } catch (const std::exception& e) {
    proposed.failure = e.what();
  }
  proposed.seconds = seconds_since(t0);
  rows.push_back(std::move(proposed));

  for (const auto& r : rows) {
    if (r.ok())
      logger()->info("{}: R2 {:.4f} ({:.2f} s)", r.model, r.metrics->r2, r.seconds);
    else
      logger()->warn("{}: failed: {}", r.model, r.failure);
  }
  report.rows = std::move(rows);
  return {std::move(report), std::move(data), std::move(proposed_model)};
}

EvalReport run_benchmark(const PipelineConfig& cfg) { return run_benchmark_detailed(cfg).report; }

}  // namespace ragq
