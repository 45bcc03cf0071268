#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ragq/config.hpp"
#include "ragq/data_model.hpp"
#include "ragq/metrics.hpp"
#include "ragq/pso.hpp"
#include "ragq/regressor.hpp"
#include "ragq/vmd.hpp"

namespace ragq {

Dataset load_data(const DataSource& source, std::uint64_t seed);

// Everything the models train on. VMD runs on whole columns before the split,
// so validation rows take part in the decomposition of training features.
struct PreparedData {
  Dataset raw;
  Dataset standardized;
  StandardizationStats stats;
  Expansion expansion;
  SplitIndices split;
};

// Stages: load, standardize, vmd, split. Failures are rethrown as StageError.
PreparedData prepare_data(const PipelineConfig& cfg);
PreparedData prepare_data(const PipelineConfig& cfg, Dataset raw);

// FNV-1a of the train and validation index lists, as 16 hex digits.
std::string split_digest(const SplitIndices& split);

struct SplitData {
  Matrix x_train;
  std::vector<double> y_train;
  Matrix x_valid;
  std::vector<double> y_valid;
};
SplitData take_split(const Dataset& ds, const SplitIndices& split);

SearchSpace search_space(ModelChoice model);

// e.g. "l2_coefficient=0.001 initial_lr=0.01 hidden_units=16".
std::string describe_position(ModelChoice model, std::span<const double> position);

// Fits the tuned model family at one PSO position. `epochs` only affects the
// BiLSTM.
RegressorPtr train_candidate(const PipelineConfig& cfg, std::span<const double> position, int epochs,
                             std::uint64_t seed, const Matrix& x, std::span<const double> y);

// PSO over the model's search space, maximizing validation R2 with
// tuning_epochs per evaluation.
PsoResult tune(const PipelineConfig& cfg, const PreparedData& data);

struct PipelineResult {
  RegressorPtr model;
  PsoResult pso;
  MetricsRow metrics;  // on the validation split
};

// Standardize, expand, split, tune, retrain with final_epochs, evaluate.
PipelineResult run_full_pipeline(const PipelineConfig& cfg);
PipelineResult run_full_pipeline(const PipelineConfig& cfg, const PreparedData& data);

struct ReportRow {
  std::string model;
  std::optional<MetricsRow> metrics;  // empty when the model failed
  std::string failure;
  double seconds = 0.0;

  bool ok() const noexcept { return metrics.has_value(); }
};

struct EvalReport {
  std::vector<ReportRow> rows;
  std::uint64_t seed = 0;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  bool split_adjusted = false;
  std::string split_digest;
  std::string config_digest;
  std::optional<PsoResult> pso;
  std::string tuned_hyperparameters;
};

struct BenchmarkRun {
  EvalReport report;
  PreparedData data;
  RegressorPtr proposed;  // null when the proposed model failed
};

// Five baselines on the standardized 7 features (or the expanded ones when
// configured) and the tuned model on the expanded features, all on one split.
// A failing model becomes a failed row; the report is always produced.
BenchmarkRun run_benchmark_detailed(const PipelineConfig& cfg);
EvalReport run_benchmark(const PipelineConfig& cfg);

}  // namespace ragq
