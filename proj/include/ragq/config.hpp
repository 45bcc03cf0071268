#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ragq/baselines.hpp"
#include "ragq/bilstm.hpp"
#include "ragq/gbt.hpp"
#include "ragq/pso.hpp"
#include "ragq/vmd.hpp"

namespace ragq {

enum class DataSourceKind { embedded, synthetic, path };

struct DataSource {
  DataSourceKind kind = DataSourceKind::embedded;
  std::filesystem::path path;
  std::size_t rows = 500;  // synthetic only

  // "embedded", "synthetic", "synthetic:<rows>" or a file path.
  static DataSource parse(std::string_view text);
  std::string describe() const;
};

enum class ModelChoice { bilstm, gbt };

std::string to_string(ModelChoice m);
// Report label of the tuned model, e.g. VMD-PSO-BiLSTM.
std::string proposed_model_name(ModelChoice m);

// The five baselines with their documented defaults, in report order.
std::vector<BaselineConfig> default_baselines();

struct PipelineConfig {
  DataSource data;
  VmdConfig vmd;
  SwarmConfig pso;
  ModelChoice model = ModelChoice::bilstm;
  double split_fraction = 0.8;
  int tuning_epochs = 100;  // BiLSTM epochs per fitness evaluation
  int final_epochs = 500;
  BilstmConfig bilstm;      // fixed settings; PSO fills l2, learning rate, hidden units
  GbtConfig gbt;            // fixed settings; PSO fills eta, depth, lambda
  std::vector<BaselineConfig> baselines = default_baselines();
  bool baselines_on_expanded = false;
  std::uint64_t seed = 42;
  std::filesystem::path out_dir = "results";

  void validate() const;
  // Reduced population and epochs for smoke runs; the report schema is unchanged.
  void apply_fast();

  // BiLSTM settings for a run of `epochs` epochs. The learning-rate drop
  // keeps its relative position (350 of 500 by default).
  BilstmConfig bilstm_for_epochs(int epochs) const;
};

// Sets one `section.key` to a textual value. Throws ArgumentError for unknown
// keys or malformed values.
void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value);

// Flat key-value text: `section.key = value` per line, `#` starts a comment.
void apply_config_text(PipelineConfig& cfg, std::string_view text, const std::string& source = "<memory>");
void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

// Every setting as `key = value` lines in a fixed order. Feeding the text back
// through apply_config_text reproduces the configuration.
std::string dump_config(const PipelineConfig& cfg);

// FNV-1a over every setting except the output directory, as 16 hex digits.
std::string config_digest(const PipelineConfig& cfg);

}  // namespace ragq
