#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragq/matrix.hpp"

namespace ragq {

// Fixed column layout of the retrieval-quality table.
struct FeatureSchema {
  static constexpr std::size_t kFeatureCount = 7;
  static constexpr std::array<std::string_view, kFeatureCount> feature_names = {
      "query_complexity", "doc_relevance", "semantic_similarity", "diversity",
      "entity_coverage",  "redundancy",    "retrieval_depth"};
  static constexpr std::string_view target_name = "answer_quality";

  enum Column : std::size_t {
    query_complexity = 0,
    doc_relevance,
    semantic_similarity,
    diversity,
    entity_coverage,
    redundancy,
    retrieval_depth,
  };

  // The five features expected in [0, 1].
  static bool is_ratio_feature(std::string_view name);
  static std::vector<std::string> feature_list();
};

// Rows of named feature values plus an optional target. Both the raw 7-column
// table and VMD-expanded tables are Datasets; they differ only in the names.
class Dataset {
 public:
  Dataset(std::vector<std::string> feature_names, Matrix features,
          std::optional<std::vector<double>> target = std::nullopt,
          std::string target_name = std::string(FeatureSchema::target_name));

  // Builds a dataset in the raw schema layout.
  static Dataset from_schema(Matrix features, std::optional<std::vector<double>> target);

  std::size_t row_count() const noexcept { return features_.rows(); }
  std::size_t feature_count() const noexcept { return features_.cols(); }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }
  const std::string& target_name() const noexcept { return target_name_; }
  const Matrix& features() const noexcept { return features_; }
  bool has_target() const noexcept { return target_.has_value(); }
  const std::vector<double>& target() const;
  std::optional<std::size_t> column_index(std::string_view name) const;

  // True when the columns are exactly the 7 schema features in order.
  bool is_schema_layout() const;

  Dataset select_rows(std::span<const std::size_t> idx) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<std::string> names_;
  Matrix features_;
  std::optional<std::vector<double>> target_;
  std::string target_name_;
};

struct StandardizationStats {
  std::vector<double> mean;
  std::vector<double> std;  // sample std; 0 for constant columns

  // Applies (x - mean) / std column-wise; constant columns become 0.
  Dataset apply(const Dataset& ds) const;
  // Maps standardized values back; constant columns return their mean.
  Dataset invert(const Dataset& ds) const;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  // Set when floor(fraction * N) had to be moved to keep a side non-empty.
  bool adjusted = false;
};

// Reads a comma-separated file whose header contains the 8 schema columns in
// any order. Extra columns are ignored.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(std::string_view text, const std::string& source = "<memory>");

// Writes any dataset in the same dialect. Ratio features use 6-decimal fixed
// notation, everything else the shortest round-trip representation.
void save_csv(const Dataset& ds, const std::filesystem::path& path);
std::string to_csv(const Dataset& ds);

std::pair<Dataset, StandardizationStats> standardize(const Dataset& ds);

SplitIndices split(const Dataset& ds, double train_fraction, std::uint64_t seed);
SplitIndices split(std::size_t row_count, double train_fraction, std::uint64_t seed);

// The eight sample rows published with the dataset description.
Dataset embedded_sample();

// Synthetic table whose correlation structure mimics the published one.
Dataset synthesize(std::size_t n, std::uint64_t seed);

// Target correlation matrix used by synthesize (schema order, then target).
const std::array<std::array<double, 8>, 8>& synthetic_correlation();

// Count of ratio-feature cells outside [0, 1]; the loader logs these as
// warnings rather than rejecting the file.
std::size_t count_out_of_range(const Dataset& ds);

}  // namespace ragq
