#include "ragq/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ragq/log.hpp"
#include "ragq/rng.hpp"

namespace ragq {

bool FeatureSchema::is_ratio_feature(std::string_view name) {
  return name == "doc_relevance" || name == "semantic_similarity" || name == "diversity" ||
         name == "entity_coverage" || name == "redundancy";
}

std::vector<std::string> FeatureSchema::feature_list() {
  return {feature_names.begin(), feature_names.end()};
}

Dataset::Dataset(std::vector<std::string> feature_names, Matrix features,
                 std::optional<std::vector<double>> target, std::string target_name)
    : names_(std::move(feature_names)),
      features_(std::move(features)),
      target_(std::move(target)),
      target_name_(std::move(target_name)) {
  if (names_.size() != features_.cols())
    throw ArgumentError("feature name count does not match column count");
  if (features_.rows() == 0) throw EmptyInputError("dataset has no rows");
  for (std::size_t r = 0; r < features_.rows(); ++r)
    for (std::size_t c = 0; c < features_.cols(); ++c)
      if (!std::isfinite(features_(r, c)))
        throw ParseError("non-finite feature value in column '" + names_[c] + "'", r + 1, c + 1);
  if (target_) {
    if (target_->size() != features_.rows())
      throw ArgumentError("target length does not match row count");
    for (std::size_t r = 0; r < target_->size(); ++r)
      if (!std::isfinite((*target_)[r]))
        throw ParseError("non-finite target value", r + 1, features_.cols() + 1);
  }
}

Dataset Dataset::from_schema(Matrix features, std::optional<std::vector<double>> target) {
  if (features.cols() != FeatureSchema::kFeatureCount)
    throw SchemaError("schema datasets have exactly 7 feature columns");
  return Dataset(FeatureSchema::feature_list(), std::move(features), std::move(target));
}

const std::vector<double>& Dataset::target() const {
  if (!target_) throw UsageError("dataset has no target column");
  return *target_;
}

std::optional<std::size_t> Dataset::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

bool Dataset::is_schema_layout() const {
  if (names_.size() != FeatureSchema::kFeatureCount) return false;
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] != FeatureSchema::feature_names[i]) return false;
  return true;
}

Dataset Dataset::select_rows(std::span<const std::size_t> idx) const {
  std::optional<std::vector<double>> t;
  if (target_) t = select<double>(*target_, idx);
  return Dataset(names_, features_.select_rows(idx), std::move(t), target_name_);
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

std::string format_value(double v, bool fixed6) {
  char buf[64];
  std::to_chars_result res;
  if (fixed6) {
    res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  } else {
    res = std::to_chars(buf, buf + sizeof buf, v);
  }
  return std::string(buf, res.ptr);
}

}  // namespace

Dataset parse_csv(std::string_view text, const std::string& source) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto pos = text.find('\n', start);
      if (pos == std::string_view::npos) {
        if (start < text.size()) lines.push_back(text.substr(start));
        break;
      }
      lines.push_back(text.substr(start, pos - start));
      start = pos + 1;
    }
  }
  // Drop trailing blank lines.
  while (!lines.empty() && is_blank(lines.back())) lines.pop_back();
  if (lines.empty()) throw EmptyInputError(source + ": file is empty");

  std::string_view header_line = lines.front();
  if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);
  const auto header = split_fields(header_line);

  std::vector<std::size_t> source_col(FeatureSchema::kFeatureCount + 1);
  auto find_col = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw SchemaError(source + ": missing column '" + std::string(name) + "'");
  };
  for (std::size_t f = 0; f < FeatureSchema::kFeatureCount; ++f)
    source_col[f] = find_col(FeatureSchema::feature_names[f]);
  source_col.back() = find_col(FeatureSchema::target_name);

  const std::size_t n = lines.size() - 1;
  if (n == 0) throw EmptyInputError(source + ": header only, no data rows");

  Matrix x(n, FeatureSchema::kFeatureCount);
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto fields = split_fields(lines[r + 1]);
    if (fields.size() != header.size()) {
      throw ParseError(source + ": row " + std::to_string(r + 1) + " has " +
                           std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(header.size()),
                       r + 1, fields.size());
    }
    for (std::size_t c = 0; c <= FeatureSchema::kFeatureCount; ++c) {
      const auto cell = fields[source_col[c]];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ParseError(source + ": row " + std::to_string(r + 1) + ", column '" +
                             std::string(header[source_col[c]]) + "': cannot parse '" +
                             std::string(cell) + "' as a finite number",
                         r + 1, source_col[c] + 1);
      }
      if (c < FeatureSchema::kFeatureCount)
        x(r, c) = v;
      else
        y[r] = v;
    }
  }
  Dataset ds = Dataset::from_schema(std::move(x), std::move(y));
  if (auto bad = count_out_of_range(ds); bad > 0)
    logger()->warn("{}: {} ratio-feature value(s) outside [0, 1]", source, bad);
  return ds;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'", ErrorClass::data);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.string());
}

std::string to_csv(const Dataset& ds) {
  std::string out;
  const auto& names = ds.feature_names();
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out += ',';
    out += names[c];
  }
  if (ds.has_target()) out += ',' + ds.target_name();
  out += '\n';

  std::vector<bool> fixed(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) fixed[c] = FeatureSchema::is_ratio_feature(names[c]);

  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      if (c) out += ',';
      out += format_value(ds.features()(r, c), fixed[c]);
    }
    if (ds.has_target()) out += ',' + format_value(ds.target()[r], false);
    out += '\n';
  }
  return out;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << to_csv(ds);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::size_t count_out_of_range(const Dataset& ds) {
  std::size_t bad = 0;
  for (std::size_t c = 0; c < ds.feature_count(); ++c) {
    if (!FeatureSchema::is_ratio_feature(ds.feature_names()[c])) continue;
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
      const double v = ds.features()(r, c);
      if (v < 0.0 || v > 1.0) ++bad;
    }
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Standardization

std::pair<Dataset, StandardizationStats> standardize(const Dataset& ds) {
  const std::size_t n = ds.row_count();
  if (n < 2) throw InsufficientDataError("standardize needs at least 2 rows");
  StandardizationStats stats;
  const std::size_t d = ds.feature_count();
  stats.mean.resize(d);
  stats.std.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += ds.features()(r, c);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dv = ds.features()(r, c) - mean;
      ss += dv * dv;
    }
    stats.mean[c] = mean;
    stats.std[c] = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return {stats.apply(ds), std::move(stats)};
}

Dataset StandardizationStats::apply(const Dataset& ds) const {
  if (ds.feature_count() != mean.size()) throw ArgumentError("stats do not match dataset width");
  Matrix x = ds.features();
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c)
      x(r, c) = std[c] > 0.0 ? (x(r, c) - mean[c]) / std[c] : 0.0;
  std::optional<std::vector<double>> t;
  if (ds.has_target()) t = ds.target();
  return Dataset(ds.feature_names(), std::move(x), std::move(t), ds.target_name());
}

Dataset StandardizationStats::invert(const Dataset& ds) const {
  if (ds.feature_count() != mean.size()) throw ArgumentError("stats do not match dataset width");
  Matrix x = ds.features();
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) = x(r, c) * std[c] + mean[c];
  std::optional<std::vector<double>> t;
  if (ds.has_target()) t = ds.target();
  return Dataset(ds.feature_names(), std::move(x), std::move(t), ds.target_name());
}

// ---------------------------------------------------------------------------
// Split

SplitIndices split(std::size_t n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ArgumentError("train fraction must lie in (0, 1)");
  if (n < 2) throw InsufficientDataError("split needs at least 2 rows");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order.begin(), order.end());

  auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
  SplitIndices out;
  if (n_train < 1) {
    n_train = 1;
    out.adjusted = true;
  } else if (n_train > n - 1) {
    n_train = n - 1;
    out.adjusted = true;
  }
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return out;
}

SplitIndices split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  return split(ds.row_count(), train_fraction, seed);
}

// ---------------------------------------------------------------------------
// Built-in data

Dataset embedded_sample() {
  // query_complexity, doc_relevance, semantic_similarity, diversity,
  // entity_coverage, redundancy, retrieval_depth | answer_quality
  static constexpr double rows[8][8] = {
      {4, 0.57, 0.685, 0.353, 0.819, 0.70, 5, 54},
      {8, 0.55, 0.678, 0.462, 0.946, 0.80, 6, 45},
      {6, 0.55, 0.440, 0.665, 0.658, 0.54, 6, 49},
      {6, 0.82, 0.669, 0.400, 0.797, 0.72, 7, 54},
      {3, 0.75, 0.540, 0.536, 0.823, 0.69, 4, 62},
      {3, 0.70, 0.665, 0.376, 0.866, 0.67, 7, 62},
      {2, 0.64, 0.352, 0.587, 0.724, 0.57, 8, 62},
      {7, 0.86, 0.668, 0.454, 0.687, 0.69, 8, 58},
  };
  Matrix x(8, 7);
  std::vector<double> y(8);
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 7; ++c) x(r, c) = rows[r][c];
    y[r] = rows[r][7];
  }
  return Dataset::from_schema(std::move(x), std::move(y));
}

const std::array<std::array<double, 8>, 8>& synthetic_correlation() {
  // qc, dr, ss, div, ec, red, depth, aq. The (aq, dr) entry sits above 0.66
  // because the interaction term added to the target dilutes it back to ~0.66.
  static const std::array<std::array<double, 8>, 8> m = {{
      {1.00, -0.05, -0.10, 0.05, -0.08, -0.05, 0.20, -0.15},
      {-0.05, 1.00, 0.15, -0.10, 0.20, 0.10, 0.05, 0.70},
      {-0.10, 0.15, 1.00, -0.89, 0.10, 0.80, 0.00, 0.10},
      {0.05, -0.10, -0.89, 1.00, -0.05, -0.88, 0.00, -0.08},
      {-0.08, 0.20, 0.10, -0.05, 1.00, 0.05, 0.05, 0.20},
      {-0.05, 0.10, 0.80, -0.88, 0.05, 1.00, 0.00, 0.05},
      {0.20, 0.05, 0.00, 0.00, 0.05, 0.00, 1.00, 0.10},
      {-0.15, 0.70, 0.10, -0.08, 0.20, 0.05, 0.10, 1.00},
  }};
  return m;
}

namespace {

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

}  // namespace

Dataset synthesize(std::size_t n, std::uint64_t seed) {
  if (n < 10) throw ArgumentError("synthesize needs n >= 10");

  const auto& corr = synthetic_correlation();
  Eigen::Matrix<double, 8, 8> c;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) c(i, j) = corr[i][j];
  const Eigen::LLT<Eigen::Matrix<double, 8, 8>> llt(c);
  if (llt.info() != Eigen::Success)
    throw ConfigurationError("synthetic correlation matrix is not positive definite");
  const Eigen::Matrix<double, 8, 8> l = llt.matrixL();

  // Location and scale per latent; counts are rounded and clipped.
  static constexpr double loc[7] = {5.0, 0.68, 0.60, 0.48, 0.79, 0.67, 6.0};
  static constexpr double scale[7] = {2.0, 0.12, 0.10, 0.10, 0.08, 0.08, 1.5};

  Rng rng(seed);
  Matrix x(n, 7);
  std::vector<double> y(n);
  std::array<double, 8> e{};
  std::array<double, 8> z{};
  for (std::size_t r = 0; r < n; ++r) {
    for (auto& v : e) v = rng.normal();
    for (std::size_t i = 0; i < 8; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += l(static_cast<int>(i), static_cast<int>(j)) * e[j];
      z[i] = s;
    }
    for (std::size_t f = 0; f < 7; ++f) {
      double v = loc[f] + scale[f] * z[f];
      if (f == FeatureSchema::query_complexity) {
        v = std::clamp(std::round(v), 1.0, 10.0);
      } else if (f == FeatureSchema::retrieval_depth) {
        v = std::clamp(std::round(v), 1.0, 12.0);
      } else {
        v = round_to(std::clamp(v, 0.0, 1.0), 1e6);
      }
      x(r, f) = v;
    }
    // Interaction between complexity and depth: invisible to a linear fit,
    // uncorrelated with every single latent.
    const double interaction = z[FeatureSchema::query_complexity] * z[FeatureSchema::retrieval_depth];
    y[r] = round_to(std::clamp(55.0 + 8.0 * (z[7] + 0.35 * interaction), 0.0, 100.0), 100.0);
  }
  return Dataset::from_schema(std::move(x), std::move(y));
}

}  // namespace ragq
