#include "ragq/regressor.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ragq/baselines.hpp"
#include "ragq/bilstm.hpp"
#include "ragq/errors.hpp"
#include "ragq/gbt.hpp"

namespace ragq {

void Regressor::fit(const Matrix& x, std::span<const double> y) {
  if (x.rows() != y.size())
    throw ArgumentError(kind() + ": " + std::to_string(x.rows()) + " rows but " + std::to_string(y.size()) +
                        " targets");
  if (x.rows() < min_rows())
    throw InsufficientDataError(kind() + ": needs at least " + std::to_string(min_rows()) + " rows, got " +
                                std::to_string(x.rows()));
  if (x.cols() == 0) throw ArgumentError(kind() + ": no feature columns");
  for (double v : x.data())
    if (!std::isfinite(v)) throw ArgumentError(kind() + ": non-finite feature value");
  for (double v : y)
    if (!std::isfinite(v)) throw ArgumentError(kind() + ": non-finite target value");
  fitted_ = false;
  do_fit(x, y);
  input_dim_ = x.cols();
  fitted_ = true;
}

std::vector<double> Regressor::predict(const Matrix& x) const {
  if (!fitted_) throw UsageError(kind() + ": predict called before fit");
  if (x.cols() != input_dim_)
    throw ArgumentError(kind() + ": expected " + std::to_string(input_dim_) + " features, got " +
                        std::to_string(x.cols()));
  if (x.rows() == 0) return {};
  auto out = do_predict(x);
  for (double v : out)
    if (!std::isfinite(v)) throw Error(ErrorClass::runtime, kind() + ": non-finite prediction");
  return out;
}

std::string Regressor::serialize() const {
  if (!fitted_) throw UsageError(kind() + ": cannot save an unfitted model");
  BinaryWriter out;
  out.raw(kModelMagic);
  out.u64(kModelFormatVersion);
  out.str(kind());
  out.u64(input_dim_);
  write_body(out);
  return out.bytes();
}

void Regressor::save(const std::filesystem::path& path) const {
  const std::string bytes = serialize();
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

namespace {

const std::map<std::string, std::function<RegressorPtr()>>& registry() {
  static const std::map<std::string, std::function<RegressorPtr()>> kinds = {
      {"gbt", [] { return std::make_unique<GbtRegressor>(); }},
      {"decision_tree", [] { return std::make_unique<DecisionTreeRegressor>(); }},
      {"adaboost_r2", [] { return std::make_unique<AdaBoostR2Regressor>(); }},
      {"extra_trees", [] { return std::make_unique<ExtraTreesRegressor>(); }},
      {"knn", [] { return std::make_unique<KnnRegressor>(); }},
      {"bilstm", [] { return std::make_unique<BilstmRegressor>(); }},
  };
  return kinds;
}

}  // namespace

RegressorPtr deserialize_model(const std::string& bytes) {
  BinaryReader in(bytes);
  if (in.raw(kModelMagic.size()) != kModelMagic) throw ParseError("model file: bad magic", 0, 0);
  const auto version = in.u64();
  if (version != kModelFormatVersion)
    throw ParseError("model file: unsupported version " + std::to_string(version), 0, 0);
  const std::string kind = in.str();
  const auto it = registry().find(kind);
  if (it == registry().end()) throw ParseError("model file: unknown model kind '" + kind + "'", 0, 0);
  RegressorPtr model = it->second();
  model->input_dim_ = in.u64();
  model->read_body(in);
  if (!in.at_end()) throw ParseError("model file: trailing bytes", 0, 0);
  model->fitted_ = true;
  return model;
}

RegressorPtr load_model(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open model file '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return deserialize_model(ss.str());
}

}  // namespace ragq
