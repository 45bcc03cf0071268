#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ragq/matrix.hpp"
#include "ragq/model_io.hpp"

namespace ragq {

// Common fit/predict contract for the tuned models and the baselines.
class Regressor {
 public:
  virtual ~Regressor() = default;

  virtual std::string kind() const = 0;

  // Trains in place, replacing any previous fit.
  void fit(const Matrix& x, std::span<const double> y);

  // Throws UsageError before fit and ArgumentError on a width mismatch.
  std::vector<double> predict(const Matrix& x) const;

  bool fitted() const noexcept { return fitted_; }
  std::size_t input_dim() const noexcept { return input_dim_; }

  void save(const std::filesystem::path& path) const;
  std::string serialize() const;

 protected:
  virtual void do_fit(const Matrix& x, std::span<const double> y) = 0;
  virtual std::vector<double> do_predict(const Matrix& x) const = 0;
  virtual void write_body(BinaryWriter& out) const = 0;
  virtual void read_body(BinaryReader& in) = 0;
  // Smallest training set the model accepts.
  virtual std::size_t min_rows() const { return 2; }

  friend std::unique_ptr<Regressor> deserialize_model(const std::string& bytes);

 private:
  bool fitted_ = false;
  std::size_t input_dim_ = 0;
};

using RegressorPtr = std::unique_ptr<Regressor>;

// Reads a model written by Regressor::save; predictions are bit-identical.
RegressorPtr load_model(const std::filesystem::path& path);
RegressorPtr deserialize_model(const std::string& bytes);

}  // namespace ragq
