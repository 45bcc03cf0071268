#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ragq/parallel.hpp"
#include "ragq/regressor.hpp"
#include "ragq/tree.hpp"

namespace ragq {

struct GbtConfig {
  double learning_rate = 0.1;  // eta
  int max_depth = 6;
  double leaf_l2 = 1.0;        // lambda
  double split_gain_floor = 0.0;  // gamma
  int n_rounds = 100;
  int min_leaf_samples = 1;
  std::uint64_t seed = 0;

  void validate() const;
  // PSO position (learning rate, maximum depth, leaf L2) applied to a base config.
  static GbtConfig from_position(std::span<const double> position, const GbtConfig& base);
};

// Newton boosting on squared loss. Starts from mean(y); each round fits one
// tree to g = yhat - y, h = 1 and adds eta times its leaf weights.
class GbtRegressor : public Regressor {
 public:
  explicit GbtRegressor(GbtConfig cfg = {}, Exec exec = default_exec());

  std::string kind() const override { return "gbt"; }
  const GbtConfig& config() const noexcept { return cfg_; }
  double base_score() const noexcept { return base_; }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
  // Training MSE before any tree (index 0) and after each round.
  const std::vector<double>& training_loss() const noexcept { return loss_; }

 protected:
  void do_fit(const Matrix& x, std::span<const double> y) override;
  std::vector<double> do_predict(const Matrix& x) const override;
  void write_body(BinaryWriter& out) const override;
  void read_body(BinaryReader& in) override;

 private:
  GbtConfig cfg_;
  Exec exec_;
  double base_ = 0.0;
  std::vector<RegressionTree> trees_;
  std::vector<double> loss_;
};

RegressorPtr gbt_fit(const Matrix& x, std::span<const double> y, const GbtConfig& cfg,
                     Exec exec = default_exec());

}  // namespace ragq
