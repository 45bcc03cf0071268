#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ragq/gbt.hpp"
#include "ragq/parallel.hpp"
#include "ragq/regressor.hpp"
#include "ragq/tree.hpp"

namespace ragq {

enum class BaselineKind { decision_tree, adaboost_r2, gbdt, extra_trees, knn };

std::string to_string(BaselineKind kind);
// Table row label: DecisionTrees, AdaBoost, GBDT, ExtraTrees, KNN.
std::string display_name(BaselineKind kind);

// Settings for one baseline. Fields that do not apply to `kind` are ignored.
struct BaselineConfig {
  BaselineKind kind = BaselineKind::decision_tree;
  int max_depth = 6;
  int min_samples_leaf = 2;
  int n_estimators = 100;
  double learning_rate = 0.1;
  int k = 5;
  std::uint64_t seed = 0;

  void validate() const;
  // Documented defaults per kind.
  static BaselineConfig defaults(BaselineKind kind, std::uint64_t seed = 0);
};

// Single variance-reduction tree.
class DecisionTreeRegressor : public Regressor {
 public:
  explicit DecisionTreeRegressor(int max_depth = 6, int min_samples_leaf = 2, Exec exec = default_exec());
  std::string kind() const override { return "decision_tree"; }
  const RegressionTree& tree() const noexcept { return tree_; }

 protected:
  void do_fit(const Matrix& x, std::span<const double> y) override;
  std::vector<double> do_predict(const Matrix& x) const override;
  void write_body(BinaryWriter& out) const override;
  void read_body(BinaryReader& in) override;

 private:
  int max_depth_;
  int min_samples_leaf_;
  Exec exec_;
  RegressionTree tree_;
};

// AdaBoost.R2 with linear loss over weighted depth-limited trees; predicts the
// weighted median of the members.
class AdaBoostR2Regressor : public Regressor {
 public:
  explicit AdaBoostR2Regressor(int n_estimators = 50, int max_depth = 3, Exec exec = default_exec());
  std::string kind() const override { return "adaboost_r2"; }
  std::size_t member_count() const noexcept { return trees_.size(); }

 protected:
  void do_fit(const Matrix& x, std::span<const double> y) override;
  std::vector<double> do_predict(const Matrix& x) const override;
  void write_body(BinaryWriter& out) const override;
  void read_body(BinaryReader& in) override;

 private:
  int n_estimators_;
  int max_depth_;
  Exec exec_;
  std::vector<RegressionTree> trees_;
  std::vector<double> weights_;
};

// Averages totally randomized trees grown on the full training set. Tree i is
// seeded from (seed, i), so members can train concurrently.
class ExtraTreesRegressor : public Regressor {
 public:
  explicit ExtraTreesRegressor(int n_trees = 100, int max_depth = 10, std::uint64_t seed = 0,
                               Exec exec = default_exec());
  std::string kind() const override { return "extra_trees"; }

 protected:
  void do_fit(const Matrix& x, std::span<const double> y) override;
  std::vector<double> do_predict(const Matrix& x) const override;
  void write_body(BinaryWriter& out) const override;
  void read_body(BinaryReader& in) override;

 private:
  int n_trees_;
  int max_depth_;
  std::uint64_t seed_;
  Exec exec_;
  std::vector<RegressionTree> trees_;
};

// Mean target of the k nearest training rows (Euclidean; ties go to the
// lower row index).
class KnnRegressor : public Regressor {
 public:
  explicit KnnRegressor(int k = 5, Exec exec = default_exec());
  std::string kind() const override { return "knn"; }

 protected:
  void do_fit(const Matrix& x, std::span<const double> y) override;
  std::vector<double> do_predict(const Matrix& x) const override;
  void write_body(BinaryWriter& out) const override;
  void read_body(BinaryReader& in) override;

 private:
  int k_;
  Exec exec_;
  Matrix train_x_;
  std::vector<double> train_y_;
};

// Unfitted model for a baseline configuration; gbdt is GbtRegressor with
// lambda = gamma = 0.
RegressorPtr make_baseline(const BaselineConfig& cfg, Exec exec = default_exec());
RegressorPtr baseline_fit(const Matrix& x, std::span<const double> y, const BaselineConfig& cfg,
                          Exec exec = default_exec());

}  // namespace ragq
