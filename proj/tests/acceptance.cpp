// Acceptance checks: one PASS / FAIL / SKIP line per criterion.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ragq/bilstm.hpp"
#include "ragq/cli.hpp"
#include "ragq/config.hpp"
#include "ragq/data_model.hpp"
#include "ragq/gbt.hpp"
#include "ragq/metrics.hpp"
#include "ragq/pipeline.hpp"
#include "ragq/pso.hpp"
#include "ragq/rng.hpp"
#include "ragq/vmd.hpp"

using namespace ragq;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Status { pass, fail, skip } status;
  std::string detail;
};

Outcome ok(bool good, std::string detail) { return {good ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::optional<fs::path> dataset_path() {
  if (const char* env = std::getenv("RAGQ_DATASET"); env && *env) return fs::path(env);
  if (fs::exists("data/rag.csv")) return fs::path("data/rag.csv");
  return std::nullopt;
}

const std::string kNoDataset =
    "dataset not available (set RAGQ_DATASET or place data/rag.csv); this check needs the published data";

std::vector<double> tones(std::size_t n, std::initializer_list<std::pair<double, double>> parts) {
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (auto [amp, f] : parts) s[i] += amp * std::cos(2.0 * std::numbers::pi * f * static_cast<double>(i));
  return s;
}

double relative_rmse(const std::vector<double>& a, const std::vector<double>& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ref[i]) * (a[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return std::sqrt(num / den);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome correlations() {
  const auto path = dataset_path();
  if (!path) return {Outcome::skip, kNoDataset};
  const CorrelationMatrix m = correlation_matrix(load_csv(*path));
  const double a = m.at("answer_quality", "doc_relevance");
  const double b = m.at("semantic_similarity", "diversity");
  const double c = m.at("redundancy", "diversity");
  const bool good = std::abs(a - 0.66) <= 0.03 && std::abs(b + 0.89) <= 0.03 && std::abs(c + 0.88) <= 0.03;
  return ok(good, fmt::format("r(aq,dr)={:.3f} r(ss,dv)={:.3f} r(rd,dv)={:.3f}", a, b, c));
}

Outcome table_consistency() {
  struct Row {
    const char* model;
    double mse, rmse;
  };
  const Row table[] = {{"DecisionTrees", 30.728, 5.543}, {"AdaBoost", 17.712, 4.209}, {"GBDT", 15.804, 3.975},
                       {"ExtraTrees", 16.230, 4.029},    {"KNN", 66.250, 8.139},      {"VMD-PSO-BiLSTM", 12.230, 3.498}};
  double worst = 0.0;
  for (const Row& r : table) worst = std::max(worst, std::abs(std::sqrt(r.mse) - r.rmse));
  Rng rng(2);
  bool identity = true;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> y(20), yhat(20);
    for (std::size_t i = 0; i < 20; ++i) {
      y[i] = rng.uniform(10.0, 100.0);
      yhat[i] = y[i] + rng.normal() * 5.0;
    }
    const MetricsRow m = regression_metrics(y, yhat);
    identity = identity && std::abs(m.rmse * m.rmse - m.mse) <= 1e-9 * m.mse;
  }
  return ok(worst <= 0.001 && identity, fmt::format("max |sqrt(MSE) - RMSE| = {:.4f}; identity on random inputs: {}",
                                                    worst, identity ? "holds" : "broken"));
}

Outcome ordering() {
  const auto path = dataset_path();
  if (!path) return {Outcome::skip, kNoDataset};
  PipelineConfig cfg;
  cfg.data = DataSource::parse(path->string());
  const bool full = std::getenv("RAGQ_ACCEPTANCE_FULL") != nullptr;
  if (!full) cfg.apply_fast();
  const EvalReport rep = run_benchmark(cfg);
  const auto r2 = [&](const std::string& name) {
    for (const auto& r : rep.rows)
      if (r.model == name && r.ok()) return r.metrics->r2;
    return -std::numeric_limits<double>::infinity();
  };
  const double p = r2(rep.rows.back().model), knn = r2("KNN"), dt = r2("DecisionTrees");
  return ok(p > knn && p > dt, fmt::format("{} mode: proposed R2 {:.3f}, KNN {:.3f}, DecisionTrees {:.3f}",
                                           full ? "full" : "fast", p, knn, dt));
}

Outcome vmd_tones() {
  VmdConfig one;
  one.n_modes = 1;
  const auto s1 = tones(500, {{1.0, 0.05}});
  const VmdOutput a = decompose(s1, one);
  const double e1 = std::abs(a.omegas[0] - 0.05) / 0.05;
  VmdConfig two;
  two.n_modes = 2;
  const auto s2 = tones(1000, {{1.0, 0.04}, {0.8, 0.20}});
  const VmdOutput b = decompose(s2, two);
  const double e2 = std::max(std::abs(b.omegas[0] - 0.04) / 0.04, std::abs(b.omegas[1] - 0.20) / 0.20);
  const double rr = relative_rmse(reconstruct(b), s2);
  return ok(e1 < 0.02 && e2 < 0.05 && rr < 0.05,
            fmt::format("K=1 error {:.2e}; K=2 max error {:.2e}; reconstruction RMSE {:.4f}", e1, e2, rr));
}

Outcome vmd_shapes() {
  Rng rng(99);
  int bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 8 + rng.below(300);
    VmdConfig cfg;
    cfg.n_modes = 1 + static_cast<int>(rng.below(6));
    cfg.alpha = rng.uniform(10.0, 3000.0);
    cfg.max_iterations = 1 + static_cast<int>(rng.below(300));
    std::vector<double> s(n);
    for (auto& v : s) v = rng.normal();
    const VmdOutput out = decompose(s, cfg);
    bool good = out.modes.size() == static_cast<std::size_t>(cfg.n_modes) &&
                std::is_sorted(out.omegas.begin(), out.omegas.end()) && out.iterations_used <= cfg.max_iterations;
    for (const auto& m : out.modes) good = good && m.size() == n;
    for (double w : out.omegas) good = good && w >= 0.0 && w <= 0.5;
    if (out.iterations_used < cfg.max_iterations) good = good && out.final_update_norm <= 1e-7;
    bad += good ? 0 : 1;
  }
  return ok(bad == 0, fmt::format("{} of 50 signals violated shape or termination", bad));
}

Outcome pso_sphere() {
  SearchSpace space{std::vector<double>(3, -5.0), std::vector<double>(3, 5.0), {}};
  SwarmConfig cfg;
  cfg.population = 20;
  cfg.iterations = 60;
  double worst = 0.0;
  bool monotone = true, in_bounds = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const PsoResult r = optimize(space, [](std::span<const double> x, std::uint64_t) {
      return -(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    }, cfg, seed);
    worst = seed == 1 ? r.best_fitness : std::min(worst, r.best_fitness);
    for (std::size_t i = 1; i < r.best_history.size(); ++i) monotone = monotone && r.best_history[i] >= r.best_history[i - 1];
    for (const auto& e : r.log)
      for (double v : e.position) in_bounds = in_bounds && v >= -5.0 && v <= 5.0;
  }
  return ok(worst > -0.01 && monotone && in_bounds,
            fmt::format("worst best-fitness {:.2e}; history monotone: {}; in bounds: {}", worst, monotone, in_bounds));
}

Outcome bilstm_gradient() {
  Rng rng(3);
  Matrix x(2, 35);
  for (double& v : x.data()) v = rng.uniform(-1.0, 1.0);
  const std::vector<double> y = {0.2, 0.7};
  const SequenceShape shape = sequence_shape(SeqLayout::per_feature_steps, 35);
  BilstmParams p = BilstmParams::initialize(5, 3, 9);
  Eigen::VectorXd grad;
  bilstm_loss(p, x, y, shape, 1e-2, &grad);
  Eigen::VectorXd flat = p.flatten();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    const double keep = flat[i];
    flat[i] = keep + 1e-5;
    p.unflatten(flat);
    const double up = bilstm_loss(p, x, y, shape, 1e-2, nullptr);
    flat[i] = keep - 1e-5;
    p.unflatten(flat);
    const double down = bilstm_loss(p, x, y, shape, 1e-2, nullptr);
    flat[i] = keep;
    const double fd = (up - down) / 2e-5;
    worst = std::max(worst, std::abs(fd - grad[i]) / std::max({1e-8, std::abs(fd), std::abs(grad[i])}));
  }
  p.unflatten(flat);
  return ok(worst < 1e-4, fmt::format("{} parameters, worst relative error {:.2e}", flat.size(), worst));
}

Outcome gbt_oracles() {
  Rng rng(4);
  Matrix x(60, 5);
  for (double& v : x.data()) v = rng.uniform(-1.0, 1.0);
  std::vector<double> y(60);
  for (std::size_t r = 0; r < 60; ++r) y[r] = std::sin(3 * x(r, 0)) + x(r, 1) * x(r, 2);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= 60;
  GbtConfig zero;
  zero.n_rounds = 0;
  bool mean_ok = true;
  for (double v : gbt_fit(x, y, zero)->predict(x)) mean_ok = mean_ok && v == mean;

  Matrix xm(8, 1);
  std::vector<double> ym(8);
  for (int i = 0; i < 8; ++i) {
    xm(i, 0) = i;
    ym[i] = 3.0 * i - 5.0;
  }
  GbtConfig memo;
  memo.max_depth = 3;
  memo.leaf_l2 = 0.0;
  memo.split_gain_floor = 0.0;
  memo.learning_rate = 1.0;
  memo.n_rounds = 1;
  const auto pm = gbt_fit(xm, ym, memo)->predict(xm);
  double memo_err = 0.0;
  for (int i = 0; i < 8; ++i) memo_err = std::max(memo_err, std::abs(pm[i] - ym[i]));

  GbtConfig long_run;
  long_run.n_rounds = 100;
  long_run.max_depth = 3;
  GbtRegressor model(long_run);
  model.fit(x, y);
  bool monotone = true;
  const auto& loss = model.training_loss();
  for (std::size_t i = 1; i < loss.size(); ++i) monotone = monotone && loss[i] <= loss[i - 1];
  return ok(mean_ok && memo_err < 1e-12 && monotone,
            fmt::format("mean exact: {}; memorization max error {:.1e}; loss non-increasing: {}", mean_ok, memo_err,
                        monotone));
}

Outcome metric_oracles() {
  const MetricsRow m = regression_metrics(std::vector<double>{50, 60}, std::vector<double>{55, 55});
  const bool hand = std::abs(m.mse - 25) < 1e-9 && std::abs(m.rmse - 5) < 1e-9 && std::abs(m.mae - 5) < 1e-9 &&
                    std::abs(m.mape - 9.166666666666666) < 1e-9 && std::abs(m.r2) < 1e-9;
  Rng rng(5);
  std::vector<double> a(30), b(30), s(30);
  for (std::size_t i = 0; i < 30; ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
    s[i] = 2.5 * a[i] + 4.0;
  }
  const double r = pearson_corr(a, b);
  const bool ident = std::abs(pearson_corr(a, a) - 1.0) <= 1e-12 &&
                     std::abs(pearson_corr(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) + 1.0) <= 1e-12 &&
                     std::abs(pearson_corr(s, b) - r) <= 1e-12;
  return ok(hand && ident, fmt::format("hand example: {}; pearson identities: {}", hand, ident));
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / "ragq_acceptance_determinism";
  fs::remove_all(root);
  std::vector<fs::path> dirs = {root / "a", root / "b"};
  for (const auto& d : dirs) {
    std::ostringstream out, err;
    const int code = cli_main({"benchmark", "--data", "synthetic:500", "--seed", "42", "--fast", "--out", d.string()},
                              out, err);
    if (code != kExitOk) return {Outcome::fail, "benchmark exited with " + std::to_string(code) + ": " + err.str()};
  }
  std::vector<std::string> files = {"report.csv", "heatmap.svg"};
  for (const char* m : {"mse", "rmse", "mae", "mape", "r2"}) files.push_back(fmt::format("bar_{}.svg", m));
  std::string differing;
  for (const auto& f : files)
    if (!fs::exists(dirs[0] / f) || slurp(dirs[0] / f) != slurp(dirs[1] / f)) differing += " " + f;
  return ok(differing.empty(), differing.empty() ? fmt::format("{} files byte-identical across two runs", files.size())
                                                 : "differing:" + differing);
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const bool full = std::getenv("RAGQ_ACCEPTANCE_FULL") != nullptr;
  const std::vector<Criterion> criteria = {
      {1, "correlation reproduction", 5, correlations},
      {2, "reference table consistency", 1, table_consistency},
      {3, "proposed model beats KNN and DecisionTrees", full ? 1800.0 : 180.0, ordering},
      {4, "VMD tone recovery", 10, vmd_tones},
      {5, "VMD termination and shape", 30, vmd_shapes},
      {6, "PSO sphere convergence", 5, pso_sphere},
      {7, "BiLSTM gradient check", 10, bilstm_gradient},
      {8, "GBT oracles", 10, gbt_oracles},
      {9, "metric oracles", 1, metric_oracles},
      {10, "end-to-end determinism", 180, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Outcome::fail, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.status == Outcome::pass && secs > c.budget_seconds) {
      o.status = Outcome::fail;
      o.detail += fmt::format("; over the {:.0f} s budget", c.budget_seconds);
    }
    const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::fail ? "FAIL" : "SKIP";
    std::cout << fmt::format("{} {:>2} {} ({:.2f} s): {}", tag, c.id, c.name, secs, o.detail) << std::endl;
    failures += o.status == Outcome::fail ? 1 : 0;
  }
  return failures == 0 ? 0 : 1;
}
