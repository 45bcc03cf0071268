#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <span>
#include <vector>

#include "ragq/parallel.hpp"

namespace ragq {

struct SearchSpace {
  std::vector<double> lower;
  std::vector<double> upper;
  std::set<std::size_t> integer_dims;

  std::size_t dims() const noexcept { return lower.size(); }
  void validate() const;
  // Rounds integer dimensions and clamps to the box.
  std::vector<double> snap(std::span<const double> x) const;
};

struct SwarmConfig {
  int population = 10;
  int iterations = 15;
  double inertia = 0.8;
  double cognitive = 1.5;
  double social = 1.5;
  double vmax_fraction = 0.5;

  void validate() const;
};

struct EvalRecord {
  int iteration = 0;
  int particle = 0;
  std::vector<double> position;  // as passed to the fitness (snapped)
  double fitness = 0.0;
};

struct PsoResult {
  std::vector<double> best_position;  // integer dimensions rounded
  double best_fitness = 0.0;
  std::vector<double> best_history;   // swarm best after each iteration
  int evaluations = 0;
  std::vector<EvalRecord> log;
};

// Higher is better. The seed is derived from (run seed, iteration, particle)
// so evaluations can run concurrently and still be reproducible. Throwing or
// returning a non-finite value counts as a failed evaluation (-inf).
using FitnessFn = std::function<double(std::span<const double> position, std::uint64_t eval_seed)>;

// Global-best particle swarm maximizing `fitness` over the box. Iteration 1
// evaluates the seeded uniform initial positions (velocities start at zero);
// each later iteration moves every particle by
//   v <- w v + c1 r1 (pbest - x) + c2 r2 (gbest - x),  |v_d| <= vmax_d
//   x <- clamp(x + v)
// and evaluates it. Fitness evaluations within an iteration may run in
// parallel; bests are reduced in particle order, strict improvement only.
PsoResult optimize(const SearchSpace& space, const FitnessFn& fitness, const SwarmConfig& cfg,
                   std::uint64_t seed, Exec exec = default_exec());

// L2 coefficient, initial learning rate, hidden units.
SearchSpace bilstm_search_space();
// Learning rate, maximum depth, leaf L2 regularization.
SearchSpace gbt_search_space();

void write_pso_log(const PsoResult& result, const std::filesystem::path& path);

}  // namespace ragq
