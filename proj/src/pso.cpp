#include "ragq/pso.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "ragq/errors.hpp"
#include "ragq/rng.hpp"

namespace ragq {

void SearchSpace::validate() const {
  if (lower.empty()) throw ArgumentError("pso: search space has no dimensions");
  if (lower.size() != upper.size()) throw ArgumentError("pso: lower/upper length mismatch");
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (!std::isfinite(lower[d]) || !std::isfinite(upper[d]))
      throw ArgumentError("pso: bounds must be finite");
    if (lower[d] > upper[d]) throw ArgumentError("pso: lower bound exceeds upper bound");
  }
  for (auto d : integer_dims)
    if (d >= lower.size()) throw ArgumentError("pso: integer dimension out of range");
}

std::vector<double> SearchSpace::snap(std::span<const double> x) const {
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t d = 0; d < out.size(); ++d) {
    if (integer_dims.contains(d)) out[d] = std::round(out[d]);
    out[d] = std::clamp(out[d], lower[d], upper[d]);
  }
  return out;
}

void SwarmConfig::validate() const {
  if (population < 2) throw ArgumentError("pso: population must be >= 2");
  if (iterations < 1) throw ArgumentError("pso: iterations must be >= 1");
  if (!(vmax_fraction > 0.0 && vmax_fraction <= 1.0))
    throw ArgumentError("pso: vmax_fraction must lie in (0, 1]");
  if (!std::isfinite(inertia) || !std::isfinite(cognitive) || !std::isfinite(social))
    throw ArgumentError("pso: coefficients must be finite");
}

PsoResult optimize(const SearchSpace& space, const FitnessFn& fitness, const SwarmConfig& cfg,
                   std::uint64_t seed, Exec exec) {
  space.validate();
  cfg.validate();
  if (!fitness) throw ArgumentError("pso: fitness function is empty");

  const std::size_t dims = space.dims();
  const auto pop = static_cast<std::size_t>(cfg.population);
  constexpr double kFailed = -std::numeric_limits<double>::infinity();

  std::vector<double> vmax(dims);
  for (std::size_t d = 0; d < dims; ++d) vmax[d] = cfg.vmax_fraction * (space.upper[d] - space.lower[d]);

  Rng rng(seed);
  std::vector<std::vector<double>> x(pop, std::vector<double>(dims));
  std::vector<std::vector<double>> v(pop, std::vector<double>(dims, 0.0));
  for (auto& p : x)
    for (std::size_t d = 0; d < dims; ++d) p[d] = rng.uniform(space.lower[d], space.upper[d]);

  std::vector<std::vector<double>> pbest = x;
  std::vector<double> pbest_fit(pop, kFailed);
  std::vector<double> gbest;
  double gbest_fit = kFailed;
  bool have_gbest = false;

  PsoResult result;
  std::vector<double> fit(pop);
  std::vector<std::vector<double>> snapped(pop);

  for (int it = 0; it < cfg.iterations; ++it) {
    if (it > 0) {
      // Random draws happen serially in particle order.
      for (std::size_t p = 0; p < pop; ++p) {
        for (std::size_t d = 0; d < dims; ++d) {
          const double r1 = rng.uniform();
          const double r2 = rng.uniform();
          const double social_pull = have_gbest ? gbest[d] - x[p][d] : 0.0;
          double vel = cfg.inertia * v[p][d] + cfg.cognitive * r1 * (pbest[p][d] - x[p][d]) +
                       cfg.social * r2 * social_pull;
          vel = std::clamp(vel, -vmax[d], vmax[d]);
          v[p][d] = vel;
          x[p][d] = std::clamp(x[p][d] + vel, space.lower[d], space.upper[d]);
        }
      }
    }

    for (std::size_t p = 0; p < pop; ++p) snapped[p] = space.snap(x[p]);
    parallel_for(exec, pop, [&](std::size_t p) {
      double f = kFailed;
      try {
        f = fitness(snapped[p], mix_seed(seed, static_cast<std::uint64_t>(it), p));
      } catch (...) {
        f = kFailed;
      }
      fit[p] = std::isfinite(f) ? f : kFailed;
    });
    result.evaluations += static_cast<int>(pop);

    for (std::size_t p = 0; p < pop; ++p) {
      result.log.push_back({it + 1, static_cast<int>(p), snapped[p], fit[p]});
      if (fit[p] > pbest_fit[p]) {
        pbest_fit[p] = fit[p];
        pbest[p] = x[p];
      }
      if (fit[p] > gbest_fit) {
        gbest_fit = fit[p];
        gbest = x[p];
        have_gbest = true;
      }
    }
    result.best_history.push_back(gbest_fit);
  }

  if (!have_gbest) throw NoFeasiblePointError("pso: every fitness evaluation failed");
  result.best_position = space.snap(gbest);
  result.best_fitness = gbest_fit;
  return result;
}

SearchSpace bilstm_search_space() {
  return {{1e-8, 1e-4, 2.0}, {1e-1, 1e-1, 100.0}, {2}};
}

SearchSpace gbt_search_space() {
  return {{0.01, 2.0, 1e-3}, {0.5, 8.0, 10.0}, {1}};
}

void write_pso_log(const PsoResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const std::size_t dims = result.best_position.size();
  out << "iteration,particle";
  for (std::size_t d = 0; d < dims; ++d) out << ",x" << d;
  out << ",fitness\n";
  char buf[64];
  auto fmt = [&](double v) {
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  for (const auto& rec : result.log) {
    out << rec.iteration << ',' << rec.particle;
    for (double x : rec.position) out << ',' << fmt(x);
    out << ',' << (std::isfinite(rec.fitness) ? fmt(rec.fitness) : std::string("-inf")) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace ragq
