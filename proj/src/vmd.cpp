#include "ragq/vmd.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include "ragq/fft.hpp"
#include "ragq/rng.hpp"

namespace ragq {

void VmdConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("vmd: alpha must be > 0");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ArgumentError("vmd: tau must be >= 0");
  if (n_modes < 1) throw ArgumentError("vmd: n_modes must be >= 1");
  if (!(tolerance > 0.0)) throw ArgumentError("vmd: tolerance must be > 0");
  if (max_iterations < 1) throw ArgumentError("vmd: max_iterations must be >= 1");
}

namespace {

using cplx = std::complex<double>;

constexpr std::size_t kBlock = 2048;

struct BlockSums {
  double weighted_freq = 0.0;  // sum f |u|^2
  double power = 0.0;          // sum |u|^2
  double diff = 0.0;           // sum |u_new - u_old|^2
  double previous = 0.0;       // sum |u_old|^2
};

std::vector<double> mirror_extend(std::span<const double> x) {
  const std::size_t n = x.size();
  const std::size_t half = n / 2;
  std::vector<double> ext;
  ext.reserve(2 * n);
  for (std::size_t i = half; i-- > 0;) ext.push_back(x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = n; i-- > half;) ext.push_back(x[i]);
  return ext;
}

std::vector<double> initial_omegas(const VmdConfig& cfg) {
  const auto k_count = static_cast<std::size_t>(cfg.n_modes);
  std::vector<double> omega(k_count, 0.0);
  switch (cfg.omega_init) {
    case OmegaInit::uniform_spread:
      for (std::size_t k = 0; k < k_count; ++k)
        omega[k] = (static_cast<double>(k) + 0.5) / (2.0 * static_cast<double>(k_count));
      break;
    case OmegaInit::zero:
      break;
    case OmegaInit::random: {
      Rng rng(cfg.seed);
      for (auto& w : omega) w = 0.5 * rng.uniform();
      std::sort(omega.begin(), omega.end());
      break;
    }
  }
  if (cfg.dc_component) omega[0] = 0.0;
  return omega;
}

}  // namespace

VmdOutput decompose(std::span<const double> signal, const VmdConfig& cfg, Exec exec) {
  cfg.validate();
  const std::size_t n = signal.size();
  if (n < 8) throw SignalTooShortError("vmd: signal needs at least 8 samples, got " + std::to_string(n));
  for (double v : signal)
    if (!std::isfinite(v)) throw ArgumentError("vmd: signal contains a non-finite value");

  const auto ext = mirror_extend(signal);
  const std::size_t t_len = ext.size();  // 2N, always even
  const std::size_t bins = t_len / 2;    // frequencies m / T for m in [0, T/2)
  const auto k_count = static_cast<std::size_t>(cfg.n_modes);

  std::vector<cplx> target = rfft(ext);
  target.resize(bins);

  std::vector<double> freq(bins);
  for (std::size_t m = 0; m < bins; ++m) freq[m] = static_cast<double>(m) / static_cast<double>(t_len);

  std::vector<std::vector<cplx>> modes(k_count, std::vector<cplx>(bins));
  std::vector<cplx> total(bins);
  std::vector<cplx> lambda(bins);
  std::vector<double> omega = initial_omegas(cfg);

  const std::size_t n_blocks = (bins + kBlock - 1) / kBlock;
  std::vector<BlockSums> partial(n_blocks);
  const double two_alpha = 2.0 * cfg.alpha;

  int iter = 0;
  double update_norm = std::numeric_limits<double>::infinity();
  while (iter < cfg.max_iterations) {
    ++iter;
    double diff_sum = 0.0;
    double prev_sum = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      auto& u = modes[k];
      const double wk = omega[k];
      parallel_for(exec, n_blocks, [&](std::size_t b) {
        BlockSums s;
        const std::size_t end = std::min(bins, (b + 1) * kBlock);
        for (std::size_t m = b * kBlock; m < end; ++m) {
          const cplx others = total[m] - u[m];
          const double df = freq[m] - wk;
          const cplx fresh = (target[m] - others - 0.5 * lambda[m]) / (1.0 + two_alpha * df * df);
          s.diff += std::norm(fresh - u[m]);
          s.previous += std::norm(u[m]);
          const double p = std::norm(fresh);
          s.weighted_freq += freq[m] * p;
          s.power += p;
          u[m] = fresh;
          total[m] = others + fresh;
        }
        partial[b] = s;
      });
      BlockSums acc;
      for (const auto& s : partial) {
        acc.weighted_freq += s.weighted_freq;
        acc.power += s.power;
        acc.diff += s.diff;
        acc.previous += s.previous;
      }
      if (!(cfg.dc_component && k == 0) && acc.power > 0.0) omega[k] = acc.weighted_freq / acc.power;
      diff_sum += acc.diff;
      prev_sum += acc.previous;
    }

    if (cfg.tau > 0.0) {
      parallel_for(exec, n_blocks, [&](std::size_t b) {
        const std::size_t end = std::min(bins, (b + 1) * kBlock);
        for (std::size_t m = b * kBlock; m < end; ++m) lambda[m] += cfg.tau * (total[m] - target[m]);
      });
    }

    if (diff_sum == 0.0)
      update_norm = 0.0;
    else if (prev_sum > 0.0)
      update_norm = diff_sum / prev_sum;
    else
      update_norm = std::numeric_limits<double>::infinity();
    if (update_norm <= cfg.tolerance) break;
  }

  // Back to the time domain, cropped to the original support.
  const std::size_t crop = n / 2;
  std::vector<std::vector<double>> time_modes(k_count);
  parallel_for(exec, k_count, [&](std::size_t k) {
    std::vector<cplx> half(bins + 1);
    std::copy(modes[k].begin(), modes[k].end(), half.begin());
    const auto full = irfft(half, t_len);
    time_modes[k].assign(full.begin() + static_cast<std::ptrdiff_t>(crop),
                         full.begin() + static_cast<std::ptrdiff_t>(crop + n));
  });

  std::vector<std::size_t> order(k_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return omega[a] < omega[b]; });

  VmdOutput out;
  out.iterations_used = iter;
  out.final_update_norm = update_norm;
  for (auto k : order) {
    out.modes.push_back(std::move(time_modes[k]));
    out.omegas.push_back(std::clamp(omega[k], 0.0, 0.5));
  }
  return out;
}

std::vector<double> reconstruct(const VmdOutput& out) {
  if (out.modes.empty()) return {};
  std::vector<double> sum(out.modes.front().size(), 0.0);
  for (const auto& mode : out.modes)
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += mode[i];
  return sum;
}

std::string mode_column_name(const std::string& feature, int mode_index) {
  return feature + "_m" + std::to_string(mode_index);
}

Expansion expand_features_detailed(const Dataset& standardized, const VmdConfig& cfg, Exec exec) {
  cfg.validate();
  const std::size_t n = standardized.row_count();
  const std::size_t d = standardized.feature_count();
  const auto k_count = static_cast<std::size_t>(cfg.n_modes);

  std::vector<VmdOutput> outputs(d);
  std::vector<std::string> errors(d);
  std::vector<ErrorClass> error_class(d, ErrorClass::data);
  // Columns are independent; each decomposition runs serially inside.
  parallel_for(exec, d, [&](std::size_t c) {
    try {
      outputs[c] = decompose(standardized.features().column(c), cfg, Exec::serial);
    } catch (const Error& e) {
      errors[c] = e.what();
      error_class[c] = e.error_class();
    }
  });
  for (std::size_t c = 0; c < d; ++c)
    if (!errors[c].empty())
      throw Error(error_class[c],
                  "vmd on column '" + standardized.feature_names()[c] + "': " + errors[c]);

  Matrix x(n, d * k_count);
  std::vector<std::string> names;
  names.reserve(d * k_count);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t k = 0; k < k_count; ++k) {
      names.push_back(mode_column_name(standardized.feature_names()[c], static_cast<int>(k + 1)));
      x.set_column(c * k_count + k, outputs[c].modes[k]);
    }
  }
  std::optional<std::vector<double>> t;
  if (standardized.has_target()) t = standardized.target();
  return {Dataset(std::move(names), std::move(x), std::move(t), standardized.target_name()),
          std::move(outputs)};
}

Dataset expand_features(const Dataset& standardized, const VmdConfig& cfg, Exec exec) {
  return expand_features_detailed(standardized, cfg, exec).dataset;
}

}  // namespace ragq
