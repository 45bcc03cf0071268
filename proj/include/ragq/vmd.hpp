#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ragq/data_model.hpp"
#include "ragq/parallel.hpp"

namespace ragq {

enum class OmegaInit { uniform_spread, zero, random };

struct VmdConfig {
  double alpha = 356.0;       // bandwidth penalty
  double tau = 0.0;           // dual ascent step; 0 disables the multiplier update
  int n_modes = 5;
  bool dc_component = false;  // pin the first center frequency at 0
  OmegaInit omega_init = OmegaInit::uniform_spread;
  double tolerance = 1e-7;
  int max_iterations = 500;
  std::uint64_t seed = 0;     // only used by OmegaInit::random

  void validate() const;
};

struct VmdOutput {
  // modes[k] is the k-th mode, ordered by ascending center frequency.
  std::vector<std::vector<double>> modes;
  // Center frequencies in cycles/sample, sorted ascending, within [0, 0.5].
  std::vector<double> omegas;
  int iterations_used = 0;
  // Summed squared change of all mode spectra over their previous energy,
  // measured on the last iteration.
  double final_update_norm = 0.0;
};

// Variational mode decomposition of a real signal (N >= 8).
//
// The signal is mirror-extended by half its length on each side and moved to
// the frequency domain. Only non-negative frequencies are updated, which is
// the analytic-signal view of each mode. Each sweep updates, mode by mode,
//
//   u_k(f) = (x(f) - sum_{j != k} u_j(f) - lambda(f) / 2) / (1 + 2 alpha (f - w_k)^2)
//   w_k    = sum_f f |u_k(f)|^2 / sum_f |u_k(f)|^2
//
// then lambda += tau (sum_k u_k - x). Sweeps stop once
// sum_k |u_k - u_k_prev|^2 / sum_k |u_k_prev|^2 <= tolerance or after
// max_iterations. Modes are brought back by a conjugate-symmetric inverse
// transform and cropped to the original N samples.
//
// Bin loops run in fixed-size blocks whose partial sums are combined in block
// order, so Exec::serial and Exec::parallel agree bit for bit.
VmdOutput decompose(std::span<const double> signal, const VmdConfig& cfg,
                    Exec exec = default_exec());

// Element-wise sum of the modes.
std::vector<double> reconstruct(const VmdOutput& out);

struct Expansion {
  Dataset dataset;                 // 7*K columns named <feature>_m<k>
  std::vector<VmdOutput> columns;  // one decomposition per source column
};

// Decomposes every feature column (in row order) and lays the modes out as
// new columns. The target is carried through.
Expansion expand_features_detailed(const Dataset& standardized, const VmdConfig& cfg,
                                   Exec exec = default_exec());
Dataset expand_features(const Dataset& standardized, const VmdConfig& cfg,
                        Exec exec = default_exec());

std::string mode_column_name(const std::string& feature, int mode_index);

}  // namespace ragq
