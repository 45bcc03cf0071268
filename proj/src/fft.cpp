#include "ragq/fft.hpp"

#include <algorithm>
#include <memory>
#include <mutex>

#include <fftw3.h>

#include "ragq/errors.hpp"

namespace ragq {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (plan_ == nullptr) throw ConfigurationError("FFTW failed to create a plan");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t bins = n / 2 + 1;
  auto in = fftw_alloc<double>(n);
  auto out = fftw_alloc<fftw_complex>(bins);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  std::copy(x.begin(), x.end(), in.get());
  plan->execute();
  std::vector<std::complex<double>> result(bins);
  for (std::size_t m = 0; m < bins; ++m) result[m] = {out[m][0], out[m][1]};
  return result;
}

std::vector<double> irfft(std::span<const std::complex<double>> half_spectrum, std::size_t n) {
  if (n == 0) return {};
  const std::size_t bins = n / 2 + 1;
  if (half_spectrum.size() != bins) throw ArgumentError("irfft: spectrum must have n/2 + 1 bins");
  auto in = fftw_alloc<fftw_complex>(bins);
  auto out = fftw_alloc<double>(n);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  for (std::size_t m = 0; m < bins; ++m) {
    in[m][0] = half_spectrum[m].real();
    in[m][1] = half_spectrum[m].imag();
  }
  in[0][1] = 0.0;
  if (n % 2 == 0) in[bins - 1][1] = 0.0;
  plan->execute();
  std::vector<double> result(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t) result[t] = out[t] * scale;
  return result;
}

}  // namespace ragq
