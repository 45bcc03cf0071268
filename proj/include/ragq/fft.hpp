#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ragq {

// Real-input DFT of length n: returns bins 0..n/2 (n/2 + 1 values),
// X[m] = sum_t x[t] exp(-2 pi i m t / n).
std::vector<std::complex<double>> rfft(std::span<const double> x);

// Inverse of rfft for a real signal of length n, normalized by 1/n. The
// imaginary parts of bin 0 and (for even n) bin n/2 are ignored.
std::vector<double> irfft(std::span<const std::complex<double>> half_spectrum, std::size_t n);

}  // namespace ragq
