#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ragq/data_model.hpp"
#include "ragq/errors.hpp"
#include "ragq/fft.hpp"
#include "ragq/metrics.hpp"
#include "ragq/rng.hpp"
#include "ragq/vmd.hpp"
#include "reference_vmd.hpp"

using namespace ragq;

namespace {

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

VmdConfig config(int k) {
  VmdConfig c;
  c.n_modes = k;
  return c;
}

}  // namespace

TEST_CASE("rfft matches a naive DFT") {
  Rng rng(3);
  for (std::size_t n : {8u, 9u, 64u, 125u}) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    const auto fast = rfft(x);
    const auto slow = reference::dft(x);
    REQUIRE(fast.size() == n / 2 + 1);
    for (std::size_t m = 0; m < fast.size(); ++m) CHECK(std::abs(fast[m] - slow[m]) < 1e-9);
    const auto back = irfft(fast, n);
    for (std::size_t i = 0; i < n; ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
  }
}

TEST_CASE("single tone") {
  const auto s = tones(500, {{1.0, 0.05}});
  const VmdOutput out = decompose(s, config(1));
  REQUIRE(out.omegas.size() == 1);
  CHECK(std::abs(out.omegas[0] - 0.05) / 0.05 < 0.02);
  // vmdpy with its alpha set to 712 (our gain uses 2 * alpha) reports 0.04999417.
  CHECK(out.omegas[0] == doctest::Approx(0.04999417).epsilon(1e-5));
  CHECK(relative_rmse(reconstruct(out), s) < 0.05);
}

TEST_CASE("two tones") {
  const auto s = tones(1000, {{1.0, 0.04}, {0.8, 0.20}});
  const VmdOutput out = decompose(s, config(2));
  REQUIRE(out.omegas.size() == 2);
  CHECK(std::abs(out.omegas[0] - 0.04) / 0.04 < 0.05);
  CHECK(std::abs(out.omegas[1] - 0.20) / 0.20 < 0.05);
  // vmdpy reference: omegas (0.03999198, 0.1999898), relative RMSE 0.01867.
  CHECK(out.omegas[0] == doctest::Approx(0.03999198).epsilon(1e-4));
  CHECK(out.omegas[1] == doctest::Approx(0.1999898).epsilon(1e-4));
  const double rr = relative_rmse(reconstruct(out), s);
  CHECK(rr < 0.05);
  CHECK(rr == doctest::Approx(0.01867).epsilon(0.05));
  CHECK(std::abs(pearson_corr(out.modes[0], out.modes[1])) < 0.2);
}

TEST_CASE("agrees with the naive reference") {
  Rng rng(17);
  for (int k : {1, 2, 3}) {
    std::vector<double> s = tones(96, {{1.0, 0.07}, {0.5, 0.31}});
    for (auto& v : s) v += 0.2 * rng.normal();
    VmdConfig cfg = config(k);
    cfg.max_iterations = 60;
    const VmdOutput fast = decompose(s, cfg, Exec::serial);
    const auto ref = reference::vmd(s, cfg.alpha, k, cfg.tolerance, cfg.max_iterations);
    CHECK(fast.iterations_used == ref.iterations);
    for (int j = 0; j < k; ++j) {
      CHECK(fast.omegas[j] == doctest::Approx(ref.omegas[j]).epsilon(1e-9));
      for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(fast.modes[j][i] - ref.modes[j][i]) < 1e-9);
    }
  }
}

TEST_CASE("serial and parallel paths are bit-identical") {
  Rng rng(5);
  std::vector<double> s = tones(9000, {{1.0, 0.01}, {0.7, 0.13}, {0.3, 0.41}});
  for (auto& v : s) v += 0.1 * rng.normal();
  VmdConfig cfg = config(3);
  cfg.max_iterations = 40;
  const VmdOutput a = decompose(s, cfg, Exec::serial);
  const VmdOutput b = decompose(s, cfg, Exec::parallel);
  CHECK(a.omegas == b.omegas);
  CHECK(a.modes == b.modes);
  CHECK(a.iterations_used == b.iterations_used);
}

TEST_CASE("zero signal is a fixed point") {
  for (int k : {1, 3, 5}) {
    const VmdOutput out = decompose(std::vector<double>(64, 0.0), config(k));
    CHECK(out.iterations_used <= 2);
    for (int j = 0; j < k; ++j) {
      CHECK(out.omegas[j] == doctest::Approx((j + 0.5) / (2.0 * k)));
      for (double v : out.modes[j]) CHECK(v == 0.0);
    }
    for (double v : reconstruct(out)) CHECK(v == 0.0);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(decompose(std::vector<double>(7, 1.0), config(1)), SignalTooShortError);
  std::vector<double> s(16, 1.0);
  s[3] = std::nan("");
  CHECK_THROWS_AS(decompose(s, config(1)), ArgumentError);
  VmdConfig bad = config(0);
  CHECK_THROWS_AS(decompose(std::vector<double>(16, 1.0), bad), ArgumentError);
  bad = config(2);
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
}

TEST_CASE("shape and termination over random signals (property)") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 8 + rng.below(300);
    VmdConfig cfg = config(1 + static_cast<int>(rng.below(6)));
    cfg.alpha = rng.uniform(10.0, 3000.0);
    cfg.max_iterations = 1 + static_cast<int>(rng.below(300));
    std::vector<double> s(n);
    for (auto& v : s) v = rng.normal();
    const VmdOutput out = decompose(s, cfg);
    REQUIRE(out.modes.size() == static_cast<std::size_t>(cfg.n_modes));
    for (const auto& m : out.modes) REQUIRE(m.size() == n);
    REQUIRE(std::is_sorted(out.omegas.begin(), out.omegas.end()));
    for (double w : out.omegas) REQUIRE((w >= 0.0 && w <= 0.5));
    REQUIRE(out.iterations_used <= cfg.max_iterations);
    if (out.iterations_used < cfg.max_iterations) REQUIRE(out.final_update_norm <= cfg.tolerance);
  }
}

TEST_CASE("reconstruction is linear in the input scale") {
  const auto s = tones(600, {{1.0, 0.05}, {0.6, 0.22}});
  std::vector<double> s2 = s;
  for (auto& v : s2) v *= 2.0;
  const auto r1 = reconstruct(decompose(s, config(2)));
  const auto r2 = reconstruct(decompose(s2, config(2)));
  std::vector<double> scaled = r1;
  for (auto& v : scaled) v *= 2.0;
  CHECK(relative_rmse(r2, scaled) < 0.05);
}

TEST_CASE("deterministic output") {
  Rng rng(8);
  std::vector<double> s(200);
  for (auto& v : s) v = rng.normal();
  const VmdOutput a = decompose(s, config(4));
  const VmdOutput b = decompose(s, config(4));
  CHECK(a.modes == b.modes);
  CHECK(a.omegas == b.omegas);
}

TEST_CASE("feature expansion") {
  Dataset raw = synthesize(64, 12);
  const auto [z, stats] = standardize(raw);
  const Expansion e = expand_features_detailed(z, config(5));
  const Dataset& x = e.dataset;
  CHECK(x.feature_count() == 35);
  CHECK(x.row_count() == 64);
  CHECK(x.feature_names()[0] == "query_complexity_m1");
  CHECK(x.feature_names()[34] == "retrieval_depth_m5");
  CHECK(x.target() == raw.target());

  // Per row, the modes of one feature sum to that column's reconstruction,
  // and the residual against the standardized column is the one the naive
  // reference reports for the same signal.
  for (std::size_t c = 0; c < 7; ++c) {
    std::vector<double> sum(64, 0.0);
    const auto orig = z.features().column(c);
    for (std::size_t k = 0; k < 5; ++k) {
      const auto col = x.features().column(c * 5 + k);
      for (std::size_t r = 0; r < 64; ++r) sum[r] += col[r];
    }
    const auto rec = reconstruct(e.columns[c]);
    for (std::size_t r = 0; r < 64; ++r) CHECK(sum[r] == doctest::Approx(rec[r]).epsilon(1e-12));
    const auto ref = reference::vmd(orig, 356.0, 5, 1e-7, 500);
    std::vector<double> ref_sum(64, 0.0);
    for (const auto& m : ref.modes)
      for (std::size_t r = 0; r < 64; ++r) ref_sum[r] += m[r];
    CHECK(relative_rmse(sum, orig) == doctest::Approx(relative_rmse(ref_sum, orig)).epsilon(1e-6));
  }

  SUBCASE("serial matches parallel") { CHECK(expand_features(z, config(5), Exec::serial) == x); }
  SUBCASE("row count preserved for other sizes") {
    for (std::size_t n : {10u, 33u}) {
      const Dataset d = standardize(synthesize(n, 1)).first;
      CHECK(expand_features(d, config(3)).row_count() == n);
    }
  }
  SUBCASE("errors name the column") {
    const std::size_t idx[] = {0, 1, 2, 3, 4};
    try {
      expand_features(z.select_rows(idx), config(2));
      FAIL("expected a signal-too-short error");
    } catch (const Error& e) {
      CHECK(e.error_class() == ErrorClass::data);
      CHECK(std::string(e.what()).find("query_complexity") != std::string::npos);
    }
  }
}
