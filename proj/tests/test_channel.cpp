#include <doctest.h>

#include <cmath>

#include "seal/channel.hpp"
#include "seal/drbg.hpp"
#include "seal/errors.hpp"
#include "seal/harness.hpp"
#include "testutil.hpp"

using namespace seal;

TEST_SUITE("channel") {

TEST_CASE("sigma zero is the identity") {
  const NoiseField field = random_noise(default_layout(), testutil::seed_of(0x51));
  const NoiseField out = invert(field, ChannelConfig{0.0, testutil::seed_of(0x52)});
  CHECK(out.values == field.values);
}

TEST_CASE("inversion error matches the chi model") {
  const Layout L = default_layout();
  const NoiseField field = random_noise(L, testutil::seed_of(0x53));
  const ChannelConfig cfg{0.4, testutil::seed_of(0x54)};
  const NoiseField out = invert(field, cfg);

  std::vector<double> dists(L.num_patches());
  for (std::size_t i = 0; i < L.num_patches(); ++i) {
    const auto a = patch_slice(field, i);
    const auto b = patch_slice(out, i);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      acc += (static_cast<double>(a[k]) - b[k]) * (static_cast<double>(a[k]) - b[k]);
    }
    dists[i] = std::sqrt(acc);
  }
  // E[0.4 * chi_16] = 0.4 * 3.938 = 1.575, comfortably under tau = 2.3.
  const double expected = 0.4 * testutil::chi_mean(16.0);
  CHECK(expected == doctest::Approx(1.575).epsilon(0.01));
  CHECK(testutil::mean(dists) == doctest::Approx(expected).epsilon(0.03));
  CHECK(testutil::mean(dists) < kDefaultMatchTau);

  // Output marginal variance inflates to 1 + sigma^2.
  std::vector<double> entries(out.values.begin(), out.values.end());
  CHECK(testutil::variance(entries) ==
        doctest::Approx(1.0 + 0.4 * 0.4).epsilon(0.05));
}

TEST_CASE("unrelated patches stay far beyond tau") {
  const Layout L = default_layout();
  const ChannelConfig cfg{0.4, testutil::seed_of(0x55)};
  const NoiseField keyed = random_noise(L, testutil::seed_of(0x56));
  const NoiseField other = invert(random_noise(L, testutil::seed_of(0x57)), cfg);
  std::vector<double> dists(L.num_patches());
  for (std::size_t i = 0; i < L.num_patches(); ++i) {
    const auto a = patch_slice(keyed, i);
    const auto b = patch_slice(other, i);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      acc += (static_cast<double>(a[k]) - b[k]) * (static_cast<double>(a[k]) - b[k]);
    }
    dists[i] = std::sqrt(acc);
  }
  // Exact model: sqrt(2 + sigma^2) * E[chi_16] = 5.79, near sqrt(32) = 5.66.
  const double expected = std::sqrt(2.0 + 0.16) * testutil::chi_mean(16.0);
  CHECK(testutil::mean(dists) == doctest::Approx(expected).epsilon(0.02));
  CHECK(std::abs(testutil::mean(dists) - std::sqrt(32.0)) / std::sqrt(32.0) < 0.05);
  for (double d : dists) CHECK(d > kDefaultMatchTau);
}

TEST_CASE("separation AUC across channel severities") {
  const Layout L = default_layout();
  CHECK(patch_separation_auc({0.0, testutil::seed_of(0x58)}, L, 2000) == 1.0);
  CHECK(patch_separation_auc({0.4, testutil::seed_of(0x58)}, L, 10000) > 0.999);
  CHECK(patch_separation_auc({2.0, testutil::seed_of(0x58)}, L, 10000) < 0.95);
  CHECK_THROWS_AS(patch_separation_auc({0.4, {}}, L, 10), ValidationError);
}

TEST_CASE("tau calibration brackets the default threshold") {
  const Layout L = default_layout();
  const ChannelConfig cfg{0.4, testutil::seed_of(0x59)};
  const double tau_low_fpr = calibrate_tau(cfg, L, 1e-4, 200000);
  CHECK(std::abs(tau_low_fpr - kDefaultMatchTau) <= 0.4);

  const double tau_median = calibrate_tau(cfg, L, 0.5, 20000);
  CHECK(tau_median == doctest::Approx(5.6).epsilon(0.05));

  CHECK_THROWS_AS(calibrate_tau(cfg, L, 1e-9, 1000), ValidationError);
  CHECK_THROWS_AS(calibrate_tau(cfg, L, 0.0, 1000), ValidationError);
  CHECK_THROWS_AS(calibrate_tau(ChannelConfig{-0.1, {}}, L, 0.5, 1000),
                  ValidationError);
}

TEST_CASE("default operating point: strong accept, rare false accept") {
  const Layout L = default_layout();
  const ChannelConfig cfg{0.4, testutil::seed_of(0x5a)};
  const std::size_t trials = 100000;
  std::size_t same_match = 0, diff_match = 0;
  Drbg mc(testutil::seed_of(0x5b));
  const std::size_t p = L.patch_len();
  std::vector<double> z(p), other(p);
  for (std::size_t t = 0; t < trials; ++t) {
    double same_acc = 0.0, diff_acc = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      z[k] = mc.next_normal();
      other[k] = mc.next_normal();
      const double err = 0.4 * mc.next_normal();
      same_acc += err * err;
      const double cross = z[k] + err - other[k];
      diff_acc += cross * cross;
    }
    same_match += std::sqrt(same_acc) < kDefaultMatchTau;
    diff_match += std::sqrt(diff_acc) < kDefaultMatchTau;
  }
  CHECK(static_cast<double>(same_match) / trials >= 0.99);
  CHECK(static_cast<double>(diff_match) / trials <= 1e-3);
}

}  // TEST_SUITE
