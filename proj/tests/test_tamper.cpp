#include <doctest.h>

#include <cmath>

#include "seal/attacks.hpp"
#include "seal/channel.hpp"
#include "seal/detection.hpp"
#include "seal/drbg.hpp"
#include "seal/errors.hpp"
#include "seal/harness.hpp"
#include "seal/tamper.hpp"
#include "testutil.hpp"

using namespace seal;

namespace {

Salt test_salt() {
  Salt s;
  s.bytes.fill(0x7e);
  return s;
}

Heatmap make_heatmap(std::uint32_t rows, std::uint32_t cols, double fill = 0.0) {
  Heatmap h;
  h.rows = rows;
  h.cols = cols;
  h.values.assign(static_cast<std::size_t>(rows) * cols, fill);
  return h;
}

}  // namespace

TEST_SUITE("tamper") {

TEST_CASE("noise-free recovery returns the exact bits at zero distance") {
  const Salt salt = test_salt();
  const auto v = random_unit_vector(768, testutil::seed_of(0x71));
  const Layout L = default_layout();
  const NoiseField z = generate_watermarked_noise(v, salt, L, 7);
  for (std::size_t i : {std::size_t{0}, std::size_t{500}}) {
    const auto patch = patch_slice(z, i);
    const BitRecovery rec = recover_patch_bits(patch, i, salt, 7);
    CHECK(rec.distance == 0.0);
    CHECK(rec.bits == key_bits(v, i, salt, 7));
  }
}

TEST_CASE("recovery through the default channel agrees with generation bits") {
  const Salt salt = test_salt();
  const auto v = random_unit_vector(768, testutil::seed_of(0x72));
  const Layout L = default_layout();
  const NoiseField recovered =
      invert(generate_watermarked_noise(v, salt, L, 7),
             ChannelConfig{0.4, testutil::seed_of(0x73)});
  const CandidateTable table(salt, L, 7);

  std::size_t bits_ok = 0, match_ok = 0;
  for (std::size_t i = 0; i < L.num_patches(); ++i) {
    const auto patch = patch_slice(recovered, i);
    const BitRecovery rec = recover_patch_bits(patch, i, salt, 7);
    bits_ok += rec.bits == key_bits(v, i, salt, 7);
    match_ok += rec.bits == key_bits(v, i, salt, 7) && rec.distance < kDefaultMatchTau;
  }
  const double n = static_cast<double>(L.num_patches());
  // Bit identification is essentially perfect; the sub-tau conjunction runs
  // at the same-seed acceptance rate (~0.993 at sigma 0.4).
  CHECK(static_cast<double>(bits_ok) / n >= 0.999);
  CHECK(static_cast<double>(match_ok) / n >= 0.99);
}

TEST_CASE("overwritten patches recover only distant candidates") {
  const Salt salt = test_salt();
  const Layout L = default_layout();
  Drbg rng(testutil::seed_of(0x74));
  std::vector<float> foreign(L.patch_len());
  std::size_t beyond_tau = 0;
  std::vector<double> best(64);
  for (std::size_t t = 0; t < best.size(); ++t) {
    rng.fill_normals(std::span<float>(foreign));
    const BitRecovery rec = recover_patch_bits(foreign, t, salt, 7);
    best[t] = rec.distance;
    beyond_tau += rec.distance > kDefaultMatchTau;
  }
  CHECK(beyond_tau >= 60);  // expected miss rate under 1%
  CHECK(testutil::mean(best) > kDefaultMatchTau);
  CHECK(testutil::mean(best) < std::sqrt(32.0));  // min over 128 candidates
}

TEST_CASE("heatmap equals per-patch recovery and respects the table") {
  const Salt salt = test_salt();
  const Layout L{2, 8, 8, 4, 4};
  const NoiseField noise = random_noise(L, testutil::seed_of(0x75));
  const CandidateTable table(salt, L, 5);
  const Heatmap with_table = compute_heatmap(noise, salt, 5, &table);
  const Heatmap without = compute_heatmap(noise, salt, 5);
  CHECK(with_table.values == without.values);
  for (std::size_t i = 0; i < L.num_patches(); ++i) {
    const auto patch = patch_slice(noise, i);
    CHECK(with_table.values[i] ==
          doctest::Approx(recover_patch_bits(patch, i, salt, 5).distance));
  }
}

TEST_CASE("spatial test on a single hot cell") {
  Heatmap h = make_heatmap(32, 32, 0.0);
  h.values[5 * 32 + 7] = 4.0;
  const TamperReport report = spatial_test(h);
  CHECK(report.cluster_count == 1);
  CHECK(report.largest_cluster_area == 1);
  CHECK(report.threshold_value == 0.0);
  CHECK(report.tampered);
}

TEST_CASE("spatial test is invariant to constant shifts") {
  Drbg rng(testutil::seed_of(0x76));
  Heatmap h = make_heatmap(32, 32);
  for (double& v : h.values) v = std::abs(rng.next_normal()) + 1.0;
  const TamperReport base = spatial_test(h);
  Heatmap shifted = h;
  for (double& v : shifted.values) v += 123.75;
  const TamperReport moved = spatial_test(shifted);
  CHECK(base.cluster_count == moved.cluster_count);
  CHECK(base.largest_cluster_area == moved.largest_cluster_area);
  CHECK(base.tampered == moved.tampered);
}

TEST_CASE("all-equal heatmap degenerates to zero clusters, not tampered") {
  const Heatmap h = make_heatmap(16, 16, 3.25);
  const TamperReport report = spatial_test(h);
  CHECK(report.cluster_count == 0);
  CHECK(report.largest_cluster_area == 0);
  CHECK_FALSE(report.tampered);
  CHECK(tamper_score(h) == -257.0);  // empty super-threshold set scores lowest
}

TEST_CASE("tamper score orders blobs above scatter") {
  // One 10x10 blob.
  Heatmap blob = make_heatmap(32, 32, 0.0);
  for (std::uint32_t r = 4; r < 14; ++r) {
    for (std::uint32_t c = 6; c < 16; ++c) blob.values[r * 32 + c] = 5.0;
  }
  // Same number of hot cells, maximally scattered.
  Heatmap scatter = make_heatmap(32, 32, 0.0);
  std::size_t placed = 0;
  for (std::uint32_t r = 0; r < 32 && placed < 100; r += 2) {
    for (std::uint32_t c = 0; c < 32 && placed < 100; c += 3) {
      scatter.values[r * 32 + c] = 5.0;
      ++placed;
    }
  }
  CHECK(tamper_score(blob) > tamper_score(scatter));
  CHECK(tamper_score(blob) == tamper_score(blob));  // deterministic
}

TEST_CASE("component labeling matches the flood-fill oracle") {
  Drbg rng(testutil::seed_of(0x77));
  for (int grid = 0; grid < 300; ++grid) {
    const double density = 0.05 + 0.9 * rng.next_uniform();
    std::vector<std::uint8_t> mask(32 * 32);
    for (auto& cell : mask) cell = rng.next_uniform() < density ? 1 : 0;
    const ComponentStats got = label_components(mask, 32, 32);
    const testutil::FloodFillStats want = testutil::flood_fill_components(mask, 32, 32);
    CHECK(got.count == want.count);
    CHECK(got.largest == want.largest);
  }
}

TEST_CASE("untampered fields scatter, rectangle overwrites clump") {
  const Salt salt = test_salt();
  const Layout L = default_layout();
  const auto v = random_unit_vector(768, testutil::seed_of(0x78));
  const ChannelConfig channel{0.4, testutil::seed_of(0x79)};
  const NoiseField recovered =
      invert(generate_watermarked_noise(v, salt, L, 7), channel);
  const CandidateTable table(salt, L, 7);

  const TamperReport clean = spatial_test(compute_heatmap(recovered, salt, 7, &table));
  CHECK(clean.cluster_count > kDefaultMaxClusterCount);
  CHECK_FALSE(clean.tampered);

  // Overwrite a 40%-of-each-dimension rectangle with foreign noise.
  CatAttackSpec spec;
  spec.min_scale = 0.4;
  spec.max_scale = 0.4;
  spec.rng_seed = testutil::seed_of(0x7a);
  const CatAttackResult attacked = cat_attack(recovered, spec, channel);
  const TamperReport hit = spatial_test(compute_heatmap(attacked.field, salt, 7, &table));
  CHECK(hit.cluster_count < clean.cluster_count);
  CHECK(hit.largest_cluster_area >= attacked.rect.area() / 2);
  CHECK(hit.tampered);
}

TEST_CASE("render rounds to integers") {
  Heatmap h = make_heatmap(2, 2, 0.0);
  h.values = {0.4, 1.6, 9.5, 12.2};
  CHECK(render_heatmap_text(h) == " 0  2\n10 12\n");
}

TEST_CASE("bit recovery rejects out-of-range widths") {
  std::vector<float> patch(16, 0.0f);
  CHECK_THROWS_AS(recover_patch_bits(patch, 0, test_salt(), 0), ValidationError);
  CHECK_THROWS_AS(recover_patch_bits(patch, 0, test_salt(), kMaxBitsPerPatch + 1),
                  ValidationError);
}

}  // TEST_SUITE
