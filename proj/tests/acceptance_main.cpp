// Acceptance suite: one pass/fail line per criterion, non-zero exit when any
// criterion fails. Every tolerance is pinned in code; seeds are fixed so a
// given build either passes or fails reproducibly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seal/attacks.hpp"
#include "seal/channel.hpp"
#include "seal/detection.hpp"
#include "seal/drbg.hpp"
#include "seal/harness.hpp"
#include "seal/hash.hpp"
#include "seal/kernels.hpp"
#include "seal/noisefield.hpp"
#include "seal/parallel.hpp"
#include "seal/semantic.hpp"
#include "seal/simhash.hpp"
#include "seal/tamper.hpp"
#include "testutil.hpp"

using namespace seal;
using nlohmann::json;

namespace {

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

Salt acceptance_salt() {
  Salt s;
  s.bytes.fill(0xb7);
  return s;
}

Seed256 acceptance_seed(std::uint8_t last) { return testutil::seed_of(0xd0, last); }

// --- criteria 1 and 2: SimHash collision laws ---------------------------

void criteria_collision_laws() {
  Timer timer;
  const Salt salt = acceptance_salt();
  const Layout layout = default_layout();
  const int bits = kDefaultBitsPerPatch;
  const ProjectionTable table(salt, kDefaultEmbeddingDim, layout.num_patches(), bits);

  const std::size_t pairs = 15;  // 15 * 1024 * 7 = 107,520 bit trials per angle
  double max_bit_err = 0.0, max_patch_err = 0.0;
  double worst_bit_angle = 0.0, worst_patch_angle = 0.0;
  std::size_t bit_trials = 0;

  for (double theta = 10.0; theta <= 170.0; theta += 10.0) {
    std::vector<double> bit_agree(pairs, 0.0), patch_agree(pairs, 0.0);
    parallel_for(pairs, [&](std::size_t pr) {
      const Seed256 base = derive_seed(acceptance_seed(1),
                                       static_cast<std::uint64_t>(theta * 100) + pr,
                                       SeedTag::mc_stream);
      const auto v = random_unit_vector(kDefaultEmbeddingDim,
                                        derive_seed(base, 0, SeedTag::trial_vector));
      const auto w = perturb_by_angle(v, theta,
                                      derive_seed(base, 0, SeedTag::trial_rotation));
      double agree = 0.0, whole = 0.0;
      for (std::size_t i = 0; i < layout.num_patches(); ++i) {
        const KeyBits bv = key_bits(v, i, table);
        const KeyBits bw = key_bits(w, i, table);
        for (int j = 1; j <= bits; ++j) {
          agree += bv.sign(j) == bw.sign(j);
        }
        whole += bv.pattern == bw.pattern;
      }
      bit_agree[pr] = agree;
      patch_agree[pr] = whole;
    });

    double agree = 0.0, whole = 0.0;
    for (std::size_t pr = 0; pr < pairs; ++pr) {
      agree += bit_agree[pr];
      whole += patch_agree[pr];
    }
    const double n_bits = static_cast<double>(pairs * layout.num_patches() * bits);
    const double n_patches = static_cast<double>(pairs * layout.num_patches());
    bit_trials = static_cast<std::size_t>(n_bits);
    const double bit_err = std::abs(agree / n_bits - (1.0 - theta / 180.0));
    const double patch_err = std::abs(whole / n_patches - rho(theta, bits));
    if (bit_err > max_bit_err) {
      max_bit_err = bit_err;
      worst_bit_angle = theta;
    }
    if (patch_err > max_patch_err) {
      max_patch_err = patch_err;
      worst_patch_angle = theta;
    }
  }

  const double elapsed = timer.seconds();
  {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "per-bit agreement equals 1 - theta/180 within 1%% "
                  "(max |err| %.4f at %.0f deg, %zu trials/angle, %.1f s)",
                  max_bit_err, worst_bit_angle, bit_trials, elapsed);
    report(1, max_bit_err <= 0.01 && elapsed < 60.0, buf);
  }
  {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "whole-patch match rate equals (1 - theta/180)^7 within 2%% "
                  "(max |err| %.4f at %.0f deg)",
                  max_patch_err, worst_patch_angle);
    report(2, max_patch_err <= 0.02, buf);
  }
}

// --- criterion 3: analytic tail vs full-pipeline Monte Carlo ------------

void criterion_analytic_vs_simulation() {
  Timer timer;
  const std::vector<double> angles{40.0, 55.0, 70.0};
  const std::size_t trials = 2000;

  DetectionCurveParams params;
  params.layout = default_layout();
  params.salt = acceptance_salt();
  params.rng_seed = acceptance_seed(3);
  params.sigma = 0.0;  // identity channel: the regime the closed form models
  const auto ideal = detection_curve(angles, trials, params);

  params.sigma = 0.4;
  params.rng_seed = acceptance_seed(4);
  const auto channel = detection_curve(angles, trials, params);

  bool pass = true;
  std::string detail;
  for (std::size_t a = 0; a < ideal.size(); ++a) {
    const double se = std::sqrt(ideal[a].analytic * (1.0 - ideal[a].analytic) /
                                static_cast<double>(trials));
    const double err = std::abs(ideal[a].monte_carlo - ideal[a].analytic);
    pass = pass && err <= 3.0 * se + 1e-12;
    char buf[96];
    std::snprintf(buf, sizeof buf, " [%g deg: mc %.4f vs exact %.4f, 3se %.4f]",
                  ideal[a].theta_deg, ideal[a].monte_carlo, ideal[a].analytic,
                  3.0 * se);
    detail += buf;
  }
  const double elapsed = timer.seconds();
  pass = pass && elapsed < 300.0;
  report(3, pass,
         "full-pipeline detection rate matches the exact binomial tail within "
         "3 binomial SE at 2000 trials/angle" +
             detail + " (" + std::to_string(elapsed).substr(0, 5) + " s)");

  std::printf("       informative: default channel (sigma 0.4) at the same "
              "angles:");
  for (const auto& point : channel) {
    std::printf(" [%g deg: mc %.4f]", point.theta_deg, point.monte_carlo);
  }
  std::printf("\n");

  // Reference-table comparison; the two highest angles are not reproducible
  // from the stated parameters and are recorded, not forced.
  const std::map<double, double> reference{{65.0, 8.55e-4},
                                           {60.0, 0.053},
                                           {55.0, 0.551},
                                           {50.0, 0.998},
                                           {45.0, 1.000}};
  std::printf("       reference table vs exact tail (n=1024, b=7, mid=55):\n");
  for (const auto& [theta, published] : reference) {
    const double exact = detection_probability(theta, 55.0, 1024, 7);
    const bool agrees = std::abs(exact - published) <=
                        0.5 * std::pow(10.0, std::floor(std::log10(published)) - 2.0) +
                            1e-3 * published;
    std::printf("         theta %4.0f: published %-9.3g exact %-12.6g %s\n",
                theta, published, exact,
                agrees ? "(agrees)" : "(DISCREPANT - documented)");
  }
}

// --- criterion 4: patch-level separation ---------------------------------

void criterion_patch_separation() {
  Timer timer;
  const ChannelConfig cfg{0.4, acceptance_seed(5)};
  const double auc = patch_separation_auc(cfg, default_layout(), 10000);
  const double elapsed = timer.seconds();
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "patch distance separates same-seed from different-seed pairs: "
                "AUC %.6f > 0.999 (10000 pairs, %.1f s)",
                auc, elapsed);
  report(4, auc > 0.999 && elapsed < 30.0, buf);
}

// --- criterion 5: determinism golden files -------------------------------

void criterion_golden_files() {
  std::ifstream in(std::string(SEAL_GOLDEN_DIR) + "/golden.json");
  if (!in.good()) {
    report(5, false, "golden fixture missing");
    return;
  }
  json golden;
  in >> golden;

  bool pass = true;
  std::string detail;

  // Pinned DRBG stream.
  {
    const auto raw = from_hex(golden["drbg"]["seed_hex"].get<std::string>());
    Seed256 seed{};
    std::copy(raw.begin(), raw.end(), seed.begin());
    Drbg drbg(seed);
    for (const auto& hex : golden["drbg"]["first_16_normals_bits_hex"]) {
      const double v = drbg.next_normal();
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx",
                    static_cast<unsigned long long>(bits));
      if (hex.get<std::string>() != buf) pass = false;
    }
    detail += pass ? "first-16 normals bit-exact" : "DRBG normals deviate";
  }

  // Pinned watermarked-field checksum, plus a bit-exact save/load round trip.
  {
    const auto& f = golden["field"];
    const Salt salt = Salt::from_hex(f["salt_hex"].get<std::string>());
    const auto v =
        embed_text(f["mock_text"].get<std::string>(), ProviderSpec::mock());
    const NoiseField field = generate_watermarked_noise(
        v, salt, default_layout(), f["bit_count"].get<int>());

    std::vector<std::uint8_t> payload(field.values.size() * 4);
    for (std::size_t i = 0; i < field.values.size(); ++i) {
      std::uint32_t word;
      std::memcpy(&word, &field.values[i], 4);
      payload[i * 4] = static_cast<std::uint8_t>(word);
      payload[i * 4 + 1] = static_cast<std::uint8_t>(word >> 8);
      payload[i * 4 + 2] = static_cast<std::uint8_t>(word >> 16);
      payload[i * 4 + 3] = static_cast<std::uint8_t>(word >> 24);
    }
    const bool sha_ok =
        to_hex(sha256(payload)) == f["payload_sha256"].get<std::string>();
    pass = pass && sha_ok;
    detail += sha_ok ? "; field payload SHA-256 pinned" : "; field checksum deviates";

    const auto tmp = std::filesystem::temp_directory_path() / "seal_golden.nf";
    save(field, tmp);
    const NoiseField loaded = load(tmp);
    const bool roundtrip = loaded.values == field.values;
    std::filesystem::remove(tmp);
    pass = pass && roundtrip;
    detail += roundtrip ? "; save/load bit-exact" : "; round trip deviates";
  }

  report(5, pass, "determinism golden files: " + detail);
}

// --- criterion 6: distortion-free marginals ------------------------------

void criterion_distortion_free() {
  std::vector<double> pool;
  pool.reserve(7 * default_layout().field_len());
  NoiseField first_field;
  for (std::uint8_t k = 0; k < 7; ++k) {
    Salt salt;
    salt.bytes.fill(static_cast<std::uint8_t>(0x21 + k));
    const auto v = random_unit_vector(kDefaultEmbeddingDim, acceptance_seed(10 + k));
    const NoiseField field =
        generate_watermarked_noise(v, salt, default_layout(), kDefaultBitsPerPatch);
    if (k == 0) first_field = field;
    pool.insert(pool.end(), field.values.begin(), field.values.end());
  }
  const double d = testutil::ks_statistic_normal(pool);
  const double crit = testutil::ks_critical(0.01, pool.size());

  // Patches with identical key bits must still hold distinct noise. With
  // 1024 patches over 2^7 patterns, collisions are guaranteed.
  const Salt salt = []{ Salt s; s.bytes.fill(0x21); return s; }();
  const auto v = random_unit_vector(kDefaultEmbeddingDim, acceptance_seed(10));
  std::map<std::uint32_t, std::size_t> first_with_pattern;
  std::size_t collision_pairs = 0, distinct_pairs = 0;
  for (std::size_t i = 0; i < default_layout().num_patches(); ++i) {
    const KeyBits bits = key_bits(v, i, salt, kDefaultBitsPerPatch);
    const auto [it, inserted] = first_with_pattern.try_emplace(bits.pattern, i);
    if (!inserted) {
      ++collision_pairs;
      distinct_pairs +=
          patch_slice(first_field, it->second) != patch_slice(first_field, i);
    }
  }

  char buf[224];
  std::snprintf(buf, sizeof buf,
                "pooled entries pass KS vs N(0,1) at alpha=0.01 (D %.5f < %.5f "
                "on %zu samples); %zu identical-bit patch pairs all distinct",
                d, crit, pool.size(), collision_pairs);
  report(6, d < crit && collision_pairs > 0 && distinct_pairs == collision_pairs,
         buf);
}

// --- criterion 7: cat attack with the spatial test -----------------------

void criterion_cat_attack() {
  Timer timer;
  ExperimentConfig cfg;
  cfg.salt = acceptance_salt();
  cfg.rng_seed = acceptance_seed(20);
  cfg.trials = 200;
  AttackSpec cat;
  cat.kind = AttackSpec::Kind::cat;
  cfg.attacks.push_back(cat);
  // Second variant: the edited image is re-captioned, rotating the detection
  // vector by the typical insertion-induced shift. Reported, not gated.
  AttackSpec recaptioned = cat;
  recaptioned.cat.recaption_angle_mean = 71.2;
  recaptioned.cat.recaption_angle_std = 13.8;
  cfg.attacks.push_back(recaptioned);

  const json report_json = run_experiment(cfg);
  const auto& experiment = report_json["experiments"][0];
  const double spatial_auc = experiment["spatial_auc"].get<double>();
  const double count_auc = experiment["match_count_auc"].get<double>();
  const double elapsed = timer.seconds();
  char buf[224];
  std::snprintf(buf, sizeof buf,
                "spatial tamper test separates 200 attacked from 200 clean "
                "fields: AUC %.4f >= 0.95 (match-count AUC %.4f, %.1f s)",
                spatial_auc, count_auc, elapsed);
  report(7, spatial_auc >= 0.95 && elapsed < 600.0, buf);

  const auto& recap = report_json["experiments"][1];
  std::printf("       informative: re-captioned variant (71.2 +/- 13.8 deg): "
              "spatial AUC %.4f, match-count AUC %.4f\n",
              recap["spatial_auc"].get<double>(),
              recap["match_count_auc"].get<double>());
}

// --- criterion 8: forgery semantic safeguard ------------------------------

void criterion_forgery() {
  ExperimentConfig cfg;
  cfg.salt = acceptance_salt();
  cfg.rng_seed = acceptance_seed(21);
  cfg.trials = 200;
  cfg.threshold.mode = ThresholdSpec::Mode::analytic;
  cfg.threshold.theta_mid_deg = kDefaultThetaMidDegrees;
  AttackSpec forgery;
  forgery.kind = AttackSpec::Kind::forgery_reuse;
  forgery.forgery.attack_angle_deg = 70.0;
  cfg.attacks.push_back(forgery);

  const json report_json = run_experiment(cfg);
  const auto& experiment = report_json["experiments"][0];
  const double seal_forged =
      experiment["seal"]["forged_detection_rate"].get<double>();
  const double base_forged =
      experiment["fixed_key_baseline"]["forged_detection_rate"].get<double>();
  const double seal_genuine =
      experiment["seal"]["genuine_detection_rate"].get<double>();
  char buf[224];
  std::snprintf(buf, sizeof buf,
                "forged reuse at 70 deg: semantic detection rate %.4f <= 0.01 "
                "while the fixed-key baseline stays detected at %.4f >= 0.99 "
                "(genuine rate %.4f)",
                seal_forged, base_forged, seal_genuine);
  report(8, seal_forged <= 0.01 && base_forged >= 0.99, buf);
}

// --- criterion 9: steganalysis flatness -----------------------------------

void criterion_steganalysis() {
  Timer timer;
  ExperimentConfig cfg;
  cfg.salt = acceptance_salt();
  cfg.rng_seed = acceptance_seed(22);
  cfg.trials = 100;
  AttackSpec steg;
  steg.kind = AttackSpec::Kind::steg_average;
  steg.steg.group_sizes = {5, 50, 500, 5000};
  cfg.attacks.push_back(steg);

  const json report_json = run_experiment(cfg);
  bool pass = true;
  std::string detail;
  for (const auto& group : report_json["experiments"][0]["per_group"]) {
    const double auc = group["auc"].get<double>();
    pass = pass && auc >= 0.999;
    char buf[64];
    std::snprintf(buf, sizeof buf, " [N=%zu: AUC %.4f]",
                  group["group_size"].get<std::size_t>(), auc);
    detail += buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.1f s)", timer.seconds());
  report(9, pass,
         "detection AUC stays >= 0.999 after mean-subtraction attacks" +
             detail + buf);
}

// --- criterion 10: oracle equivalences -------------------------------------

void criterion_oracles() {
  bool auc_ok = true;
  {
    Drbg rng(acceptance_seed(30));
    for (int round = 0; round < 30; ++round) {
      std::vector<double> pos(100), neg(100);
      for (double& x : pos) x = std::floor(rng.next_normal() * 3.0);
      for (double& x : neg) x = std::floor(rng.next_normal() * 3.0 - 0.4);
      const double fast = roc_auc(pos, neg);
      const double slow = testutil::pairwise_auc(pos, neg);
      auc_ok = auc_ok && std::abs(fast - slow) <= 1e-12;
    }
  }

  bool ccl_ok = true;
  {
    Drbg rng(acceptance_seed(31));
    for (int grid = 0; grid < 1000; ++grid) {
      const double density = 0.02 + 0.96 * rng.next_uniform();
      std::vector<std::uint8_t> mask(32 * 32);
      for (auto& cell : mask) cell = rng.next_uniform() < density ? 1 : 0;
      const ComponentStats got = label_components(mask, 32, 32);
      const auto want = testutil::flood_fill_components(mask, 32, 32);
      ccl_ok = ccl_ok && got.count == want.count && got.largest == want.largest;
    }
  }

  bool tail_ok = true;
  {
    for (std::size_t n : {2u, 7u, 12u, 16u, 20u}) {
      for (double p : {0.01, 0.2, 0.5, 0.8, 0.99}) {
        for (std::size_t m = 0; m <= n; ++m) {
          const double exact = testutil::exact_binomial_upper_tail(n, p, m);
          const double got = binomial_upper_tail(n, p, m);
          const double tolerance = 1e-12 * std::max(exact, 1e-300);
          tail_ok = tail_ok && std::abs(got - exact) <= tolerance + 1e-300;
        }
      }
    }
  }

  char buf[224];
  std::snprintf(buf, sizeof buf,
                "oracle equivalence: AUC vs O(n^2) pairwise %s; labeling vs "
                "flood fill on 1000 grids %s; binomial tail vs enumeration %s",
                auc_ok ? "exact" : "DEVIATES", ccl_ok ? "exact" : "DEVIATES",
                tail_ok ? "exact" : "DEVIATES");
  report(10, auc_ok && ccl_ok && tail_ok, buf);
}

// --- criterion 11: threshold arithmetic ------------------------------------

void criterion_threshold_arithmetic() {
  const std::size_t threshold = default_match_threshold(1024, 7, 55.0);
  const double r = rho(55.0, 7);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "floor(1024 * rho(55)) = %zu (expected 79); rho(55, 7) = %.7f "
                "within 1e-5 of 0.07788",
                threshold, r);
  report(11, threshold == 79 && std::abs(r - 0.07788) <= 1e-5, buf);
}

}  // namespace

int main() {
  std::printf("acceptance suite (kernel backend: %s)\n", kernels::active().name);
  Timer total;

  criteria_collision_laws();         // 1, 2
  criterion_analytic_vs_simulation();  // 3
  criterion_patch_separation();      // 4
  criterion_golden_files();          // 5
  criterion_distortion_free();       // 6
  criterion_cat_attack();            // 7
  criterion_forgery();               // 8
  criterion_steganalysis();          // 9
  criterion_oracles();               // 10
  criterion_threshold_arithmetic();  // 11

  std::printf("%d of 11 criteria passed (total %.1f s)\n", 11 - g_failures,
              total.seconds());
  return g_failures == 0 ? 0 : 1;
}
