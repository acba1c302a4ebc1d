#include "seal/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "seal/drbg.hpp"
#include "seal/errors.hpp"
#include "seal/kernels.hpp"
#include "seal/parallel.hpp"

namespace seal {

using nlohmann::json;

std::size_t ThresholdSpec::resolve(std::size_t num_patches, int bit_count) const {
  if (mode == Mode::analytic) {
    return default_match_threshold(num_patches, bit_count, theta_mid_deg);
  }
  return fixed_count;
}

void AttackSpec::validate() const {
  std::vector<std::string> problems;
  switch (kind) {
    case Kind::cat:
      if (!(cat.min_scale >= 0.0 && cat.max_scale <= 1.0 &&
            cat.min_scale <= cat.max_scale)) {
        problems.push_back("cat: scales must satisfy 0 <= min <= max <= 1");
      }
      if (cat.recaption_angle_std < 0.0) {
        problems.push_back("cat: recaption_angle_std must be non-negative");
      }
      break;
    case Kind::forgery_reuse:
      if (forgery.attack_angle_deg < 0.0 || forgery.attack_angle_deg > 180.0) {
        problems.push_back("forgery_reuse: attack_angle_deg must lie in [0, 180]");
      }
      if (forgery.channel_passes < 1) {
        problems.push_back("forgery_reuse: channel_passes must be >= 1");
      }
      break;
    case Kind::steg_average:
      if (steg.group_sizes.empty()) {
        problems.push_back("steg_average: group_sizes must not be empty");
      }
      for (std::size_t n : steg.group_sizes) {
        if (n < 1) problems.push_back("steg_average: group sizes must be >= 1");
      }
      break;
    case Kind::erase_fraction:
      if (erase.fractions.empty()) {
        problems.push_back("erase_fraction: fractions must not be empty");
      }
      for (double f : erase.fractions) {
        if (!(f >= 0.0 && f <= 1.0)) {
          problems.push_back("erase_fraction: fractions must lie in [0, 1]");
        }
      }
      break;
  }
  if (!problems.empty()) {
    std::string msg = "invalid attack spec:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ValidationError(msg);
  }
}

void ExperimentConfig::validate() const {
  std::vector<std::string> problems;
  if (schema_version != 1) {
    problems.push_back("schema_version must be 1");
  }
  try {
    layout.validate();
  } catch (const ValidationError& e) {
    problems.emplace_back(e.what());
  }
  if (bit_count < 1 || bit_count > kMaxBitsPerPatch) {
    problems.push_back("bit_count must lie in [1, " +
                       std::to_string(kMaxBitsPerPatch) + "]");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    problems.push_back("tau must be positive and finite");
  }
  if (threshold.mode == ThresholdSpec::Mode::analytic &&
      (threshold.theta_mid_deg < 0.0 || threshold.theta_mid_deg > 180.0)) {
    problems.push_back("threshold.theta_mid must lie in [0, 180]");
  }
  if (!(channel_sigma >= 0.0) || !std::isfinite(channel_sigma)) {
    problems.push_back("channel sigma must be finite and non-negative");
  }
  if (trials < 1) {
    problems.push_back("trials must be >= 1");
  }
  for (const auto& attack : attacks) {
    try {
      attack.validate();
    } catch (const ValidationError& e) {
      problems.emplace_back(e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid experiment config:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ValidationError(msg);
  }
}

namespace {

json layout_to_json(const Layout& L) {
  return json{{"channels", L.channels},
              {"height", L.height},
              {"width", L.width},
              {"patch_rows", L.patch_rows},
              {"patch_cols", L.patch_cols}};
}

Layout layout_from_json(const json& doc) {
  Layout L;
  L.channels = doc.value("channels", 4u);
  L.height = doc.value("height", 64u);
  L.width = doc.value("width", 64u);
  L.patch_rows = doc.value("patch_rows", 32u);
  L.patch_cols = doc.value("patch_cols", 32u);
  return L;
}

Seed256 seed_from_hex_field(const json& doc, const char* key) {
  Seed256 seed{};
  if (doc.contains(key)) {
    const auto raw = from_hex(doc[key].get<std::string>());
    if (raw.size() != seed.size()) {
      throw ValidationError(std::string(key) + " must be 32 bytes of hex");
    }
    std::copy(raw.begin(), raw.end(), seed.begin());
  }
  return seed;
}

AttackSpec::Kind attack_kind_from_string(const std::string& s) {
  if (s == "cat") return AttackSpec::Kind::cat;
  if (s == "forgery_reuse") return AttackSpec::Kind::forgery_reuse;
  if (s == "steg_average") return AttackSpec::Kind::steg_average;
  if (s == "erase_fraction") return AttackSpec::Kind::erase_fraction;
  throw ValidationError("unknown attack kind: " + s);
}

const char* attack_kind_to_string(AttackSpec::Kind kind) {
  switch (kind) {
    case AttackSpec::Kind::cat: return "cat";
    case AttackSpec::Kind::forgery_reuse: return "forgery_reuse";
    case AttackSpec::Kind::steg_average: return "steg_average";
    case AttackSpec::Kind::erase_fraction: return "erase_fraction";
  }
  return "unknown";
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  ExperimentConfig cfg;
  if (!doc.contains("schema_version")) {
    throw ValidationError("config is missing the mandatory schema_version field");
  }
  cfg.schema_version = doc["schema_version"].get<int>();
  if (doc.contains("layout")) cfg.layout = layout_from_json(doc["layout"]);
  cfg.bit_count = doc.value("bit_count", kDefaultBitsPerPatch);
  cfg.tau = doc.value("tau", kDefaultMatchTau);
  if (doc.contains("threshold")) {
    const json& th = doc["threshold"];
    const std::string mode = th.value("mode", "fixed");
    if (mode == "analytic") {
      cfg.threshold.mode = ThresholdSpec::Mode::analytic;
      cfg.threshold.theta_mid_deg = th.value("theta_mid", kDefaultThetaMidDegrees);
    } else if (mode == "fixed") {
      cfg.threshold.mode = ThresholdSpec::Mode::fixed;
      cfg.threshold.fixed_count =
          th.value("count", kDefaultFixedMatchThreshold);
    } else {
      throw ValidationError("threshold.mode must be \"analytic\" or \"fixed\"");
    }
  }
  if (doc.contains("channel")) {
    cfg.channel_sigma = doc["channel"].value("sigma", 0.4);
  }
  if (doc.contains("salt_hex")) {
    cfg.salt = Salt::from_hex(doc["salt_hex"].get<std::string>());
  }
  cfg.rng_seed = seed_from_hex_field(doc, "rng_seed_hex");
  cfg.trials = doc.value("trials", std::size_t{200});
  cfg.threads = doc.value("threads", 0);
  cfg.report_path = doc.value("report_path", std::string{});
  if (doc.contains("attacks")) {
    for (const json& a : doc["attacks"]) {
      AttackSpec spec;
      spec.kind = attack_kind_from_string(a.value("kind", std::string{}));
      switch (spec.kind) {
        case AttackSpec::Kind::cat:
          spec.cat.min_scale = a.value("min_scale", 0.30);
          spec.cat.max_scale = a.value("max_scale", 0.60);
          spec.cat.recaption_angle_mean = a.value("recaption_angle_mean", 0.0);
          spec.cat.recaption_angle_std = a.value("recaption_angle_std", 0.0);
          break;
        case AttackSpec::Kind::forgery_reuse:
          spec.forgery.attack_angle_deg = a.value("attack_angle_deg", 90.0);
          spec.forgery.channel_passes = a.value("channel_passes", 2);
          break;
        case AttackSpec::Kind::steg_average:
          if (a.contains("group_sizes")) {
            spec.steg.group_sizes = a["group_sizes"].get<std::vector<std::size_t>>();
          }
          spec.steg.strength = a.value("strength", 1.0);
          break;
        case AttackSpec::Kind::erase_fraction:
          if (a.contains("fractions")) {
            spec.erase.fractions = a["fractions"].get<std::vector<double>>();
          }
          break;
      }
      cfg.attacks.push_back(std::move(spec));
    }
  }
  cfg.validate();
  return cfg;
}

json ExperimentConfig::to_json() const {
  json attacks_json = json::array();
  for (const auto& spec : attacks) {
    json a{{"kind", attack_kind_to_string(spec.kind)}};
    switch (spec.kind) {
      case AttackSpec::Kind::cat:
        a["min_scale"] = spec.cat.min_scale;
        a["max_scale"] = spec.cat.max_scale;
        a["recaption_angle_mean"] = spec.cat.recaption_angle_mean;
        a["recaption_angle_std"] = spec.cat.recaption_angle_std;
        break;
      case AttackSpec::Kind::forgery_reuse:
        a["attack_angle_deg"] = spec.forgery.attack_angle_deg;
        a["channel_passes"] = spec.forgery.channel_passes;
        break;
      case AttackSpec::Kind::steg_average:
        a["group_sizes"] = spec.steg.group_sizes;
        a["strength"] = spec.steg.strength;
        break;
      case AttackSpec::Kind::erase_fraction:
        a["fractions"] = spec.erase.fractions;
        break;
    }
    attacks_json.push_back(std::move(a));
  }

  json th;
  if (threshold.mode == ThresholdSpec::Mode::analytic) {
    th = json{{"mode", "analytic"}, {"theta_mid", threshold.theta_mid_deg}};
  } else {
    th = json{{"mode", "fixed"}, {"count", threshold.fixed_count}};
  }

  return json{{"schema_version", schema_version},
              {"layout", layout_to_json(layout)},
              {"bit_count", bit_count},
              {"tau", tau},
              {"threshold", th},
              {"channel", json{{"sigma", channel_sigma}}},
              {"salt_hex", salt.to_hex_string()},
              {"rng_seed_hex", to_hex(rng_seed)},
              {"trials", trials},
              {"threads", threads},
              {"attacks", attacks_json},
              {"report_path", report_path}};
}

SemanticVector random_unit_vector(std::size_t dim, const Seed256& seed) {
  if (dim == 0) {
    throw ValidationError("dimension must be positive");
  }
  Drbg drbg(seed);
  SemanticVector v;
  v.values.resize(dim);
  double n = 0.0;
  do {
    drbg.fill_normals(std::span<double>(v.values));
    n = norm(v);
  } while (n <= 0.0);
  for (double& x : v.values) x /= n;
  return v;
}

FixedKeyBaseline::FixedKeyBaseline(const Salt& salt, const Layout& layout) {
  Seed256 salt_seed{};
  std::copy(salt.bytes.begin(), salt.bytes.end(), salt_seed.begin());
  pattern_ = random_noise(layout, derive_seed(salt_seed, 0, SeedTag::baseline_pattern));
}

MatchMap FixedKeyBaseline::match_map(const NoiseField& recovered,
                                     double tau) const {
  if (!(recovered.layout == pattern_.layout)) {
    throw ValidationError("layout mismatch against the baseline pattern");
  }
  const std::size_t n = pattern_.layout.num_patches();
  const std::size_t p = pattern_.layout.patch_len();
  MatchMap map;
  map.tau = tau;
  map.distances.assign(n, 0.0);
  map.matches.assign(n, 0);
  parallel_for(n, [&](std::size_t i) {
    std::vector<float> expected(p), observed(p);
    patch_slice(pattern_, i, std::span<float>(expected));
    patch_slice(recovered, i, std::span<float>(observed));
    const double dist = std::sqrt(kernels::l2_distance_sq(expected, observed));
    map.distances[i] = dist;
    map.matches[i] = dist < tau ? 1 : 0;
  });
  return map;
}

DetectionDecision FixedKeyBaseline::detect(const NoiseField& recovered,
                                           double tau,
                                           std::size_t match_threshold) const {
  const MatchMap map = match_map(recovered, tau);
  DetectionDecision decision;
  decision.match_count = map.match_count();
  decision.match_threshold = match_threshold;
  decision.watermarked = decision.match_count >= match_threshold;
  return decision;
}

std::vector<DetectionCurvePoint> detection_curve(std::span<const double> angles_deg,
                                                 std::size_t trials,
                                                 const DetectionCurveParams& params) {
  params.layout.validate();
  if (trials < 1) {
    throw ValidationError("detection_curve needs at least one trial");
  }
  const std::size_t n = params.layout.num_patches();
  const std::size_t m =
      default_match_threshold(n, params.bit_count, params.theta_mid_deg);
  const ProjectionTable table(params.salt, kDefaultEmbeddingDim, n,
                              params.bit_count);

  std::vector<DetectionCurvePoint> curve;
  for (std::size_t a = 0; a < angles_deg.size(); ++a) {
    const double theta = angles_deg[a];
    const Seed256 angle_seed = derive_seed(params.rng_seed, a, SeedTag::mc_stream);
    std::vector<std::uint8_t> detected(trials, 0);
    parallel_for(trials, [&](std::size_t t) {
      const SemanticVector v = random_unit_vector(
          kDefaultEmbeddingDim, derive_seed(angle_seed, t, SeedTag::trial_vector));
      const SemanticVector w =
          perturb_by_angle(v, theta, derive_seed(angle_seed, t, SeedTag::trial_rotation));
      NoiseField z = generate_watermarked_noise(v, params.salt, params.layout,
                                                params.bit_count, &table);
      if (params.sigma > 0.0) {
        ChannelConfig channel{params.sigma,
                              derive_seed(angle_seed, t, SeedTag::trial_channel)};
        z = invert(z, channel);
      }
      const DetectionDecision decision =
          detect(w, z, params.salt, params.bit_count, params.tau, m, &table);
      detected[t] = decision.watermarked ? 1 : 0;
    });
    DetectionCurvePoint point;
    point.theta_deg = theta;
    point.analytic =
        detection_probability(theta, params.theta_mid_deg, n, params.bit_count);
    point.monte_carlo =
        static_cast<double>(std::count(detected.begin(), detected.end(), 1)) /
        static_cast<double>(trials);
    point.trials = trials;
    curve.push_back(point);
  }
  return curve;
}

namespace {

struct ExperimentContext {
  const ExperimentConfig& cfg;
  const ProjectionTable& projections;
};

double clamp_angle(double theta) { return std::clamp(theta, 0.0, 180.0); }

json run_cat_experiment(const ExperimentContext& ctx, const AttackSpec& spec,
                        const Seed256& seed) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::size_t T = cfg.trials;
  const CandidateTable candidates(cfg.salt, cfg.layout, cfg.bit_count);
  const std::size_t m =
      cfg.threshold.resolve(cfg.layout.num_patches(), cfg.bit_count);

  std::vector<double> clean_scores(T), attacked_scores(T);
  std::vector<double> clean_counts(T), attacked_counts(T);
  std::vector<double> clean_clusters(T), attacked_clusters(T);
  std::vector<double> attack_areas(T);

  parallel_for(T, [&](std::size_t t) {
    const SemanticVector v = random_unit_vector(
        kDefaultEmbeddingDim, derive_seed(seed, t, SeedTag::trial_vector));
    const NoiseField z = generate_watermarked_noise(v, cfg.salt, cfg.layout,
                                                    cfg.bit_count, &ctx.projections);
    const ChannelConfig channel{cfg.channel_sigma,
                                derive_seed(seed, t, SeedTag::trial_channel)};
    const NoiseField recovered = invert(z, channel);

    CatAttackSpec attack;
    attack.min_scale = spec.cat.min_scale;
    attack.max_scale = spec.cat.max_scale;
    attack.rng_seed = derive_seed(seed, t, SeedTag::trial_attack);
    const CatAttackResult attacked = cat_attack(recovered, attack, channel);
    attack_areas[t] = static_cast<double>(attacked.rect.area()) /
                      static_cast<double>(cfg.layout.num_patches());

    const Heatmap clean_heat =
        compute_heatmap(recovered, cfg.salt, cfg.bit_count, &candidates);
    const Heatmap attacked_heat =
        compute_heatmap(attacked.field, cfg.salt, cfg.bit_count, &candidates);
    clean_scores[t] = tamper_score(clean_heat);
    attacked_scores[t] = tamper_score(attacked_heat);
    clean_clusters[t] = static_cast<double>(spatial_test(clean_heat).cluster_count);
    attacked_clusters[t] =
        static_cast<double>(spatial_test(attacked_heat).cluster_count);

    SemanticVector v_detect = v;
    if (spec.cat.recaption_angle_std > 0.0 || spec.cat.recaption_angle_mean > 0.0) {
      Drbg angle_rng(derive_seed(seed, t, SeedTag::trial_rotation));
      const double theta = clamp_angle(spec.cat.recaption_angle_mean +
                                       spec.cat.recaption_angle_std *
                                           angle_rng.next_normal());
      v_detect = perturb_by_angle(v, theta,
                                  derive_seed(seed, t, SeedTag::forgery_pass));
    }
    clean_counts[t] = static_cast<double>(
        detect(v_detect, recovered, cfg.salt, cfg.bit_count, cfg.tau, m,
               &ctx.projections)
            .match_count);
    attacked_counts[t] = static_cast<double>(
        detect(v_detect, attacked.field, cfg.salt, cfg.bit_count, cfg.tau, m,
               &ctx.projections)
            .match_count);
  });

  // Edit-detection scores: fewer matching patches means more edited.
  std::vector<double> clean_edit(T), attacked_edit(T);
  for (std::size_t t = 0; t < T; ++t) {
    clean_edit[t] = -clean_counts[t];
    attacked_edit[t] = -attacked_counts[t];
  }

  const auto mean = [](const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) /
           static_cast<double>(xs.size());
  };

  return json{{"kind", "cat"},
              {"min_scale", spec.cat.min_scale},
              {"max_scale", spec.cat.max_scale},
              {"recaption_angle_mean", spec.cat.recaption_angle_mean},
              {"recaption_angle_std", spec.cat.recaption_angle_std},
              {"trials", T},
              {"match_threshold", m},
              {"spatial_auc", roc_auc(attacked_scores, clean_scores)},
              {"match_count_auc", roc_auc(attacked_edit, clean_edit)},
              {"mean_attack_area_fraction", mean(attack_areas)},
              {"clean_cluster_count_mean", mean(clean_clusters)},
              {"attacked_cluster_count_mean", mean(attacked_clusters)},
              {"clean_match_counts", clean_counts},
              {"attacked_match_counts", attacked_counts},
              {"clean_cluster_counts", clean_clusters},
              {"attacked_cluster_counts", attacked_clusters}};
}

json run_forgery_experiment(const ExperimentContext& ctx, const AttackSpec& spec,
                            const Seed256& seed) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::size_t T = cfg.trials;
  const std::size_t m =
      cfg.threshold.resolve(cfg.layout.num_patches(), cfg.bit_count);
  const FixedKeyBaseline baseline(cfg.salt, cfg.layout);

  std::vector<double> seal_genuine(T), seal_forged(T);
  std::vector<double> base_genuine(T), base_forged(T);

  parallel_for(T, [&](std::size_t t) {
    const SemanticVector v = random_unit_vector(
        kDefaultEmbeddingDim, derive_seed(seed, t, SeedTag::trial_vector));
    const SemanticVector v_attack = perturb_by_angle(
        v, spec.forgery.attack_angle_deg,
        derive_seed(seed, t, SeedTag::trial_rotation));
    const ChannelConfig channel{cfg.channel_sigma,
                                derive_seed(seed, t, SeedTag::trial_channel)};

    const NoiseField z = generate_watermarked_noise(v, cfg.salt, cfg.layout,
                                                    cfg.bit_count, &ctx.projections);
    const NoiseField genuine = invert(z, channel);
    seal_genuine[t] = static_cast<double>(
        detect(v, genuine, cfg.salt, cfg.bit_count, cfg.tau, m, &ctx.projections)
            .match_count);

    const ForgedSample forged =
        forgery_reuse(z, channel, v_attack, spec.forgery.channel_passes);
    seal_forged[t] = static_cast<double>(
        detect(forged.detector_vector, forged.field, cfg.salt, cfg.bit_count,
               cfg.tau, m, &ctx.projections)
            .match_count);

    const NoiseField base_recovered = invert(baseline.pattern(), channel);
    base_genuine[t] = static_cast<double>(
        baseline.detect(base_recovered, cfg.tau, m).match_count);
    const ForgedSample base_forged_sample =
        forgery_reuse(baseline.pattern(), channel, v_attack,
                      spec.forgery.channel_passes);
    base_forged[t] = static_cast<double>(
        baseline.detect(base_forged_sample.field, cfg.tau, m).match_count);
  });

  const auto rate_at = [m](const std::vector<double>& counts) {
    std::size_t hits = 0;
    for (double c : counts) {
      if (c >= static_cast<double>(m)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(counts.size());
  };

  return json{
      {"kind", "forgery_reuse"},
      {"attack_angle_deg", spec.forgery.attack_angle_deg},
      {"channel_passes", spec.forgery.channel_passes},
      {"trials", T},
      {"match_threshold", m},
      {"seal",
       json{{"genuine_detection_rate", rate_at(seal_genuine)},
            {"forged_detection_rate", rate_at(seal_forged)},
            {"auc_genuine_vs_forged", roc_auc(seal_genuine, seal_forged)},
            {"genuine_match_counts", seal_genuine},
            {"forged_match_counts", seal_forged}}},
      {"fixed_key_baseline",
       json{{"genuine_detection_rate", rate_at(base_genuine)},
            {"forged_detection_rate", rate_at(base_forged)},
            {"auc_genuine_vs_forged", roc_auc(base_genuine, base_forged)},
            {"genuine_match_counts", base_genuine},
            {"forged_match_counts", base_forged}}}};
}

json run_steg_experiment(const ExperimentContext& ctx, const AttackSpec& spec,
                         const Seed256& seed) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::size_t T = cfg.trials;
  const std::size_t m =
      cfg.threshold.resolve(cfg.layout.num_patches(), cfg.bit_count);

  json per_group = json::array();
  for (std::size_t g = 0; g < spec.steg.group_sizes.size(); ++g) {
    const std::size_t group = spec.steg.group_sizes[g];
    const Seed256 group_seed = derive_seed(seed, g, SeedTag::trial_attack);

    // Streaming mean over the attacker's corpus; holding thousands of
    // fields at once is unnecessary.
    std::vector<double> sum(cfg.layout.field_len(), 0.0);
    {
      std::vector<NoiseField> partial(std::min<std::size_t>(group, 64));
      std::size_t done = 0;
      while (done < group) {
        const std::size_t batch = std::min(partial.size(), group - done);
        parallel_for(batch, [&](std::size_t k) {
          const SemanticVector vk = random_unit_vector(
              kDefaultEmbeddingDim,
              derive_seed(group_seed, done + k, SeedTag::trial_vector));
          partial[k] = generate_watermarked_noise(vk, cfg.salt, cfg.layout,
                                                  cfg.bit_count, &ctx.projections);
        });
        for (std::size_t k = 0; k < batch; ++k) {
          for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += static_cast<double>(partial[k].values[i]);
          }
        }
        done += batch;
      }
    }
    NoiseField estimate;
    estimate.layout = cfg.layout;
    estimate.values.resize(cfg.layout.field_len());
    for (std::size_t i = 0; i < sum.size(); ++i) {
      estimate.values[i] =
          static_cast<float>(sum[i] / static_cast<double>(group));
    }
    const double estimate_rms =
        std::sqrt(kernels::sum_sq(estimate.values) /
                  static_cast<double>(estimate.values.size()));

    std::vector<double> attacked_counts(T), null_counts(T);
    parallel_for(T, [&](std::size_t t) {
      const Seed256 trial_seed = derive_seed(group_seed, t, SeedTag::mc_stream);
      const SemanticVector v = random_unit_vector(
          kDefaultEmbeddingDim, derive_seed(trial_seed, 0, SeedTag::trial_vector));
      const ChannelConfig channel{cfg.channel_sigma,
                                  derive_seed(trial_seed, 0, SeedTag::trial_channel)};
      const NoiseField z = generate_watermarked_noise(v, cfg.salt, cfg.layout,
                                                      cfg.bit_count,
                                                      &ctx.projections);
      const NoiseField attacked =
          apply_subtraction(invert(z, channel), estimate, spec.steg.strength);
      attacked_counts[t] = static_cast<double>(
          detect(v, attacked, cfg.salt, cfg.bit_count, cfg.tau, m,
                 &ctx.projections)
              .match_count);

      const SemanticVector v_null = random_unit_vector(
          kDefaultEmbeddingDim, derive_seed(trial_seed, 1, SeedTag::trial_vector));
      const NoiseField plain = random_noise(
          cfg.layout, derive_seed(trial_seed, 2, SeedTag::mc_stream));
      null_counts[t] = static_cast<double>(
          detect(v_null, invert(plain, channel), cfg.salt, cfg.bit_count,
                 cfg.tau, m, &ctx.projections)
              .match_count);
    });

    const auto detection_rate = [m](const std::vector<double>& counts) {
      std::size_t hits = 0;
      for (double c : counts) {
        if (c >= static_cast<double>(m)) ++hits;
      }
      return static_cast<double>(hits) / static_cast<double>(counts.size());
    };

    per_group.push_back(json{{"group_size", group},
                             {"estimate_rms", estimate_rms},
                             {"auc", roc_auc(attacked_counts, null_counts)},
                             {"attacked_detection_rate", detection_rate(attacked_counts)},
                             {"attacked_match_counts", attacked_counts},
                             {"null_match_counts", null_counts}});
  }

  return json{{"kind", "steg_average"},
              {"strength", spec.steg.strength},
              {"trials", T},
              {"match_threshold", m},
              {"per_group", per_group}};
}

json run_erase_experiment(const ExperimentContext& ctx, const AttackSpec& spec,
                          const Seed256& seed) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::size_t T = cfg.trials;
  const std::size_t m =
      cfg.threshold.resolve(cfg.layout.num_patches(), cfg.bit_count);

  json per_fraction = json::array();
  for (std::size_t f = 0; f < spec.erase.fractions.size(); ++f) {
    const double fraction = spec.erase.fractions[f];
    const Seed256 fraction_seed = derive_seed(seed, f, SeedTag::trial_attack);
    std::vector<double> counts(T);
    parallel_for(T, [&](std::size_t t) {
      const Seed256 trial_seed = derive_seed(fraction_seed, t, SeedTag::mc_stream);
      const SemanticVector v = random_unit_vector(
          kDefaultEmbeddingDim, derive_seed(trial_seed, 0, SeedTag::trial_vector));
      const ChannelConfig channel{cfg.channel_sigma,
                                  derive_seed(trial_seed, 0, SeedTag::trial_channel)};
      const NoiseField recovered =
          invert(generate_watermarked_noise(v, cfg.salt, cfg.layout,
                                            cfg.bit_count, &ctx.projections),
                 channel);
      const NoiseField erased = erase_fraction(
          recovered, fraction, derive_seed(trial_seed, 0, SeedTag::trial_attack));
      counts[t] = static_cast<double>(
          detect(v, erased, cfg.salt, cfg.bit_count, cfg.tau, m, &ctx.projections)
              .match_count);
    });
    std::size_t hits = 0;
    for (double c : counts) {
      if (c >= static_cast<double>(m)) ++hits;
    }
    per_fraction.push_back(
        json{{"fraction", fraction},
             {"detection_rate",
              static_cast<double>(hits) / static_cast<double>(T)},
             {"match_counts", counts}});
  }

  return json{{"kind", "erase_fraction"},
              {"trials", T},
              {"match_threshold", m},
              {"per_fraction", per_fraction}};
}

}  // namespace

json run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  const ProjectionTable projections(config.salt, kDefaultEmbeddingDim,
                                    config.layout.num_patches(), config.bit_count);
  const ExperimentContext ctx{config, projections};

  json experiments = json::array();
  for (std::size_t a = 0; a < config.attacks.size(); ++a) {
    const AttackSpec& spec = config.attacks[a];
    const Seed256 seed = derive_seed(config.rng_seed, a, SeedTag::trial_attack);
    switch (spec.kind) {
      case AttackSpec::Kind::cat:
        experiments.push_back(run_cat_experiment(ctx, spec, seed));
        break;
      case AttackSpec::Kind::forgery_reuse:
        experiments.push_back(run_forgery_experiment(ctx, spec, seed));
        break;
      case AttackSpec::Kind::steg_average:
        experiments.push_back(run_steg_experiment(ctx, spec, seed));
        break;
      case AttackSpec::Kind::erase_fraction:
        experiments.push_back(run_erase_experiment(ctx, spec, seed));
        break;
    }
  }

  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return json{{"schema_version", 1},
              {"config", config.to_json()},
              {"experiments", experiments},
              {"runtime", json{{"seconds", elapsed},
                               {"kernel_backend", kernels::active().name},
                               {"threads", default_thread_count()}}}};
}

std::size_t calibrate_cluster_threshold(const ChannelConfig& channel,
                                        const Layout& layout, const Salt& salt,
                                        int bit_count, std::size_t trials,
                                        double target_fpr) {
  if (trials < 1 || !(target_fpr > 0.0 && target_fpr < 1.0)) {
    throw ValidationError("calibration needs trials >= 1 and fpr in (0, 1)");
  }
  const ProjectionTable projections(salt, kDefaultEmbeddingDim,
                                    layout.num_patches(), bit_count);
  const CandidateTable candidates(salt, layout, bit_count);
  std::vector<double> counts(trials);
  parallel_for(trials, [&](std::size_t t) {
    const SemanticVector v = random_unit_vector(
        kDefaultEmbeddingDim, derive_seed(channel.rng_seed, t, SeedTag::trial_vector));
    ChannelConfig trial_channel = channel;
    trial_channel.rng_seed = derive_seed(channel.rng_seed, t, SeedTag::trial_channel);
    const NoiseField recovered = invert(
        generate_watermarked_noise(v, salt, layout, bit_count, &projections),
        trial_channel);
    const Heatmap heat = compute_heatmap(recovered, salt, bit_count, &candidates);
    counts[t] = static_cast<double>(spatial_test(heat).cluster_count);
  });
  std::sort(counts.begin(), counts.end());
  const auto k = static_cast<std::size_t>(target_fpr * static_cast<double>(trials));
  const double cutoff = counts[std::min(k, trials - 1)];
  return cutoff >= 1.0 ? static_cast<std::size_t>(cutoff) - 1 : 0;
}

void write_report(const json& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write report: " + path.string());
  }
  out << report.dump(2) << '\n';
  if (!out) {
    throw IoError("report write failed: " + path.string());
  }
}

}  // namespace seal
