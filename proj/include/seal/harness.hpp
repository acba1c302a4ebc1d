#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seal/attacks.hpp"
#include "seal/channel.hpp"
#include "seal/detection.hpp"
#include "seal/noisefield.hpp"
#include "seal/stats.hpp"
#include "seal/tamper.hpp"

namespace seal {

// Two coexisting match-threshold regimes: the analytic floor(n * rho(mid))
// and a fixed empirical count. Both are exposed everywhere a decision is made.
struct ThresholdSpec {
  enum class Mode { analytic, fixed };

  Mode mode = Mode::fixed;
  double theta_mid_deg = kDefaultThetaMidDegrees;
  std::size_t fixed_count = kDefaultFixedMatchThreshold;

  std::size_t resolve(std::size_t num_patches, int bit_count) const;
};

struct CatAttackExperiment {
  double min_scale = 0.30;
  double max_scale = 0.60;
  // Optional re-captioning of the edited image: the detection vector is
  // rotated away from the generation vector by an angle drawn from this
  // normal law (0 std and 0 mean leaves the vector untouched).
  double recaption_angle_mean = 0.0;
  double recaption_angle_std = 0.0;
};

struct ForgeryExperiment {
  double attack_angle_deg = 90.0;
  int channel_passes = 2;
};

struct StegAverageExperiment {
  std::vector<std::size_t> group_sizes = {5, 50, 500, 5000};
  double strength = 1.0;
};

struct EraseFractionExperiment {
  std::vector<double> fractions = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
};

struct AttackSpec {
  enum class Kind { cat, forgery_reuse, steg_average, erase_fraction };

  Kind kind = Kind::cat;
  CatAttackExperiment cat;
  ForgeryExperiment forgery;
  StegAverageExperiment steg;
  EraseFractionExperiment erase;

  void validate() const;
};

struct ExperimentConfig {
  int schema_version = 1;
  Layout layout;
  int bit_count = kDefaultBitsPerPatch;
  double tau = kDefaultMatchTau;
  ThresholdSpec threshold;
  double channel_sigma = 0.4;
  Salt salt;
  Seed256 rng_seed{};
  std::size_t trials = 200;
  int threads = 0;
  std::vector<AttackSpec> attacks;
  std::string report_path;

  // Throws ValidationError listing every violated constraint.
  void validate() const;

  static ExperimentConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

// Full report for every configured attack. Pure function of the config;
// wall-clock and backend info live under the "runtime" key only.
nlohmann::json run_experiment(const ExperimentConfig& config);

struct DetectionCurveParams {
  Layout layout;
  int bit_count = kDefaultBitsPerPatch;
  double tau = kDefaultMatchTau;
  double theta_mid_deg = kDefaultThetaMidDegrees;
  double sigma = 0.4;
  Salt salt;
  Seed256 rng_seed{};
};

struct DetectionCurvePoint {
  double theta_deg = 0.0;
  double analytic = 0.0;
  double monte_carlo = 0.0;
  std::size_t trials = 0;
};

// Analytic tail vs. full-pipeline Monte Carlo (perturb the semantic vector,
// generate, channel-invert, detect with the analytic threshold) per angle.
std::vector<DetectionCurvePoint> detection_curve(std::span<const double> angles_deg,
                                                 std::size_t trials,
                                                 const DetectionCurveParams& params);

// Semantics-free reference scheme: one global key pattern per salt.
// Generation ignores the semantic vector; detection matches the recovered
// field against the fixed pattern.
class FixedKeyBaseline {
 public:
  FixedKeyBaseline(const Salt& salt, const Layout& layout);

  const NoiseField& pattern() const { return pattern_; }
  NoiseField generate() const { return pattern_; }
  MatchMap match_map(const NoiseField& recovered, double tau) const;
  DetectionDecision detect(const NoiseField& recovered, double tau,
                           std::size_t match_threshold) const;

 private:
  NoiseField pattern_;
};

// Grid sweep over patch count and bits per patch. Each cell reports the
// ROC-AUC of the match-count score separating semantically related detections
// from unrelated ones, with tau recalibrated per cell.
struct SweepParams {
  std::vector<std::uint32_t> grid_sizes = {16, 32, 64};  // patch grid side
  std::vector<int> bit_counts = {4, 7, 10};
  std::size_t trials = 64;
  double sigma = 0.4;
  double tau_fpr = 1e-4;
  double related_angle_mean = 40.0;
  double related_angle_std = 12.0;
  double unrelated_angle_mean = 85.0;
  double unrelated_angle_std = 12.0;
  std::size_t dim = kDefaultEmbeddingDim;
  Salt salt;
  Seed256 rng_seed{};
};

nlohmann::json run_parameter_sweep(const SweepParams& params);

// Largest cluster-count cutoff whose false-positive rate on clean watermarked
// fields stays at or below target_fpr.
std::size_t calibrate_cluster_threshold(const ChannelConfig& channel,
                                        const Layout& layout, const Salt& salt,
                                        int bit_count, std::size_t trials,
                                        double target_fpr);

// Unit vector drawn from the seed; the stand-in for an arbitrary image's
// semantics in Monte-Carlo experiments.
SemanticVector random_unit_vector(std::size_t dim, const Seed256& seed);

void write_report(const nlohmann::json& report, const std::filesystem::path& path);

}  // namespace seal
