#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seal/noisefield.hpp"
#include "seal/semantic.hpp"
#include "seal/simhash.hpp"

namespace seal {

constexpr double kDefaultMatchTau = 2.3;
constexpr double kDefaultThetaMidDegrees = 55.0;
constexpr std::size_t kDefaultFixedMatchThreshold = 12;

// Per-patch distances between the regenerated reference noise and the
// recovered field, and the threshold verdict per patch.
struct MatchMap {
  std::vector<double> distances;
  std::vector<std::uint8_t> matches;  // matches[i] <=> distances[i] < tau
  double tau = kDefaultMatchTau;

  std::size_t match_count() const;
};

struct DetectionDecision {
  std::size_t match_count = 0;
  std::size_t match_threshold = 0;
  bool watermarked = false;  // match_count >= match_threshold
};

// distances[i] = || simhash_patch(v, i, salt, b, p) - patch i of recovered ||.
// Regenerated noise is rounded to f32 before comparison so that a lossless
// round trip yields exactly zero distance.
MatchMap match_map(const SemanticVector& v, const NoiseField& recovered,
                   const Salt& salt, int bit_count, double tau,
                   const ProjectionTable* table = nullptr);

DetectionDecision detect(const SemanticVector& v, const NoiseField& recovered,
                         const Salt& salt, int bit_count, double tau,
                         std::size_t match_threshold,
                         const ProjectionTable* table = nullptr);

// Probability that all `bit_count` projection signs agree for vectors at the
// given angle: (1 - theta/180)^b.
double rho(double theta_deg, int bit_count);

// Exact binomial upper tail P(Bin(n, rho(theta)) >= floor(n * rho(theta_mid))),
// evaluated in log space; stable for n up to 1e5.
double detection_probability(double theta_deg, double theta_mid_deg,
                             std::size_t num_patches, int bit_count);

// floor(n * rho(theta_mid)).
std::size_t default_match_threshold(std::size_t num_patches, int bit_count,
                                    double theta_mid_deg);

// P(Bin(n, p) >= m) building block shared by the probability routines.
double binomial_upper_tail(std::size_t n, double p, std::size_t m);

void to_json(nlohmann::json& j, const MatchMap& m);
void to_json(nlohmann::json& j, const DetectionDecision& d);

}  // namespace seal
