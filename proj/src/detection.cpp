#include "seal/detection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "seal/errors.hpp"
#include "seal/kernels.hpp"
#include "seal/parallel.hpp"

namespace seal {

std::size_t MatchMap::match_count() const {
  return static_cast<std::size_t>(
      std::count(matches.begin(), matches.end(), std::uint8_t{1}));
}

MatchMap match_map(const SemanticVector& v, const NoiseField& recovered,
                   const Salt& salt, int bit_count, double tau,
                   const ProjectionTable* table) {
  recovered.layout.validate();
  validate(v);
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ValidationError("match threshold tau must be positive and finite");
  }
  if (table != nullptr &&
      (table->dim() != v.dim() ||
       table->num_patches() < recovered.layout.num_patches() ||
       table->bit_count() != bit_count)) {
    throw ValidationError("projection table does not cover this context");
  }

  const std::size_t n = recovered.layout.num_patches();
  const std::size_t p = recovered.layout.patch_len();
  MatchMap map;
  map.tau = tau;
  map.distances.assign(n, 0.0);
  map.matches.assign(n, 0);

  parallel_for(n, [&](std::size_t i) {
    const KeyBits bits = table != nullptr ? key_bits(v, i, *table)
                                          : key_bits(v, i, salt, bit_count);
    std::vector<float> reference(p), observed(p);
    patch_noise_f32(patch_seed(bits, salt), std::span<float>(reference));
    patch_slice(recovered, i, std::span<float>(observed));
    const double dist = std::sqrt(kernels::l2_distance_sq(reference, observed));
    map.distances[i] = dist;
    map.matches[i] = dist < tau ? 1 : 0;
  });
  return map;
}

DetectionDecision detect(const SemanticVector& v, const NoiseField& recovered,
                         const Salt& salt, int bit_count, double tau,
                         std::size_t match_threshold,
                         const ProjectionTable* table) {
  const MatchMap map = match_map(v, recovered, salt, bit_count, tau, table);
  DetectionDecision decision;
  decision.match_count = map.match_count();
  decision.match_threshold = match_threshold;
  decision.watermarked = decision.match_count >= match_threshold;
  return decision;
}

double rho(double theta_deg, int bit_count) {
  if (theta_deg < 0.0 || theta_deg > 180.0) {
    throw ValidationError("angle must lie in [0, 180] degrees");
  }
  if (bit_count < 1) {
    throw ValidationError("bit count must be positive");
  }
  return std::pow(1.0 - theta_deg / 180.0, bit_count);
}

namespace {

double log_binom_pmf(double n, double k, double log_p, double log_q) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
         k * log_p + (n - k) * log_q;
}

// log(sum(exp(values))) over k in [k_begin, k_end].
double log_sum_range(std::size_t n, double p, std::size_t k_begin,
                     std::size_t k_end) {
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  double max_term = -INFINITY;
  for (std::size_t k = k_begin; k <= k_end; ++k) {
    max_term = std::max(max_term,
                        log_binom_pmf(static_cast<double>(n),
                                      static_cast<double>(k), log_p, log_q));
  }
  if (!std::isfinite(max_term)) return -INFINITY;
  double acc = 0.0;
  for (std::size_t k = k_begin; k <= k_end; ++k) {
    acc += std::exp(log_binom_pmf(static_cast<double>(n),
                                  static_cast<double>(k), log_p, log_q) -
                    max_term);
  }
  return max_term + std::log(acc);
}

}  // namespace

double binomial_upper_tail(std::size_t n, double p, std::size_t m) {
  if (n < 1) {
    throw ValidationError("binomial tail needs n >= 1");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("binomial success probability out of [0, 1]");
  }
  if (m == 0) return 1.0;
  if (m > n) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  // Sum whichever tail is smaller; the other side comes out by complement.
  const double mean = static_cast<double>(n) * p;
  if (static_cast<double>(m) > mean) {
    return std::exp(log_sum_range(n, p, m, n));
  }
  const double lower = std::exp(log_sum_range(n, p, 0, m - 1));
  return 1.0 - lower;
}

double detection_probability(double theta_deg, double theta_mid_deg,
                             std::size_t num_patches, int bit_count) {
  const double p = rho(theta_deg, bit_count);
  const std::size_t m =
      default_match_threshold(num_patches, bit_count, theta_mid_deg);
  return binomial_upper_tail(num_patches, p, m);
}

std::size_t default_match_threshold(std::size_t num_patches, int bit_count,
                                    double theta_mid_deg) {
  if (num_patches < 1) {
    throw ValidationError("patch count must be positive");
  }
  const double scaled = static_cast<double>(num_patches) * rho(theta_mid_deg, bit_count);
  return static_cast<std::size_t>(std::floor(scaled));
}

void to_json(nlohmann::json& j, const MatchMap& m) {
  j = nlohmann::json{{"tau", m.tau},
                     {"distances", m.distances},
                     {"matches", m.matches},
                     {"match_count", m.match_count()}};
}

void to_json(nlohmann::json& j, const DetectionDecision& d) {
  j = nlohmann::json{{"match_count", d.match_count},
                     {"match_threshold", d.match_threshold},
                     {"watermarked", d.watermarked}};
}

}  // namespace seal
