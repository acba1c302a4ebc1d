#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "seal/bytes.hpp"

namespace seal {

// Real-valued embedding of image/prompt semantics. Entries must be finite
// and the Euclidean norm strictly positive; generation and detection must
// agree on the dimension.
struct SemanticVector {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
};

constexpr std::size_t kDefaultEmbeddingDim = 768;

double norm(const SemanticVector& v);
double dot(const SemanticVector& a, const SemanticVector& b);

// Angle between two nonzero vectors in degrees, in [0, 180]. The cosine is
// clamped to [-1, 1] before arccos to absorb rounding.
double angle_degrees(const SemanticVector& a, const SemanticVector& b);

// Deterministic unit vector at exactly `theta_deg` degrees from v: a random
// direction drawn from the seed is orthogonalized against v and the pair
// spans the rotation plane.
SemanticVector perturb_by_angle(const SemanticVector& v, double theta_deg,
                                const Seed256& seed);

void validate(const SemanticVector& v);

// Embedding source. The mock provider stands in for a captioner+embedder
// stack: deterministic, and texts sharing tokens land at smaller angles.
struct ProviderSpec {
  enum class Kind { mock, file };

  Kind kind = Kind::mock;
  std::vector<std::uint8_t> mock_seed_salt;

  static ProviderSpec mock(std::vector<std::uint8_t> salt = {}) {
    return ProviderSpec{Kind::mock, std::move(salt)};
  }
};

// Mock embedding: lowercase, split on whitespace, expand each token into a
// d-dim standard-normal vector seeded by SHA-256(mock_seed_salt || token),
// sum and normalize to unit norm. Pure function of (text, spec, dim).
SemanticVector embed_text(std::string_view text, const ProviderSpec& spec,
                          std::size_t dim = kDefaultEmbeddingDim);

// JSON vector file: {"dim": d, "values": [...]}.
SemanticVector load_vector(const std::filesystem::path& path);
void save_vector(const std::filesystem::path& path, const SemanticVector& v);

}  // namespace seal
