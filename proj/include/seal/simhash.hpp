#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "seal/bytes.hpp"
#include "seal/semantic.hpp"

namespace seal {

// Secret salt keying every hash derivation. Fixed 32 bytes.
struct Salt {
  std::array<std::uint8_t, 32> bytes{};

  static Salt from_hex(std::string_view hex);
  std::string to_hex_string() const;
};

constexpr int kDefaultBitsPerPatch = 7;
constexpr int kMaxBitsPerPatch = 20;  // exhaustive recovery is 2^b per patch

// Sign bits of the b random projections for one patch. Bit j (1-based) is
// stored at position j-1 of `pattern`; a set bit means +1.
struct KeyBits {
  std::uint32_t pattern = 0;
  int bit_count = 0;
  std::size_t patch_index = 0;

  int sign(int j) const { return (pattern >> (j - 1)) & 1u ? +1 : -1; }

  // One byte per bit in projection order: 0x01 for +1, 0x00 for -1.
  // This byte layout feeds the seed hash and is part of the wire contract.
  std::vector<std::uint8_t> encode() const;

  bool operator==(const KeyBits&) const = default;
};

// Projection direction r_j for (patch, bit): d standard normals from the
// DRBG seeded by SHA-256(be64(patch) || be64(j) || salt), j in [1, b].
SemanticVector projection_vector(std::size_t patch, int bit_j, const Salt& salt,
                                 std::size_t dim);

// All projection rows for a fixed (salt, dim, patches, bits) context,
// materialized once. Rows depend only on indices and salt, never on the
// semantic vector, so one table serves any number of generations/detections.
class ProjectionTable {
 public:
  ProjectionTable(const Salt& salt, std::size_t dim, std::size_t num_patches,
                  int bit_count);

  std::span<const double> row(std::size_t patch, int bit_j) const;

  std::size_t dim() const { return dim_; }
  std::size_t num_patches() const { return num_patches_; }
  int bit_count() const { return bit_count_; }
  const Salt& salt() const { return salt_; }

 private:
  Salt salt_;
  std::size_t dim_;
  std::size_t num_patches_;
  int bit_count_;
  std::vector<double> rows_;  // [patch][bit][dim] contiguous
};

// bits[j] = sign(<v, r_j>), with sign(0) = +1.
KeyBits key_bits(const SemanticVector& v, std::size_t patch, const Salt& salt,
                 int bit_count);
KeyBits key_bits(const SemanticVector& v, std::size_t patch,
                 const ProjectionTable& table);

// Patch seed = SHA-256(encode(bits) || be64(patch) || salt). The patch index
// keeps seeds distinct even when two patches produce identical bits.
Seed256 patch_seed(const KeyBits& bits, const Salt& salt);

// First `patch_len` DRBG normals for the seed.
std::vector<double> patch_noise(const Seed256& seed, std::size_t patch_len);
void patch_noise_f32(const Seed256& seed, std::span<float> out);

// key_bits -> patch_seed -> patch_noise.
std::vector<double> simhash_patch(const SemanticVector& v, std::size_t patch,
                                  const Salt& salt, int bit_count,
                                  std::size_t patch_len);

}  // namespace seal
