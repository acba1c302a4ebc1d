#include "seal/simhash.hpp"

#include <algorithm>

#include "seal/drbg.hpp"
#include "seal/errors.hpp"
#include "seal/hash.hpp"
#include "seal/kernels.hpp"
#include "seal/parallel.hpp"

namespace seal {

Salt Salt::from_hex(std::string_view hex) {
  const auto raw = seal::from_hex(hex);
  if (raw.size() != 32) {
    throw ValidationError("salt must be exactly 32 bytes (64 hex characters)");
  }
  Salt salt;
  std::copy(raw.begin(), raw.end(), salt.bytes.begin());
  return salt;
}

std::string Salt::to_hex_string() const { return to_hex(bytes); }

std::vector<std::uint8_t> KeyBits::encode() const {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(bit_count));
  for (int j = 1; j <= bit_count; ++j) {
    out[static_cast<std::size_t>(j - 1)] = sign(j) > 0 ? 0x01 : 0x00;
  }
  return out;
}

namespace {

void check_bit_count(int bit_count) {
  if (bit_count < 1 || bit_count > kMaxBitsPerPatch) {
    throw ValidationError("bit count must lie in [1, " +
                          std::to_string(kMaxBitsPerPatch) + "]");
  }
}

Seed256 projection_seed(std::size_t patch, int bit_j, const Salt& salt) {
  auto i_enc = be64(patch);
  auto j_enc = be64(static_cast<std::uint64_t>(bit_j));
  return sha256({std::span<const std::uint8_t>(i_enc),
                 std::span<const std::uint8_t>(j_enc),
                 std::span<const std::uint8_t>(salt.bytes)});
}

}  // namespace

SemanticVector projection_vector(std::size_t patch, int bit_j, const Salt& salt,
                                 std::size_t dim) {
  if (bit_j < 1) {
    throw ValidationError("projection bit index is 1-based");
  }
  if (dim == 0) {
    throw ValidationError("projection dimension must be positive");
  }
  SemanticVector r;
  r.values.resize(dim);
  Drbg drbg(projection_seed(patch, bit_j, salt));
  drbg.fill_normals(std::span<double>(r.values));
  return r;
}

ProjectionTable::ProjectionTable(const Salt& salt, std::size_t dim,
                                 std::size_t num_patches, int bit_count)
    : salt_(salt), dim_(dim), num_patches_(num_patches), bit_count_(bit_count) {
  check_bit_count(bit_count);
  if (dim == 0 || num_patches == 0) {
    throw ValidationError("projection table requires positive dim and patch count");
  }
  rows_.resize(dim_ * num_patches_ * static_cast<std::size_t>(bit_count_));
  parallel_for(num_patches_, [&](std::size_t i) {
    for (int j = 1; j <= bit_count_; ++j) {
      double* dst = rows_.data() +
                    (i * static_cast<std::size_t>(bit_count_) +
                     static_cast<std::size_t>(j - 1)) *
                        dim_;
      Drbg drbg(projection_seed(i, j, salt_));
      drbg.fill_normals(std::span<double>(dst, dim_));
    }
  });
}

std::span<const double> ProjectionTable::row(std::size_t patch, int bit_j) const {
  if (patch >= num_patches_ || bit_j < 1 || bit_j > bit_count_) {
    throw ValidationError("projection table index out of range");
  }
  const double* ptr = rows_.data() +
                      (patch * static_cast<std::size_t>(bit_count_) +
                       static_cast<std::size_t>(bit_j - 1)) *
                          dim_;
  return {ptr, dim_};
}

KeyBits key_bits(const SemanticVector& v, std::size_t patch, const Salt& salt,
                 int bit_count) {
  check_bit_count(bit_count);
  validate(v);
  KeyBits bits;
  bits.bit_count = bit_count;
  bits.patch_index = patch;
  std::vector<double> row(v.dim());
  for (int j = 1; j <= bit_count; ++j) {
    Drbg drbg(projection_seed(patch, j, salt));
    drbg.fill_normals(std::span<double>(row));
    const double proj = kernels::dot(v.values, row);
    if (proj >= 0.0) {
      bits.pattern |= 1u << (j - 1);
    }
  }
  return bits;
}

KeyBits key_bits(const SemanticVector& v, std::size_t patch,
                 const ProjectionTable& table) {
  validate(v);
  if (v.dim() != table.dim()) {
    throw ValidationError("vector dimension does not match projection table");
  }
  KeyBits bits;
  bits.bit_count = table.bit_count();
  bits.patch_index = patch;
  for (int j = 1; j <= table.bit_count(); ++j) {
    const double proj = kernels::dot(v.values, table.row(patch, j));
    if (proj >= 0.0) {
      bits.pattern |= 1u << (j - 1);
    }
  }
  return bits;
}

Seed256 patch_seed(const KeyBits& bits, const Salt& salt) {
  const auto encoded = bits.encode();
  auto i_enc = be64(bits.patch_index);
  return sha256({std::span<const std::uint8_t>(encoded),
                 std::span<const std::uint8_t>(i_enc),
                 std::span<const std::uint8_t>(salt.bytes)});
}

std::vector<double> patch_noise(const Seed256& seed, std::size_t patch_len) {
  if (patch_len == 0) {
    throw ValidationError("patch length must be positive");
  }
  std::vector<double> out(patch_len);
  Drbg drbg(seed);
  drbg.fill_normals(std::span<double>(out));
  return out;
}

void patch_noise_f32(const Seed256& seed, std::span<float> out) {
  Drbg drbg(seed);
  drbg.fill_normals(out);
}

std::vector<double> simhash_patch(const SemanticVector& v, std::size_t patch,
                                  const Salt& salt, int bit_count,
                                  std::size_t patch_len) {
  return patch_noise(patch_seed(key_bits(v, patch, salt, bit_count), salt),
                     patch_len);
}

}  // namespace seal
