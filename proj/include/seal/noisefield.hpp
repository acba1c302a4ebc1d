#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "seal/bytes.hpp"
#include "seal/semantic.hpp"
#include "seal/simhash.hpp"

namespace seal {

// Latent tensor geometry and its partition into a grid of patches.
// height must divide evenly into patch_rows and width into patch_cols;
// every value then belongs to exactly one patch.
struct Layout {
  std::uint32_t channels = 4;
  std::uint32_t height = 64;
  std::uint32_t width = 64;
  std::uint32_t patch_rows = 32;
  std::uint32_t patch_cols = 32;

  std::size_t num_patches() const {
    return static_cast<std::size_t>(patch_rows) * patch_cols;
  }
  std::size_t patch_len() const {
    return static_cast<std::size_t>(channels) * (height / patch_rows) *
           (width / patch_cols);
  }
  std::size_t field_len() const {
    return static_cast<std::size_t>(channels) * height * width;
  }

  void validate() const;
  bool operator==(const Layout&) const = default;
};

// 4x64x64 latent over a 32x32 patch grid: 1024 patches of 16 scalars each
// (2x2 spatial block across 4 channels).
inline Layout default_layout() { return Layout{}; }

// Initial-noise tensor in channel-major, row-major order:
// values[ch * h * w + row * w + col].
struct NoiseField {
  Layout layout;
  std::vector<float> values;
};

// Patch i is the contiguous spatial block of the patch grid (row-major over
// the grid), channel-major within the patch.
void patch_slice(const NoiseField& field, std::size_t patch,
                 std::span<float> out);
std::vector<float> patch_slice(const NoiseField& field, std::size_t patch);
void scatter_patch(NoiseField& field, std::size_t patch,
                   std::span<const float> values);

// Patch i of the result is simhash_patch(v, i, salt, b, p). A prebuilt
// projection table for the same (salt, dim, patches, bits) may be supplied to
// skip row regeneration.
NoiseField generate_watermarked_noise(const SemanticVector& v, const Salt& salt,
                                      const Layout& layout, int bit_count,
                                      const ProjectionTable* table = nullptr);

// Unkeyed standard-normal field; also the non-watermarked null model.
NoiseField random_noise(const Layout& layout, const Seed256& seed);

// Binary container: "SEALNF01", five u32 LE dims, u32 LE CRC-32 of the
// payload, then f32 LE values. Header is exactly 32 bytes.
void save(const NoiseField& field, const std::filesystem::path& path);
NoiseField load(const std::filesystem::path& path);

constexpr std::size_t kFieldHeaderBytes = 32;

}  // namespace seal
