#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seal/bytes.hpp"
#include "seal/channel.hpp"
#include "seal/noisefield.hpp"
#include "seal/semantic.hpp"

namespace seal {

// Rectangle of whole patches on the patch grid.
struct PatchRect {
  std::uint32_t row0 = 0;
  std::uint32_t col0 = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;

  bool contains(std::uint32_t r, std::uint32_t c) const {
    return r >= row0 && r < row0 + rows && c >= col0 && c < col0 + cols;
  }
  std::size_t area() const { return static_cast<std::size_t>(rows) * cols; }
};

// Pasted-object tampering: a randomly placed rectangle of the recovered field
// is replaced by unrelated noise passed through the channel, modeling a
// region whose inversion no longer corresponds to any keyed patch. Patches
// outside the rectangle are untouched and the semantic vector is unchanged.
struct CatAttackSpec {
  double min_scale = 0.30;  // fraction of each grid dimension
  double max_scale = 0.60;
  Seed256 rng_seed{};

  void validate() const;
};

struct CatAttackResult {
  NoiseField field;
  PatchRect rect;
};

CatAttackResult cat_attack(const NoiseField& recovered, const CatAttackSpec& spec,
                           const ChannelConfig& channel);

// Watermark transplant by an attacker holding the generator weights: the
// original noise survives an attacker-side inversion and a detector-side
// inversion (two channel passes by default), but detection now runs against
// the unrelated content's semantics.
struct ForgedSample {
  NoiseField field;
  SemanticVector detector_vector;
};

ForgedSample forgery_reuse(const NoiseField& original, const ChannelConfig& cfg,
                           SemanticVector v_attack, int channel_passes = 2);

// Averaging estimator over watermarked fields sharing a salt, and the
// corresponding removal step.
NoiseField steg_average(std::span<const NoiseField> fields);
NoiseField apply_subtraction(const NoiseField& recovered,
                             const NoiseField& estimate, double strength);

// Replaces a uniformly random fraction of patches with fresh unkeyed noise.
NoiseField erase_fraction(const NoiseField& recovered, double fraction,
                          const Seed256& rng_seed);

}  // namespace seal
