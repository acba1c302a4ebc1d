#include "seal/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seal/drbg.hpp"
#include "seal/errors.hpp"
#include "seal/kernels.hpp"

namespace seal {

void CatAttackSpec::validate() const {
  if (!(min_scale >= 0.0 && max_scale <= 1.0 && min_scale <= max_scale)) {
    throw ValidationError("cat attack scales must satisfy 0 <= min <= max <= 1");
  }
}

CatAttackResult cat_attack(const NoiseField& recovered, const CatAttackSpec& spec,
                           const ChannelConfig& channel) {
  spec.validate();
  channel.validate();
  recovered.layout.validate();
  const Layout& L = recovered.layout;

  Drbg drbg(spec.rng_seed);
  const double scale_r =
      spec.min_scale + (spec.max_scale - spec.min_scale) * drbg.next_uniform();
  const double scale_c =
      spec.min_scale + (spec.max_scale - spec.min_scale) * drbg.next_uniform();

  PatchRect rect;
  rect.rows = static_cast<std::uint32_t>(std::lround(scale_r * L.patch_rows));
  rect.cols = static_cast<std::uint32_t>(std::lround(scale_c * L.patch_cols));
  rect.rows = std::min(rect.rows, L.patch_rows);
  rect.cols = std::min(rect.cols, L.patch_cols);

  CatAttackResult result;
  result.field = recovered;
  if (rect.area() == 0) {
    result.rect = rect;
    return result;
  }
  rect.row0 = static_cast<std::uint32_t>(
      drbg.next_below(L.patch_rows - rect.rows + 1));
  rect.col0 = static_cast<std::uint32_t>(
      drbg.next_below(L.patch_cols - rect.cols + 1));
  result.rect = rect;

  // Foreign content inverts to unrelated noise plus the usual inversion
  // error, i.e. a fresh sample pushed through the channel.
  const std::size_t p = L.patch_len();
  std::vector<float> foreign(p);
  for (std::uint32_t r = rect.row0; r < rect.row0 + rect.rows; ++r) {
    for (std::uint32_t c = rect.col0; c < rect.col0 + rect.cols; ++c) {
      const std::size_t patch = static_cast<std::size_t>(r) * L.patch_cols + c;
      for (std::size_t k = 0; k < p; ++k) {
        const double fresh = drbg.next_normal();
        foreign[k] =
            static_cast<float>(fresh + channel.sigma * drbg.next_normal());
      }
      scatter_patch(result.field, patch, foreign);
    }
  }
  return result;
}

ForgedSample forgery_reuse(const NoiseField& original, const ChannelConfig& cfg,
                           SemanticVector v_attack, int channel_passes) {
  cfg.validate();
  validate(v_attack);
  if (channel_passes < 1) {
    throw ValidationError("forgery modeling needs at least one channel pass");
  }
  ForgedSample sample;
  sample.field = original;
  for (int pass = 0; pass < channel_passes; ++pass) {
    ChannelConfig pass_cfg = cfg;
    pass_cfg.rng_seed = derive_seed(cfg.rng_seed,
                                    static_cast<std::uint64_t>(pass),
                                    SeedTag::forgery_pass);
    sample.field = invert(sample.field, pass_cfg);
  }
  sample.detector_vector = std::move(v_attack);
  return sample;
}

NoiseField steg_average(std::span<const NoiseField> fields) {
  if (fields.empty()) {
    throw ValidationError("averaging needs at least one field");
  }
  const Layout layout = fields.front().layout;
  for (const NoiseField& f : fields) {
    if (!(f.layout == layout)) {
      throw ValidationError("averaged fields must share a layout");
    }
  }
  NoiseField estimate;
  estimate.layout = layout;
  estimate.values.assign(layout.field_len(), 0.0f);
  const float weight = 1.0f / static_cast<float>(fields.size());
  for (const NoiseField& f : fields) {
    kernels::axpy(weight, f.values, estimate.values);
  }
  return estimate;
}

NoiseField apply_subtraction(const NoiseField& recovered,
                             const NoiseField& estimate, double strength) {
  if (!(recovered.layout == estimate.layout)) {
    throw ValidationError("subtraction needs matching layouts");
  }
  NoiseField out = recovered;
  kernels::axpy(static_cast<float>(-strength), estimate.values, out.values);
  return out;
}

NoiseField erase_fraction(const NoiseField& recovered, double fraction,
                          const Seed256& rng_seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ValidationError("erase fraction must lie in [0, 1]");
  }
  recovered.layout.validate();
  const Layout& L = recovered.layout;
  const std::size_t n = L.num_patches();
  const auto count = static_cast<std::size_t>(
      std::lround(fraction * static_cast<double>(n)));

  NoiseField out = recovered;
  if (count == 0) return out;

  // Partial Fisher-Yates picks `count` distinct patches.
  Drbg drbg(rng_seed);
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  const std::size_t p = L.patch_len();
  std::vector<float> fresh(p);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t pick = k + drbg.next_below(n - k);
    std::swap(indices[k], indices[pick]);
    drbg.fill_normals(std::span<float>(fresh));
    scatter_patch(out, indices[k], fresh);
  }
  return out;
}

}  // namespace seal
