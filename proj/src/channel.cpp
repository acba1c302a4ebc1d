#include "seal/channel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "seal/drbg.hpp"
#include "seal/errors.hpp"
#include "seal/kernels.hpp"
#include "seal/parallel.hpp"
#include "seal/stats.hpp"

namespace seal {

void ChannelConfig::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("channel sigma must be finite and non-negative");
  }
}

NoiseField invert(const NoiseField& field, const ChannelConfig& cfg) {
  cfg.validate();
  field.layout.validate();
  NoiseField out = field;
  if (cfg.sigma == 0.0) return out;

  const std::size_t p = field.layout.patch_len();
  parallel_for(field.layout.num_patches(), [&](std::size_t i) {
    Drbg drbg(derive_seed(cfg.rng_seed, i, SeedTag::channel_patch));
    std::vector<float> patch(p);
    patch_slice(field, i, std::span<float>(patch));
    for (std::size_t k = 0; k < p; ++k) {
      patch[k] = static_cast<float>(static_cast<double>(patch[k]) +
                                    cfg.sigma * drbg.next_normal());
    }
    scatter_patch(out, i, patch);
  });
  return out;
}

namespace {

// One same-seed and one different-seed distance per trial, drawn from real
// patch noise streams so the DRBG path is exercised end to end.
void sample_pair_distances(const ChannelConfig& cfg, const Layout& layout,
                           std::size_t trials, std::vector<double>* same_seed,
                           std::vector<double>* different_seed) {
  const std::size_t p = layout.patch_len();
  same_seed->assign(trials, 0.0);
  different_seed->assign(trials, 0.0);
  parallel_for(trials, [&](std::size_t t) {
    const Seed256 trial_seed = derive_seed(cfg.rng_seed, t, SeedTag::mc_stream);
    Drbg noise(derive_seed(trial_seed, 0, SeedTag::channel_patch));
    std::vector<float> original(p), inverted(p), unrelated(p);
    Drbg a(derive_seed(trial_seed, 1, SeedTag::mc_stream));
    Drbg b(derive_seed(trial_seed, 2, SeedTag::mc_stream));
    a.fill_normals(std::span<float>(original));
    b.fill_normals(std::span<float>(unrelated));
    for (std::size_t k = 0; k < p; ++k) {
      inverted[k] = static_cast<float>(static_cast<double>(original[k]) +
                                       cfg.sigma * noise.next_normal());
    }
    (*same_seed)[t] = std::sqrt(kernels::l2_distance_sq(original, inverted));
    (*different_seed)[t] =
        std::sqrt(kernels::l2_distance_sq(unrelated, inverted));
  });
}

}  // namespace

double patch_separation_auc(const ChannelConfig& cfg, const Layout& layout,
                            std::size_t trials) {
  cfg.validate();
  layout.validate();
  if (trials < 1000) {
    throw ValidationError("patch_separation_auc needs at least 1000 trials");
  }
  std::vector<double> same, diff;
  sample_pair_distances(cfg, layout, trials, &same, &diff);
  // Distance classifies "different seed", so it is the positive score.
  return roc_auc(diff, same);
}

double calibrate_tau(const ChannelConfig& cfg, const Layout& layout,
                     double target_fpr, std::size_t trials) {
  cfg.validate();
  layout.validate();
  if (!(target_fpr > 0.0 && target_fpr < 1.0)) {
    throw ValidationError("target_fpr must lie in (0, 1)");
  }
  if (static_cast<double>(trials) * target_fpr < 1.0) {
    throw ValidationError("target_fpr unreachable at this trial count; increase trials");
  }
  std::vector<double> same, diff;
  sample_pair_distances(cfg, layout, trials, &same, &diff);
  std::sort(diff.begin(), diff.end());
  const auto k = static_cast<std::size_t>(static_cast<double>(trials) * target_fpr);
  return diff[std::min(k, trials - 1)];
}

}  // namespace seal
