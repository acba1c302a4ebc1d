#pragma once

#include "seal/bytes.hpp"
#include "seal/noisefield.hpp"

namespace seal {

// Stochastic stand-in for the generation/inversion round trip: the recovered
// field is the original plus isotropic Gaussian error of scale sigma per
// scalar. sigma = 0.4 keeps same-seed patch distances well below the default
// match threshold while unrelated patches stay far above it.
struct ChannelConfig {
  double sigma = 0.4;
  Seed256 rng_seed{};

  void validate() const;
};

// out = field + sigma * eps, eps ~ N(0, I). Error values come from per-patch
// derived substreams, so the result is independent of evaluation order.
NoiseField invert(const NoiseField& field, const ChannelConfig& cfg);

// ROC-AUC of patch L2 distance separating same-seed pairs (one side through
// the channel) from different-seed pairs.
double patch_separation_auc(const ChannelConfig& cfg, const Layout& layout,
                            std::size_t trials);

// Largest tau whose different-seed match rate stays at or below target_fpr,
// estimated from the empirical distance distribution.
double calibrate_tau(const ChannelConfig& cfg, const Layout& layout,
                     double target_fpr, std::size_t trials = 200000);

}  // namespace seal
