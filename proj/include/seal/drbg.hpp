#pragma once

#include <cstdint>
#include <span>

#include "seal/bytes.hpp"

namespace seal {

// Deterministic random bit generator, fixed as a wire contract:
//
//   block[k]  = SHA-256(seed || be64(k)),   k = 0, 1, 2, ...   (32 bytes)
//   words     = each block read as four big-endian uint64
//   uniform   = (word >> 11) * 2^-53                            in [0, 1)
//   normals   = Box-Muller on consecutive uniform pairs (u1, u2):
//                 r  = sqrt(-2 ln u1)
//                 z0 = r cos(2 pi u2),  z1 = r sin(2 pi u2)
//               a uniform equal to 0 is remapped to 2^-53 before use.
//
// Every stream position is a pure function of (seed, position).
class Drbg {
 public:
  explicit Drbg(const Seed256& seed);

  double next_uniform();

  // Values are produced strictly in pair order; a single draw caches its
  // partner so interleaved calls stay on the contract sequence.
  double next_normal();

  void fill_normals(std::span<double> out);
  void fill_normals(std::span<float> out);  // f64 normals rounded to f32

  std::uint64_t next_u64();

  // Integer uniform on [0, bound) by rejection, bound >= 1.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  void refill();

  Seed256 seed_;
  std::uint64_t block_counter_ = 0;
  std::uint64_t words_[4];
  int word_index_ = 4;
  double pending_normal_ = 0.0;
  bool has_pending_normal_ = false;
};

// Domain-separated seed derivation: SHA-256(seed || be64(index) || tag).
Seed256 derive_seed(const Seed256& seed, std::uint64_t index, std::uint8_t tag);

// Central tag registry so independent consumers of one master seed can never
// collide on a derived stream.
enum class SeedTag : std::uint8_t {
  channel_patch = 1,    // per-patch inversion error
  trial_vector = 2,     // per-trial semantic vector
  trial_rotation = 3,   // per-trial perturbation direction
  trial_channel = 4,    // per-trial channel seed
  trial_attack = 5,     // per-trial attack randomness
  baseline_pattern = 6, // fixed-key baseline field
  mc_stream = 7,        // generic Monte-Carlo draws
  forgery_pass = 8,     // extra channel passes in forgery modeling
};

inline Seed256 derive_seed(const Seed256& seed, std::uint64_t index, SeedTag tag) {
  return derive_seed(seed, index, static_cast<std::uint8_t>(tag));
}

}  // namespace seal
