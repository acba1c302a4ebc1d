#include "seal/drbg.hpp"

#include <cmath>
#include <numbers>

#include "seal/hash.hpp"

namespace seal {

namespace {
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;  // 2^-53
}

Drbg::Drbg(const Seed256& seed) : seed_(seed) {}

void Drbg::refill() {
  auto counter = be64(block_counter_++);
  Seed256 block = sha256({std::span<const std::uint8_t>(seed_),
                          std::span<const std::uint8_t>(counter)});
  for (int w = 0; w < 4; ++w) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v = v << 8 | block[w * 8 + i];
    }
    words_[w] = v;
  }
  word_index_ = 0;
}

std::uint64_t Drbg::next_u64() {
  if (word_index_ == 4) refill();
  return words_[word_index_++];
}

double Drbg::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
}

double Drbg::next_normal() {
  if (has_pending_normal_) {
    has_pending_normal_ = false;
    return pending_normal_;
  }
  double u1 = next_uniform();
  double u2 = next_uniform();
  if (u1 == 0.0) u1 = kTwoPow53Inv;
  if (u2 == 0.0) u2 = kTwoPow53Inv;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  pending_normal_ = r * std::sin(phi);
  has_pending_normal_ = true;
  return r * std::cos(phi);
}

void Drbg::fill_normals(std::span<double> out) {
  for (double& v : out) v = next_normal();
}

void Drbg::fill_normals(std::span<float> out) {
  for (float& v : out) v = static_cast<float>(next_normal());
}

std::uint64_t Drbg::next_below(std::uint64_t bound) {
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

Seed256 derive_seed(const Seed256& seed, std::uint64_t index, std::uint8_t tag) {
  auto idx = be64(index);
  const std::uint8_t tag_byte[1] = {tag};
  return sha256({std::span<const std::uint8_t>(seed),
                 std::span<const std::uint8_t>(idx),
                 std::span<const std::uint8_t>(tag_byte, 1)});
}

}  // namespace seal
