#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>

#include "seal/bytes.hpp"

namespace seal {

// SHA-256 of the concatenation of the given byte spans, in order.
Seed256 sha256(std::initializer_list<std::span<const std::uint8_t>> parts);

Seed256 sha256(std::span<const std::uint8_t> data);

}  // namespace seal
