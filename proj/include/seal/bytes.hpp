#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seal {

using Seed256 = std::array<std::uint8_t, 32>;

// Appends a 64-bit big-endian encoding. All integer fields that enter a hash
// use this encoding; it is part of the wire contract.
void append_be64(std::vector<std::uint8_t>& out, std::uint64_t value);

std::array<std::uint8_t, 8> be64(std::uint64_t value);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

}  // namespace seal
