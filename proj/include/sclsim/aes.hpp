#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sclsim {

using Block = std::array<std::uint8_t, 16>;
using RoundKeys = std::array<Block, 11>;

namespace aes {

std::uint8_t sbox(std::uint8_t x);
std::uint8_t inv_sbox(std::uint8_t x);

/// Multiply by x in GF(2^8) modulo the AES polynomial.
constexpr std::uint8_t xtime(std::uint8_t v) {
  return static_cast<std::uint8_t>((v << 1) ^ ((v & 0x80) ? 0x1b : 0x00));
}

RoundKeys expand_key(const Block& key);

}  // namespace aes

std::string to_hex(const Block& block);
std::optional<Block> parse_hex_block(std::string_view hex);

}  // namespace sclsim
