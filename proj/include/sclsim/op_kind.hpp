#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace sclsim {

/// Byte-level operation tags emitted by the traced DUT.
enum class OpKind : std::uint8_t {
  sbox_out = 0,
  addroundkey_out = 1,
  mixcolumns_out = 2,
  load = 3,
  store = 4,
};

inline constexpr std::size_t kOpKindCount = 5;

inline constexpr std::array<std::string_view, kOpKindCount> kOpKindNames = {
    "sbox_out", "addroundkey_out", "mixcolumns_out", "load", "store"};

constexpr std::string_view to_string(OpKind kind) {
  return kOpKindNames[static_cast<std::size_t>(kind)];
}

inline std::optional<OpKind> parse_op_kind(std::string_view name) {
  for (std::size_t i = 0; i < kOpKindCount; ++i)
    if (kOpKindNames[i] == name) return static_cast<OpKind>(i);
  return std::nullopt;
}

}  // namespace sclsim
