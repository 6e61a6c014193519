#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace ghim {

using Hash256 = std::array<std::uint8_t, 32>;
using Preimage = std::array<std::uint8_t, 32>;

Hash256 sha256(std::span<const std::uint8_t> data);
Hash256 sha256(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Parses exactly 32 bytes of hex; nullopt on bad length or digit.
std::optional<std::array<std::uint8_t, 32>> hex32(std::string_view hex);

std::string base64_encode(std::string_view bytes);
/// Strict standard-alphabet base64 with padding; nullopt when malformed.
std::optional<std::string> base64_decode(std::string_view text);

}  // namespace ghim
