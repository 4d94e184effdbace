#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace owc {

// FIPS 180-4 SHA-256, used only for content-addressing the channel cache.
std::array<std::uint8_t, 32> sha256(std::string_view data);

std::string sha256_hex(std::string_view data);

}  // namespace owc
