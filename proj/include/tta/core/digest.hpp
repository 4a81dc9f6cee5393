#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace tta {

/// 32-byte content hash (SHA-256) identifying an artifact.
using Digest = std::array<std::uint8_t, 32>;

inline std::string to_hex(const Digest& d) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint8_t b : d) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xf]);
    }
    return out;
}

}  // namespace tta
