#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace screenkit {

// FNV-1a 64-bit. Used for stub-backend request keys, mixture source
// checksums, and stable class colors; stable across platforms and runs.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

inline std::string fnv1a64_hex(std::string_view bytes) { return to_hex(fnv1a64(bytes)); }

}  // namespace screenkit
