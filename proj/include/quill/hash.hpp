#pragma once

#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>

namespace quill {

/// 64-bit FNV-1a. Used for content hashes and the model file checksum.
class Fnv1a {
public:
    void update(std::span<const unsigned char> bytes) noexcept {
        for (unsigned char b : bytes) {
            state_ ^= b;
            state_ *= 0x100000001b3ULL;
        }
    }
    void update(std::string_view text) noexcept {
        update(std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
    }
    std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(std::string_view text) noexcept {
    Fnv1a h;
    h.update(text);
    return h.digest();
}

inline std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

} // namespace quill
