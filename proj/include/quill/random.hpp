#pragma once

// Seeded randomness with fully specified draws. std::mt19937_64 output is fixed
// by the standard, but the std distributions are not, so the two conversions
// below are defined here and used everywhere a reproducible draw is needed.

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace quill {

using Engine = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection on the top of the 64-bit range.
inline std::uint64_t uniform_index(Engine& engine, std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t draw;
    do {
        draw = engine();
    } while (draw >= limit);
    return draw % bound;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// In-place Fisher-Yates, walking from the back.
template <typename T>
void fisher_yates(std::vector<T>& items, Engine& engine) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(engine, i));
        std::swap(items[i - 1], items[j]);
    }
}

inline std::vector<std::size_t> shuffled_indices(std::size_t n, Engine& engine) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    fisher_yates(order, engine);
    return order;
}

} // namespace quill
