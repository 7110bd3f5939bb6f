#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace quill {

/// Question quality class. The integer values are the frozen encoding used by
/// model files, score columns and confusion matrices.
enum class QualityLabel : std::uint8_t {
    HQ = 0,
    LQ_CLOSE = 1,
    LQ_EDIT = 2,
};

inline constexpr std::size_t kNumClasses = 3;

inline constexpr std::array<QualityLabel, kNumClasses> kAllLabels = {
    QualityLabel::HQ, QualityLabel::LQ_CLOSE, QualityLabel::LQ_EDIT};

constexpr std::size_t index_of(QualityLabel label) noexcept {
    return static_cast<std::size_t>(label);
}

constexpr QualityLabel label_at(std::size_t index) noexcept {
    return static_cast<QualityLabel>(index);
}

constexpr std::string_view to_string(QualityLabel label) noexcept {
    switch (label) {
    case QualityLabel::HQ: return "HQ";
    case QualityLabel::LQ_CLOSE: return "LQ_CLOSE";
    case QualityLabel::LQ_EDIT: return "LQ_EDIT";
    }
    return "?";
}

constexpr std::optional<QualityLabel> parse_label(std::string_view text) noexcept {
    for (QualityLabel label : kAllLabels)
        if (to_string(label) == text) return label;
    return std::nullopt;
}

} // namespace quill
