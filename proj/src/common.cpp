#include "quill/baselines.hpp"
#include "quill/error.hpp"
#include "quill/prediction.hpp"

namespace quill {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Label: return "label";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Format: return "format";
    case ErrorKind::Checksum: return "checksum";
    case ErrorKind::Mismatch: return "mismatch";
    case ErrorKind::Config: return "config";
    }
    return "unknown";
}

std::size_t common_dimension(std::span<const LabeledVector> data) {
    require(!data.empty(), ErrorKind::InvalidArgument, "training data is empty");
    const std::size_t dim = data.front().x.dimension;
    for (std::size_t i = 0; i < data.size(); ++i)
        require(data[i].x.dimension == dim, ErrorKind::Dimension,
                "sample " + std::to_string(i) + " has dimension " +
                    std::to_string(data[i].x.dimension) + ", expected " + std::to_string(dim));
    return dim;
}

void check_dimension(std::size_t expected, const SparseBinaryVector& x) {
    require(x.dimension == expected, ErrorKind::Dimension,
            "input dimension " + std::to_string(x.dimension) + " does not match model dimension " +
                std::to_string(expected));
}

} // namespace quill
