#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "quill/sparse_vector.hpp"

namespace quill::testing {

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("quill-test-" + tag + "-" + std::to_string(std::random_device{}()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline SparseBinaryVector random_vector(std::mt19937_64& rng, std::size_t dim, double density) {
    SparseBinaryVector x;
    x.dimension = dim;
    std::bernoulli_distribution on(density);
    for (std::uint32_t i = 0; i < dim; ++i)
        if (on(rng)) x.indices.push_back(i);
    return x;
}

inline QualityLabel random_label(std::mt19937_64& rng) {
    return label_at(std::uniform_int_distribution<std::size_t>(0, kNumClasses - 1)(rng));
}

} // namespace quill::testing
