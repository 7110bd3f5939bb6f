#pragma once

// Model file layout, all integers little-endian:
//
//   "QUILLMDL"                      8 bytes
//   format version                  u32
//   metadata length                 u64
//   metadata                        UTF-8 `key=value` lines, keys sorted
//   parameter count                 u64
//   parameters                      f32 each
//   checksum                        u64, FNV-1a of every preceding byte
//
// Parameter order per family (matrices column-major, kNumClasses rows):
//   nb      log_prior[3], log_present[3 x D], log_absent[3 x D]
//   dt      per node: feature, absent_child, present_child, depth,
//           count_HQ, count_LQ_CLOSE, count_LQ_EDIT, label
//   svm/lr  weights[3 x D], bias[3]
//   model*  per layer: weights[out x in], bias[out]

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "quill/models.hpp"

namespace quill {

inline constexpr std::string_view kModelMagic = "QUILLMDL";
inline constexpr std::uint32_t kModelFormatVersion = 1;

struct ModelArtifact {
    std::uint32_t version = kModelFormatVersion;
    std::map<std::string, std::string> metadata;
    std::vector<float> parameters;

    const std::string& get(const std::string& key) const;
    bool operator==(const ModelArtifact&) const = default;
};

std::string serialize(const ModelArtifact& artifact);
ModelArtifact deserialize(std::string_view bytes);

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path);
ModelArtifact load_model(const std::filesystem::path& path);

/// Parameters plus the family's own metadata (family, dimension, shape,
/// hyperparameters). Callers add provenance keys on top.
ModelArtifact to_artifact(const TrainedModel& model);
TrainedModel from_artifact(const ModelArtifact& artifact);

/// The model as it will be after a save and load: parameters rounded to f32.
TrainedModel canonicalize(const TrainedModel& model);

} // namespace quill
