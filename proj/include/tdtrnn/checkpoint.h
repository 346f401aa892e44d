#pragma once

#include <filesystem>
#include <string>

#include "tdtrnn/model.h"

namespace tdtrnn {

// Binary checkpoint container, little-endian, version 1:
//
//   magic        8 bytes  "TDTRNNCK"
//   version      u32      1
//   config       u64 length + UTF-8 "key=value\n" lines
//   relations    u64 count, then per label: u64 length + bytes (index order)
//   tensors      u64 count, then per tensor:
//                  u64 name length + name, u32 rank, u64 extent per axis,
//                  IEEE-754 binary64 values in row-major order
//
// Loading rebuilds the model from the config and relation list and then
// overwrites every tensor by name; names and shapes must match exactly.
constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(Model& model);
Model deserialize_checkpoint(const std::string& bytes);

// Writes via a temporary file in the same directory and renames it into
// place, so a failed save never leaves a partial checkpoint behind.
void save_checkpoint(Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

std::string config_to_text(const ModelConfig& config);
ModelConfig config_from_text(const std::string& text);

}  // namespace tdtrnn
