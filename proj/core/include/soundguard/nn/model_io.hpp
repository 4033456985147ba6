#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "soundguard/nn/model.hpp"

namespace soundguard::nn {

inline constexpr std::uint16_t kModelFormatVersion = 1;

/// Model file layout (little-endian):
///   "SGM1", version u16, header length u32, UTF-8 JSON header (spec,
///   feature binding, CMVN stats, validation threshold, train-config digest),
///   parameter count u32, then per parameter: name length u16, name bytes,
///   rank u8, dims u32 x rank, float32 values.
/// Parameters are stored as float32; a model whose parameters are already
/// float-representable (InitModel, Train) round-trips bit-exactly.
std::vector<std::uint8_t> EncodeModel(const Model& model);

/// Throws Error(kFormat) on bad magic or structure and
/// Error(kUnsupportedVersion) on a version this build cannot read.
Model DecodeModel(std::span<const std::uint8_t> bytes);

void SaveModel(const Model& model, const std::filesystem::path& path);
Model LoadModel(const std::filesystem::path& path);

}  // namespace soundguard::nn
