#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace soundguard {

/// Writes to a sibling temp file, then renames over `path`. Readers never
/// observe a partially written file.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);

std::string ReadFile(const std::filesystem::path& path);

}  // namespace soundguard
