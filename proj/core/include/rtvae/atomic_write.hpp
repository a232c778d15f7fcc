#pragma once

#include <filesystem>
#include <string_view>

namespace rtvae {

/// Writes `contents` to a sibling temporary file, then renames it over
/// `path`. Readers never observe a partially written file.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

} // namespace rtvae
