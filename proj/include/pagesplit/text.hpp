#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pagesplit {

/// Decodes UTF-8 into code points. Malformed bytes decode to U+FFFD one byte
/// at a time, so every input has a defined length.
std::u32string utf8_decode(std::string_view text);

std::string_view trim(std::string_view text) noexcept;

/// Replaces every occurrence of `from` in `text`.
std::string replace_all(std::string text, std::string_view from, std::string_view to);

/// Throws Error naming the path when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace pagesplit
