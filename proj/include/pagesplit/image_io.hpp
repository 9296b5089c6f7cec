#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pagesplit/raster.hpp"

namespace pagesplit {

/// Decodes PNG or JPEG bytes. Alpha is dropped. Throws DecodeError.
Raster decode_image(std::span<const std::uint8_t> bytes);

/// Reads and decodes an image file. Throws DecodeError naming the path.
Raster load_raster(const std::filesystem::path& path);

/// 8-bit RGB PNG. Output is deterministic for a given raster.
std::vector<std::uint8_t> encode_png(const Raster& raster);

void save_png(const Raster& raster, const std::filesystem::path& path);

}  // namespace pagesplit
