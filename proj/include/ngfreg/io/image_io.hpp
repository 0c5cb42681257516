#pragma once

#include <filesystem>

#include "ngfreg/image.hpp"

namespace ngfreg::io {

/// Decode a PNG/TIFF/JPEG file. Channels are returned in RGB(A) order.
RawImage read_raw_image(const std::filesystem::path& path);

/// Load a registration input: either a pyramid cache (finest level) or a
/// decodable image, which is preprocessed. The result is in pixel units.
Image load_image(const std::filesystem::path& path);

/// Write intensities as 8-bit gray PNG. With `restore_contrast` the
/// inversion applied by preprocess() is undone so tissue appears dark on white.
void write_png(const std::filesystem::path& path, const Image& img, bool restore_contrast = true);

/// Write an 8-bit RGB or gray raw image (for tests and tools).
void write_raw_png(const std::filesystem::path& path, const RawImage& raw);

}  // namespace ngfreg::io
