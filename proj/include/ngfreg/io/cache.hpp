#pragma once

#include <filesystem>
#include <vector>

#include "ngfreg/image.hpp"

namespace ngfreg::io {

/// Multilevel image container. Layout (little-endian):
///
///   char[8]  magic "NGFPYR01"
///   u32      flags (bit 0 grayscaled, bit 1 inverted)
///   u32      level count
///   per level: u32 width, u32 height, f64 spacing, f64 origin x, f64 origin y
///   per level: width * height f32 intensities, row-major
///
/// Levels are stored finest first; spacing is in input pixel units.
struct PyramidCache {
  bool grayscaled = true;
  bool inverted = true;
  std::vector<Image> levels;
};

/// Full pyramid of a preprocessed image down to 2 pixels.
PyramidCache make_cache(const Image& preprocessed);

void write_cache(const std::filesystem::path& path, const PyramidCache& cache);
PyramidCache read_cache(const std::filesystem::path& path);
bool is_cache_file(const std::filesystem::path& path);

/// Decode, preprocess and store `input` as a cache at `output`.
PyramidCache cache_convert(const std::filesystem::path& input, const std::filesystem::path& output);

}  // namespace ngfreg::io
