#pragma once

#include <filesystem>
#include <istream>
#include <vector>

#include "ngfreg/geometry.hpp"

namespace ngfreg::io {

/// CSV with header `id,x,y`; coordinates in pixel units of the owning image.
std::vector<Vec2> parse_landmarks(std::istream& in, const std::string& source = "<stream>");
std::vector<Vec2> read_landmarks(const std::filesystem::path& path);
void write_landmarks(const std::filesystem::path& path, const std::vector<Vec2>& points);

/// Continuous pixel coordinates (pixel j covers [j, j+1)) to physical units and back.
std::vector<Vec2> pixels_to_physical(const std::vector<Vec2>& pts, double scale);
std::vector<Vec2> physical_to_pixels(const std::vector<Vec2>& pts, double scale);

}  // namespace ngfreg::io
