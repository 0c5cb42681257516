#include "ngfreg/io/render.hpp"

#include <algorithm>

#include "ngfreg/errors.hpp"

namespace ngfreg::io {

Image resample(const Image& tmpl, const ComposedTransform& y, int width, int height,
               double spacing) {
  if (width < 1 || height < 1 || !(spacing > 0.0)) throw InvalidInput("invalid output grid");
  Image out(width, height, spacing);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      const double v = interpolate(tmpl, y(out.pixel_center(r, c)));
      out.at(r, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  return out;
}

Image checkerboard(const Image& a, const Image& b, int tiles) {
  if (tiles < 1) throw InvalidInput("checkerboard needs at least one tile");
  if (a.width != b.width || a.height != b.height)
    throw InvalidInput("checkerboard images differ in size");
  Image out = a;
  for (int r = 0; r < a.height; ++r) {
    const int ti = static_cast<int>(static_cast<long long>(r) * tiles / a.height);
    for (int c = 0; c < a.width; ++c) {
      const int tj = static_cast<int>(static_cast<long long>(c) * tiles / a.width);
      if ((ti + tj) % 2 == 1) out.at(r, c) = b.at(r, c);
    }
  }
  return out;
}

}  // namespace ngfreg::io
