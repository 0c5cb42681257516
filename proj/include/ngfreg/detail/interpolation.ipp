// Inline bilinear interpolation; included from image.hpp.

#include <cmath>

#include "ngfreg/errors.hpp"

namespace ngfreg {

namespace detail {

// Four neighbouring samples of p (zero outside the image) and the fractional
// position inside their cell. Returns false outside the interpolant support.
inline bool bilinear_cell(const Image& img, Vec2 p, double v[4], double& fx, double& fy) {
  if (!is_finite(p)) throw InvalidInput("interpolation point must be finite");
  const double inv_h = 1.0 / img.spacing;
  const double u = (p.x - img.origin.x) * inv_h - 0.5;
  const double w = (p.y - img.origin.y) * inv_h - 0.5;
  // Support of the zero-padded interpolant is (-1, width) x (-1, height).
  if (!(u > -1.0 && u < img.width && w > -1.0 && w < img.height)) return false;
  // floor() via truncation of a positive value (u, w > -1); avoids a libm call.
  int c0 = static_cast<int>(u + 1.0) - 1;
  int r0 = static_cast<int>(w + 1.0) - 1;
  if (c0 > u) --c0;
  if (r0 > w) --r0;
  fx = u - c0;
  fy = w - r0;
  if (c0 >= 0 && r0 >= 0 && c0 + 1 < img.width && r0 + 1 < img.height) {
    const float* row = img.data.data() + static_cast<std::size_t>(r0) * img.width + c0;
    v[0] = row[0];
    v[1] = row[1];
    v[2] = row[img.width];
    v[3] = row[img.width + 1];
    return true;
  }
  auto at = [&](int r, int c) -> double {
    if (r < 0 || c < 0 || r >= img.height || c >= img.width) return 0.0;
    return img.at(r, c);
  };
  v[0] = at(r0, c0);
  v[1] = at(r0, c0 + 1);
  v[2] = at(r0 + 1, c0);
  v[3] = at(r0 + 1, c0 + 1);
  return true;
}

}  // namespace detail

inline double interpolate(const Image& img, Vec2 p) {
  double v[4], fx, fy;
  if (!detail::bilinear_cell(img, p, v, fx, fy)) return 0.0;
  return (1.0 - fy) * ((1.0 - fx) * v[0] + fx * v[1]) + fy * ((1.0 - fx) * v[2] + fx * v[3]);
}

inline InterpolatedSample interpolate_with_gradient(const Image& img, Vec2 p) {
  double v[4], fx, fy;
  if (!detail::bilinear_cell(img, p, v, fx, fy)) return {};
  const double top = (1.0 - fx) * v[0] + fx * v[1];
  const double bottom = (1.0 - fx) * v[2] + fx * v[3];
  InterpolatedSample s;
  s.value = (1.0 - fy) * top + fy * bottom;
  const double inv_h = 1.0 / img.spacing;
  s.gradient.x = ((1.0 - fy) * (v[1] - v[0]) + fy * (v[3] - v[2])) * inv_h;
  s.gradient.y = (bottom - top) * inv_h;
  return s;
}

}  // namespace ngfreg
