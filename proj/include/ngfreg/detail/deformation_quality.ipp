#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ngfreg/errors.hpp"

namespace ngfreg {

template <class Transform>
DeformationQuality min_jacobian_and_area_change(const Transform& y, const Lattice& lattice) {
  const int nx = lattice.points.nx;
  const int ny = lattice.points.ny;
  if (nx < 2 || ny < 2) throw InvalidInput("lattice needs at least 2 points per axis");
  const double dx = lattice.domain.width() / (nx - 1);
  const double dy = lattice.domain.height() / (ny - 1);
  if (!(dx > 0.0) || !(dy > 0.0)) throw InvalidInput("lattice domain must have positive extent");

  std::vector<Vec2> prev(nx), cur(nx);
  auto warp_row = [&](int ky, std::vector<Vec2>& out) {
    for (int kx = 0; kx < nx; ++kx)
      out[kx] = y(Vec2{lattice.domain.min.x + kx * dx, lattice.domain.min.y + ky * dy});
  };

  DeformationQuality q;
  q.min_area_ratio = std::numeric_limits<double>::infinity();
  const double cell_area = dx * dy;
  warp_row(0, prev);
  for (int ky = 1; ky < ny; ++ky) {
    warp_row(ky, cur);
    for (int kx = 0; kx + 1 < nx; ++kx) {
      // Counter-clockwise in (x right, y down) index order: p00, p10, p11, p01.
      const Vec2 p[4] = {prev[kx], prev[kx + 1], cur[kx + 1], cur[kx]};
      double twice_area = 0.0;
      for (int i = 0; i < 4; ++i) {
        const Vec2 a = p[i], b = p[(i + 1) % 4];
        twice_area += a.x * b.y - b.x * a.y;
      }
      const double ratio = 0.5 * twice_area / cell_area;
      q.min_area_ratio = std::min(q.min_area_ratio, ratio);
      q.max_area_change_percent = std::max(q.max_area_change_percent, std::abs(ratio - 1.0) * 100.0);
    }
    std::swap(prev, cur);
  }
  return q;
}

}  // namespace ngfreg
