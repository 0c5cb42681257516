#include "ngfreg/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "ngfreg/errors.hpp"

namespace ngfreg {

Vec2 apply_rigid(const RigidTransform& rt, Vec2 x) {
  const double c = std::cos(rt.angle);
  const double s = std::sin(rt.angle);
  const Vec2 d = x - rt.center;
  return rt.center + Vec2{c * d.x - s * d.y, s * d.x + c * d.y} + rt.translation;
}

AffineTransform rigid_to_affine(const RigidTransform& rt) {
  const double c = std::cos(rt.angle);
  const double s = std::sin(rt.angle);
  // y = R x + (center - R center + t)
  const Vec2 rc{c * rt.center.x - s * rt.center.y, s * rt.center.x + c * rt.center.y};
  const Vec2 off = rt.center - rc + rt.translation;
  return AffineTransform{{c, -s, off.x, s, c, off.y}};
}

BSplineField::BSplineField(GridSize grid, Rect domain) : grid_(grid), domain_(domain) {
  if (grid.nx < 2 || grid.ny < 2) throw InvalidInput("B-spline grid needs at least 2 points per axis");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw InvalidInput("B-spline domain must have positive extent");
  coefficients_.assign(2 * point_count(), 0.0);
}

void BSplineField::set_coefficients(std::span<const double> c) {
  if (c.size() != coefficients_.size()) throw InvalidInput("coefficient count mismatch");
  std::copy(c.begin(), c.end(), coefficients_.begin());
}

Vec2 BSplineField::coefficient(int kx, int ky) const {
  const std::size_t k = static_cast<std::size_t>(ky) * grid_.nx + kx;
  return {coefficients_[k], coefficients_[point_count() + k]};
}

void BSplineField::set_coefficient(int kx, int ky, Vec2 value) {
  const std::size_t k = static_cast<std::size_t>(ky) * grid_.nx + kx;
  coefficients_[k] = value.x;
  coefficients_[point_count() + k] = value.y;
}

Vec2 BSplineField::control_point(int kx, int ky) const {
  return {domain_.min.x + kx * cell_width(), domain_.min.y + ky * cell_height()};
}

namespace {

inline void tent(double coord, double lo, double cell, int m, int& index, double& weight) {
  const double t = (coord - lo) / cell;
  const int k = std::clamp(static_cast<int>(std::floor(t)), 0, m - 2);
  index = k;
  weight = t - k;
}

}  // namespace

Vec2 BSplineField::displacement(Vec2 x) const {
  int kx, ky;
  double wx, wy;
  tent(x.x, domain_.min.x, cell_width(), grid_.nx, kx, wx);
  tent(x.y, domain_.min.y, cell_height(), grid_.ny, ky, wy);
  const std::size_t n = point_count();
  const std::size_t k00 = static_cast<std::size_t>(ky) * grid_.nx + kx;
  const std::size_t k10 = k00 + grid_.nx;
  Vec2 u;
  for (int c = 0; c < 2; ++c) {
    const double* q = coefficients_.data() + c * n;
    const double v = (1.0 - wy) * ((1.0 - wx) * q[k00] + wx * q[k00 + 1]) +
                     wy * ((1.0 - wx) * q[k10] + wx * q[k10 + 1]);
    (c == 0 ? u.x : u.y) = v;
  }
  return u;
}

AxisStencil BSplineField::stencil_x(std::span<const double> xs) const {
  AxisStencil s;
  s.index.resize(xs.size());
  s.weight.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    tent(xs[i], domain_.min.x, cell_width(), grid_.nx, s.index[i], s.weight[i]);
  return s;
}

AxisStencil BSplineField::stencil_y(std::span<const double> ys) const {
  AxisStencil s;
  s.index.resize(ys.size());
  s.weight.resize(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i)
    tent(ys[i], domain_.min.y, cell_height(), grid_.ny, s.index[i], s.weight[i]);
  return s;
}

Vec2 apply_bspline(const BSplineField& bf, Vec2 x) { return x + bf.displacement(x); }

Vec2 compose_affine_bspline(const AffineTransform& at, const BSplineField& bf, Vec2 x) {
  return apply_affine(at, x) + bf.displacement(x);
}

BSplineField prolong(const BSplineField& bf, GridSize new_grid) {
  if (new_grid.nx < bf.grid().nx || new_grid.ny < bf.grid().ny)
    throw InvalidInput("prolongation cannot coarsen the control grid");
  BSplineField out(new_grid, bf.domain());
  for (int ky = 0; ky < new_grid.ny; ++ky)
    for (int kx = 0; kx < new_grid.nx; ++kx)
      out.set_coefficient(kx, ky, bf.displacement(out.control_point(kx, ky)));
  return out;
}

Vec2 invert_point(const ComposedTransform& y, Vec2 target, int max_iterations, double tolerance) {
  const auto& a = y.affine.a;
  const double det = y.affine.determinant();
  if (det == 0.0) throw InvalidInput("affine part is singular; cannot invert");
  auto solve_affine = [&](Vec2 z) {
    const Vec2 r{z.x - a[2], z.y - a[5]};
    return Vec2{(a[4] * r.x - a[1] * r.y) / det, (-a[3] * r.x + a[0] * r.y) / det};
  };
  Vec2 x = solve_affine(target);
  if (!y.field) return x;
  for (int it = 0; it < max_iterations; ++it) {
    const Vec2 next = solve_affine(target - y.field->displacement(x));
    const double step = norm(next - x);
    x = next;
    if (step <= tolerance * (1.0 + norm(x))) break;
  }
  return x;
}

}  // namespace ngfreg
