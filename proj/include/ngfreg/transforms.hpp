#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "ngfreg/geometry.hpp"

namespace ngfreg {

/// y(x) = center + Rot(angle) (x - center) + translation
struct RigidTransform {
  double angle = 0.0;
  Vec2 translation{};
  Vec2 center{};
};

/// y(x) = [[a1, a2], [a4, a5]] x + (a3, a6), stored as a = {a1, ..., a6}.
struct AffineTransform {
  std::array<double, 6> a{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};

  static AffineTransform identity() { return {}; }
  double determinant() const { return a[0] * a[4] - a[1] * a[3]; }
};

Vec2 apply_rigid(const RigidTransform& rt, Vec2 x);
inline Vec2 apply_affine(const AffineTransform& at, Vec2 x) {
  const auto& a = at.a;
  return {a[0] * x.x + a[1] * x.y + a[2], a[3] * x.x + a[4] * x.y + a[5]};
}

/// Affine map equal to `rt` everywhere; the rotation center is folded into
/// the offset.
AffineTransform rigid_to_affine(const RigidTransform& rt);

/// Per-axis cell index and weight of the tent basis for a set of coordinates.
struct AxisStencil {
  std::vector<int> index;      // left control point of the cell, in [0, m - 2]
  std::vector<double> weight;  // weight of index + 1; outside [0,1] when extrapolating
};

/// Displacement u on a uniform control grid spanning `domain`, interpolated
/// with first-order (tent) B-splines, so u is piecewise bilinear.
///
/// Coefficients are planar: all u1 values (row-major over the grid, x fastest)
/// followed by all u2 values.
class BSplineField {
 public:
  BSplineField(GridSize grid, Rect domain);

  GridSize grid() const { return grid_; }
  const Rect& domain() const { return domain_; }
  std::size_t point_count() const { return static_cast<std::size_t>(grid_.nx) * grid_.ny; }
  double cell_width() const { return domain_.width() / (grid_.nx - 1); }
  double cell_height() const { return domain_.height() / (grid_.ny - 1); }

  std::span<double> coefficients() { return coefficients_; }
  std::span<const double> coefficients() const { return coefficients_; }
  void set_coefficients(std::span<const double> c);

  Vec2 coefficient(int kx, int ky) const;
  void set_coefficient(int kx, int ky, Vec2 value);
  Vec2 control_point(int kx, int ky) const;

  /// u(x); outside the control domain the boundary cell's interpolant is used.
  Vec2 displacement(Vec2 x) const;

  AxisStencil stencil_x(std::span<const double> xs) const;
  AxisStencil stencil_y(std::span<const double> ys) const;

 private:
  GridSize grid_;
  Rect domain_;
  std::vector<double> coefficients_;
};

/// x + u(x)
Vec2 apply_bspline(const BSplineField& bf, Vec2 x);

/// apply_affine(at, x) + u(x)
Vec2 compose_affine_bspline(const AffineTransform& at, const BSplineField& bf, Vec2 x);

/// Resample the field onto a finer control grid over the same domain. Exact
/// when (new - 1) is a multiple of (old - 1) on both axes.
BSplineField prolong(const BSplineField& bf, GridSize new_grid);

/// Full registration transform from reference to template coordinates.
struct ComposedTransform {
  AffineTransform affine;
  std::optional<BSplineField> field;

  Vec2 operator()(Vec2 x) const {
    return field ? compose_affine_bspline(affine, *field, x) : apply_affine(affine, x);
  }
};

/// Solve y(x) = target for x by fixed-point iteration on the affine inverse.
/// Intended for the small displacements produced by registration.
Vec2 invert_point(const ComposedTransform& y, Vec2 target, int max_iterations = 50,
                  double tolerance = 1e-12);

struct Lattice {
  Rect domain;
  GridSize points;  // >= 2 per axis
};

struct DeformationQuality {
  double min_area_ratio = 1.0;            // folding iff <= 0
  double max_area_change_percent = 0.0;   // max |ratio - 1| * 100
  bool folded() const { return min_area_ratio <= 0.0; }
};

/// Signed area of the image quadrilateral of every lattice cell relative to
/// the undeformed cell area.
template <class Transform>
DeformationQuality min_jacobian_and_area_change(const Transform& y, const Lattice& lattice);

}  // namespace ngfreg

#include "ngfreg/detail/deformation_quality.ipp"
