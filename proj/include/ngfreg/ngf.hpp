#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "ngfreg/image.hpp"
#include "ngfreg/optimizers.hpp"
#include "ngfreg/transforms.hpp"

namespace ngfreg {

struct NgfParams {
  double epsilon = 0.1;  // edge parameter, intensity per physical length
  double spacing = 1.0;  // pixel size of the evaluation (reference) grid
};

/// Normalized Gradient Fields distance
///
///   NGF = h^2 sum_i 1 - (<gT_i, gR_i> + eps^2)^2 / ((|gT_i|^2 + eps^2)(|gR_i|^2 + eps^2))
///
/// evaluated on the pixel centers x_i of the reference. gT is the discrete
/// gradient of the template resampled at y(x_i) on the reference grid, so the
/// template is warped first and differentiated second.
///
/// Parameter order for rigid transforms is (angle, t1, t2) with a fixed
/// rotation center; for affine transforms (a1, ..., a6); for B-spline fields
/// the planar coefficient layout of BSplineField.
class NgfDistance {
 public:
  NgfDistance(const Image& reference, const Image& tmpl, double epsilon);

  const Image& reference() const { return *reference_; }
  const Image& templ() const { return *template_; }
  double epsilon() const { return epsilon_; }

  /// Value for arbitrary warped positions of the reference pixel centers.
  double value(std::span<const Vec2> warped) const;
  double value(const RigidTransform& rt) const;
  double value(const AffineTransform& at) const;
  double value(const AffineTransform& at, const BSplineField& bf) const;

  Eigen::VectorXd gradient(const RigidTransform& rt) const;
  Eigen::VectorXd gradient(const AffineTransform& at) const;
  /// Gradient over the coefficients of `bf`; the value is returned through `value`.
  std::vector<double> gradient(const AffineTransform& at, const BSplineField& bf,
                               double* value = nullptr) const;

  GaussNewtonSystem gauss_newton_system(const RigidTransform& rt) const;
  GaussNewtonSystem gauss_newton_system(const AffineTransform& at) const;

  std::vector<Vec2> warp_grid(const RigidTransform& rt) const;
  std::vector<Vec2> warp_grid(const AffineTransform& at) const;
  std::vector<Vec2> warp_grid(const AffineTransform& at, const BSplineField& bf) const;

 private:
  void fill_grid(const AffineTransform& at, std::span<Vec2> out) const;
  void fill_grid(const AffineTransform& at, const BSplineField& bf, std::span<Vec2> out) const;
  double evaluate(std::span<const Vec2> warped, std::vector<Vec2>* point_gradient) const;
  template <int P, class Jacobian>
  GaussNewtonSystem assemble(std::span<const Vec2> warped, Jacobian jac) const;

  const Image* reference_;
  const Image* template_;
  double epsilon_;
  GradientField reference_gradient_;
  std::vector<double> reference_norm2_;  // |gR|^2 + eps^2
};

/// Free-function forms. `p.spacing` must match the reference spacing.
double ngf_value(const Image& R, const Image& T, const ComposedTransform& y, const NgfParams& p);
double ngf_value(const Image& R, const Image& T, const RigidTransform& y, const NgfParams& p);

Eigen::VectorXd ngf_gradient(const Image& R, const Image& T, const AffineTransform& y,
                             const NgfParams& p);
Eigen::VectorXd ngf_gradient(const Image& R, const Image& T, const RigidTransform& y,
                             const NgfParams& p);
std::vector<double> ngf_gradient(const Image& R, const Image& T, const AffineTransform& affine,
                                 const BSplineField& field, const NgfParams& p);

GaussNewtonSystem gauss_newton_system(const Image& R, const Image& T, const AffineTransform& y,
                                      const NgfParams& p);

}  // namespace ngfreg
