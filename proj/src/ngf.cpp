#include "ngfreg/ngf.hpp"

#include <cmath>

#include "ngfreg/errors.hpp"

namespace ngfreg {

namespace {

// Neighbour indices and scale of the one-dimensional difference stencil at
// position `pos` of an axis with `n` samples and stride `stride`.
struct Stencil {
  std::size_t lo, hi;
  double scale;
};

inline Stencil stencil(std::size_t i, int pos, int n, std::size_t stride, double spacing) {
  if (pos == 0) return {i, i + stride, 1.0 / spacing};
  if (pos == n - 1) return {i - stride, i, 1.0 / spacing};
  return {i - stride, i + stride, 0.5 / spacing};
}

// Per-thread scratch buffers so that repeated evaluations do not allocate.
struct Workspace {
  std::vector<Vec2> warped, dt;
  std::vector<double> tw, gx, gy, w, cols;
};

Workspace& workspace() {
  thread_local Workspace ws;
  return ws;
}

template <class T>
std::span<T> scratch(std::vector<T>& v, std::size_t n) {
  if (v.size() < n) v.resize(n);
  return {v.data(), n};
}

}  // namespace

NgfDistance::NgfDistance(const Image& reference, const Image& tmpl, double epsilon)
    : reference_(&reference), template_(&tmpl), epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidInput("NGF epsilon must be positive");
  if (reference.width < 2 || reference.height < 2)
    throw InvalidInput("NGF reference needs at least 2 pixels per axis");
  if (reference.size() != static_cast<std::size_t>(reference.width) * reference.height ||
      tmpl.size() != static_cast<std::size_t>(tmpl.width) * tmpl.height)
    throw InvalidInput("image data length does not match its dimensions");
  reference_gradient_ = ngfreg::gradient(reference);
  const double eps2 = epsilon * epsilon;
  reference_norm2_.resize(reference.size());
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double gx = reference_gradient_.gx[i], gy = reference_gradient_.gy[i];
    reference_norm2_[i] = gx * gx + gy * gy + eps2;
  }
}

std::vector<Vec2> NgfDistance::warp_grid(const RigidTransform& rt) const {
  return warp_grid(rigid_to_affine(rt));
}

std::vector<Vec2> NgfDistance::warp_grid(const AffineTransform& at) const {
  std::vector<Vec2> out(reference_->size());
  fill_grid(at, out);
  return out;
}

void NgfDistance::fill_grid(const AffineTransform& at, std::span<Vec2> out) const {
  const Image& R = *reference_;
  std::size_t i = 0;
  for (int r = 0; r < R.height; ++r)
    for (int c = 0; c < R.width; ++c, ++i) out[i] = apply_affine(at, R.pixel_center(r, c));
}

std::vector<Vec2> NgfDistance::warp_grid(const AffineTransform& at, const BSplineField& bf) const {
  std::vector<Vec2> out(reference_->size());
  fill_grid(at, bf, out);
  return out;
}

void NgfDistance::fill_grid(const AffineTransform& at, const BSplineField& bf,
                            std::span<Vec2> out) const {
  const Image& R = *reference_;
  std::vector<double> xs(R.width), ys(R.height);
  for (int c = 0; c < R.width; ++c) xs[c] = R.pixel_center(0, c).x;
  for (int r = 0; r < R.height; ++r) ys[r] = R.pixel_center(r, 0).y;
  const AxisStencil sx = bf.stencil_x(xs);
  const AxisStencil sy = bf.stencil_y(ys);
  const auto coef = bf.coefficients();
  const std::size_t n = bf.point_count();
  const int m1 = bf.grid().nx;

  std::size_t i = 0;
  for (int r = 0; r < R.height; ++r) {
    const double wy = sy.weight[r];
    const std::size_t row0 = static_cast<std::size_t>(sy.index[r]) * m1;
    const std::size_t row1 = row0 + m1;
    for (int c = 0; c < R.width; ++c, ++i) {
      const double wx = sx.weight[c];
      const std::size_t k = static_cast<std::size_t>(sx.index[c]);
      const double* u1 = coef.data();
      const double* u2 = coef.data() + n;
      const double d1 = (1.0 - wy) * ((1.0 - wx) * u1[row0 + k] + wx * u1[row0 + k + 1]) +
                        wy * ((1.0 - wx) * u1[row1 + k] + wx * u1[row1 + k + 1]);
      const double d2 = (1.0 - wy) * ((1.0 - wx) * u2[row0 + k] + wx * u2[row0 + k + 1]) +
                        wy * ((1.0 - wx) * u2[row1 + k] + wx * u2[row1 + k + 1]);
      out[i] = apply_affine(at, Vec2{xs[c], ys[r]}) + Vec2{d1, d2};
    }
  }
}

double NgfDistance::evaluate(std::span<const Vec2> warped, std::vector<Vec2>* point_gradient) const {
  const Image& R = *reference_;
  const std::size_t n = R.size();
  if (warped.size() != n) throw InvalidInput("warped grid does not match the reference grid");
  Workspace& ws = workspace();
  const std::span<double> tw = scratch(ws.tw, n);
  std::span<Vec2> dt;
  if (point_gradient) {
    dt = scratch(ws.dt, n);
    for (std::size_t i = 0; i < n; ++i) {
      const InterpolatedSample s = interpolate_with_gradient(*template_, warped[i]);
      tw[i] = s.value;
      dt[i] = s.gradient;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) tw[i] = interpolate(*template_, warped[i]);
  }

  const std::span<double> gx = scratch(ws.gx, n), gy = scratch(ws.gy, n);
  apply_gradient(tw, R.width, R.height, R.spacing, gx, gy);

  const double eps2 = epsilon_ * epsilon_;
  const double h2 = R.spacing * R.spacing;
  const auto& grx = reference_gradient_.gx;
  const auto& gry = reference_gradient_.gy;
  double total = 0.0;
  for (int r = 0; r < R.height; ++r) {
    double row_sum = 0.0;
    const std::size_t base = static_cast<std::size_t>(r) * R.width;
    for (int c = 0; c < R.width; ++c) {
      const std::size_t i = base + c;
      const double num = gx[i] * grx[i] + gy[i] * gry[i] + eps2;
      const double nt = gx[i] * gx[i] + gy[i] * gy[i] + eps2;
      const double nr = reference_norm2_[i];
      const double q = num / (nt * nr);
      row_sum += 1.0 - num * q;
      if (point_gradient) {
        // d/dgT of -num^2 / (nt nr), scaled by h^2; stored in place.
        const double ratio = num / nt;
        const double f = -2.0 * q * h2;
        const double sx = f * (grx[i] - ratio * gx[i]);
        const double sy = f * (gry[i] - ratio * gy[i]);
        gx[i] = sx;
        gy[i] = sy;
      }
    }
    total += row_sum;
  }

  if (point_gradient) {
    const std::span<double> w = scratch(ws.w, n);
    apply_gradient_adjoint(gx, gy, R.width, R.height, R.spacing, w);
    point_gradient->resize(n);
    for (std::size_t i = 0; i < n; ++i) (*point_gradient)[i] = w[i] * dt[i];
  }
  return h2 * total;
}

double NgfDistance::value(std::span<const Vec2> warped) const { return evaluate(warped, nullptr); }
double NgfDistance::value(const RigidTransform& rt) const { return value(rigid_to_affine(rt)); }
double NgfDistance::value(const AffineTransform& at) const {
  const std::span<Vec2> grid = scratch(workspace().warped, reference_->size());
  fill_grid(at, grid);
  return evaluate(grid, nullptr);
}
double NgfDistance::value(const AffineTransform& at, const BSplineField& bf) const {
  const std::span<Vec2> grid = scratch(workspace().warped, reference_->size());
  fill_grid(at, bf, grid);
  return evaluate(grid, nullptr);
}

Eigen::VectorXd NgfDistance::gradient(const RigidTransform& rt) const {
  std::vector<Vec2> pg;
  const std::span<Vec2> grid = scratch(workspace().warped, reference_->size());
  fill_grid(rigid_to_affine(rt), grid);
  evaluate(grid, &pg);
  const Image& R = *reference_;
  const double c = std::cos(rt.angle), s = std::sin(rt.angle);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
  std::size_t i = 0;
  for (int r = 0; r < R.height; ++r) {
    for (int col = 0; col < R.width; ++col, ++i) {
      const Vec2 d = R.pixel_center(r, col) - rt.center;
      const Vec2 dphi{-s * d.x - c * d.y, c * d.x - s * d.y};
      g[0] += dot(pg[i], dphi);
      g[1] += pg[i].x;
      g[2] += pg[i].y;
    }
  }
  return g;
}

Eigen::VectorXd NgfDistance::gradient(const AffineTransform& at) const {
  std::vector<Vec2> pg;
  const std::span<Vec2> grid = scratch(workspace().warped, reference_->size());
  fill_grid(at, grid);
  evaluate(grid, &pg);
  const Image& R = *reference_;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(6);
  std::size_t i = 0;
  for (int r = 0; r < R.height; ++r) {
    for (int c = 0; c < R.width; ++c, ++i) {
      const Vec2 x = R.pixel_center(r, c);
      g[0] += pg[i].x * x.x;
      g[1] += pg[i].x * x.y;
      g[2] += pg[i].x;
      g[3] += pg[i].y * x.x;
      g[4] += pg[i].y * x.y;
      g[5] += pg[i].y;
    }
  }
  return g;
}

std::vector<double> NgfDistance::gradient(const AffineTransform& at, const BSplineField& bf,
                                          double* value) const {
  std::vector<Vec2> pg;
  const std::span<Vec2> grid = scratch(workspace().warped, reference_->size());
  fill_grid(at, bf, grid);
  const double v = evaluate(grid, &pg);
  if (value) *value = v;

  const Image& R = *reference_;
  std::vector<double> xs(R.width), ys(R.height);
  for (int c = 0; c < R.width; ++c) xs[c] = R.pixel_center(0, c).x;
  for (int r = 0; r < R.height; ++r) ys[r] = R.pixel_center(r, 0).y;
  const AxisStencil sx = bf.stencil_x(xs);
  const AxisStencil sy = bf.stencil_y(ys);
  const int m1 = bf.grid().nx;
  const std::size_t np = bf.point_count();

  // Separable transpose of the tensor-product interpolation: rows first.
  std::vector<double> rows(static_cast<std::size_t>(R.height) * m1 * 2, 0.0);
  for (int r = 0; r < R.height; ++r) {
    double* t1 = &rows[static_cast<std::size_t>(r) * m1 * 2];
    double* t2 = t1 + m1;
    const std::size_t base = static_cast<std::size_t>(r) * R.width;
    for (int c = 0; c < R.width; ++c) {
      const Vec2 p = pg[base + c];
      const int k = sx.index[c];
      const double w = sx.weight[c];
      t1[k] += (1.0 - w) * p.x;
      t1[k + 1] += w * p.x;
      t2[k] += (1.0 - w) * p.y;
      t2[k + 1] += w * p.y;
    }
  }
  std::vector<double> g(2 * np, 0.0);
  for (int r = 0; r < R.height; ++r) {
    const double* t1 = &rows[static_cast<std::size_t>(r) * m1 * 2];
    const double* t2 = t1 + m1;
    const std::size_t row0 = static_cast<std::size_t>(sy.index[r]) * m1;
    const std::size_t row1 = row0 + m1;
    const double w = sy.weight[r];
    for (int k = 0; k < m1; ++k) {
      g[row0 + k] += (1.0 - w) * t1[k];
      g[row1 + k] += w * t1[k];
      g[np + row0 + k] += (1.0 - w) * t2[k];
      g[np + row1 + k] += w * t2[k];
    }
  }
  return g;
}

template <int P, class Jacobian>
GaussNewtonSystem NgfDistance::assemble(std::span<const Vec2> warped, Jacobian jac) const {
  static_assert(P >= 1 && P <= 6, "parametric systems have at most six unknowns");
  const Image& R = *reference_;
  const std::size_t n = R.size();
  constexpr std::size_t p = P;

  // cols(i, k) = dT(y_i) / d theta_k = grad T(y_i) . d y_i / d theta_k
  Workspace& ws = workspace();
  const std::span<double> tw = scratch(ws.tw, n), cols = scratch(ws.cols, n * p);
  Vec2 dy[P];
  std::size_t i = 0;
  for (int r = 0; r < R.height; ++r) {
    for (int c = 0; c < R.width; ++c, ++i) {
      const InterpolatedSample s = interpolate_with_gradient(*template_, warped[i]);
      tw[i] = s.value;
      jac(r, c, dy);
      for (std::size_t k = 0; k < p; ++k) cols[i * p + k] = dot(s.gradient, dy[k]);
    }
  }
  const std::span<double> gx = scratch(ws.gx, n), gy = scratch(ws.gy, n);
  apply_gradient(tw, R.width, R.height, R.spacing, gx, gy);

  const double eps2 = epsilon_ * epsilon_;
  const double h2 = R.spacing * R.spacing;
  const auto& grx = reference_gradient_.gx;
  const auto& gry = reference_gradient_.gy;
  double H[P][P] = {};
  double g[P] = {};
  double J[P];
  double total = 0.0;
  const std::size_t W = static_cast<std::size_t>(R.width);
  i = 0;
  for (int r = 0; r < R.height; ++r) {
    const Stencil sy = stencil(static_cast<std::size_t>(r) * W, r, R.height, W, R.spacing);
    for (int c = 0; c < R.width; ++c, ++i) {
      const double num = gx[i] * grx[i] + gy[i] * gry[i] + eps2;
      const double nt = gx[i] * gx[i] + gy[i] * gy[i] + eps2;
      const double nr = reference_norm2_[i];
      const double inv = 1.0 / std::sqrt(nt * nr);
      const double res = num * inv;
      total += 1.0 - res * res;
      const double ratio = num / nt;
      const double ax = (grx[i] - ratio * gx[i]) * inv;
      const double ay = (gry[i] - ratio * gy[i]) * inv;
      const Stencil sx = stencil(i, c, R.width, 1, R.spacing);
      const double* xhi = &cols[sx.hi * p];
      const double* xlo = &cols[sx.lo * p];
      const double* yhi = &cols[(sy.hi + c) * p];
      const double* ylo = &cols[(sy.lo + c) * p];
      const double fx = ax * sx.scale, fy = ay * sy.scale;
      for (std::size_t k = 0; k < p; ++k) J[k] = fx * (xhi[k] - xlo[k]) + fy * (yhi[k] - ylo[k]);
      for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b <= a; ++b) H[a][b] += J[a] * J[b];
        g[a] -= res * J[a];
      }
    }
  }

  GaussNewtonSystem sys;
  sys.value = h2 * total;
  sys.gradient.resize(P);
  sys.hessian.resize(P, P);
  for (std::size_t a = 0; a < p; ++a) {
    sys.gradient[a] = 2.0 * h2 * g[a];
    for (std::size_t b = 0; b <= a; ++b) sys.hessian(a, b) = sys.hessian(b, a) = 2.0 * h2 * H[a][b];
  }
  return sys;
}

GaussNewtonSystem NgfDistance::gauss_newton_system(const RigidTransform& rt) const {
  const Image& R = *reference_;
  const double c = std::cos(rt.angle), s = std::sin(rt.angle);
  const std::span<Vec2> grid = scratch(workspace().warped, R.size());
  fill_grid(rigid_to_affine(rt), grid);
  return assemble<3>(grid, [&](int r, int col, Vec2* dy) {
    const Vec2 d = R.pixel_center(r, col) - rt.center;
    dy[0] = {-s * d.x - c * d.y, c * d.x - s * d.y};
    dy[1] = {1.0, 0.0};
    dy[2] = {0.0, 1.0};
  });
}

GaussNewtonSystem NgfDistance::gauss_newton_system(const AffineTransform& at) const {
  const Image& R = *reference_;
  const std::span<Vec2> grid = scratch(workspace().warped, R.size());
  fill_grid(at, grid);
  return assemble<6>(grid, [&](int r, int col, Vec2* dy) {
    const Vec2 x = R.pixel_center(r, col);
    dy[0] = {x.x, 0.0};
    dy[1] = {x.y, 0.0};
    dy[2] = {1.0, 0.0};
    dy[3] = {0.0, x.x};
    dy[4] = {0.0, x.y};
    dy[5] = {0.0, 1.0};
  });
}

namespace {

NgfDistance make_distance(const Image& R, const Image& T, const NgfParams& p) {
  if (!(p.spacing > 0.0) || !std::isfinite(p.spacing))
    throw InvalidInput("NGF spacing must be positive");
  if (std::abs(p.spacing - R.spacing) > 1e-12 * R.spacing)
    throw InvalidInput("NGF spacing does not match the reference grid");
  return NgfDistance(R, T, p.epsilon);
}

}  // namespace

double ngf_value(const Image& R, const Image& T, const ComposedTransform& y, const NgfParams& p) {
  const NgfDistance d = make_distance(R, T, p);
  return y.field ? d.value(y.affine, *y.field) : d.value(y.affine);
}

double ngf_value(const Image& R, const Image& T, const RigidTransform& y, const NgfParams& p) {
  return make_distance(R, T, p).value(y);
}

Eigen::VectorXd ngf_gradient(const Image& R, const Image& T, const AffineTransform& y,
                             const NgfParams& p) {
  return make_distance(R, T, p).gradient(y);
}

Eigen::VectorXd ngf_gradient(const Image& R, const Image& T, const RigidTransform& y,
                             const NgfParams& p) {
  return make_distance(R, T, p).gradient(y);
}

std::vector<double> ngf_gradient(const Image& R, const Image& T, const AffineTransform& affine,
                                 const BSplineField& field, const NgfParams& p) {
  return make_distance(R, T, p).gradient(affine, field);
}

GaussNewtonSystem gauss_newton_system(const Image& R, const Image& T, const AffineTransform& y,
                                      const NgfParams& p) {
  return make_distance(R, T, p).gauss_newton_system(y);
}

}  // namespace ngfreg
