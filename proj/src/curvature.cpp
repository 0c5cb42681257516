#include "ngfreg/curvature.hpp"

#include <span>

#include "ngfreg/errors.hpp"

namespace ngfreg {

namespace {

void check_grid(const BSplineField& bf) {
  if (bf.grid().nx < 3 || bf.grid().ny < 3)
    throw InvalidInput("curvature regularizer needs at least 3 control points per axis");
}

// Left node of the 3-point second-difference stencil centred as close to k as possible.
inline int stencil_start(int k, int m) {
  if (k == 0) return 0;
  if (k == m - 1) return m - 3;
  return k - 1;
}

// out = L u on one channel.
void laplacian(std::span<const double> u, int nx, int ny, double hx, double hy,
               std::span<double> out) {
  const double ix = 1.0 / (hx * hx), iy = 1.0 / (hy * hy);
  for (int ky = 0; ky < ny; ++ky) {
    const int sy = stencil_start(ky, ny);
    for (int kx = 0; kx < nx; ++kx) {
      const int sx = stencil_start(kx, nx);
      const std::size_t row = static_cast<std::size_t>(ky) * nx;
      const double dxx = (u[row + sx] - 2.0 * u[row + sx + 1] + u[row + sx + 2]) * ix;
      const double dyy = (u[static_cast<std::size_t>(sy) * nx + kx] -
                          2.0 * u[static_cast<std::size_t>(sy + 1) * nx + kx] +
                          u[static_cast<std::size_t>(sy + 2) * nx + kx]) *
                         iy;
      out[row + kx] = dxx + dyy;
    }
  }
}

// out += scale * L^T v on one channel.
void laplacian_adjoint(std::span<const double> v, int nx, int ny, double hx, double hy,
                       double scale, std::span<double> out) {
  const double ix = scale / (hx * hx), iy = scale / (hy * hy);
  for (int ky = 0; ky < ny; ++ky) {
    const int sy = stencil_start(ky, ny);
    for (int kx = 0; kx < nx; ++kx) {
      const int sx = stencil_start(kx, nx);
      const std::size_t row = static_cast<std::size_t>(ky) * nx;
      const double a = v[row + kx] * ix;
      out[row + sx] += a;
      out[row + sx + 1] -= 2.0 * a;
      out[row + sx + 2] += a;
      const double b = v[row + kx] * iy;
      out[static_cast<std::size_t>(sy) * nx + kx] += b;
      out[static_cast<std::size_t>(sy + 1) * nx + kx] -= 2.0 * b;
      out[static_cast<std::size_t>(sy + 2) * nx + kx] += b;
    }
  }
}

}  // namespace

double curv_value(const BSplineField& bf) {
  check_grid(bf);
  const int nx = bf.grid().nx, ny = bf.grid().ny;
  const std::size_t n = bf.point_count();
  const double hx = bf.cell_width(), hy = bf.cell_height();
  std::vector<double> lap(n);
  double sum = 0.0;
  for (int c = 0; c < 2; ++c) {
    laplacian(bf.coefficients().subspan(c * n, n), nx, ny, hx, hy, lap);
    for (double v : lap) sum += v * v;
  }
  return 0.5 * hx * hy * sum;
}

std::vector<double> curv_gradient(const BSplineField& bf) {
  check_grid(bf);
  const int nx = bf.grid().nx, ny = bf.grid().ny;
  const std::size_t n = bf.point_count();
  const double hx = bf.cell_width(), hy = bf.cell_height();
  std::vector<double> lap(n), grad(2 * n, 0.0);
  for (int c = 0; c < 2; ++c) {
    laplacian(bf.coefficients().subspan(c * n, n), nx, ny, hx, hy, lap);
    laplacian_adjoint(lap, nx, ny, hx, hy, hx * hy, std::span<double>(grad).subspan(c * n, n));
  }
  return grad;
}

}  // namespace ngfreg
