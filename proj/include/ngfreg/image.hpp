#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ngfreg/geometry.hpp"

namespace ngfreg {

/// 2D scalar image on a uniform grid.
///
/// Pixel (row i, column j) has its center at
/// `origin + ((j + 0.5) * spacing, (i + 0.5) * spacing)`, so `origin` is the
/// physical corner of the image domain. Intensities are expected in [0, 1]
/// with background at 0 (see preprocess()).
struct Image {
  int width = 0;
  int height = 0;
  double spacing = 1.0;
  Vec2 origin{};
  std::vector<float> data;

  Image() = default;
  Image(int width, int height, double spacing = 1.0, Vec2 origin = {});

  std::size_t size() const { return data.size(); }
  float at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }
  float& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }

  Vec2 pixel_center(int row, int col) const {
    return {origin.x + (col + 0.5) * spacing, origin.y + (row + 0.5) * spacing};
  }
  Vec2 extent() const { return {width * spacing, height * spacing}; }
  Rect domain() const { return {origin, origin + extent()}; }

  /// Throws InvalidInput unless sizes, spacing and intensities are consistent.
  void validate() const;
};

/// Decoded image before preprocessing: interleaved channels in [0, max_value].
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 gray, 2 gray+alpha, 3 RGB, 4 RGBA
  double max_value = 255.0;
  std::vector<float> samples;
};

/// Gray conversion (0.299, 0.587, 0.114 luminance) followed by inversion, so
/// white slide background maps to 0. Output has spacing 1 and origin 0.
Image preprocess(const RawImage& raw);

/// Multilevel representation, coarsest level first.
struct ImagePyramid {
  std::vector<Image> levels;

  std::size_t level_count() const { return levels.size(); }
  const Image& coarsest() const { return levels.front(); }
  const Image& finest() const { return levels.back(); }
};

/// 2x2 box filter with edge replication for odd sizes; spacing doubles.
Image downsample(const Image& img);

/// Number of halvings needed until max(width, height) <= n_max.
int halvings_to_fit(int width, int height, int n_max);

/// Pyramid whose finest level is `img` halved until it fits into n_max
/// (never upsampled) and which has at most n_level levels; coarsening stops
/// before a dimension would drop below 2 pixels.
ImagePyramid build_pyramid(const Image& img, int n_level, int n_max);

/// Same as build_pyramid() with an explicit number of initial halvings.
ImagePyramid build_pyramid_halved(const Image& img, int halvings, int n_level);

/// Bilinear interpolation between pixel centers. Samples outside the image are
/// background (0), so the interpolant fades to 0 within half a pixel beyond
/// the outermost centers and is continuous everywhere.
inline double interpolate(const Image& img, Vec2 p);

struct InterpolatedSample {
  double value = 0.0;
  Vec2 gradient{};
};

/// Interpolated value together with the gradient of the interpolant.
inline InterpolatedSample interpolate_with_gradient(const Image& img, Vec2 p);

struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> gx;
  std::vector<double> gy;
};

/// Central differences at interior pixels, one-sided at the border.
GradientField gradient(const Image& img);

/// The discrete gradient operator of gradient() applied to a raw grid.
void apply_gradient(std::span<const double> f, int width, int height, double spacing,
                    std::span<double> gx, std::span<double> gy);

/// Transpose of apply_gradient(): out = Dx^T gx + Dy^T gy.
void apply_gradient_adjoint(std::span<const double> gx, std::span<const double> gy, int width,
                            int height, double spacing, std::span<double> out);

/// Intensity-weighted mean of the pixel centers. Throws DegenerateMass when
/// the image carries no mass.
Vec2 center_of_mass(const Image& img);

}  // namespace ngfreg

#include "ngfreg/detail/interpolation.ipp"
