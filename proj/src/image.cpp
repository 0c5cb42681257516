#include "ngfreg/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ngfreg/errors.hpp"

namespace ngfreg {

Image::Image(int w, int h, double s, Vec2 o) : width(w), height(h), spacing(s), origin(o) {
  if (w < 1 || h < 1) throw InvalidInput("image dimensions must be positive");
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidInput("image spacing must be positive");
  data.assign(static_cast<std::size_t>(w) * h, 0.0f);
}

void Image::validate() const {
  if (width < 1 || height < 1) throw InvalidInput("image dimensions must be positive");
  if (data.size() != static_cast<std::size_t>(width) * height)
    throw InvalidInput("image data length does not match its dimensions");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw InvalidInput("image spacing must be positive");
  if (!is_finite(origin)) throw InvalidInput("image origin must be finite");
  for (float v : data) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
      throw InvalidInput("image intensities must be finite and within [0,1]");
  }
}

Image preprocess(const RawImage& raw) {
  if (raw.width < 1 || raw.height < 1) throw InvalidInput("cannot preprocess an empty image");
  if (raw.channels < 1 || raw.channels > 4) throw InvalidInput("unsupported channel count");
  if (!(raw.max_value > 0.0)) throw InvalidInput("raw image max_value must be positive");
  const std::size_t n = static_cast<std::size_t>(raw.width) * raw.height;
  if (raw.samples.size() != n * raw.channels)
    throw InvalidInput("raw image sample count does not match its dimensions");

  Image out(raw.width, raw.height);
  const double inv_max = 1.0 / raw.max_value;
  for (std::size_t i = 0; i < n; ++i) {
    const float* px = &raw.samples[i * raw.channels];
    double lum = 0.0;
    if (raw.channels >= 3)
      lum = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
    else
      lum = px[0];
    const double v = 1.0 - lum * inv_max;
    out.data[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return out;
}

Image downsample(const Image& img) {
  const int w = (img.width + 1) / 2;
  const int h = (img.height + 1) / 2;
  Image out(w, h, 2.0 * img.spacing, img.origin);
  auto px = [&](int r, int c) {
    return static_cast<double>(img.at(std::min(r, img.height - 1), std::min(c, img.width - 1)));
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double s = px(2 * r, 2 * c) + px(2 * r, 2 * c + 1) + px(2 * r + 1, 2 * c) +
                       px(2 * r + 1, 2 * c + 1);
      out.at(r, c) = static_cast<float>(0.25 * s);
    }
  }
  return out;
}

int halvings_to_fit(int width, int height, int n_max) {
  if (n_max < 2) throw InvalidInput("n_max must be at least 2");
  int k = 0;
  while (std::max(width, height) > n_max) {
    width = (width + 1) / 2;
    height = (height + 1) / 2;
    ++k;
  }
  return k;
}

ImagePyramid build_pyramid_halved(const Image& img, int halvings, int n_level) {
  if (n_level < 1) throw InvalidInput("n_level must be at least 1");
  if (halvings < 0) throw InvalidInput("halvings must be non-negative");
  img.validate();

  Image finest = img;
  for (int k = 0; k < halvings; ++k) finest = downsample(finest);

  std::vector<Image> fine_first;
  fine_first.push_back(std::move(finest));
  while (static_cast<int>(fine_first.size()) < n_level) {
    const Image& last = fine_first.back();
    if ((last.width + 1) / 2 < 2 || (last.height + 1) / 2 < 2) break;
    fine_first.push_back(downsample(last));
  }

  ImagePyramid pyr;
  pyr.levels.assign(std::make_move_iterator(fine_first.rbegin()),
                    std::make_move_iterator(fine_first.rend()));
  return pyr;
}

ImagePyramid build_pyramid(const Image& img, int n_level, int n_max) {
  return build_pyramid_halved(img, halvings_to_fit(img.width, img.height, n_max), n_level);
}

void apply_gradient(std::span<const double> f, int w, int h, double spacing, std::span<double> gx,
                    std::span<double> gy) {
  if (w < 2 || h < 2) throw InvalidInput("gradient needs at least 2 pixels per axis");
  const double c1 = 1.0 / spacing;
  const double c2 = 0.5 / spacing;
  for (int r = 0; r < h; ++r) {
    const std::size_t row = static_cast<std::size_t>(r) * w;
    gx[row] = (f[row + 1] - f[row]) * c1;
    for (int c = 1; c < w - 1; ++c) gx[row + c] = (f[row + c + 1] - f[row + c - 1]) * c2;
    gx[row + w - 1] = (f[row + w - 1] - f[row + w - 2]) * c1;
  }
  const std::size_t W = static_cast<std::size_t>(w);
  for (int c = 0; c < w; ++c) gy[c] = (f[W + c] - f[c]) * c1;
  for (int r = 1; r < h - 1; ++r) {
    const std::size_t row = static_cast<std::size_t>(r) * W;
    for (int c = 0; c < w; ++c) gy[row + c] = (f[row + W + c] - f[row - W + c]) * c2;
  }
  const std::size_t last = static_cast<std::size_t>(h - 1) * W;
  for (int c = 0; c < w; ++c) gy[last + c] = (f[last + c] - f[last - W + c]) * c1;
}

void apply_gradient_adjoint(std::span<const double> gx, std::span<const double> gy, int w, int h,
                            double spacing, std::span<double> out) {
  if (w < 2 || h < 2) throw InvalidInput("gradient needs at least 2 pixels per axis");
  const double c1 = 1.0 / spacing;
  const double c2 = 0.5 / spacing;
  std::fill(out.begin(), out.end(), 0.0);
  for (int r = 0; r < h; ++r) {
    const std::size_t row = static_cast<std::size_t>(r) * w;
    out[row + 1] += gx[row] * c1;
    out[row] -= gx[row] * c1;
    for (int c = 1; c < w - 1; ++c) {
      out[row + c + 1] += gx[row + c] * c2;
      out[row + c - 1] -= gx[row + c] * c2;
    }
    out[row + w - 1] += gx[row + w - 1] * c1;
    out[row + w - 2] -= gx[row + w - 1] * c1;
  }
  const std::size_t W = static_cast<std::size_t>(w);
  for (int c = 0; c < w; ++c) {
    out[W + c] += gy[c] * c1;
    out[c] -= gy[c] * c1;
  }
  for (int r = 1; r < h - 1; ++r) {
    const std::size_t row = static_cast<std::size_t>(r) * W;
    for (int c = 0; c < w; ++c) {
      out[row + W + c] += gy[row + c] * c2;
      out[row - W + c] -= gy[row + c] * c2;
    }
  }
  const std::size_t last = static_cast<std::size_t>(h - 1) * W;
  for (int c = 0; c < w; ++c) {
    out[last + c] += gy[last + c] * c1;
    out[last - W + c] -= gy[last + c] * c1;
  }
}

GradientField gradient(const Image& img) {
  if (img.width < 2 || img.height < 2)
    throw InvalidInput("gradient needs at least 2 pixels per axis");
  GradientField g;
  g.width = img.width;
  g.height = img.height;
  std::vector<double> f(img.data.begin(), img.data.end());
  g.gx.resize(f.size());
  g.gy.resize(f.size());
  apply_gradient(f, img.width, img.height, img.spacing, g.gx, g.gy);
  return g;
}

Vec2 center_of_mass(const Image& img) {
  double mass = 0.0, mx = 0.0, my = 0.0;
  for (int r = 0; r < img.height; ++r) {
    double row_mass = 0.0, row_mx = 0.0;
    for (int c = 0; c < img.width; ++c) {
      const double m = img.at(r, c);
      row_mass += m;
      row_mx += m * (c + 0.5);
    }
    mass += row_mass;
    mx += row_mx;
    my += row_mass * (r + 0.5);
  }
  if (!(mass > 0.0)) throw DegenerateMass("image has no mass; center of mass undefined");
  return {img.origin.x + mx / mass * img.spacing, img.origin.y + my / mass * img.spacing};
}

}  // namespace ngfreg
