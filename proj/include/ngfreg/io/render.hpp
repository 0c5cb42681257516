#pragma once

#include "ngfreg/image.hpp"
#include "ngfreg/transforms.hpp"

namespace ngfreg::io {

/// Resample `tmpl` at y(x) for every pixel center x of a grid of
/// `width` x `height` pixels with the given spacing (origin 0). Both the grid
/// and `tmpl` live in the same physical frame.
Image resample(const Image& tmpl, const ComposedTransform& y, int width, int height,
               double spacing);

/// Spy-view composite: tile (i, j) of an n x n partition shows `a` when
/// i + j is even and `b` otherwise. Images must share their dimensions.
Image checkerboard(const Image& a, const Image& b, int tiles);

}  // namespace ngfreg::io
