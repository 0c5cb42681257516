#pragma once

#include <filesystem>
#include <optional>

#include "ngfreg/pipeline.hpp"
#include "ngfreg/transforms.hpp"

namespace ngfreg::io {

/// Registration result on disk: a text header (doubles as hex floats) ending
/// in an `end_header` line, followed by the B-spline coefficients as raw
/// little-endian f64 values in BSplineField order.
struct TransformFile {
  int steps = 1;
  double physical_scale = 1.0;  // physical length per input pixel
  int reference_width = 0;
  int reference_height = 0;
  int template_width = 0;
  int template_height = 0;
  RigidTransform rigid;
  AffineTransform affine;
  std::optional<BSplineField> field;

  ComposedTransform composed() const;
};

TransformFile to_transform_file(const RegistrationResult& result);
void write_transform(const std::filesystem::path& path, const TransformFile& tf);
TransformFile read_transform(const std::filesystem::path& path);

}  // namespace ngfreg::io
