#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include "ngfreg/errors.hpp"
#include "ngfreg/evaluation.hpp"
#include "ngfreg/io/cache.hpp"
#include "ngfreg/io/config_file.hpp"
#include "ngfreg/io/image_io.hpp"
#include "ngfreg/io/landmarks.hpp"
#include "ngfreg/io/render.hpp"
#include "ngfreg/io/reports.hpp"
#include "ngfreg/io/transform_file.hpp"
#include "ngfreg/pipeline.hpp"

namespace ngfreg::cli {

namespace fs = std::filesystem;

namespace {

void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) throw IoError(std::string(what) + " not found: " + p.string());
}

int steps_from(const std::string& s) {
  if (s == "1") return 1;
  if (s == "12") return 2;
  if (s == "123") return 3;
  throw InvalidInput("--steps must be 1, 12 or 123");
}

// Worst area change of the composed transform, sampled at twice the control
// grid resolution so that folds inside a control cell are seen.
DeformationQuality quality_of(const ComposedTransform& y, const Rect& domain) {
  GridSize pts{33, 33};
  if (y.field) pts = {2 * y.field->grid().nx - 1, 2 * y.field->grid().ny - 1};
  return min_jacobian_and_area_change(y, Lattice{domain, pts});
}

}  // namespace

int run_register(const RegisterOptions& o) {
  const int steps = steps_from(o.steps);
  require_file(o.reference, "reference image");
  require_file(o.templ, "template image");
  if (o.landmarks) require_file(*o.landmarks, "landmark file");
  if (o.template_landmarks) require_file(*o.template_landmarks, "template landmark file");
  if (o.template_landmarks && !o.landmarks)
    throw InvalidInput("--template-landmarks requires --landmarks");

  const PipelineConfig cfg = o.config ? io::read_config(*o.config) : PipelineConfig::defaults();
  const Image R = io::load_image(o.reference);
  const Image T = io::load_image(o.templ);
  // Parse landmark files before the (long) registration so that bad input fails fast.
  std::vector<Vec2> ref_lm, tmpl_lm;
  if (o.landmarks) ref_lm = io::read_landmarks(*o.landmarks);
  if (o.template_landmarks) tmpl_lm = io::read_landmarks(*o.template_landmarks);

  fs::create_directories(o.out);
  const RegistrationResult result = register_images(R, T, cfg, steps);
  io::write_transform(o.out / "transform.ngft", io::to_transform_file(result));
  {
    std::ofstream rep(o.out / "report.txt", std::ios::trunc);
    rep << io::format_run_report(result, cfg);
    if (!rep) throw IoError("cannot write report.txt");
  }
  for (const StepReport& r : result.reports)
    for (const std::string& s : r.stop_reasons)
      if (s == "stalled") {
        std::cerr << "warning: " << r.name << " stalled in a line search; result kept\n";
        break;
      }

  if (o.landmarks) {
    const double scale = result.physical_scale;
    const ComposedTransform y = result.transform();
    const LandmarkSet ref{io::pixels_to_physical(ref_lm, scale),
                          Vec2{double(R.width), double(R.height)} * scale};
    const LandmarkSet warped = warp_landmarks(y, ref);
    io::write_landmarks(o.out / "warped_landmarks.csv", io::physical_to_pixels(warped.points, scale));

    if (o.template_landmarks) {
      const Vec2 extent{double(T.width), double(T.height)};
      const LandmarkSet target{tmpl_lm, extent};
      const LandmarkSet warped_px{io::physical_to_pixels(warped.points, scale), extent};
      const LandmarkSet initial_px{ref_lm, extent};
      MetricsReport m = make_report({mrtre(warped_px, target)}, {mrtre(initial_px, target)});
      const DeformationQuality q = quality_of(y, Rect{{0.0, 0.0}, ref.extent});
      m.max_area_change_percent = q.max_area_change_percent;
      m.min_jacobian = q.min_area_ratio;
      io::write_metrics(o.out / "metrics.json", m);
    }
  }
  std::cout << "registered " << o.templ.string() << " onto " << o.reference.string() << " ("
            << result.steps_run << " step" << (result.steps_run > 1 ? "s" : "") << "), output in "
            << o.out.string() << "\n";
  return 0;
}

int run_transform(const TransformOptions& o) {
  if (o.image.has_value() == o.landmarks.has_value())
    throw InvalidInput("exactly one of --image and --landmarks is required");
  require_file(o.transform, "transform file");
  const io::TransformFile tf = io::read_transform(o.transform);
  const ComposedTransform y = tf.composed();
  const double scale = tf.physical_scale;

  if (o.landmarks) {
    if (o.checkerboard > 0) throw InvalidInput("--checkerboard applies to images only");
    require_file(*o.landmarks, "landmark file");
    const auto pts = io::pixels_to_physical(io::read_landmarks(*o.landmarks), scale);
    const LandmarkSet in{pts, Vec2{1.0, 1.0}};
    const LandmarkSet out = o.inverse ? warp_landmarks_inverse(y, in) : warp_landmarks(y, in);
    io::write_landmarks(o.out, io::physical_to_pixels(out.points, scale));
    return 0;
  }

  require_file(*o.image, "image");
  Image T = io::load_image(*o.image);
  if (T.width != tf.template_width || T.height != tf.template_height)
    throw InvalidInput("image is " + std::to_string(T.width) + "x" + std::to_string(T.height) +
                       " but the transform expects a " + std::to_string(tf.template_width) + "x" +
                       std::to_string(tf.template_height) + " template");
  T.spacing = scale;
  const Image warped = io::resample(T, y, tf.reference_width, tf.reference_height, scale);
  if (o.checkerboard > 0) {
    if (!o.reference) throw InvalidInput("--checkerboard requires --reference");
    require_file(*o.reference, "reference image");
    Image R = io::load_image(*o.reference);
    if (R.width != tf.reference_width || R.height != tf.reference_height)
      throw InvalidInput("reference size does not match the transform");
    R.spacing = scale;
    io::write_png(o.out, io::checkerboard(R, warped, o.checkerboard));
  } else {
    io::write_png(o.out, warped);
  }
  return 0;
}

int run_evaluate(const EvaluateOptions& o) {
  require_file(o.pairs, "manifest");
  const MetricsReport m = io::evaluate_manifest(io::read_manifest(o.pairs));
  if (o.out)
    io::write_metrics(*o.out, m);
  else
    std::cout << io::metrics_to_json(m);
  return 0;
}

int run_convert(const ConvertOptions& o) {
  require_file(o.input, "input image");
  const io::PyramidCache c = io::cache_convert(o.input, o.output);
  std::cout << "wrote " << c.levels.size() << " levels to " << o.output.string() << "\n";
  return 0;
}

}  // namespace ngfreg::cli
