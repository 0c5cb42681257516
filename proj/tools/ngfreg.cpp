// Command-line front end: register, transform, evaluate, convert.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ngfreg/errors.hpp"

int main(int argc, char** argv) {
  using namespace ngfreg::cli;
  CLI::App app{"ngfreg - multimodal 2D image registration with normalized gradient fields"};
  app.require_subcommand(1);

  RegisterOptions reg;
  auto* r = app.add_subcommand("register", "Register a template image onto a reference image");
  r->add_option("--reference", reg.reference, "Reference image or pyramid cache")->required();
  r->add_option("--template", reg.templ, "Template image or pyramid cache")->required();
  r->add_option("--config", reg.config, "Parameter file (INI style)");
  r->add_option("--out", reg.out, "Output directory")->capture_default_str();
  r->add_option("--landmarks", reg.landmarks, "Reference landmarks (id,x,y in pixels)");
  r->add_option("--template-landmarks", reg.template_landmarks,
                "Template landmarks; enables metrics.json");
  r->add_option("--steps", reg.steps, "Steps to run: 1, 12 or 123")
      ->check(CLI::IsMember({"1", "12", "123"}))
      ->capture_default_str();

  TransformOptions tr;
  auto* t = app.add_subcommand("transform", "Apply a stored transform to an image or landmarks");
  t->add_option("--transform", tr.transform, "Transform file")->required();
  auto* img = t->add_option("--image", tr.image, "Template image to resample onto the reference grid");
  auto* lm = t->add_option("--landmarks", tr.landmarks, "Reference landmarks to map into the template");
  img->excludes(lm);
  t->add_option("--reference", tr.reference, "Reference image for --checkerboard");
  t->add_option("--checkerboard", tr.checkerboard, "Emit an N x N checkerboard composite")
      ->check(CLI::PositiveNumber);
  t->add_flag("--inverse", tr.inverse, "Map template landmarks back into the reference");
  t->add_option("--out", tr.out, "Output PNG or CSV")->required();

  EvaluateOptions ev;
  auto* e = app.add_subcommand("evaluate", "Landmark error metrics over a manifest of pairs");
  e->add_option("--pairs", ev.pairs, "Manifest CSV: warped,target,width,height[,initial]")->required();
  e->add_option("--out", ev.out, "Metrics JSON (default: stdout)");

  ConvertOptions cv;
  auto* c = app.add_subcommand("convert", "Preprocess an image into a pyramid cache");
  c->add_option("input", cv.input, "Input PNG/TIFF/JPEG")->required();
  c->add_option("output", cv.output, "Output cache file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*r) return run_register(reg);
    if (*t) return run_transform(tr);
    if (*e) return run_evaluate(ev);
    if (*c) return run_convert(cv);
  } catch (const ngfreg::InvalidInput& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const ngfreg::IoError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const ngfreg::FormatError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "internal error: " << ex.what() << "\n";
    return 1;
  }
  return 2;
}
