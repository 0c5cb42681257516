#pragma once

// Random instances of every on-disk format and structural equality checks,
// shared by the unit and acceptance tests.

#include <atomic>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "ngfreg/io/cache.hpp"
#include "ngfreg/io/config_file.hpp"
#include "ngfreg/io/landmarks.hpp"
#include "ngfreg/io/reports.hpp"
#include "ngfreg/io/transform_file.hpp"

namespace roundtrip {

using namespace ngfreg;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ngfreg-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }
inline bool same_bits(float a, float b) { return std::memcmp(&a, &b, sizeof a) == 0; }
inline bool same_bits(Vec2 a, Vec2 b) { return same_bits(a.x, b.x) && same_bits(a.y, b.y); }

/// Doubles spread over many magnitudes, including negative and tiny values.
inline double wild_double(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> e(-20, 20);
  return std::ldexp(u(rng), e(rng));
}

// ---- pyramid cache ----------------------------------------------------------

inline io::PyramidCache random_cache(std::mt19937_64& rng, int max_side) {
  std::uniform_int_distribution<int> side(2, max_side);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(side(rng), side(rng));
  for (float& v : img.data) v = static_cast<float>(u(rng));
  io::PyramidCache c = io::make_cache(img);
  c.grayscaled = u(rng) < 0.5;
  c.inverted = u(rng) < 0.5;
  return c;
}

inline bool same_cache(const io::PyramidCache& a, const io::PyramidCache& b) {
  if (a.grayscaled != b.grayscaled || a.inverted != b.inverted || a.levels.size() != b.levels.size())
    return false;
  for (std::size_t l = 0; l < a.levels.size(); ++l) {
    const Image &x = a.levels[l], &y = b.levels[l];
    if (x.width != y.width || x.height != y.height || !same_bits(x.spacing, y.spacing) ||
        !same_bits(x.origin, y.origin) || x.data.size() != y.data.size())
      return false;
    for (std::size_t i = 0; i < x.data.size(); ++i)
      if (!same_bits(x.data[i], y.data[i])) return false;
  }
  return true;
}

// ---- transform file ---------------------------------------------------------

inline io::TransformFile random_transform(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> steps(1, 3), side(1, 5000), grid(2, 40);
  io::TransformFile tf;
  tf.steps = steps(rng);
  tf.physical_scale = std::abs(wild_double(rng)) + 1e-9;
  tf.reference_width = side(rng);
  tf.reference_height = side(rng);
  tf.template_width = side(rng);
  tf.template_height = side(rng);
  tf.rigid = {wild_double(rng), {wild_double(rng), wild_double(rng)}, {wild_double(rng), wild_double(rng)}};
  for (double& a : tf.affine.a) a = wild_double(rng);
  if (tf.steps == 3) {
    const Vec2 lo{wild_double(rng), wild_double(rng)};
    BSplineField f({grid(rng), grid(rng)}, {lo, lo + Vec2{1.0 + std::abs(wild_double(rng)), 0.5}});
    for (double& c : f.coefficients()) c = wild_double(rng);
    tf.field = f;
  }
  return tf;
}

inline bool same_transform(const io::TransformFile& a, const io::TransformFile& b) {
  if (a.steps != b.steps || !same_bits(a.physical_scale, b.physical_scale) ||
      a.reference_width != b.reference_width || a.reference_height != b.reference_height ||
      a.template_width != b.template_width || a.template_height != b.template_height)
    return false;
  if (!same_bits(a.rigid.angle, b.rigid.angle) || !same_bits(a.rigid.translation, b.rigid.translation) ||
      !same_bits(a.rigid.center, b.rigid.center))
    return false;
  for (int i = 0; i < 6; ++i)
    if (!same_bits(a.affine.a[i], b.affine.a[i])) return false;
  if (a.field.has_value() != b.field.has_value()) return false;
  if (!a.field) return true;
  const BSplineField &f = *a.field, &g = *b.field;
  if (!(f.grid() == g.grid()) || !same_bits(f.domain().min, g.domain().min) ||
      !same_bits(f.domain().max, g.domain().max))
    return false;
  for (std::size_t i = 0; i < f.coefficients().size(); ++i)
    if (!same_bits(f.coefficients()[i], g.coefficients()[i])) return false;
  return true;
}

// ---- landmarks --------------------------------------------------------------

inline std::vector<Vec2> random_landmarks(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 200);
  std::vector<Vec2> pts(static_cast<std::size_t>(count(rng)));
  for (Vec2& p : pts) p = {wild_double(rng) * 1e4, wild_double(rng) * 1e4};
  return pts;
}

inline bool same_landmarks(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_bits(a[i], b[i])) return false;
  return true;
}

// ---- config -----------------------------------------------------------------

inline PipelineConfig random_config(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(1, 9), big(2, 9000), grid(3, 300), its(0, 500);
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  PipelineConfig cfg = PipelineConfig::defaults();
  for (StepConfig* s : {&cfg.step1, &cfg.step2, &cfg.step3}) {
    s->n_max = big(rng);
    s->n_level = small(rng);
    s->epsilon = std::abs(wild_double(rng)) + 1e-12;
    s->n_rot = small(rng) * 4;
    s->alpha = std::abs(wild_double(rng)) + 1e-12;
    s->grid_m = {grid(rng), grid(rng)};
    OptimizerSettings& o = s->optimizer;
    o.max_iterations = its(rng);
    o.gradient_tolerance = std::abs(wild_double(rng)) + 1e-15;
    o.objective_change_tolerance = std::abs(wild_double(rng)) + 1e-15;
    o.parameter_change_tolerance = std::abs(wild_double(rng)) + 1e-15;
    o.lbfgs_memory = small(rng);
    o.armijo_constant = unit(rng);
    o.backtracking_factor = unit(rng);
    o.max_backtracks = small(rng);
    o.initial_step = std::abs(wild_double(rng)) + 1e-12;
  }
  return cfg;
}

inline bool same_step(const StepConfig& a, const StepConfig& b) {
  const OptimizerSettings &x = a.optimizer, &y = b.optimizer;
  return a.n_max == b.n_max && a.n_level == b.n_level && same_bits(a.epsilon, b.epsilon) &&
         a.n_rot == b.n_rot && same_bits(a.alpha, b.alpha) && a.grid_m == b.grid_m &&
         x.max_iterations == y.max_iterations && same_bits(x.gradient_tolerance, y.gradient_tolerance) &&
         same_bits(x.objective_change_tolerance, y.objective_change_tolerance) &&
         same_bits(x.parameter_change_tolerance, y.parameter_change_tolerance) &&
         x.lbfgs_memory == y.lbfgs_memory && same_bits(x.armijo_constant, y.armijo_constant) &&
         same_bits(x.backtracking_factor, y.backtracking_factor) && x.max_backtracks == y.max_backtracks &&
         same_bits(x.initial_step, y.initial_step);
}

inline bool same_config(const PipelineConfig& a, const PipelineConfig& b) {
  return same_step(a.step1, b.step1) && same_step(a.step2, b.step2) && same_step(a.step3, b.step3);
}

// ---- metrics ----------------------------------------------------------------

inline MetricsReport random_metrics(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 50);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> fin(static_cast<std::size_t>(count(rng))), init;
  for (double& v : fin) v = u(rng) * std::pow(10.0, -5.0 * u(rng));
  if (u(rng) < 0.5) {
    init.resize(fin.size());
    for (double& v : init) v = u(rng);
  }
  MetricsReport r = make_report(fin, init);
  if (u(rng) < 0.5) r.max_area_change_percent = 100.0 * u(rng);
  if (u(rng) < 0.5) r.min_jacobian = u(rng);
  return r;
}

inline bool same_optional(const std::optional<double>& a, const std::optional<double>& b) {
  return a.has_value() == b.has_value() && (!a || same_bits(*a, *b));
}

inline bool same_metrics(const MetricsReport& a, const MetricsReport& b) {
  auto same_vec = [](const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!same_bits(x[i], y[i])) return false;
    return true;
  };
  return same_vec(a.final_mrtre, b.final_mrtre) && same_vec(a.initial_mrtre, b.initial_mrtre) &&
         same_bits(a.amrtre, b.amrtre) && same_bits(a.mmrtre, b.mmrtre) && same_optional(a.robustness, b.robustness) &&
         same_optional(a.max_area_change_percent, b.max_area_change_percent) &&
         same_optional(a.min_jacobian, b.min_jacobian);
}

}  // namespace roundtrip
