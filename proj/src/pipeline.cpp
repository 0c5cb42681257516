#include "ngfreg/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <atomic>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "ngfreg/curvature.hpp"
#include "ngfreg/errors.hpp"
#include "ngfreg/ngf.hpp"

namespace ngfreg {

void StepConfig::validate() const {
  if (n_max < 2) throw InvalidInput("n_max must be at least 2");
  if (n_level < 1) throw InvalidInput("n_level must be at least 1");
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  if (n_rot < 1) throw InvalidInput("n_rot must be at least 1");
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
  if (grid_m.nx < 3 || grid_m.ny < 3) throw InvalidInput("grid_m must be at least 3 per axis");
  optimizer.validate();
}

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig cfg;
  cfg.step1.n_rot = 32;
  cfg.step1.n_max = 200;
  cfg.step1.n_level = 4;
  cfg.step1.epsilon = 0.1;
  cfg.step1.optimizer.max_iterations = 50;

  cfg.step2.n_max = 1000;
  cfg.step2.n_level = 5;
  cfg.step2.epsilon = 0.1;
  cfg.step2.optimizer.max_iterations = 50;

  cfg.step3.n_max = 8000;
  cfg.step3.n_level = 7;
  cfg.step3.epsilon = 1.0;
  cfg.step3.alpha = 0.1;
  cfg.step3.grid_m = {257, 257};
  cfg.step3.optimizer.max_iterations = 100;
  return cfg;
}

void PipelineConfig::validate() const {
  step1.validate();
  step2.validate();
  step3.validate();
}

PipelineConfig PipelineConfig::capped(int n_max) const {
  PipelineConfig out = *this;
  for (StepConfig* s : {&out.step1, &out.step2, &out.step3}) s->n_max = std::min(s->n_max, n_max);
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

struct LevelPair {
  std::vector<Image> reference;  // coarsest first
  std::vector<Image> templ;
};

// Pyramids of R and T sharing the pixel spacing of every level.
LevelPair matched_pyramids(const Image& R, const Image& T, const StepConfig& cfg) {
  const int halvings = halvings_to_fit(R.width, R.height, cfg.n_max);
  ImagePyramid pr = build_pyramid_halved(R, halvings, cfg.n_level);
  ImagePyramid pt = build_pyramid_halved(T, halvings, cfg.n_level);
  const std::size_t n = std::min(pr.level_count(), pt.level_count());
  LevelPair lp;
  lp.reference.assign(pr.levels.end() - n, pr.levels.end());
  lp.templ.assign(pt.levels.end() - n, pt.levels.end());
  return lp;
}

Vec2 mass_center_or_geometric(const Image& img) {
  try {
    return center_of_mass(img);
  } catch (const DegenerateMass&) {
    return img.domain().center();
  }
}

Eigen::VectorXd rigid_params(const RigidTransform& rt) {
  Eigen::VectorXd x(3);
  x << rt.angle, rt.translation.x, rt.translation.y;
  return x;
}

RigidTransform rigid_from(const Eigen::VectorXd& x, Vec2 center) {
  return RigidTransform{x[0], {x[1], x[2]}, center};
}

Eigen::VectorXd affine_params(const AffineTransform& at) {
  return Eigen::Map<const Eigen::VectorXd>(at.a.data(), 6);
}

AffineTransform affine_from(const Eigen::VectorXd& x) {
  AffineTransform at;
  for (int i = 0; i < 6; ++i) at.a[i] = x[i];
  return at;
}

LevelTrace trace_of(const Image& level, const OptimizationResult& res) {
  LevelTrace t;
  t.width = level.width;
  t.height = level.height;
  t.initial_value = res.diagnostics.objective_trace.front();
  t.final_value = res.value;
  t.diagnostics = res.diagnostics;
  return t;
}

struct RigidCandidate {
  RigidTransform transform;
  double ngf = 0.0;
  std::vector<LevelTrace> levels;
};

RigidCandidate run_rigid(const LevelPair& lp, RigidTransform rt, const StepConfig& cfg) {
  RigidCandidate cand;
  for (std::size_t l = 0; l < lp.reference.size(); ++l) {
    const NgfDistance dist(lp.reference[l], lp.templ[l], cfg.epsilon);
    const Vec2 center = rt.center;
    GaussNewtonObjective obj{
        [&](const Eigen::VectorXd& x) { return dist.value(rigid_from(x, center)); },
        [&](const Eigen::VectorXd& x) { return dist.gauss_newton_system(rigid_from(x, center)); }};
    const OptimizationResult res = gauss_newton(obj, rigid_params(rt), cfg.optimizer);
    rt = rigid_from(res.x, center);
    cand.levels.push_back(trace_of(lp.reference[l], res));
    cand.ngf = res.value;
  }
  cand.transform = rt;
  return cand;
}

}  // namespace

RigidStepResult step1_ara(const Image& R, const Image& T, const StepConfig& cfg) {
  cfg.validate();
  const LevelPair lp = matched_pyramids(R, T, cfg);
  const Vec2 com_r = mass_center_or_geometric(R);
  const Vec2 com_t = mass_center_or_geometric(T);

  RigidStepResult out;
  const std::size_t n_rot = static_cast<std::size_t>(cfg.n_rot);
  std::vector<RigidCandidate> cands(n_rot);
  for (std::size_t k = 0; k < n_rot; ++k)
    out.initial_angles.push_back(2.0 * std::numbers::pi * static_cast<double>(k) / cfg.n_rot);

  // Candidates are independent; run them on a small worker pool. Selection
  // below is by value with ties broken by the lowest index, so the result
  // does not depend on scheduling.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < n_rot;) {
      try {
        cands[k] = run_rigid(lp, RigidTransform{out.initial_angles[k], com_t - com_r, com_r}, cfg);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(n_rot, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  const RigidCandidate* best = nullptr;
  for (std::size_t k = 0; k < n_rot; ++k) {
    out.candidate_ngf.push_back(cands[k].ngf);
    if (!best || cands[k].ngf < best->ngf) {
      best = &cands[k];
      out.selected = k;
    }
  }
  out.transform = best->transform;
  out.ngf = best->ngf;
  out.levels = best->levels;
  return out;
}

AffineStepResult step2_affine(const Image& R, const Image& T, const RigidTransform& init,
                              const StepConfig& cfg) {
  cfg.validate();
  const LevelPair lp = matched_pyramids(R, T, cfg);
  AffineStepResult out;
  AffineTransform at = rigid_to_affine(init);
  for (std::size_t l = 0; l < lp.reference.size(); ++l) {
    const NgfDistance dist(lp.reference[l], lp.templ[l], cfg.epsilon);
    GaussNewtonObjective obj{
        [&](const Eigen::VectorXd& x) { return dist.value(affine_from(x)); },
        [&](const Eigen::VectorXd& x) { return dist.gauss_newton_system(affine_from(x)); }};
    const OptimizationResult res = gauss_newton(obj, affine_params(at), cfg.optimizer);
    at = affine_from(res.x);
    out.levels.push_back(trace_of(lp.reference[l], res));
    if (l + 1 == lp.reference.size()) {
      out.initial_ngf = dist.value(rigid_to_affine(init));
      out.ngf = res.value;
    }
  }
  out.transform = at;
  return out;
}

GridSize control_grid_for_level(GridSize finest, int level, int levels) {
  constexpr int kMinPoints = 17;
  const int shift = levels - 1 - level;
  auto axis = [&](int m) {
    int cells = m - 1;
    for (int s = 0; s < shift; ++s) cells = (cells + 1) / 2;
    return std::min(m, std::max(cells + 1, kMinPoints));
  };
  return {axis(finest.nx), axis(finest.ny)};
}

FieldStepResult step3_nonparametric(const Image& R, const Image& T, const AffineTransform& init,
                                    const StepConfig& cfg) {
  cfg.validate();
  const LevelPair lp = matched_pyramids(R, T, cfg);
  const int n_levels = static_cast<int>(lp.reference.size());
  const Rect domain = R.domain();

  // Levels with fewer pixels than control points along an axis leave the
  // field undetermined there; they are skipped (the finest level always runs).
  int first = 0;
  while (first + 1 < n_levels) {
    const GridSize g = control_grid_for_level(cfg.grid_m, first, n_levels);
    const Image& img = lp.reference[static_cast<std::size_t>(first)];
    if (img.width >= g.nx && img.height >= g.ny) break;
    ++first;
  }

  std::optional<BSplineField> field;
  FieldStepResult out{BSplineField(cfg.grid_m, domain)};
  for (int l = first; l < n_levels; ++l) {
    const GridSize grid = control_grid_for_level(cfg.grid_m, l, n_levels);
    field = field ? prolong(*field, grid) : BSplineField(grid, domain);
    BSplineField work = *field;
    const NgfDistance dist(lp.reference[l], lp.templ[l], cfg.epsilon);
    const double alpha = cfg.alpha;

    SmoothObjective obj = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
      work.set_coefficients(std::span<const double>(x.data(), x.size()));
      if (!grad) return dist.value(init, work) + alpha * curv_value(work);
      double ngf = 0.0;
      const std::vector<double> gd = dist.gradient(init, work, &ngf);
      const std::vector<double> gc = curv_gradient(work);
      grad->resize(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) (*grad)[i] = gd[i] + alpha * gc[i];
      return ngf + alpha * curv_value(work);
    };
    const auto c = field->coefficients();
    const OptimizationResult res =
        lbfgs(obj, Eigen::Map<const Eigen::VectorXd>(c.data(), c.size()), cfg.optimizer);
    field->set_coefficients(std::span<const double>(res.x.data(), res.x.size()));
    out.levels.push_back(trace_of(lp.reference[l], res));
    if (l + 1 == n_levels) {
      out.curvature = curv_value(*field);
      out.ngf = dist.value(init, *field);
    }
  }
  // Levels coarser than the finest may use a smaller grid; the result always
  // carries the requested grid.
  out.field = field->grid() == cfg.grid_m ? *field : prolong(*field, cfg.grid_m);
  return out;
}

ComposedTransform RegistrationResult::transform() const {
  ComposedTransform y;
  y.affine = steps_run >= 2 ? affine : rigid_to_affine(rigid);
  if (steps_run >= 3) y.field = field;
  return y;
}

StepError::StepError(int step, const std::string& what)
    : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}

double physical_scale_for(const Image& reference) {
  return 1.0 / (std::max(reference.width, reference.height) * reference.spacing);
}

namespace {

Image rescaled(const Image& img, double scale) {
  Image out = img;
  out.spacing = img.spacing * scale;
  out.origin = img.origin * scale;
  return out;
}

std::vector<std::string> stop_reasons(const std::vector<LevelTrace>& levels) {
  std::vector<std::string> out;
  for (const LevelTrace& t : levels) out.emplace_back(to_string(t.diagnostics.stop));
  return out;
}

}  // namespace

RegistrationResult register_images(const Image& R_in, const Image& T_in, const PipelineConfig& cfg,
                                   int steps) {
  if (steps < 1 || steps > 3) throw InvalidInput("steps must be 1, 2 or 3");
  cfg.validate();
  R_in.validate();
  T_in.validate();

  RegistrationResult result;
  result.physical_scale = physical_scale_for(R_in);
  result.reference_width = R_in.width;
  result.reference_height = R_in.height;
  result.template_width = T_in.width;
  result.template_height = T_in.height;
  const Image R = rescaled(R_in, result.physical_scale);
  const Image T = rescaled(T_in, result.physical_scale);

  // Common evaluation: the finest step-2 resolution with the edge parameter of
  // the final (step-3) objective.
  const LevelPair eval = matched_pyramids(R, T, StepConfig{cfg.step2.n_max, 1, cfg.step3.epsilon});
  const NgfDistance eval_dist(eval.reference.back(), eval.templ.back(), cfg.step3.epsilon);
  result.initial_ngf = eval_dist.value(AffineTransform::identity());

  auto timed = [](auto&& fn) {
    const auto t0 = Clock::now();
    fn();
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };

  StepReport r1{"pre-alignment"};
  RigidStepResult s1;
  try {
    r1.seconds = timed([&] { s1 = step1_ara(R, T, cfg.step1); });
  } catch (const std::exception& e) {
    throw StepError(1, e.what());
  }
  result.rigid = s1.transform;
  result.steps_run = 1;
  r1.ngf = eval_dist.value(result.rigid);
  r1.stop_reasons = stop_reasons(s1.levels);
  result.reports.push_back(r1);
  if (steps == 1) {
    result.affine = rigid_to_affine(result.rigid);
    return result;
  }

  StepReport r2{"parametric"};
  AffineStepResult s2;
  try {
    r2.seconds = timed([&] { s2 = step2_affine(R, T, result.rigid, cfg.step2); });
  } catch (const std::exception& e) {
    throw StepError(2, e.what());
  }
  result.affine = s2.transform;
  result.steps_run = 2;
  r2.ngf = eval_dist.value(result.affine);
  r2.stop_reasons = stop_reasons(s2.levels);
  result.reports.push_back(r2);
  if (steps == 2) return result;

  StepReport r3{"non-parametric"};
  std::optional<FieldStepResult> s3;
  try {
    r3.seconds = timed([&] { s3 = step3_nonparametric(R, T, result.affine, cfg.step3); });
  } catch (const std::exception& e) {
    throw StepError(3, e.what());
  }
  result.field = s3->field;
  result.steps_run = 3;
  r3.ngf = eval_dist.value(result.affine, *result.field);
  r3.stop_reasons = stop_reasons(s3->levels);
  result.reports.push_back(r3);
  return result;
}

RegistrationResult run_pipeline(const RawImage& R_raw, const RawImage& T_raw,
                                const PipelineConfig& cfg, int steps) {
  return register_images(preprocess(R_raw), preprocess(T_raw), cfg, steps);
}

}  // namespace ngfreg
