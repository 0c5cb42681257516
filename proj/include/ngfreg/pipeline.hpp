#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ngfreg/image.hpp"
#include "ngfreg/optimizers.hpp"
#include "ngfreg/transforms.hpp"

namespace ngfreg {

/// Parameters of one registration step. n_rot is used by step 1 only,
/// alpha and grid_m by step 3 only.
struct StepConfig {
  int n_max = 200;
  int n_level = 4;
  double epsilon = 0.1;
  int n_rot = 32;
  double alpha = 0.1;
  GridSize grid_m{257, 257};
  OptimizerSettings optimizer;

  void validate() const;
};

struct PipelineConfig {
  StepConfig step1;
  StepConfig step2;
  StepConfig step3;

  /// Rotation sampling, pyramid and NGF parameters of the reference pipeline:
  /// step 1 (32 rotations, 200 px, 4 levels, eps 0.1), step 2 (1000 px,
  /// 5 levels, eps 0.1), step 3 (8000 px, 7 levels, eps 1, alpha 0.1, 257x257).
  static PipelineConfig defaults();
  void validate() const;
  /// Clamp the n_max of every step to at most `n_max`.
  PipelineConfig capped(int n_max) const;
};

struct LevelTrace {
  int width = 0;
  int height = 0;
  double initial_value = 0.0;
  double final_value = 0.0;
  Diagnostics diagnostics;
};

struct RigidStepResult {
  RigidTransform transform;
  double ngf = 0.0;                   // at the finest step-1 level
  std::vector<double> initial_angles;
  std::vector<double> candidate_ngf;
  std::size_t selected = 0;
  std::vector<LevelTrace> levels;     // of the selected candidate
};

struct AffineStepResult {
  AffineTransform transform;
  double initial_ngf = 0.0;  // of the initialization, finest step-2 level
  double ngf = 0.0;
  std::vector<LevelTrace> levels;
};

struct FieldStepResult {
  BSplineField field;
  double ngf = 0.0;        // distance part at the finest step-3 level
  double curvature = 0.0;  // regularizer value of the final field
  std::vector<LevelTrace> levels;
};

/// Rigid pre-alignment: center-of-mass translation plus the best of n_rot
/// multilevel rigid registrations started at angles 2 pi k / n_rot. The
/// rotation center is the reference center of mass.
RigidStepResult step1_ara(const Image& R, const Image& T, const StepConfig& cfg);

/// Multilevel Gauss-Newton over the six affine parameters.
AffineStepResult step2_affine(const Image& R, const Image& T, const RigidTransform& init,
                              const StepConfig& cfg);

/// Multilevel L-BFGS over B-spline coefficients of NGF + alpha CURV, on top
/// of the fixed affine `init`. The control grid is refined with the pyramid.
FieldStepResult step3_nonparametric(const Image& R, const Image& T, const AffineTransform& init,
                                    const StepConfig& cfg);

/// Control grid used at pyramid level `level` (0 = coarsest) of `levels`.
GridSize control_grid_for_level(GridSize finest, int level, int levels);

struct StepReport {
  std::string name;
  double ngf = 0.0;      // at the common evaluation resolution (step-2 grid, step-3 epsilon)
  double seconds = 0.0;
  std::vector<std::string> stop_reasons;
};

struct RegistrationResult {
  RigidTransform rigid;
  AffineTransform affine;
  std::optional<BSplineField> field;
  int steps_run = 0;
  double initial_ngf = 0.0;  // identity transform, common evaluation resolution
  std::vector<StepReport> reports;
  double physical_scale = 1.0;  // physical length of one input pixel
  int reference_width = 0;
  int reference_height = 0;
  int template_width = 0;
  int template_height = 0;

  ComposedTransform transform() const;
};

/// Raised when a pipeline step fails; the message names the step.
class StepError : public std::runtime_error {
 public:
  StepError(int step, const std::string& what);
  int step() const { return step_; }

 private:
  int step_;
};

/// Physical length per input pixel: the longer reference side becomes 1.
double physical_scale_for(const Image& reference);

/// Registers preprocessed images given in pixel units (spacing 1). `steps`
/// selects how many steps run (1, 2 or 3).
RegistrationResult register_images(const Image& R, const Image& T, const PipelineConfig& cfg,
                                   int steps = 3);

/// Preprocesses both images and runs all requested steps.
RegistrationResult run_pipeline(const RawImage& R_raw, const RawImage& T_raw,
                                const PipelineConfig& cfg, int steps = 3);

}  // namespace ngfreg
