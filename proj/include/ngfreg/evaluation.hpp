#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ngfreg/geometry.hpp"
#include "ngfreg/transforms.hpp"

namespace ngfreg {

/// Landmarks of one image together with that image's extent M.
struct LandmarkSet {
  std::vector<Vec2> points;
  Vec2 extent{};

  void validate() const;
};

/// Push reference landmarks through y into the template frame.
LandmarkSet warp_landmarks(const ComposedTransform& y, const LandmarkSet& reference);

/// Pull template landmarks back into the reference frame (y^-1).
LandmarkSet warp_landmarks_inverse(const ComposedTransform& y, const LandmarkSet& templ);

/// Median over landmarks of |x_warped - x_target| / |M|. Even counts use the
/// mean of the two middle values.
double mrtre(const LandmarkSet& warped, const LandmarkSet& target);

struct Aggregate {
  double mean = 0.0;    // AMrTRE
  double median = 0.0;  // MMrTRE
};

Aggregate aggregate(std::span<const double> per_pair_mrtre);

/// Fraction of pairs whose final error is strictly below the initial one.
double robustness(std::span<const double> initial, std::span<const double> final);

double median(std::vector<double> values);

struct MetricsReport {
  std::vector<double> initial_mrtre;  // empty when the initial configuration is unknown
  std::vector<double> final_mrtre;
  double amrtre = 0.0;
  double mmrtre = 0.0;
  std::optional<double> robustness;
  std::optional<double> max_area_change_percent;
  std::optional<double> min_jacobian;
};

MetricsReport make_report(std::vector<double> final_mrtre, std::vector<double> initial_mrtre = {});

}  // namespace ngfreg
