#include "ngfreg/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "ngfreg/errors.hpp"

namespace ngfreg {

void LandmarkSet::validate() const {
  if (!(extent.x > 0.0) || !(extent.y > 0.0) || !is_finite(extent))
    throw InvalidInput("landmark extent must be positive");
  for (const Vec2& p : points)
    if (!is_finite(p)) throw InvalidInput("landmarks must be finite");
}

LandmarkSet warp_landmarks(const ComposedTransform& y, const LandmarkSet& reference) {
  LandmarkSet out{{}, reference.extent};
  out.points.reserve(reference.points.size());
  for (const Vec2& p : reference.points) out.points.push_back(y(p));
  return out;
}

LandmarkSet warp_landmarks_inverse(const ComposedTransform& y, const LandmarkSet& templ) {
  LandmarkSet out{{}, templ.extent};
  out.points.reserve(templ.points.size());
  for (const Vec2& p : templ.points) out.points.push_back(invert_point(y, p));
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidInput("median of an empty set");
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

double mrtre(const LandmarkSet& warped, const LandmarkSet& target) {
  if (warped.points.size() != target.points.size())
    throw InvalidInput("landmark sets differ in size");
  if (warped.points.empty()) throw InvalidInput("landmark sets are empty");
  if (warped.extent != target.extent) throw InvalidInput("landmark sets differ in extent");
  target.validate();
  const double diag = norm(target.extent);
  std::vector<double> d(warped.points.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = norm(warped.points[i] - target.points[i]) / diag;
  return median(std::move(d));
}

Aggregate aggregate(std::span<const double> per_pair) {
  if (per_pair.empty()) throw InvalidInput("cannot aggregate an empty list");
  double sum = 0.0;
  for (double v : per_pair) sum += v;
  return {sum / static_cast<double>(per_pair.size()),
          median(std::vector<double>(per_pair.begin(), per_pair.end()))};
}

double robustness(std::span<const double> initial, std::span<const double> final) {
  if (initial.size() != final.size()) throw InvalidInput("initial and final lists differ in length");
  if (initial.empty()) throw InvalidInput("robustness of an empty list");
  std::size_t improved = 0;
  for (std::size_t i = 0; i < initial.size(); ++i)
    if (final[i] < initial[i]) ++improved;
  return static_cast<double>(improved) / static_cast<double>(initial.size());
}

MetricsReport make_report(std::vector<double> final_mrtre, std::vector<double> initial_mrtre) {
  MetricsReport r;
  const Aggregate a = aggregate(final_mrtre);
  r.amrtre = a.mean;
  r.mmrtre = a.median;
  if (!initial_mrtre.empty()) r.robustness = robustness(initial_mrtre, final_mrtre);
  r.final_mrtre = std::move(final_mrtre);
  r.initial_mrtre = std::move(initial_mrtre);
  return r;
}

}  // namespace ngfreg
