#pragma once

// Brute-force reference implementations of the landmark metrics: full sorts
// and plain loops, independent of the library code paths.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline double median_by_sort(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// Points given as flat (x, y) pairs; extent (mx, my).
inline double mrtre(const std::vector<double>& warped, const std::vector<double>& target, double mx, double my) {
  const double diag = std::sqrt(mx * mx + my * my);
  std::vector<double> d;
  for (std::size_t i = 0; i + 1 < warped.size(); i += 2) {
    const double dx = warped[i] - target[i], dy = warped[i + 1] - target[i + 1];
    d.push_back(std::sqrt(dx * dx + dy * dy) / diag);
  }
  return median_by_sort(d);
}

inline double mean(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return static_cast<double>(s / v.size());
}

inline double robustness(const std::vector<double>& initial, const std::vector<double>& final) {
  int count = 0;
  for (std::size_t i = 0; i < initial.size(); ++i) count += final[i] < initial[i] ? 1 : 0;
  return static_cast<double>(count) / initial.size();
}

}  // namespace oracle
