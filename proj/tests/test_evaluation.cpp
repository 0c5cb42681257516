#include <doctest.h>

#include <random>

#include "metric_oracle.hpp"
#include "ngfreg/errors.hpp"
#include "ngfreg/evaluation.hpp"

using namespace ngfreg;

namespace {

std::vector<double> flat(const LandmarkSet& s) {
  std::vector<double> out;
  for (const Vec2& p : s.points) out.push_back(p.x), out.push_back(p.y);
  return out;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("warping landmarks") {
  const LandmarkSet ref{{{1, 2}, {3, 4}, {-1, 0.5}}, {10, 10}};
  const LandmarkSet same = warp_landmarks(ComposedTransform{}, ref);
  CHECK(same.points == ref.points);
  CHECK(same.extent == ref.extent);

  const ComposedTransform shift{{{1, 0, 1, 0, 1, 2}}, std::nullopt};
  const LandmarkSet moved = warp_landmarks(shift, ref);
  for (std::size_t i = 0; i < 3; ++i) CHECK(moved.points[i] == ref.points[i] + Vec2{1, 2});
  const LandmarkSet back = warp_landmarks_inverse(shift, moved);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.points[i].x == doctest::Approx(ref.points[i].x));
    CHECK(back.points[i].y == doctest::Approx(ref.points[i].y));
  }

  BSplineField f({3, 3}, {{0, 0}, {10, 10}});
  f.set_coefficient(1, 1, {0.3, -0.7});
  const LandmarkSet node{{f.control_point(1, 1)}, {10, 10}};
  const LandmarkSet w = warp_landmarks(ComposedTransform{{}, f}, node);
  CHECK(w.points[0].x == doctest::Approx(5.3));
  CHECK(w.points[0].y == doctest::Approx(4.3));
}

TEST_CASE("mrtre examples") {
  const LandmarkSet a{{{1, 1}, {2, 5}}, {30, 40}};
  CHECK(mrtre(a, a) == 0.0);
  CHECK(mrtre(LandmarkSet{{{3, 4}}, {30, 40}}, LandmarkSet{{{0, 0}}, {30, 40}}) == doctest::Approx(0.1));
  const LandmarkSet w{{{0, 0}, {3, 4}, {60, 80}}, {30, 40}};
  const LandmarkSet t{{{0, 0}, {0, 0}, {0, 0}}, {30, 40}};
  CHECK(mrtre(w, t) == doctest::Approx(0.1));
  // Even count: mean of the two middle distances {5, 10} -> 7.5 / 50.
  const LandmarkSet w4{{{0, 0}, {3, 4}, {6, 8}, {60, 80}}, {30, 40}};
  const LandmarkSet t4{{{0, 0}, {0, 0}, {0, 0}, {0, 0}}, {30, 40}};
  CHECK(mrtre(w4, t4) == doctest::Approx(0.15));
  CHECK_THROWS_AS(mrtre(w, LandmarkSet{{{0, 0}}, {30, 40}}), InvalidInput);
  CHECK_THROWS_AS(mrtre(LandmarkSet{{}, {30, 40}}, LandmarkSet{{}, {30, 40}}), InvalidInput);
  CHECK_THROWS_AS(mrtre(LandmarkSet{{{0, 0}}, {0, 40}}, LandmarkSet{{{0, 0}}, {0, 40}}), InvalidInput);
}

TEST_CASE("aggregation and robustness examples") {
  const std::vector<double> one{0.07};
  CHECK(aggregate(one).mean == 0.07);
  CHECK(aggregate(one).median == 0.07);
  const std::vector<double> two{0.1, 0.3};
  CHECK(aggregate(two).mean == doctest::Approx(0.2));
  CHECK(aggregate(two).median == doctest::Approx(0.2));
  CHECK_THROWS_AS(aggregate(std::vector<double>{}), InvalidInput);

  const std::vector<double> init{0.1, 0.2, 0.3, 0.4}, fin{0.05, 0.2, 0.5, 0.1};
  CHECK(robustness(init, fin) == 0.5);  // equal is not an improvement
  CHECK(robustness(init, init) == 0.0);
  CHECK_THROWS_AS(robustness(init, one), InvalidInput);

  const MetricsReport r = make_report({0.1, 0.3}, {0.2, 0.2});
  CHECK(r.amrtre == doctest::Approx(0.2));
  REQUIRE(r.robustness);
  CHECK(*r.robustness == 0.5);
  CHECK_FALSE(make_report({0.1}).robustness);
}

TEST_CASE("metrics match the brute-force oracle") {
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const int n = 1 + static_cast<int>(u(rng) * 40);
    const Vec2 extent{10 + 1000 * u(rng), 10 + 1000 * u(rng)};
    LandmarkSet w{{}, extent}, t{{}, extent};
    for (int i = 0; i < n; ++i) {
      t.points.push_back({extent.x * u(rng), extent.y * u(rng)});
      w.points.push_back(t.points.back() + Vec2{20 * (u(rng) - 0.5), 20 * (u(rng) - 0.5)});
    }
    CHECK(std::abs(mrtre(w, t) - oracle::mrtre(flat(w), flat(t), extent.x, extent.y)) <= 1e-12);

    std::vector<double> init(n), fin(n);
    for (int i = 0; i < n; ++i) init[i] = u(rng), fin[i] = u(rng);
    if (n > 2) fin[1] = init[1];
    const Aggregate a = aggregate(fin);
    CHECK(std::abs(a.mean - oracle::mean(fin)) <= 1e-12);
    CHECK(std::abs(a.median - oracle::median_by_sort(fin)) <= 1e-12);
    CHECK(std::abs(robustness(init, fin) - oracle::robustness(init, fin)) <= 1e-12);
  }
}

}
