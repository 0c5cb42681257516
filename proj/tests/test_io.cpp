#include <doctest.h>

#include <fstream>
#include <sstream>

#include "ngfreg/errors.hpp"
#include "ngfreg/io/image_io.hpp"
#include "ngfreg/io/render.hpp"
#include "round_trip.hpp"

using namespace ngfreg;
using roundtrip::TempDir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Expects `fn` to throw FormatError whose message contains `needle`.
template <class Fn>
void check_format_error(Fn fn, const std::string& needle) {
  try {
    fn();
    FAIL("expected a FormatError mentioning '" << needle << "'");
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    INFO(msg);
    CHECK(msg.find(needle) != std::string::npos);
  }
}

}  // namespace

TEST_SUITE("cli_io") {

TEST_CASE("pyramid cache round-trips bitwise") {
  TempDir dir;
  std::mt19937_64 rng(91);
  for (int k = 0; k < 10; ++k) {
    const io::PyramidCache c = roundtrip::random_cache(rng, 70);
    io::write_cache(dir / "c.ngfp", c);
    CHECK(io::is_cache_file(dir / "c.ngfp"));
    CHECK(roundtrip::same_cache(c, io::read_cache(dir / "c.ngfp")));
  }
  const io::PyramidCache c = io::make_cache(Image(9, 5));
  REQUIRE(c.levels.size() == 3);
  CHECK(c.levels[0].width == 9);
  CHECK(c.levels[1].width == 5);
  CHECK(c.levels[2].width == 3);
  CHECK(c.levels[2].height == 2);
  CHECK(c.levels[2].spacing == 4.0);
}

TEST_CASE("corrupt caches are rejected") {
  TempDir dir;
  write_text(dir / "junk", "NOTACACHE and more");
  CHECK_FALSE(io::is_cache_file(dir / "junk"));
  CHECK_THROWS_AS(io::read_cache(dir / "junk"), FormatError);
  std::mt19937_64 rng(92);
  io::write_cache(dir / "c", roundtrip::random_cache(rng, 20));
  const std::string full = read_text(dir / "c");
  write_text(dir / "short", full.substr(0, full.size() - 3));
  CHECK_THROWS_AS(io::read_cache(dir / "short"), FormatError);
  write_text(dir / "long", full + "x");
  CHECK_THROWS_AS(io::read_cache(dir / "long"), FormatError);
  CHECK_THROWS_AS(io::read_cache(dir / "missing"), IoError);
}

TEST_CASE("image conversion to a cache preserves the preprocessed image") {
  TempDir dir;
  RawImage raw;
  raw.width = 37;
  raw.height = 21;
  raw.channels = 3;
  std::mt19937_64 rng(93);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int i = 0; i < raw.width * raw.height * 3; ++i) raw.samples.push_back(static_cast<float>(byte(rng)));
  io::write_raw_png(dir / "in.png", raw);
  const RawImage back = io::read_raw_image(dir / "in.png");
  CHECK(back.samples == raw.samples);
  const Image direct = preprocess(raw);
  const io::PyramidCache c = io::cache_convert(dir / "in.png", dir / "in.ngfp");
  CHECK(c.levels[0].data == direct.data);
  CHECK(io::load_image(dir / "in.ngfp").data == direct.data);
  CHECK(io::load_image(dir / "in.png").data == direct.data);
  CHECK_THROWS_AS(io::load_image(dir / "nope.png"), IoError);
  write_text(dir / "bad.png", "not an image");
  CHECK_THROWS_AS(io::load_image(dir / "bad.png"), IoError);
}

TEST_CASE("transform files round-trip bitwise") {
  TempDir dir;
  std::mt19937_64 rng(94);
  for (int k = 0; k < 20; ++k) {
    const io::TransformFile tf = roundtrip::random_transform(rng);
    io::write_transform(dir / "t.ngft", tf);
    CHECK(roundtrip::same_transform(tf, io::read_transform(dir / "t.ngft")));
  }
}

TEST_CASE("corrupt transform files are rejected") {
  TempDir dir;
  std::mt19937_64 rng(95);
  io::TransformFile tf = roundtrip::random_transform(rng);
  tf.steps = 3;
  tf.field = BSplineField({3, 3}, {{0, 0}, {1, 1}});
  io::write_transform(dir / "t", tf);
  const std::string full = read_text(dir / "t");
  write_text(dir / "trunc", full.substr(0, full.size() - 8));
  check_format_error([&] { io::read_transform(dir / "trunc"); }, "payload");
  write_text(dir / "magic", "something else\n");
  check_format_error([&] { io::read_transform(dir / "magic"); }, "not a transform file");
  std::string bad = full;
  bad.replace(bad.find("steps 3"), 7, "steps 9");
  write_text(dir / "steps", bad);
  check_format_error([&] { io::read_transform(dir / "steps"); }, "steps");
  bad = full;
  bad.replace(bad.find("affine "), 7, "affine zz ");
  write_text(dir / "num", bad);
  check_format_error([&] { io::read_transform(dir / "num"); }, "affine");
  bad = full;
  bad.replace(bad.find("end_header"), 10, "extra_key 1");
  write_text(dir / "key", bad);
  CHECK_THROWS_AS(io::read_transform(dir / "key"), FormatError);
}

TEST_CASE("composed transform follows the number of steps") {
  io::TransformFile tf;
  tf.rigid = {0.3, {0.1, 0.2}, {0.5, 0.5}};
  tf.affine = AffineTransform{{2, 0, 0, 0, 2, 0}};
  tf.field = BSplineField({3, 3}, {{0, 0}, {1, 1}});
  tf.steps = 1;
  CHECK(tf.composed().affine.a == rigid_to_affine(tf.rigid).a);
  CHECK_FALSE(tf.composed().field);
  tf.steps = 2;
  CHECK(tf.composed().affine.a == tf.affine.a);
  CHECK_FALSE(tf.composed().field);
  tf.steps = 3;
  CHECK(tf.composed().field);
}

TEST_CASE("landmark files") {
  TempDir dir;
  std::mt19937_64 rng(96);
  for (int k = 0; k < 20; ++k) {
    const auto pts = roundtrip::random_landmarks(rng);
    io::write_landmarks(dir / "l.csv", pts);
    CHECK(roundtrip::same_landmarks(pts, io::read_landmarks(dir / "l.csv")));
  }
  std::istringstream ok("id,x,y\n0,1.5,2\n\n1, 3 ,4e1\r\n");
  const auto p = io::parse_landmarks(ok);
  REQUIRE(p.size() == 2);
  CHECK(p[1] == Vec2{3, 40});

  std::istringstream header("x,y\n1,2\n");
  check_format_error([&] { io::parse_landmarks(header, "h.csv"); }, "h.csv:1");
  std::istringstream fields("id,x,y\n0,1\n");
  check_format_error([&] { io::parse_landmarks(fields, "f.csv"); }, "f.csv:2");
  std::istringstream number("id,x,y\n0,1,2\n1,abc,2\n");
  check_format_error([&] { io::parse_landmarks(number, "n.csv"); }, "n.csv:3: non-numeric");
  std::istringstream empty("");
  CHECK_THROWS_AS(io::parse_landmarks(empty), FormatError);
  CHECK_THROWS_AS(io::read_landmarks(dir / "missing.csv"), IoError);

  const std::vector<Vec2> px{{10, 20}, {0, 400}};
  const auto phys = io::pixels_to_physical(px, 1.0 / 400);
  CHECK(phys[1].y == doctest::Approx(1.0));
  const auto again = io::physical_to_pixels(phys, 1.0 / 400);
  CHECK(again[0].x == doctest::Approx(10.0));
  CHECK_THROWS_AS(io::physical_to_pixels(phys, 0.0), InvalidInput);
}

TEST_CASE("configuration files") {
  std::mt19937_64 rng(97);
  for (int k = 0; k < 20; ++k) {
    const PipelineConfig cfg = roundtrip::random_config(rng);
    CHECK(roundtrip::same_config(cfg, io::parse_config(io::format_config(cfg))));
  }
  CHECK(roundtrip::same_config(io::parse_config(""), PipelineConfig::defaults()));

  const PipelineConfig c = io::parse_config(
      "# comment\n[step3]\nalpha = 0.5\ngrid_m = 33x17\nmax_iterations = 7 ; trailing\n"
      "[optimizer]\nmax_iterations = 3\narmijo_constant = 0.01\n");
  CHECK(c.step3.alpha == 0.5);
  CHECK(c.step3.grid_m == GridSize{33, 17});
  CHECK(c.step3.optimizer.max_iterations == 7);  // step value overrides the global one
  CHECK(c.step1.optimizer.max_iterations == 3);
  CHECK(c.step2.optimizer.armijo_constant == 0.01);
  CHECK(c.step1.n_rot == 32);

  check_format_error([] { io::parse_config("[step1]\nbogus = 1\n"); }, "config line 2");
  check_format_error([] { io::parse_config("[step4]\n"); }, "config line 1");
  check_format_error([] { io::parse_config("[step1]\n\nn_rot = x\n"); }, "config line 3");
  check_format_error([] { io::parse_config("n_rot = 3\n"); }, "config line 1");
  check_format_error([] { io::parse_config("[step3]\ngrid_m = 33\n"); }, "config line 2");
  CHECK_THROWS_AS(io::parse_config("[step3]\nalpha = -1\n"), FormatError);

  TempDir dir;
  const PipelineConfig r = roundtrip::random_config(rng);
  io::write_config(dir / "c.ini", r);
  CHECK(roundtrip::same_config(r, io::read_config(dir / "c.ini")));
  CHECK_THROWS_AS(io::read_config(dir / "missing.ini"), IoError);
}

TEST_CASE("metrics files") {
  TempDir dir;
  std::mt19937_64 rng(98);
  for (int k = 0; k < 20; ++k) {
    const MetricsReport m = roundtrip::random_metrics(rng);
    io::write_metrics(dir / "m.json", m);
    CHECK(roundtrip::same_metrics(m, io::read_metrics(dir / "m.json")));
  }
  const std::string text = io::metrics_to_json(make_report({0.1}));
  CHECK(text.find("\"robustness\": null") != std::string::npos);
  CHECK_THROWS_AS(io::metrics_from_json("{ not json"), FormatError);
}

TEST_CASE("evaluation manifests") {
  TempDir dir;
  io::write_landmarks(dir / "a.csv", {{0, 0}, {10, 10}, {20, 0}});
  io::write_landmarks(dir / "b.csv", {{3, 4}, {10, 10}, {20, 5}});
  io::write_landmarks(dir / "c.csv", {{6, 8}, {10, 20}, {20, 0}});
  write_text(dir / "m.csv", "warped,target,width,height,initial\nb.csv,a.csv,30,40,c.csv\na.csv,a.csv,30,40,a.csv\n");
  const auto entries = io::read_manifest(dir / "m.csv");
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].warped == dir / "b.csv");
  CHECK(entries[0].extent == Vec2{30, 40});
  const MetricsReport r = io::evaluate_manifest(entries);
  CHECK(r.final_mrtre[0] == doctest::Approx(0.1));  // distances {5, 0, 5} / 50
  CHECK(r.final_mrtre[1] == 0.0);
  CHECK(r.initial_mrtre[0] == doctest::Approx(0.2));
  REQUIRE(r.robustness);
  CHECK(*r.robustness == 0.5);

  write_text(dir / "n.csv", "warped,target,width,height\nb.csv,a.csv,30,40\n");
  CHECK_FALSE(io::evaluate_manifest(io::read_manifest(dir / "n.csv")).robustness);

  write_text(dir / "bad1.csv", "warped,target,width,height\nb.csv,a.csv,-3,40\n");
  check_format_error([&] { io::read_manifest(dir / "bad1.csv"); }, "bad1.csv:2");
  write_text(dir / "bad2.csv", "warped,target,width,height\nb.csv,a.csv,30,40\nb.csv,a.csv\n");
  check_format_error([&] { io::read_manifest(dir / "bad2.csv"); }, "bad2.csv:3");
  write_text(dir / "bad3.csv", "warped,target,width,height\n");
  CHECK_THROWS_AS(io::read_manifest(dir / "bad3.csv"), FormatError);
  CHECK_THROWS_AS(io::read_manifest(dir / "none.csv"), IoError);
}

TEST_CASE("run report names every step and parameter") {
  RegistrationResult r;
  r.steps_run = 3;
  r.reports = {{"pre-alignment", 0.5, 1.0, {"gradient_tolerance"}},
               {"parametric", 0.4, 1.0, {"objective_change"}},
               {"non-parametric", 0.3, 1.0, {"max_iterations"}}};
  r.field = BSplineField({3, 3}, {{0, 0}, {1, 1}});
  const std::string text = io::format_run_report(r, PipelineConfig::defaults());
  for (const char* needle : {"pre-alignment", "parametric", "non-parametric", "[step1]", "[step3]", "alpha", "grid_m = 257x257"})
    CHECK(text.find(needle) != std::string::npos);
}

TEST_CASE("resampling and checkerboards") {
  Image t(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) t.at(r, c) = 0.1f * static_cast<float>(r * 4 + c) / 1.6f;
  const Image same = io::resample(t, ComposedTransform{}, 4, 4, 1.0);
  for (std::size_t i = 0; i < t.data.size(); ++i) CHECK(same.data[i] == doctest::Approx(t.data[i]));
  const Image shifted = io::resample(t, ComposedTransform{{{1, 0, 1, 0, 1, 0}}, std::nullopt}, 4, 4, 1.0);
  CHECK(shifted.at(2, 1) == doctest::Approx(t.at(2, 2)));
  CHECK(shifted.at(2, 3) == 0.0f);

  Image a(4, 4), b(4, 4);
  std::fill(b.data.begin(), b.data.end(), 1.0f);
  const Image cb = io::checkerboard(a, b, 2);
  CHECK(cb.at(0, 0) == 0.0f);
  CHECK(cb.at(0, 2) == 1.0f);
  CHECK(cb.at(2, 0) == 1.0f);
  CHECK(cb.at(3, 3) == 0.0f);
  CHECK_THROWS_AS(io::checkerboard(a, Image(3, 4), 2), InvalidInput);
  CHECK_THROWS_AS(io::checkerboard(a, b, 0), InvalidInput);
}

}
