#include "ngfreg/io/transform_file.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "binary.hpp"
#include "ngfreg/errors.hpp"

namespace ngfreg::io {

namespace {

constexpr const char* kMagicLine = "ngfreg-transform 1";

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& tok, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size())
    throw FormatError("transform file: bad number '" + tok + "' for " + key);
  return v;
}

int parse_int(const std::string& tok, const std::string& key) {
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (tok.empty() || end != tok.c_str() + tok.size())
    throw FormatError("transform file: bad integer '" + tok + "' for " + key);
  return static_cast<int>(v);
}

}  // namespace

ComposedTransform TransformFile::composed() const {
  ComposedTransform y;
  y.affine = steps >= 2 ? affine : rigid_to_affine(rigid);
  if (steps >= 3) y.field = field;
  return y;
}

TransformFile to_transform_file(const RegistrationResult& result) {
  TransformFile tf;
  tf.steps = result.steps_run;
  tf.physical_scale = result.physical_scale;
  tf.reference_width = result.reference_width;
  tf.reference_height = result.reference_height;
  tf.template_width = result.template_width;
  tf.template_height = result.template_height;
  tf.rigid = result.rigid;
  tf.affine = result.affine;
  tf.field = result.field;
  return tf;
}

void write_transform(const std::filesystem::path& path, const TransformFile& tf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << kMagicLine << '\n';
  out << "steps " << tf.steps << '\n';
  out << "physical_scale " << hex(tf.physical_scale) << '\n';
  out << "reference_size " << tf.reference_width << ' ' << tf.reference_height << '\n';
  out << "template_size " << tf.template_width << ' ' << tf.template_height << '\n';
  out << "rigid " << hex(tf.rigid.angle) << ' ' << hex(tf.rigid.translation.x) << ' '
      << hex(tf.rigid.translation.y) << ' ' << hex(tf.rigid.center.x) << ' '
      << hex(tf.rigid.center.y) << '\n';
  out << "affine";
  for (double a : tf.affine.a) out << ' ' << hex(a);
  out << '\n';
  if (tf.field) {
    const auto& f = *tf.field;
    out << "bspline " << f.grid().nx << ' ' << f.grid().ny << ' ' << hex(f.domain().min.x) << ' '
        << hex(f.domain().min.y) << ' ' << hex(f.domain().max.x) << ' ' << hex(f.domain().max.y)
        << '\n';
    out << "payload " << f.coefficients().size() * sizeof(double) << '\n';
  } else {
    out << "bspline none\n";
    out << "payload 0\n";
  }
  out << "end_header\n";
  if (tf.field)
    for (double v : tf.field->coefficients()) detail::put<double>(out, v);
  if (!out) throw IoError("write failed: " + path.string());
}

TransformFile read_transform(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMagicLine)
    throw FormatError(path.string() + ": not a transform file");

  TransformFile tf;
  bool have_field = false;
  GridSize grid{};
  Rect domain{};
  std::size_t payload = 0;
  bool ended = false;
  while (std::getline(in, line)) {
    if (line == "end_header") {
      ended = true;
      break;
    }
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    auto need = [&](std::size_t n) {
      if (tok.size() != n) throw FormatError(path.string() + ": wrong field count for " + key);
    };
    if (key == "steps") {
      need(1);
      tf.steps = parse_int(tok[0], key);
      if (tf.steps < 1 || tf.steps > 3) throw FormatError(path.string() + ": steps must be 1..3");
    } else if (key == "physical_scale") {
      need(1);
      tf.physical_scale = parse_double(tok[0], key);
    } else if (key == "reference_size") {
      need(2);
      tf.reference_width = parse_int(tok[0], key);
      tf.reference_height = parse_int(tok[1], key);
    } else if (key == "template_size") {
      need(2);
      tf.template_width = parse_int(tok[0], key);
      tf.template_height = parse_int(tok[1], key);
    } else if (key == "rigid") {
      need(5);
      tf.rigid = {parse_double(tok[0], key),
                  {parse_double(tok[1], key), parse_double(tok[2], key)},
                  {parse_double(tok[3], key), parse_double(tok[4], key)}};
    } else if (key == "affine") {
      need(6);
      for (int i = 0; i < 6; ++i) tf.affine.a[i] = parse_double(tok[i], key);
    } else if (key == "bspline") {
      if (tok.size() == 1 && tok[0] == "none") continue;
      need(6);
      have_field = true;
      grid = {parse_int(tok[0], key), parse_int(tok[1], key)};
      domain = {{parse_double(tok[2], key), parse_double(tok[3], key)},
                {parse_double(tok[4], key), parse_double(tok[5], key)}};
    } else if (key == "payload") {
      need(1);
      payload = static_cast<std::size_t>(parse_int(tok[0], key));
    } else {
      throw FormatError(path.string() + ": unknown header key '" + key + "'");
    }
  }
  if (!ended) throw FormatError(path.string() + ": missing end_header");
  if (have_field) {
    try {
      tf.field.emplace(grid, domain);
    } catch (const InvalidInput& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
    auto coef = tf.field->coefficients();
    if (payload != coef.size() * sizeof(double))
      throw FormatError(path.string() + ": payload size does not match the grid");
    try {
      for (double& v : coef) v = detail::get<double>(in);
    } catch (const FormatError&) {
      throw FormatError(path.string() + ": truncated coefficient payload");
    }
  } else if (payload != 0) {
    throw FormatError(path.string() + ": payload without B-spline header");
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw FormatError(path.string() + ": trailing bytes after payload");
  return tf;
}

}  // namespace ngfreg::io
