#include "ngfreg/io/landmarks.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "ngfreg/errors.hpp"

namespace ngfreg::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_coord(const std::string& tok, const std::string& source, int line_no) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v))
    throw FormatError(source + ":" + std::to_string(line_no) + ": non-numeric coordinate '" + tok +
                      "'");
  return v;
}

}  // namespace

std::vector<Vec2> parse_landmarks(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  // Header: the first non-empty line.
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (line_no == 0 || trim(line).empty()) throw FormatError(source + ": empty landmark file");
  const auto header = split(line);
  if (header.size() != 3 || header[0] != "id" || header[1] != "x" || header[2] != "y")
    throw FormatError(source + ":" + std::to_string(line_no) + ": expected header 'id,x,y'");

  std::vector<Vec2> pts;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() != 3)
      throw FormatError(source + ":" + std::to_string(line_no) + ": expected 3 fields, got " +
                        std::to_string(f.size()));
    pts.push_back({parse_coord(f[1], source, line_no), parse_coord(f[2], source, line_no)});
  }
  return pts;
}

std::vector<Vec2> read_landmarks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open landmarks: " + path.string());
  return parse_landmarks(in, path.string());
}

void write_landmarks(const std::filesystem::path& path, const std::vector<Vec2>& points) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "id,x,y\n";
  char buf[96];
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, points[i].x, points[i].y);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<Vec2> pixels_to_physical(const std::vector<Vec2>& pts, double scale) {
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const Vec2& p : pts) out.push_back(p * scale);
  return out;
}

std::vector<Vec2> physical_to_pixels(const std::vector<Vec2>& pts, double scale) {
  if (!(scale > 0.0)) throw InvalidInput("scale must be positive");
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const Vec2& p : pts) out.push_back(p * (1.0 / scale));
  return out;
}

}  // namespace ngfreg::io
