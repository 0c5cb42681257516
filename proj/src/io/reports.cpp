#include "ngfreg/io/reports.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ngfreg/errors.hpp"
#include "ngfreg/io/config_file.hpp"
#include "ngfreg/io/landmarks.hpp"

namespace ngfreg::io {

namespace {

using nlohmann::json;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
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

}  // namespace

std::string format_run_report(const RegistrationResult& result, const PipelineConfig& cfg) {
  std::ostringstream out;
  out << "ngfreg registration report\n";
  out << "reference: " << result.reference_width << "x" << result.reference_height << " px\n";
  out << "template:  " << result.template_width << "x" << result.template_height << " px\n";
  out << "physical scale: " << fmt("%.17g", result.physical_scale) << " per pixel\n";
  out << "steps run: " << result.steps_run << "\n\n";
  out << "NGF at the common evaluation resolution\n";
  out << "  initial (identity): " << fmt("%.6g", result.initial_ngf) << "\n";
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const StepReport& r = result.reports[i];
    out << "  step " << i + 1 << " (" << r.name << "): ngf " << fmt("%.6g", r.ngf) << ", "
        << fmt("%.3f", r.seconds) << " s, stop reasons per level:";
    for (const std::string& s : r.stop_reasons) out << ' ' << s;
    out << "\n";
  }
  out << "\nrigid: angle " << fmt("%.9g", result.rigid.angle) << " rad, translation ("
      << fmt("%.9g", result.rigid.translation.x) << ", " << fmt("%.9g", result.rigid.translation.y)
      << "), center (" << fmt("%.9g", result.rigid.center.x) << ", "
      << fmt("%.9g", result.rigid.center.y) << ")\n";
  if (result.steps_run >= 2) {
    out << "affine:";
    for (double a : result.affine.a) out << ' ' << fmt("%.9g", a);
    out << "\n";
  }
  if (result.field)
    out << "b-spline grid: " << result.field->grid().nx << "x" << result.field->grid().ny << "\n";
  out << "\nparameters\n" << format_config(cfg);
  return out.str();
}

std::string metrics_to_json(const MetricsReport& r) {
  json j;
  j["pairs"] = r.final_mrtre.size();
  j["final_mrtre"] = r.final_mrtre;
  j["initial_mrtre"] = r.initial_mrtre;
  j["amrtre"] = r.amrtre;
  j["mmrtre"] = r.mmrtre;
  j["robustness"] = optional_number(r.robustness);
  j["max_area_change_percent"] = optional_number(r.max_area_change_percent);
  j["min_jacobian"] = optional_number(r.min_jacobian);
  return j.dump(2) + "\n";
}

MetricsReport metrics_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    MetricsReport r;
    r.final_mrtre = j.at("final_mrtre").get<std::vector<double>>();
    r.initial_mrtre = j.at("initial_mrtre").get<std::vector<double>>();
    r.amrtre = j.at("amrtre").get<double>();
    r.mmrtre = j.at("mmrtre").get<double>();
    r.robustness = read_optional(j, "robustness");
    r.max_area_change_percent = read_optional(j, "max_area_change_percent");
    r.min_jacobian = read_optional(j, "min_jacobian");
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("metrics file: ") + e.what());
  }
}

void write_metrics(const std::filesystem::path& path, const MetricsReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << metrics_to_json(report);
  if (!out) throw IoError("write failed: " + path.string());
}

MetricsReport read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metrics: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return metrics_from_json(ss.str());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  const std::filesystem::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  auto number = [&](const std::string& tok, int line_no) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size() || !(v > 0.0))
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad extent '" + tok +
                        "'");
    return v;
  };

  std::string line;
  int line_no = 0;
  bool header = false;
  bool with_initial = false;
  std::vector<ManifestEntry> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (!header) {
      const bool base4 = f.size() >= 4 && f[0] == "warped" && f[1] == "target" &&
                         f[2] == "width" && f[3] == "height";
      if (!base4 || f.size() > 5 || (f.size() == 5 && f[4] != "initial"))
        throw FormatError(path.string() + ":" + std::to_string(line_no) +
                          ": expected header 'warped,target,width,height[,initial]'");
      with_initial = f.size() == 5;
      header = true;
      continue;
    }
    if (f.size() != (with_initial ? 5u : 4u))
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": wrong field count");
    if (f[0].empty() || f[1].empty() || (with_initial && f[4].empty()))
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": empty path");
    ManifestEntry e;
    e.warped = resolve(f[0]);
    e.target = resolve(f[1]);
    e.extent = {number(f[2], line_no), number(f[3], line_no)};
    if (with_initial) e.initial = resolve(f[4]);
    out.push_back(std::move(e));
  }
  if (!header) throw FormatError(path.string() + ": empty manifest");
  if (out.empty()) throw FormatError(path.string() + ": manifest lists no pairs");
  return out;
}

MetricsReport evaluate_manifest(const std::vector<ManifestEntry>& entries) {
  std::vector<double> final_values, initial_values;
  const bool with_initial = !entries.empty() && entries.front().initial.has_value();
  for (const ManifestEntry& e : entries) {
    const LandmarkSet target{read_landmarks(e.target), e.extent};
    const LandmarkSet warped{read_landmarks(e.warped), e.extent};
    final_values.push_back(mrtre(warped, target));
    if (with_initial) {
      if (!e.initial) throw InvalidInput("manifest rows disagree on the initial column");
      initial_values.push_back(mrtre(LandmarkSet{read_landmarks(*e.initial), e.extent}, target));
    }
  }
  return make_report(std::move(final_values), std::move(initial_values));
}

}  // namespace ngfreg::io
