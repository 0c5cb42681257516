#include "ngfreg/io/config_file.hpp"

#include <array>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ngfreg/errors.hpp"

namespace ngfreg::io {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Context {
  int line = 0;
  std::string key;

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError("config line " + std::to_string(line) + ": " + msg);
  }
};

double to_double(const std::string& v, const Context& ctx) {
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    ctx.fail("bad number '" + v + "' for " + ctx.key);
  return d;
}

int to_int(const std::string& v, const Context& ctx) {
  char* end = nullptr;
  errno = 0;
  const long i = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || i < -2147483647L ||
      i > 2147483647L)
    ctx.fail("bad integer '" + v + "' for " + ctx.key);
  return static_cast<int>(i);
}

GridSize to_grid(const std::string& v, const Context& ctx) {
  const auto x = v.find_first_of("xX");
  if (x == std::string::npos) ctx.fail("grid size must look like 257x257, got '" + v + "'");
  return {to_int(trim(v.substr(0, x)), ctx), to_int(trim(v.substr(x + 1)), ctx)};
}

// Returns false when `key` is not an optimizer key.
bool set_optimizer(OptimizerSettings& o, const std::string& key, const std::string& v,
                   const Context& ctx) {
  if (key == "max_iterations") o.max_iterations = to_int(v, ctx);
  else if (key == "gradient_tolerance") o.gradient_tolerance = to_double(v, ctx);
  else if (key == "objective_change_tolerance") o.objective_change_tolerance = to_double(v, ctx);
  else if (key == "parameter_change_tolerance") o.parameter_change_tolerance = to_double(v, ctx);
  else if (key == "lbfgs_memory") o.lbfgs_memory = to_int(v, ctx);
  else if (key == "armijo_constant") o.armijo_constant = to_double(v, ctx);
  else if (key == "backtracking_factor") o.backtracking_factor = to_double(v, ctx);
  else if (key == "max_backtracks") o.max_backtracks = to_int(v, ctx);
  else if (key == "initial_step") o.initial_step = to_double(v, ctx);
  else return false;
  return true;
}

bool set_step(StepConfig& s, const std::string& key, const std::string& v, const Context& ctx) {
  if (key == "n_max") s.n_max = to_int(v, ctx);
  else if (key == "n_level") s.n_level = to_int(v, ctx);
  else if (key == "epsilon") s.epsilon = to_double(v, ctx);
  else if (key == "n_rot") s.n_rot = to_int(v, ctx);
  else if (key == "alpha") s.alpha = to_double(v, ctx);
  else if (key == "grid_m") s.grid_m = to_grid(v, ctx);
  else return false;
  return true;
}

struct Assignment {
  Context ctx;
  std::string value;
};

}  // namespace

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig cfg = PipelineConfig::defaults();
  std::array<StepConfig*, 3> steps{&cfg.step1, &cfg.step2, &cfg.step3};

  // Optimizer keys are applied in two passes so that step-specific values win
  // regardless of where the [optimizer] section appears.
  std::vector<Assignment> global_opt;
  std::array<std::vector<Assignment>, 3> step_opt;

  int section = -2;  // -2: none, -1: optimizer, 0..2: step index
  std::istringstream in{std::string(text)};
  std::string raw;
  Context ctx;
  while (std::getline(in, raw)) {
    ++ctx.line;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') ctx.fail("unterminated section header");
      const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
      if (name == "step1") section = 0;
      else if (name == "step2") section = 1;
      else if (name == "step3") section = 2;
      else if (name == "optimizer") section = -1;
      else ctx.fail("unknown section [" + name + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) ctx.fail("expected key = value");
    ctx.key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (ctx.key.empty()) ctx.fail("empty key");
    if (section == -2) ctx.fail("key '" + ctx.key + "' outside of a section");

    OptimizerSettings probe;
    if (set_optimizer(probe, ctx.key, value, ctx)) {
      (section == -1 ? global_opt : step_opt[section]).push_back({ctx, value});
      continue;
    }
    if (section == -1) ctx.fail("unknown optimizer key '" + ctx.key + "'");
    if (!set_step(*steps[section], ctx.key, value, ctx))
      ctx.fail("unknown key '" + ctx.key + "' in [step" + std::to_string(section + 1) + "]");
  }

  for (int s = 0; s < 3; ++s) {
    for (const Assignment& a : global_opt) set_optimizer(steps[s]->optimizer, a.ctx.key, a.value, a.ctx);
    for (const Assignment& a : step_opt[s]) set_optimizer(steps[s]->optimizer, a.ctx.key, a.value, a.ctx);
  }
  try {
    cfg.validate();
  } catch (const InvalidInput& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return cfg;
}

PipelineConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string format_config(const PipelineConfig& cfg) {
  std::string out;
  char buf[128];
  auto put = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, v);
    out += buf;
  };
  auto put_int = [&](const char* key, int v) {
    std::snprintf(buf, sizeof buf, "%s = %d\n", key, v);
    out += buf;
  };
  const StepConfig* steps[3] = {&cfg.step1, &cfg.step2, &cfg.step3};
  for (int i = 0; i < 3; ++i) {
    const StepConfig& s = *steps[i];
    if (i > 0) out += '\n';
    out += "[step" + std::to_string(i + 1) + "]\n";
    put_int("n_max", s.n_max);
    put_int("n_level", s.n_level);
    put("epsilon", s.epsilon);
    put_int("n_rot", s.n_rot);
    put("alpha", s.alpha);
    std::snprintf(buf, sizeof buf, "grid_m = %dx%d\n", s.grid_m.nx, s.grid_m.ny);
    out += buf;
    const OptimizerSettings& o = s.optimizer;
    put_int("max_iterations", o.max_iterations);
    put("gradient_tolerance", o.gradient_tolerance);
    put("objective_change_tolerance", o.objective_change_tolerance);
    put("parameter_change_tolerance", o.parameter_change_tolerance);
    put_int("lbfgs_memory", o.lbfgs_memory);
    put("armijo_constant", o.armijo_constant);
    put("backtracking_factor", o.backtracking_factor);
    put_int("max_backtracks", o.max_backtracks);
    put("initial_step", o.initial_step);
  }
  return out;
}

void write_config(const std::filesystem::path& path, const PipelineConfig& cfg) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << format_config(cfg);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace ngfreg::io
