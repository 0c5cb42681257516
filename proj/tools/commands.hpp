#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace ngfreg::cli {

struct RegisterOptions {
  std::filesystem::path reference;
  std::filesystem::path templ;
  std::optional<std::filesystem::path> config;
  std::filesystem::path out = ".";
  std::optional<std::filesystem::path> landmarks;
  std::optional<std::filesystem::path> template_landmarks;
  std::string steps = "123";
};

struct TransformOptions {
  std::filesystem::path transform;
  std::optional<std::filesystem::path> image;
  std::optional<std::filesystem::path> landmarks;
  std::optional<std::filesystem::path> reference;
  int checkerboard = 0;
  bool inverse = false;
  std::filesystem::path out;
};

struct EvaluateOptions {
  std::filesystem::path pairs;
  std::optional<std::filesystem::path> out;
};

struct ConvertOptions {
  std::filesystem::path input;
  std::filesystem::path output;
};

int run_register(const RegisterOptions& o);
int run_transform(const TransformOptions& o);
int run_evaluate(const EvaluateOptions& o);
int run_convert(const ConvertOptions& o);

}  // namespace ngfreg::cli
