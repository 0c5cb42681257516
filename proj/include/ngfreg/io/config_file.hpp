#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ngfreg/pipeline.hpp"

namespace ngfreg::io {

/// INI-style configuration with sections [step1], [step2], [step3] and
/// [optimizer]. Keys in [optimizer] apply to all steps; optimizer keys in a
/// step section override them for that step. Unknown keys are errors.
PipelineConfig parse_config(std::string_view text);
PipelineConfig read_config(const std::filesystem::path& path);
std::string format_config(const PipelineConfig& cfg);
void write_config(const std::filesystem::path& path, const PipelineConfig& cfg);

}  // namespace ngfreg::io
