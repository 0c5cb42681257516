#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ngfreg/evaluation.hpp"
#include "ngfreg/pipeline.hpp"

namespace ngfreg::io {

/// Human-readable summary of a registration run and the parameters used.
std::string format_run_report(const RegistrationResult& result, const PipelineConfig& cfg);

std::string metrics_to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const std::string& text);
void write_metrics(const std::filesystem::path& path, const MetricsReport& report);
MetricsReport read_metrics(const std::filesystem::path& path);

/// One row of an evaluation manifest.
struct ManifestEntry {
  std::filesystem::path warped;
  std::filesystem::path target;
  Vec2 extent{};  // pixels
  std::optional<std::filesystem::path> initial;
};

/// CSV manifest with header `warped,target,width,height[,initial]`. Relative
/// paths are resolved against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// Evaluate every manifest row.
MetricsReport evaluate_manifest(const std::vector<ManifestEntry>& entries);

}  // namespace ngfreg::io
