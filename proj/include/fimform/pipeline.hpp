#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fimform/flight.hpp"
#include "fimform/scenario.hpp"

namespace fimform {

enum class Stage { Allocate = 0, Formation = 1, Fly = 2 };

std::string_view to_string(Stage s);
Stage stage_from_string(std::string_view name);

struct RunOptions {
  Stage stage = Stage::Fly;
  std::optional<std::uint64_t> seed_override;
  std::optional<Controller> controller;  // replaces flight.controllers
};

struct OutputFile {
  std::string name;
  std::string content;
};

/// report.json plus CSV traces, all held in memory until written.
struct RunOutput {
  std::vector<OutputFile> files;

  const std::string& report() const { return files.front().content; }
};

/// Errors are rethrown with the failing stage prefixed, keeping their kind.
RunOutput run_pipeline(const Scenario& s, const RunOptions& opts);

struct FimEvaluation {
  double log_det = 0.0;
  std::string report;  // JSON
};

FimEvaluation eval_fim(const FormationDocument& doc);

/// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_outputs(const RunOutput& out, const std::filesystem::path& dir);

}  // namespace fimform
