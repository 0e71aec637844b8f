#pragma once

#include <string>

#include "pce/config.hpp"

#include "json.hpp"

namespace pce {

/// AnalysisConfig plus input/output paths, as read from the estimate and
/// diagnose config document. Unknown keys are rejected at every level.
struct CliConfig {
  AnalysisConfig analysis;
  std::string input_csv;
  std::string output_json;
};

CliConfig cli_config_from_json(const nlohmann::json& j);
CliConfig load_cli_config(const std::string& path);

}  // namespace pce
