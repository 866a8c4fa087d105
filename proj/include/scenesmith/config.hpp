#pragma once

// Run configuration: every tunable of generation, navigation analysis and model fitting
// in one flat JSON object. Missing keys keep their defaults, unknown keys are errors.

#include <filesystem>
#include <string>
#include <string_view>

#include "scenesmith/analysis.hpp"
#include "scenesmith/populate.hpp"
#include "scenesmith/validate.hpp"

namespace scenesmith {

struct RunConfig {
  GenerationConfig gen;
  NavConfig nav;
  FitOptions fit;

  bool operator==(const RunConfig&) const = default;
};

/// Throws SchemaError (type or unknown key) or ValidationError (out of range).
RunConfig parse_config(std::string_view bytes);
RunConfig load_config(const std::filesystem::path& path);
/// Every key with its effective value; parse_config(write_config(c)) == c.
std::string write_config(const RunConfig& cfg);

/// Range checks shared by the loader and programmatic callers.
void validate_config(const RunConfig& cfg);

}  // namespace scenesmith
