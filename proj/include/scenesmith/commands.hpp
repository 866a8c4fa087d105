#pragma once

// Subcommands behind the `scenesmith` executable. Each returns the process exit status:
// 0 success, 1 usage or I/O error, 2 validation failure.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace scenesmith {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvalid = 2;

namespace fs = std::filesystem;

/// --workers if given, else $SCENESMITH_WORKERS, else 1.
unsigned resolve_workers(std::optional<unsigned> flag);

struct GenOptions {
  fs::path template_path;
  fs::path catalog_path;
  std::optional<fs::path> config_path;
  std::uint64_t seed = 0;
  std::size_t n = 1;
  fs::path out = ".";
  std::optional<unsigned> workers;
};

/// Writes scene_{index}_{seed}.scene.json per variant and manifest.json.
int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err);

struct ValidateOptions {
  std::vector<fs::path> scenes;  ///< files, or directories scanned for *.scene.json
  std::optional<fs::path> config_path;
  std::optional<fs::path> template_path;  ///< enables semantic-fidelity and digest checks
  std::optional<fs::path> catalog_path;
  std::optional<unsigned> workers;
};

int cmd_validate(const ValidateOptions& opts, std::ostream& out, std::ostream& err);

struct PreviewOptions {
  fs::path scene;
  std::optional<fs::path> out;  ///< default: scene path with .svg
  std::optional<fs::path> config_path;
  bool show_grid = false;
};

int cmd_preview(const PreviewOptions& opts, std::ostream& out, std::ostream& err);

struct EpisodesOptions {
  fs::path scene;
  std::size_t per_target = 3;
  std::size_t targets = 5;  ///< number of distinct target types
  std::uint64_t seed = 0;
  std::optional<fs::path> catalog_path;
  std::optional<fs::path> config_path;
  std::optional<fs::path> out;  ///< default: stdout
};

int cmd_episodes(const EpisodesOptions& opts, std::ostream& out, std::ostream& err);

struct StatsOptions {
  fs::path trials;
  std::string factors = "model,target,environment,position";
  std::optional<fs::path> config_path;
  std::optional<fs::path> json_out;
};

int cmd_stats(const StatsOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace scenesmith
