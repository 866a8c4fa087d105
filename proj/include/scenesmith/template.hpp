#pragma once

// Environment template: the scanned walls, openings and large objects that condition
// scene generation. File format: `.tmpl.json`, documented in docs/formats/template.md.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scenesmith/geometry.hpp"

namespace scenesmith {

enum class ScanCategory {
  storage,
  sofa,
  table,
  chair,
  bed,
  refrigerator,
  oven,
  stove,
  dishwasher,
  washerDryer,
  fireplace,
  sink,
  bathtub,
  toilet,
  stairs,
  television,
};

inline constexpr std::size_t kScanCategoryCount = 16;

const std::array<ScanCategory, kScanCategoryCount>& all_scan_categories();
std::string_view to_string(ScanCategory c);
std::optional<ScanCategory> parse_scan_category(std::string_view name);

inline constexpr double kDefaultWallThickness = 0.16;

struct OpeningSpec {
  double offset = 0;  ///< along the wall from its start
  double width = 0;
  double bottom = 0;  ///< above the floor
  double top = 0;

  bool operator==(const OpeningSpec&) const = default;
};

struct WallSpec {
  Vec2d start = Vec2d::Zero();
  Vec2d end = Vec2d::Zero();
  double height = 0;
  double thickness = kDefaultWallThickness;
  std::vector<OpeningSpec> openings;

  double length() const { return (end - start).norm(); }
  Vec2d direction() const { return (end - start) / length(); }
  bool operator==(const WallSpec&) const = default;
};

struct ScannedObject {
  ScanCategory category = ScanCategory::storage;
  OrientedBoxd box;
  Vec2d forward = Vec2d(0, 1);
  bool wall_mounted = false;

  bool operator==(const ScannedObject&) const = default;
};

struct EnvironmentTemplate {
  std::vector<WallSpec> walls;
  std::vector<ScannedObject> objects;
  /// Free-form provenance. Unknown top-level keys of a template file land here too.
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();

  bool operator==(const EnvironmentTemplate&) const = default;
};

/// Parses and validates a template. Throws SchemaError, ValidationError or
/// UnknownCategoryError; every error names the offending field path.
EnvironmentTemplate parse_template(std::string_view bytes);

/// Serializes a valid template. parse_template(write_template(t)) == t.
std::string write_template(const EnvironmentTemplate& t);

/// Checks every template invariant; throws ValidationError naming the field.
void validate_template(const EnvironmentTemplate& t);

EnvironmentTemplate load_template(const std::filesystem::path& path);

/// Reads a whole file; throws Error naming the path on failure.
std::string read_file(const std::filesystem::path& path);

}  // namespace scenesmith
