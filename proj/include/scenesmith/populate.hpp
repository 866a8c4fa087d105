#pragma once

// Scene variant generation: semantic replacements, small objects on receptacles, floor
// clutter, lights and materials on top of a layout. One SceneSpec per seed.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scenesmith/catalog.hpp"
#include "scenesmith/layout.hpp"
#include "scenesmith/rng.hpp"
#include "scenesmith/template.hpp"

namespace scenesmith {

enum class PlacementSource { semantic, small, clutter };

std::string_view to_string(PlacementSource s);

struct Placement {
  std::string id;
  std::string asset_id;
  std::string asset_type;
  OrientedBoxd box;
  PlacementSource source = PlacementSource::semantic;
  /// Receptacle parent of a small object, and the parent surface it rests on.
  std::optional<std::string> parent;
  std::optional<ReceptacleSurface> surface;
  /// Semantic object resting on another semantic object (a TV on a table).
  std::optional<std::string> supported_by;
  std::string room;
  bool wall_mounted = false;
  /// Index of the template object this replaces (semantic only).
  std::optional<std::size_t> scanned_index;

  bool operator==(const Placement&) const = default;
};

struct Light {
  std::string room;
  Vec3d position = Vec3d::Zero();
  double intensity = 1;
  Vec3d color = Vec3d::Ones();
  double shadow_bias = 0;

  bool operator==(const Light&) const = default;
};

struct RoomMaterials {
  std::string room;
  std::string wall;
  std::string floor;
  std::string ceiling;

  bool operator==(const RoomMaterials&) const = default;
};

struct MaterialAssignment {
  std::vector<RoomMaterials> rooms;
  /// placement id -> material name; placements whose material class has no palette
  /// are absent.
  std::map<std::string, std::string> objects;

  bool operator==(const MaterialAssignment&) const = default;
};

struct Diagnostic {
  std::string kind;     ///< e.g. no_eligible_asset, collision, outside_rooms
  std::string subject;  ///< e.g. objects[3]
  std::string detail;

  bool operator==(const Diagnostic&) const = default;
};

struct Palettes {
  std::vector<std::string> wall;
  std::vector<std::string> floor;
  std::vector<std::string> ceiling;
  /// material class -> object materials
  std::map<std::string, std::vector<std::string>> object;

  bool operator==(const Palettes&) const = default;
};

Palettes default_palettes();

struct LightingConfig {
  int extra_lights_per_room = 1;
  double intensity_lo = 0.5;
  double intensity_hi = 2.0;
  double rgb_lo = 0.6;
  double shadow_bias_lo = 0.0;
  double shadow_bias_hi = 0.1;
  double ceiling_offset = 0.1;  ///< lights hang this far below the ceiling

  bool operator==(const LightingConfig&) const = default;
};

struct GenerationConfig {
  LayoutConfig layout;
  double iou_threshold = 0.75;
  FallbackMode fallback = FallbackMode::skip;
  double clearance = 0.01;
  double small_density = 1.5;     ///< expected small objects per m^2 of receptacle
  double clutter_density = 0.15;  ///< expected clutter objects per m^2 of free floor
  int max_tries = 50;
  LightingConfig lighting;
  Palettes palettes = default_palettes();

  bool operator==(const GenerationConfig&) const = default;
};

struct PlacementStats {
  std::uint64_t small_draws = 0;    ///< Poisson draws before rejection
  std::uint64_t small_placed = 0;
  std::uint64_t clutter_draws = 0;
  std::uint64_t clutter_placed = 0;

  bool operator==(const PlacementStats&) const = default;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  std::string template_digest;
  std::vector<Room> rooms;
  std::vector<Portal> portals;
  std::vector<OrientedBoxd> wall_solids;
  std::vector<Placement> placements;
  std::vector<Light> lights;
  MaterialAssignment materials;
  PlacementStats stats;
  std::vector<Diagnostic> diagnostics;

  const Placement* find(std::string_view id) const;
  bool operator==(const SceneSpec&) const = default;
};

struct SmallResult {
  std::vector<Placement> placements;
  std::uint64_t draws = 0;
};

struct ClutterResult {
  std::vector<Placement> placements;
  std::uint64_t draws = 0;
};

/// Replaces each scanned object with a sampled catalog asset at the scanned (x, z)
/// and forward direction. Objects that cannot be placed are skipped and reported.
std::vector<Placement> place_semantic(const Layout& layout, const std::vector<ScannedObject>& objects,
                                      const Catalog& catalog, const GenerationConfig& cfg, Rng& rng,
                                      std::vector<Diagnostic>& diagnostics);

/// Poisson(small_density * area) small assets per receptacle surface, each placed by
/// rejection sampling. New placements get ids continuing after `placements`.
SmallResult place_small(const Layout& layout, const std::vector<Placement>& placements,
                        const Catalog& catalog, const GenerationConfig& cfg, Rng& rng);

/// Poisson(clutter_density * free floor area) clutter assets per room, kept off
/// furniture, walls and door clearance regions.
ClutterResult place_clutter(const Layout& layout, const std::vector<Placement>& placements,
                            const Catalog& catalog, const GenerationConfig& cfg, Rng& rng);

/// One light per room plus Uniform{0..extra_lights_per_room * #rooms} extra lights in
/// uniformly chosen rooms.
std::vector<Light> sample_lighting(const Layout& layout, const LightingConfig& cfg, Rng& rng);

/// Throws EmptyPaletteError when any palette is empty.
MaterialAssignment sample_materials(const Layout& layout, const std::vector<Placement>& placements,
                                    const Catalog& catalog, const Palettes& palettes, Rng& rng);

/// Door clearance regions for every door side that faces a room.
std::vector<OrientedBoxd> door_clearances(const Layout& layout);

/// Area of the room polygon not covered by floor-standing placements in that room.
double free_floor_area(const Room& room, const std::vector<Placement>& placements);

/// Uniform point inside a polygon by rejection from its bounding box.
Vec2d sample_in_polygon(const Polygon2d& poly, Rng& rng);

/// build_layout, then semantic, small, clutter, lighting and materials, each on its
/// own named random stream derived from `seed`.
SceneSpec generate_scene(const EnvironmentTemplate& t, const Catalog& catalog, const GenerationConfig& cfg,
                         std::uint64_t seed);

struct BatchError {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct BatchResult {
  std::vector<std::optional<SceneSpec>> scenes;  ///< by index; empty on failure
  std::vector<BatchError> errors;
};

/// Scene i uses seed split_seed(base_seed, i). Output does not depend on `workers`.
BatchResult generate_batch(const EnvironmentTemplate& t, const Catalog& catalog, const GenerationConfig& cfg,
                           std::uint64_t base_seed, std::size_t n, unsigned workers = 1);

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace scenesmith
