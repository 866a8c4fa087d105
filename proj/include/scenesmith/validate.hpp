#pragma once

// Navigability and scene-quality analysis over generated scenes.

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scenesmith/catalog.hpp"
#include "scenesmith/populate.hpp"
#include "scenesmith/rng.hpp"
#include "scenesmith/template.hpp"

namespace scenesmith {

struct NavConfig {
  double agent_radius = 0.2;
  /// Obstacles whose bottom is at or above this height do not block the agent.
  double agent_height = 0.6;
  double cell_size = 0.05;
  double area_cutoff = 70.0;    ///< m^2; smaller scenes get the short step budget
  double min_start_dist = 1.0;  ///< m from every target of the episode's type
  double visibility_dist = 1.0; ///< m; a target counts as reached from this close
  std::size_t exact_limit = 10000;

  bool operator==(const NavConfig&) const = default;
};

/// Cell (r, c) covers [origin.x + c*cell, +cell) x [origin.z + r*cell, +cell).
struct OccupancyGrid {
  Vec2d origin = Vec2d::Zero();
  double cell = 0.05;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> blocked;  ///< rows index z, cols index x

  Eigen::Index rows() const { return blocked.rows(); }
  Eigen::Index cols() const { return blocked.cols(); }
  Vec2d center(Eigen::Index r, Eigen::Index c) const {
    return origin + Vec2d((static_cast<double>(c) + 0.5) * cell, (static_cast<double>(r) + 0.5) * cell);
  }
  std::size_t free_count() const { return static_cast<std::size_t>((!blocked).count()); }
};

/// Obstacle footprints that block the agent: wall pieces and non-small placements
/// reaching below agent_height, plus the leaves of closed doors.
std::vector<OrientedBoxd> blocking_boxes(const SceneSpec& scene, const NavConfig& cfg);

/// A cell is blocked when its center lies outside every room or within agent_radius of
/// a blocking footprint.
OccupancyGrid rasterize(const SceneSpec& scene, const NavConfig& cfg);

/// Free-cell graph with 8-connectivity. Diagonal steps cost sqrt(2) cells and may not
/// cut a blocked corner.
class FreeSpaceGraph {
 public:
  explicit FreeSpaceGraph(const OccupancyGrid& grid);

  std::size_t size() const { return cells_.size(); }
  std::pair<Eigen::Index, Eigen::Index> cell(std::size_t node) const { return cells_[node]; }
  std::optional<std::size_t> node_at(Eigen::Index r, Eigen::Index c) const;
  /// Single-source geodesic distances in meters; +inf where unreachable.
  std::vector<double> distances(std::size_t source) const;
  /// Connected component id per node.
  const std::vector<std::size_t>& components() const { return component_; }
  std::size_t component_count() const { return n_components_; }

  struct Arc {
    std::size_t to;
    double cost;
  };
  const std::vector<Arc>& arcs(std::size_t node) const { return adjacency_[node]; }

 private:
  double cell_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> cells_;
  std::vector<std::vector<Arc>> adjacency_;
  std::vector<std::size_t> component_;
  std::size_t n_components_ = 0;
  Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> index_;
};

struct PathLength {
  double meters = 0;
  bool exact = false;
};

/// Free-space geodesic diameter: the longest shortest path between two mutually
/// reachable free cells. Exact (eccentricity-bound pruning over single-source
/// searches) when the grid has fewer than `exact_limit` free cells, double-sweep
/// otherwise.
PathLength longest_shortest_path(const OccupancyGrid& grid, std::size_t exact_limit = 10000);

struct SceneMetrics {
  double area_m2 = 0;
  double longest_path_m = 0;
  bool longest_path_exact = false;
  std::size_t n_rooms = 0;
  std::size_t n_objects = 0;
  std::size_t n_scanned_objects = 0;
};

SceneMetrics scene_metrics(const SceneSpec& scene, const OccupancyGrid& grid, std::size_t exact_limit = 10000);
/// Same, after checking the scene was generated from `t` (ValidationError otherwise).
SceneMetrics scene_metrics(const SceneSpec& scene, const EnvironmentTemplate& t, const OccupancyGrid& grid,
                           std::size_t exact_limit = 10000);

/// Aligned plain-text table: Environment, Area, Longest Path, # Rooms, # Objects,
/// # Scanned Objects.
std::string render_metrics_table(const std::vector<std::pair<std::string, SceneMetrics>>& rows);

inline constexpr double kFovMin = 48.0;
inline constexpr double kFovMax = 65.0;
inline constexpr double kFovStep = 0.2;
inline constexpr int kShortBudget = 250;
inline constexpr int kLongBudget = 500;

struct EpisodeSpec {
  std::string scene;
  Vec2d start = Vec2d::Zero();
  double start_yaw_deg = 0;  ///< multiple of the 30 degree turn increment
  std::string target_type;
  int step_budget = kShortBudget;
  double fov_deg = kFovMin;
};

/// Step budget for a scene of the given total room area.
int step_budget_for(double area_m2, double area_cutoff = 70.0);

/// Horizontal field of view drawn uniformly from {48.0, 48.2, ..., 65.0}.
double sample_fov(Rng& rng);

/// Distinct placement types with at least one reachable instance, sorted. When a
/// catalog is given only target-candidate assets count.
std::vector<std::string> reachable_target_types(const SceneSpec& scene, const OccupancyGrid& grid,
                                                const NavConfig& cfg, const Catalog* catalog = nullptr);

/// `per_target` episodes for each requested type. Starts are uniform over free cells in
/// a component from which some target of the type is within visibility_dist, and at
/// least min_start_dist from every target of the type. Throws UnreachableTargetError.
std::vector<EpisodeSpec> sample_episodes(const SceneSpec& scene, const OccupancyGrid& grid, const NavConfig& cfg,
                                         Rng& rng, const std::vector<std::string>& target_types,
                                         std::size_t per_target, const std::string& scene_ref = "");

std::string write_episodes(const std::vector<EpisodeSpec>& episodes);

/// Top-down SVG: room fills, wall pieces as lines, door and window glyphs, labeled
/// placement footprints and light markers. Byte-identical for equal inputs.
std::string render_preview(const SceneSpec& scene, const OccupancyGrid* grid = nullptr);

struct Violation {
  std::string invariant;  ///< e.g. no-overlap, light-coverage
  std::string detail;
};

struct CheckOptions {
  double clearance = 0.01;
  double openness_lo = 0.8;
  double openness_hi = 1.0;
  /// Optional sources for the semantic-fidelity check.
  const EnvironmentTemplate* source_template = nullptr;
  const Catalog* catalog = nullptr;
};

/// Runs the scene invariant suite. Empty result means the scene is sound.
std::vector<Violation> check_scene(const SceneSpec& scene, const CheckOptions& opts = {});

}  // namespace scenesmith
