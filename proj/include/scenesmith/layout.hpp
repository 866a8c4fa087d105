#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scenesmith/geometry.hpp"
#include "scenesmith/rng.hpp"
#include "scenesmith/template.hpp"

namespace scenesmith {

struct Room {
  std::string id;
  Polygon2d polygon;
  double floor_y = 0;
  double ceiling_y = 0;

  double area() const { return signed_area(polygon); }
  bool operator==(const Room&) const = default;
};

enum class PortalKind { door, window };

std::string_view to_string(PortalKind k);

struct DoorState {
  double openness = 0;     ///< 0 closed, 1 fully open
  std::string swing_room;  ///< room the leaf opens into
  bool has_leaf = true;    ///< false: frame only

  bool operator==(const DoorState&) const = default;
};

struct Portal {
  PortalKind kind = PortalKind::window;
  std::size_t wall_index = 0;
  OpeningSpec opening;
  std::optional<DoorState> door_state;
  bool exterior = false;
  /// Rooms on either side of the opening (at most two).
  std::vector<std::string> rooms;
  /// Host wall centerline and thickness, copied so a scene file is self-contained.
  Segment2d wall;
  double wall_thickness = kDefaultWallThickness;
  /// Door or window asset chosen for this opening; empty when the catalog has none.
  std::string asset_id;

  Vec2d along() const { return (wall.b - wall.a).normalized(); }
  Vec2d normal() const {
    const Vec2d d = along();
    return {-d.y(), d.x()};
  }
  /// Floor-plane midpoint of the opening on the wall centerline.
  Vec2d midpoint() const { return wall.a + along() * (opening.offset + opening.width / 2); }

  bool operator==(const Portal& o) const {
    return kind == o.kind && wall_index == o.wall_index && opening == o.opening &&
           door_state == o.door_state && exterior == o.exterior && rooms == o.rooms &&
           wall.a == o.wall.a && wall.b == o.wall.b && wall_thickness == o.wall_thickness &&
           asset_id == o.asset_id;
  }
};

struct LayoutConfig {
  double snap_tol = 0.05;
  double floor_eps = 0.05;
  /// Chance that an interior door gets an openable leaf rather than a bare frame.
  double leaf_probability = 0.5;
  double openness_lo = 0.8;
  double openness_hi = 1.0;

  bool operator==(const LayoutConfig&) const = default;
};

struct Layout {
  std::vector<Room> rooms;
  std::vector<Portal> portals;
  std::vector<OrientedBoxd> wall_solids;
};

/// Door iff the opening reaches down to within floor_eps of the floor (inclusive).
PortalKind classify_opening(const OpeningSpec& o, double floor_eps = 0.05);

/// Interior doors: leaf with probability `leaf_probability`, openness uniform in
/// [openness_lo, openness_hi] when a leaf exists (1.0 for a bare frame), swing room
/// uniform over the adjacent rooms. Exterior doors: leaf present, fully closed.
DoorState sample_door_state(const Portal& p, Rng& rng, const LayoutConfig& cfg = {});

/// Solid pieces of a wall: full-height runs between openings plus lintel and sill
/// pieces above and below each opening.
std::vector<OrientedBoxd> wall_solids(const WallSpec& w);

/// Rooms are the bounded faces of the wall centerlines; throws NoEnclosureError when
/// there are none.
Layout build_layout(const EnvironmentTemplate& t, Rng& rng, const LayoutConfig& cfg = {});

/// Index of the room containing `p`, if any.
std::optional<std::size_t> room_at(const std::vector<Room>& rooms, const Vec2d& p);

/// Region in front of a door on the side of `room_id`, as deep as the door is wide.
/// Clutter may not intersect it.
OrientedBoxd door_clearance(const Portal& p, const std::vector<Room>& rooms,
                            const std::string& room_id);

}  // namespace scenesmith
