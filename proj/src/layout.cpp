#include "scenesmith/layout.hpp"

#include <algorithm>
#include <cmath>

#include "scenesmith/errors.hpp"

namespace scenesmith {

namespace {

// How far off the wall centerline we probe to find the rooms on either side.
constexpr double kProbe = 0.05;

OrientedBoxd wall_piece(const WallSpec& w, double s0, double s1, double y0, double y1) {
  const Vec2d d = w.direction();
  const Vec2d mid = w.start + d * ((s0 + s1) / 2);
  return OrientedBoxd(Vec3d(mid.x(), (y0 + y1) / 2, mid.y()),
                      Vec3d((s1 - s0) / 2, (y1 - y0) / 2, w.thickness / 2),
                      std::atan2(d.y(), d.x()));
}

std::vector<std::string> rooms_beside(const WallSpec& w, double s, const std::vector<Room>& rooms) {
  const Vec2d d = w.direction();
  const Vec2d n(-d.y(), d.x());
  const Vec2d p = w.start + d * s;
  const double off = w.thickness / 2 + kProbe;
  std::vector<std::string> out;
  for (const Vec2d& probe : {Vec2d(p + n * off), Vec2d(p - n * off)}) {
    if (auto r = room_at(rooms, probe)) {
      if (std::find(out.begin(), out.end(), rooms[*r].id) == out.end()) out.push_back(rooms[*r].id);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(PortalKind k) { return k == PortalKind::door ? "door" : "window"; }

PortalKind classify_opening(const OpeningSpec& o, double floor_eps) {
  return o.bottom <= floor_eps ? PortalKind::door : PortalKind::window;
}

DoorState sample_door_state(const Portal& p, Rng& rng, const LayoutConfig& cfg) {
  DoorState s;
  if (p.exterior) {
    s.has_leaf = true;
    s.openness = 0.0;
    s.swing_room = p.rooms.empty() ? std::string() : p.rooms.front();
    return s;
  }
  s.has_leaf = rng.bernoulli(cfg.leaf_probability);
  s.openness = s.has_leaf ? rng.uniform(cfg.openness_lo, cfg.openness_hi) : 1.0;
  if (!p.rooms.empty()) s.swing_room = p.rooms[rng.below(p.rooms.size())];
  return s;
}

std::vector<OrientedBoxd> wall_solids(const WallSpec& w) {
  const double len = w.length();
  std::vector<OpeningSpec> ops = w.openings;
  std::sort(ops.begin(), ops.end(),
            [](const OpeningSpec& a, const OpeningSpec& b) { return a.offset < b.offset; });

  std::vector<OrientedBoxd> out;
  double cursor = 0;
  for (const OpeningSpec& o : ops) {
    const double s0 = o.offset, s1 = std::min(len, o.offset + o.width);
    if (s0 > cursor) out.push_back(wall_piece(w, cursor, s0, 0, w.height));
    if (o.bottom > 0) out.push_back(wall_piece(w, s0, s1, 0, o.bottom));
    if (o.top < w.height) out.push_back(wall_piece(w, s0, s1, o.top, w.height));
    cursor = std::max(cursor, s1);
  }
  if (cursor < len) out.push_back(wall_piece(w, cursor, len, 0, w.height));
  return out;
}

std::optional<std::size_t> room_at(const std::vector<Room>& rooms, const Vec2d& p) {
  for (std::size_t i = 0; i < rooms.size(); ++i)
    if (point_in_polygon(p, rooms[i].polygon)) return i;
  return std::nullopt;
}

OrientedBoxd door_clearance(const Portal& p, const std::vector<Room>& rooms,
                            const std::string& room_id) {
  const Vec2d along = p.along();
  Vec2d n = p.normal();
  const Vec2d mid = p.midpoint();
  const double depth = p.opening.width;
  // Face the normal into the requested room.
  for (const Room& r : rooms) {
    if (r.id != room_id) continue;
    if (!point_in_polygon(Vec2d(mid + n * (p.wall_thickness / 2 + kProbe)), r.polygon)) n = -n;
    break;
  }
  const Vec2d c = mid + n * (p.wall_thickness / 2 + depth / 2);
  const double height = std::max(p.opening.top, 1e-3);
  return OrientedBoxd(Vec3d(c.x(), height / 2, c.y()),
                      Vec3d(p.opening.width / 2, height / 2, depth / 2),
                      std::atan2(along.y(), along.x()));
}

Layout build_layout(const EnvironmentTemplate& t, Rng& rng, const LayoutConfig& cfg) {
  std::vector<Segment2d> centerlines;
  centerlines.reserve(t.walls.size());
  for (const WallSpec& w : t.walls) centerlines.push_back({w.start, w.end});

  Layout layout;
  const auto faces = extract_faces(centerlines, cfg.snap_tol);
  if (faces.empty()) throw NoEnclosureError("walls enclose no room; the scan is unusable");

  double tallest = 0;
  for (const WallSpec& w : t.walls) tallest = std::max(tallest, w.height);

  for (std::size_t i = 0; i < faces.size(); ++i) {
    Room room;
    room.id = "room_" + std::to_string(i);
    room.polygon = faces[i];
    double ceiling = 0;
    const auto& v = room.polygon.vertices;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Vec2d mid = (v[k] + v[(k + 1) % v.size()]) / 2;
      for (const WallSpec& w : t.walls)
        if (point_segment_distance(mid, w.start, w.end) <= cfg.snap_tol)
          ceiling = std::max(ceiling, w.height);
    }
    room.ceiling_y = ceiling > 0 ? ceiling : tallest;
    layout.rooms.push_back(std::move(room));
  }

  for (std::size_t wi = 0; wi < t.walls.size(); ++wi) {
    const WallSpec& w = t.walls[wi];
    for (const auto& piece : wall_solids(w)) layout.wall_solids.push_back(piece);
    for (const OpeningSpec& o : w.openings) {
      Portal p;
      p.kind = classify_opening(o, cfg.floor_eps);
      p.wall_index = wi;
      p.opening = o;
      p.wall = {w.start, w.end};
      p.wall_thickness = w.thickness;
      p.rooms = rooms_beside(w, o.offset + o.width / 2, layout.rooms);
      p.exterior = p.rooms.size() < 2;
      if (p.kind == PortalKind::door) p.door_state = sample_door_state(p, rng, cfg);
      layout.portals.push_back(std::move(p));
    }
  }
  return layout;
}

}  // namespace scenesmith
