#include "scenesmith/populate.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <numeric>
#include <thread>

#include "scenesmith/digest.hpp"
#include "scenesmith/errors.hpp"

namespace scenesmith {

namespace {

// Scanned objects whose bottom is this far above the floor rest on something.
constexpr double kSurfaceGap = 0.05;

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string placement_id(std::size_t n) { return "obj_" + std::to_string(n); }

bool collides_with_walls(const OrientedBoxd& box, const Layout& layout, double clearance) {
  for (const OrientedBoxd& w : layout.wall_solids)
    if (obb_intersects(box, w, clearance)) return true;
  return false;
}

const Placement* first_collision(const OrientedBoxd& box, const std::vector<Placement>& a,
                                 const std::vector<Placement>& b, double clearance,
                                 std::string_view exempt = {}) {
  for (const auto* list : {&a, &b})
    for (const Placement& p : *list)
      if (p.id != exempt && obb_intersects(box, p.box, clearance)) return &p;
  return nullptr;
}

bool footprint_inside(const OrientedBoxd& box, const Polygon2d& poly) {
  const auto fp = box.footprint();
  for (const Vec2d& c : fp)
    if (!point_in_polygon(c, poly)) return false;
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < fp.size(); ++i) {
    const Vec2d a = fp[i], b = fp[(i + 1) % fp.size()];
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Vec2d c = v[k], d = v[(k + 1) % v.size()];
      // Proper crossings only; touching the room boundary is allowed.
      const double o1 = cross2<double>(b - a, c - a), o2 = cross2<double>(b - a, d - a);
      const double o3 = cross2<double>(d - c, a - c), o4 = cross2<double>(d - c, b - c);
      if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
        return false;
    }
  }
  return true;
}

bool on_surface(const OrientedBoxd& child, const OrientedBoxd& parent, const ReceptacleSurface& s) {
  for (const Vec2d& corner : child.footprint()) {
    const Vec2d l = parent.to_local(corner) - s.center;
    if (std::abs(l.x()) > s.half_size.x() + 1e-9 || std::abs(l.y()) > s.half_size.y() + 1e-9) return false;
  }
  return true;
}

double rect_overlap_in_polygon(const OrientedBoxd& box, const Polygon2d& poly) {
  // Clipped to the room when the room is convex; otherwise the whole footprint counts.
  const auto hull = convex_hull(poly.vertices);
  const bool convex = std::abs(signed_area<double>(std::span<const Vec2d>(hull)) - signed_area(poly)) < 1e-9;
  if (!convex) return point_in_polygon(box.center2(), poly) ? box.footprint_area() : 0.0;
  const auto fp = box.footprint();
  const auto clipped =
      clip_convex<double>(std::span<const Vec2d>(fp), std::span<const Vec2d>(hull));
  return clipped.size() < 3 ? 0.0 : signed_area<double>(std::span<const Vec2d>(clipped));
}

}  // namespace

std::string_view to_string(PlacementSource s) {
  switch (s) {
    case PlacementSource::semantic: return "semantic";
    case PlacementSource::small: return "small";
    case PlacementSource::clutter: return "clutter";
  }
  return "semantic";
}

Palettes default_palettes() {
  Palettes p;
  p.wall = {"white_plaster", "beige_paint", "grey_paint", "sage_paint", "red_brick", "floral_wallpaper"};
  p.floor = {"oak_planks", "walnut_planks", "grey_tile", "white_marble", "beige_carpet", "polished_concrete"};
  p.ceiling = {"white_plaster", "off_white_paint", "acoustic_tile"};
  p.object = {
      {"wood", {"light_oak", "dark_walnut", "painted_white", "cherry", "birch_plywood"}},
      {"fabric", {"grey_linen", "navy_velvet", "beige_wool", "green_corduroy", "black_leather"}},
      {"metal", {"brushed_steel", "black_steel", "chrome", "brass"}},
      {"plastic", {"white_plastic", "black_plastic", "red_plastic", "blue_plastic"}},
      {"ceramic", {"white_glaze", "terracotta", "blue_glaze"}},
      {"glass", {"clear_glass", "frosted_glass", "tinted_glass"}},
  };
  return p;
}

const Placement* SceneSpec::find(std::string_view id) const {
  for (const Placement& p : placements)
    if (p.id == id) return &p;
  return nullptr;
}

std::vector<Placement> place_semantic(const Layout& layout, const std::vector<ScannedObject>& objects,
                                      const Catalog& catalog, const GenerationConfig& cfg, Rng& rng,
                                      std::vector<Diagnostic>& diagnostics) {
  std::vector<Placement> out;
  // Supports are placed before what rests on them.
  std::vector<std::size_t> order(objects.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return objects[a].box.bottom() < objects[b].box.bottom();
  });

  for (std::size_t idx : order) {
    const ScannedObject& scanned = objects[idx];
    const std::string subject = "objects[" + std::to_string(idx) + "]";
    const auto room = room_at(layout.rooms, scanned.box.center2());
    if (!room) {
      diagnostics.push_back({"outside_rooms", subject, "scanned center lies in no room"});
      continue;
    }
    const Room& r = layout.rooms[*room];

    const Placement* support = nullptr;
    const bool resting_on_surface = !scanned.wall_mounted && scanned.box.bottom() > r.floor_y + kSurfaceGap;
    if (resting_on_surface) {
      double best_top = -1e300;
      for (const Placement& p : out) {
        const OrientedBoxd& sb = objects[*p.scanned_index].box;
        if (p.wall_mounted || sb.top() > scanned.box.bottom() + kSurfaceGap) continue;
        if (footprint_distance(scanned.box.center2(), sb) > 0) continue;
        if (sb.top() > best_top) {
          best_top = sb.top();
          support = &p;
        }
      }
      if (!support) {
        diagnostics.push_back({"no_support", subject, "no placed object under a raised scanned object"});
        continue;
      }
    }

    const auto choice = sample_replacement(scanned, catalog, cfg.iou_threshold, rng, cfg.fallback);
    if (!choice) {
      std::string detail = "no " + std::string(to_string(scanned.category)) + " asset passes the IoU gate";
      double best = 0, best_footprint = 0;
      for (const Candidate& c : eligible_assets(scanned, catalog, 0.0)) {
        best = std::max(best, c.iou);
        best_footprint = std::max(best_footprint, c.footprint_iou);
      }
      detail += " (best volume IoU " + fixed3(best) + ", best footprint IoU " + fixed3(best_footprint) + ")";
      diagnostics.push_back({"no_eligible_asset", subject, detail});
      continue;
    }
    const AssetDef& asset = *choice->asset;
    Vec3d center = scanned.box.center;
    if (scanned.wall_mounted) {
      center.y() = scanned.box.center.y();
    } else if (support) {
      center.y() = support->box.top() + asset.bounding.y();
    } else {
      center.y() = r.floor_y + asset.bounding.y();
    }
    const OrientedBoxd box(center, asset.bounding, yaw_from_forward(scanned.forward));

    if (!scanned.wall_mounted && collides_with_walls(box, layout, cfg.clearance)) {
      diagnostics.push_back({"collision", subject, asset.id + " would intersect a wall"});
      continue;
    }
    const Placement* hit = nullptr;
    for (const Placement& p : out) {
      if (support && p.id == support->id) continue;
      if (obb_intersects(box, p.box, cfg.clearance)) {
        hit = &p;
        break;
      }
    }
    if (hit) {
      diagnostics.push_back({"collision", subject, asset.id + " would intersect " + hit->id});
      continue;
    }

    Placement p;
    p.id = placement_id(out.size());
    p.asset_id = asset.id;
    p.asset_type = asset.asset_type;
    p.box = box;
    p.source = PlacementSource::semantic;
    if (support) p.supported_by = support->id;
    p.room = r.id;
    p.wall_mounted = scanned.wall_mounted;
    p.scanned_index = idx;
    out.push_back(std::move(p));
  }
  return out;
}

SmallResult place_small(const Layout& layout, const std::vector<Placement>& placements, const Catalog& catalog,
                        const GenerationConfig& cfg, Rng& rng) {
  SmallResult result;
  const auto& smalls = catalog.small_assets();
  for (const Placement& parent : placements) {
    const AssetDef* asset = catalog.find(parent.asset_id);
    if (!asset) continue;
    for (const ReceptacleSurface& s : asset->receptacle_surfaces) {
      const std::uint64_t k = rng.poisson(cfg.small_density * s.area());
      result.draws += k;
      if (smalls.empty()) continue;
      for (std::uint64_t item = 0; item < k; ++item) {
        const AssetDef& child = *smalls[rng.below(smalls.size())];
        for (int attempt = 0; attempt < cfg.max_tries; ++attempt) {
          const double yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
          const Vec2d local(s.center.x() + rng.uniform(-s.half_size.x(), s.half_size.x()),
                            s.center.y() + rng.uniform(-s.half_size.y(), s.half_size.y()));
          const Vec2d world = parent.box.to_world(local);
          const double y = parent.box.bottom() + s.height + child.bounding.y();
          const OrientedBoxd box(Vec3d(world.x(), y, world.y()), child.bounding, parent.box.yaw + yaw);
          if (!on_surface(box, parent.box, s)) continue;
          if (collides_with_walls(box, layout, cfg.clearance)) continue;
          if (first_collision(box, placements, result.placements, cfg.clearance, parent.id)) continue;
          Placement p;
          p.id = placement_id(placements.size() + result.placements.size());
          p.asset_id = child.id;
          p.asset_type = child.asset_type;
          p.box = box;
          p.source = PlacementSource::small;
          p.parent = parent.id;
          p.surface = s;
          p.room = parent.room;
          result.placements.push_back(std::move(p));
          break;
        }
      }
    }
  }
  return result;
}

std::vector<OrientedBoxd> door_clearances(const Layout& layout) {
  std::vector<OrientedBoxd> out;
  for (const Portal& p : layout.portals) {
    if (p.kind != PortalKind::door) continue;
    for (const std::string& room : p.rooms) out.push_back(door_clearance(p, layout.rooms, room));
  }
  return out;
}

double free_floor_area(const Room& room, const std::vector<Placement>& placements) {
  double covered = 0;
  for (const Placement& p : placements) {
    if (p.room != room.id || p.source == PlacementSource::small || p.wall_mounted || p.supported_by) continue;
    covered += rect_overlap_in_polygon(p.box, room.polygon);
  }
  return std::max(0.0, room.area() - covered);
}

Vec2d sample_in_polygon(const Polygon2d& poly, Rng& rng) {
  const auto [lo, hi] = bounds<double>(std::span<const Vec2d>(poly.vertices));
  for (int i = 0; i < 10000; ++i) {
    const Vec2d p(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()));
    if (point_in_polygon(p, poly, 0.0)) return p;
  }
  return centroid(poly);
}

ClutterResult place_clutter(const Layout& layout, const std::vector<Placement>& placements, const Catalog& catalog,
                            const GenerationConfig& cfg, Rng& rng) {
  ClutterResult result;
  const auto& clutter = catalog.clutter_assets();
  const auto doors = door_clearances(layout);
  for (const Room& room : layout.rooms) {
    const std::uint64_t n = rng.poisson(cfg.clutter_density * free_floor_area(room, placements));
    result.draws += n;
    if (clutter.empty()) continue;
    for (std::uint64_t item = 0; item < n; ++item) {
      const AssetDef& asset = *clutter[rng.below(clutter.size())];
      for (int attempt = 0; attempt < cfg.max_tries; ++attempt) {
        const Vec2d at = sample_in_polygon(room.polygon, rng);
        const double yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
        const OrientedBoxd box(Vec3d(at.x(), room.floor_y + asset.bounding.y(), at.y()), asset.bounding, yaw);
        if (!footprint_inside(box, room.polygon)) continue;
        if (collides_with_walls(box, layout, cfg.clearance)) continue;
        if (first_collision(box, placements, result.placements, cfg.clearance)) continue;
        bool blocks_door = false;
        for (const OrientedBoxd& d : doors) blocks_door = blocks_door || obb_intersects(box, d, 0.0);
        if (blocks_door) continue;
        Placement p;
        p.id = placement_id(placements.size() + result.placements.size());
        p.asset_id = asset.id;
        p.asset_type = asset.asset_type;
        p.box = box;
        p.source = PlacementSource::clutter;
        p.room = room.id;
        result.placements.push_back(std::move(p));
        break;
      }
    }
  }
  return result;
}

std::vector<Light> sample_lighting(const Layout& layout, const LightingConfig& cfg, Rng& rng) {
  std::vector<Light> out;
  auto make = [&](const Room& room) {
    Light l;
    l.room = room.id;
    const Vec2d at = sample_in_polygon(room.polygon, rng);
    l.position = Vec3d(at.x(), room.ceiling_y - cfg.ceiling_offset, at.y());
    l.intensity = rng.uniform(cfg.intensity_lo, cfg.intensity_hi);
    for (int c = 0; c < 3; ++c) l.color[c] = rng.uniform(cfg.rgb_lo, 1.0);
    l.shadow_bias = rng.uniform(cfg.shadow_bias_lo, cfg.shadow_bias_hi);
    return l;
  };
  for (const Room& room : layout.rooms) out.push_back(make(room));
  const auto budget = static_cast<std::int64_t>(cfg.extra_lights_per_room) *
                      static_cast<std::int64_t>(layout.rooms.size());
  const std::int64_t extra = budget > 0 ? rng.between(0, budget) : 0;
  for (std::int64_t i = 0; i < extra; ++i) out.push_back(make(layout.rooms[rng.below(layout.rooms.size())]));
  return out;
}

MaterialAssignment sample_materials(const Layout& layout, const std::vector<Placement>& placements,
                                    const Catalog& catalog, const Palettes& palettes, Rng& rng) {
  if (palettes.wall.empty()) throw EmptyPaletteError("wall palette is empty");
  if (palettes.floor.empty()) throw EmptyPaletteError("floor palette is empty");
  if (palettes.ceiling.empty()) throw EmptyPaletteError("ceiling palette is empty");
  for (const auto& [cls, names] : palettes.object)
    if (names.empty()) throw EmptyPaletteError("object palette '" + cls + "' is empty");

  MaterialAssignment m;
  for (const Room& room : layout.rooms) {
    RoomMaterials rm;
    rm.room = room.id;
    rm.wall = palettes.wall[rng.below(palettes.wall.size())];
    rm.floor = palettes.floor[rng.below(palettes.floor.size())];
    rm.ceiling = palettes.ceiling[rng.below(palettes.ceiling.size())];
    m.rooms.push_back(std::move(rm));
  }
  for (const Placement& p : placements) {
    const AssetDef* asset = catalog.find(p.asset_id);
    if (!asset) continue;
    auto it = palettes.object.find(asset->material_class);
    if (it == palettes.object.end()) continue;
    m.objects[p.id] = it->second[rng.below(it->second.size())];
  }
  return m;
}

SceneSpec generate_scene(const EnvironmentTemplate& t, const Catalog& catalog, const GenerationConfig& cfg,
                         std::uint64_t seed) {
  SceneSpec scene;
  scene.seed = seed;
  scene.template_digest = sha256_hex(write_template(t));

  Rng layout_rng = Rng::stream(seed, "layout");
  Layout layout = build_layout(t, layout_rng, cfg.layout);

  Rng portal_rng = Rng::stream(seed, "portal");
  for (Portal& p : layout.portals) {
    const auto& choices = catalog.of_type(to_string(p.kind));
    if (!choices.empty()) p.asset_id = choices[portal_rng.below(choices.size())]->id;
  }

  Rng semantic_rng = Rng::stream(seed, "semantic");
  std::vector<Placement> placements = place_semantic(layout, t.objects, catalog, cfg, semantic_rng, scene.diagnostics);

  Rng small_rng = Rng::stream(seed, "small");
  SmallResult small = place_small(layout, placements, catalog, cfg, small_rng);
  scene.stats.small_draws = small.draws;
  scene.stats.small_placed = small.placements.size();
  for (Placement& p : small.placements) placements.push_back(std::move(p));

  Rng clutter_rng = Rng::stream(seed, "clutter");
  ClutterResult clutter = place_clutter(layout, placements, catalog, cfg, clutter_rng);
  scene.stats.clutter_draws = clutter.draws;
  scene.stats.clutter_placed = clutter.placements.size();
  for (Placement& p : clutter.placements) placements.push_back(std::move(p));

  Rng light_rng = Rng::stream(seed, "light");
  scene.lights = sample_lighting(layout, cfg.lighting, light_rng);

  Rng material_rng = Rng::stream(seed, "material");
  scene.materials = sample_materials(layout, placements, catalog, cfg.palettes, material_rng);

  scene.rooms = std::move(layout.rooms);
  scene.portals = std::move(layout.portals);
  scene.wall_solids = std::move(layout.wall_solids);
  scene.placements = std::move(placements);
  return scene;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

BatchResult generate_batch(const EnvironmentTemplate& t, const Catalog& catalog, const GenerationConfig& cfg,
                           std::uint64_t base_seed, std::size_t n, unsigned workers) {
  BatchResult result;
  result.scenes.resize(n);
  std::vector<std::optional<BatchError>> errors(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const std::uint64_t seed = split_seed(base_seed, i);
    try {
      result.scenes[i] = generate_scene(t, catalog, cfg, seed);
    } catch (const std::exception& e) {
      errors[i] = BatchError{i, seed, e.what()};
    }
  });
  for (auto& e : errors)
    if (e) result.errors.push_back(std::move(*e));
  return result;
}

}  // namespace scenesmith
