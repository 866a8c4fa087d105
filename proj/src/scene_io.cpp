#include "scenesmith/scene_io.hpp"

#include "json_fields.hpp"
#include "scenesmith/errors.hpp"

namespace scenesmith {

using detail::Json;

namespace {

constexpr std::string_view kFormat = "scenesmith-scene/1";

Json opening_json(const OpeningSpec& o) {
  return Json{{"offset", o.offset}, {"width", o.width}, {"bottom", o.bottom}, {"top", o.top}};
}

OpeningSpec opening_from(const Json& j, const std::string& path) {
  detail::object(j, path);
  OpeningSpec o;
  o.offset = detail::number(detail::require(j, "offset", path), detail::join(path, "offset"));
  o.width = detail::number(detail::require(j, "width", path), detail::join(path, "width"));
  o.bottom = detail::number(detail::require(j, "bottom", path), detail::join(path, "bottom"));
  o.top = detail::number(detail::require(j, "top", path), detail::join(path, "top"));
  return o;
}

Json surface_json(const ReceptacleSurface& s) {
  return Json{{"center", detail::to_json(s.center)}, {"half_size", detail::to_json(s.half_size)}, {"height", s.height}};
}

ReceptacleSurface surface_from(const Json& j, const std::string& path) {
  detail::object(j, path);
  ReceptacleSurface s;
  s.center = detail::vec<2>(detail::require(j, "center", path), detail::join(path, "center"));
  s.half_size = detail::vec<2>(detail::require(j, "half_size", path), detail::join(path, "half_size"));
  s.height = detail::number(detail::require(j, "height", path), detail::join(path, "height"));
  return s;
}

PlacementSource source_from(const Json& j, const std::string& path) {
  const std::string s = detail::string(j, path);
  if (s == "semantic") return PlacementSource::semantic;
  if (s == "small") return PlacementSource::small;
  if (s == "clutter") return PlacementSource::clutter;
  throw SchemaError(path, "expected semantic, small or clutter");
}

Json optional_string(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

std::optional<std::string> optional_string_from(const Json& j, const std::string& path) {
  if (j.is_null()) return std::nullopt;
  return detail::string(j, path);
}

}  // namespace

std::string write_scene(const SceneSpec& s) {
  Json root = Json::object();
  root["format"] = kFormat;
  root["seed"] = s.seed;
  root["template_digest"] = s.template_digest;

  Json rooms = Json::array();
  for (const Room& r : s.rooms) {
    Json poly = Json::array();
    for (const Vec2d& v : r.polygon.vertices) poly.push_back(detail::to_json(v));
    rooms.push_back(Json{{"id", r.id}, {"polygon", std::move(poly)}, {"floor_y", r.floor_y}, {"ceiling_y", r.ceiling_y}});
  }
  root["rooms"] = std::move(rooms);

  Json portals = Json::array();
  for (const Portal& p : s.portals) {
    Json j = Json::object();
    j["kind"] = std::string(to_string(p.kind));
    j["wall_index"] = p.wall_index;
    j["wall"] = Json{{"start", detail::to_json(p.wall.a)}, {"end", detail::to_json(p.wall.b)}, {"thickness", p.wall_thickness}};
    j["opening"] = opening_json(p.opening);
    j["exterior"] = p.exterior;
    j["rooms"] = p.rooms;
    if (p.door_state) {
      j["door_state"] = Json{{"openness", p.door_state->openness},
                             {"swing_room", p.door_state->swing_room},
                             {"has_leaf", p.door_state->has_leaf}};
    } else {
      j["door_state"] = nullptr;
    }
    j["asset_id"] = p.asset_id;
    portals.push_back(std::move(j));
  }
  root["portals"] = std::move(portals);

  Json walls = Json::array();
  for (const OrientedBoxd& w : s.wall_solids) walls.push_back(detail::box_to_json(w));
  root["wall_solids"] = std::move(walls);

  Json placements = Json::array();
  for (const Placement& p : s.placements) {
    Json j = Json::object();
    j["id"] = p.id;
    j["asset_id"] = p.asset_id;
    j["asset_type"] = p.asset_type;
    j["source"] = std::string(to_string(p.source));
    j["room"] = p.room;
    j["box"] = detail::box_to_json(p.box);
    j["parent"] = optional_string(p.parent);
    j["surface"] = p.surface ? surface_json(*p.surface) : Json(nullptr);
    j["supported_by"] = optional_string(p.supported_by);
    j["wall_mounted"] = p.wall_mounted;
    j["scanned_index"] = p.scanned_index ? Json(*p.scanned_index) : Json(nullptr);
    placements.push_back(std::move(j));
  }
  root["placements"] = std::move(placements);

  Json lights = Json::array();
  for (const Light& l : s.lights)
    lights.push_back(Json{{"room", l.room},
                          {"position", detail::to_json(l.position)},
                          {"intensity", l.intensity},
                          {"color", detail::to_json(l.color)},
                          {"shadow_bias", l.shadow_bias}});
  root["lights"] = std::move(lights);

  Json room_mats = Json::array();
  for (const RoomMaterials& m : s.materials.rooms)
    room_mats.push_back(Json{{"room", m.room}, {"wall", m.wall}, {"floor", m.floor}, {"ceiling", m.ceiling}});
  Json obj_mats = Json::object();
  for (const auto& [id, name] : s.materials.objects) obj_mats[id] = name;
  root["materials"] = Json{{"rooms", std::move(room_mats)}, {"objects", std::move(obj_mats)}};

  root["stats"] = Json{{"small_draws", s.stats.small_draws},
                       {"small_placed", s.stats.small_placed},
                       {"clutter_draws", s.stats.clutter_draws},
                       {"clutter_placed", s.stats.clutter_placed}};

  Json diags = Json::array();
  for (const Diagnostic& d : s.diagnostics)
    diags.push_back(Json{{"kind", d.kind}, {"subject", d.subject}, {"detail", d.detail}});
  root["diagnostics"] = std::move(diags);
  return root.dump(2) + "\n";
}

SceneSpec parse_scene(std::string_view bytes) {
  const Json root = detail::parse_json(bytes, "<scene>");
  detail::object(root, "");
  if (const Json* f = detail::optional(root, "format"))
    if (!f->is_string() || f->get<std::string>() != kFormat)
      throw SchemaError("format", "expected \"" + std::string(kFormat) + "\"");

  SceneSpec s;
  s.seed = detail::unsigned_integer(detail::require(root, "seed", ""), "seed");
  s.template_digest = detail::string(detail::require(root, "template_digest", ""), "template_digest");

  const Json& rooms = detail::array(detail::require(root, "rooms", ""), "rooms");
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    const std::string path = detail::index("rooms", i);
    const Json& j = detail::object(rooms[i], path);
    Room r;
    r.id = detail::string(detail::require(j, "id", path), detail::join(path, "id"));
    const std::string ppath = detail::join(path, "polygon");
    const Json& poly = detail::array(detail::require(j, "polygon", path), ppath);
    for (std::size_t k = 0; k < poly.size(); ++k) r.polygon.vertices.push_back(detail::vec<2>(poly[k], detail::index(ppath, k)));
    r.floor_y = detail::number(detail::require(j, "floor_y", path), detail::join(path, "floor_y"));
    r.ceiling_y = detail::number(detail::require(j, "ceiling_y", path), detail::join(path, "ceiling_y"));
    s.rooms.push_back(std::move(r));
  }

  const Json& portals = detail::array(detail::require(root, "portals", ""), "portals");
  for (std::size_t i = 0; i < portals.size(); ++i) {
    const std::string path = detail::index("portals", i);
    const Json& j = detail::object(portals[i], path);
    Portal p;
    const std::string kind = detail::string(detail::require(j, "kind", path), detail::join(path, "kind"));
    if (kind != "door" && kind != "window") throw SchemaError(detail::join(path, "kind"), "expected door or window");
    p.kind = kind == "door" ? PortalKind::door : PortalKind::window;
    p.wall_index = detail::unsigned_integer(detail::require(j, "wall_index", path), detail::join(path, "wall_index"));
    const std::string wpath = detail::join(path, "wall");
    const Json& wall = detail::object(detail::require(j, "wall", path), wpath);
    p.wall.a = detail::vec<2>(detail::require(wall, "start", wpath), detail::join(wpath, "start"));
    p.wall.b = detail::vec<2>(detail::require(wall, "end", wpath), detail::join(wpath, "end"));
    p.wall_thickness = detail::number(detail::require(wall, "thickness", wpath), detail::join(wpath, "thickness"));
    p.opening = opening_from(detail::require(j, "opening", path), detail::join(path, "opening"));
    p.exterior = detail::boolean(detail::require(j, "exterior", path), detail::join(path, "exterior"));
    const std::string rpath = detail::join(path, "rooms");
    const Json& rs = detail::array(detail::require(j, "rooms", path), rpath);
    for (std::size_t k = 0; k < rs.size(); ++k) p.rooms.push_back(detail::string(rs[k], detail::index(rpath, k)));
    const Json& ds = detail::require(j, "door_state", path);
    if (!ds.is_null()) {
      const std::string dpath = detail::join(path, "door_state");
      detail::object(ds, dpath);
      DoorState d;
      d.openness = detail::number(detail::require(ds, "openness", dpath), detail::join(dpath, "openness"));
      d.swing_room = detail::string(detail::require(ds, "swing_room", dpath), detail::join(dpath, "swing_room"));
      d.has_leaf = detail::boolean(detail::require(ds, "has_leaf", dpath), detail::join(dpath, "has_leaf"));
      p.door_state = d;
    }
    p.asset_id = detail::string(detail::require(j, "asset_id", path), detail::join(path, "asset_id"));
    s.portals.push_back(std::move(p));
  }

  const Json& walls = detail::array(detail::require(root, "wall_solids", ""), "wall_solids");
  for (std::size_t i = 0; i < walls.size(); ++i) s.wall_solids.push_back(detail::box_from_json(walls[i], detail::index("wall_solids", i)));

  const Json& placements = detail::array(detail::require(root, "placements", ""), "placements");
  for (std::size_t i = 0; i < placements.size(); ++i) {
    const std::string path = detail::index("placements", i);
    const Json& j = detail::object(placements[i], path);
    Placement p;
    p.id = detail::string(detail::require(j, "id", path), detail::join(path, "id"));
    p.asset_id = detail::string(detail::require(j, "asset_id", path), detail::join(path, "asset_id"));
    p.asset_type = detail::string(detail::require(j, "asset_type", path), detail::join(path, "asset_type"));
    p.source = source_from(detail::require(j, "source", path), detail::join(path, "source"));
    p.room = detail::string(detail::require(j, "room", path), detail::join(path, "room"));
    p.box = detail::box_from_json(detail::require(j, "box", path), detail::join(path, "box"));
    p.parent = optional_string_from(detail::require(j, "parent", path), detail::join(path, "parent"));
    const Json& surf = detail::require(j, "surface", path);
    if (!surf.is_null()) p.surface = surface_from(surf, detail::join(path, "surface"));
    p.supported_by = optional_string_from(detail::require(j, "supported_by", path), detail::join(path, "supported_by"));
    p.wall_mounted = detail::boolean(detail::require(j, "wall_mounted", path), detail::join(path, "wall_mounted"));
    const Json& si = detail::require(j, "scanned_index", path);
    if (!si.is_null()) p.scanned_index = detail::unsigned_integer(si, detail::join(path, "scanned_index"));
    s.placements.push_back(std::move(p));
  }

  const Json& lights = detail::array(detail::require(root, "lights", ""), "lights");
  for (std::size_t i = 0; i < lights.size(); ++i) {
    const std::string path = detail::index("lights", i);
    const Json& j = detail::object(lights[i], path);
    Light l;
    l.room = detail::string(detail::require(j, "room", path), detail::join(path, "room"));
    l.position = detail::vec<3>(detail::require(j, "position", path), detail::join(path, "position"));
    l.intensity = detail::number(detail::require(j, "intensity", path), detail::join(path, "intensity"));
    l.color = detail::vec<3>(detail::require(j, "color", path), detail::join(path, "color"));
    l.shadow_bias = detail::number(detail::require(j, "shadow_bias", path), detail::join(path, "shadow_bias"));
    s.lights.push_back(l);
  }

  const Json& mats = detail::object(detail::require(root, "materials", ""), "materials");
  const Json& room_mats = detail::array(detail::require(mats, "rooms", "materials"), "materials.rooms");
  for (std::size_t i = 0; i < room_mats.size(); ++i) {
    const std::string path = detail::index("materials.rooms", i);
    const Json& j = detail::object(room_mats[i], path);
    RoomMaterials m;
    m.room = detail::string(detail::require(j, "room", path), detail::join(path, "room"));
    m.wall = detail::string(detail::require(j, "wall", path), detail::join(path, "wall"));
    m.floor = detail::string(detail::require(j, "floor", path), detail::join(path, "floor"));
    m.ceiling = detail::string(detail::require(j, "ceiling", path), detail::join(path, "ceiling"));
    s.materials.rooms.push_back(std::move(m));
  }
  const Json& obj_mats = detail::object(detail::require(mats, "objects", "materials"), "materials.objects");
  for (const auto& [id, name] : obj_mats.items()) s.materials.objects[id] = detail::string(name, "materials.objects." + id);

  if (const Json* st = detail::optional(root, "stats")) {
    detail::object(*st, "stats");
    s.stats.small_draws = detail::unsigned_integer(detail::require(*st, "small_draws", "stats"), "stats.small_draws");
    s.stats.small_placed = detail::unsigned_integer(detail::require(*st, "small_placed", "stats"), "stats.small_placed");
    s.stats.clutter_draws = detail::unsigned_integer(detail::require(*st, "clutter_draws", "stats"), "stats.clutter_draws");
    s.stats.clutter_placed = detail::unsigned_integer(detail::require(*st, "clutter_placed", "stats"), "stats.clutter_placed");
  }

  const Json& diags = detail::array(detail::require(root, "diagnostics", ""), "diagnostics");
  for (std::size_t i = 0; i < diags.size(); ++i) {
    const std::string path = detail::index("diagnostics", i);
    const Json& j = detail::object(diags[i], path);
    s.diagnostics.push_back({detail::string(detail::require(j, "kind", path), detail::join(path, "kind")),
                             detail::string(detail::require(j, "subject", path), detail::join(path, "subject")),
                             detail::string(detail::require(j, "detail", path), detail::join(path, "detail"))});
  }
  return s;
}

SceneSpec load_scene(const std::filesystem::path& path) { return parse_scene(read_file(path)); }

}  // namespace scenesmith
