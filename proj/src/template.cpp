#include "scenesmith/template.hpp"

#include <fstream>
#include <sstream>

#include "json_fields.hpp"
#include "scenesmith/errors.hpp"

namespace scenesmith {

using detail::Json;

namespace {

constexpr std::string_view kFormat = "scenesmith-template/1";

constexpr std::array<std::pair<ScanCategory, std::string_view>, kScanCategoryCount> kNames{{
    {ScanCategory::storage, "storage"},
    {ScanCategory::sofa, "sofa"},
    {ScanCategory::table, "table"},
    {ScanCategory::chair, "chair"},
    {ScanCategory::bed, "bed"},
    {ScanCategory::refrigerator, "refrigerator"},
    {ScanCategory::oven, "oven"},
    {ScanCategory::stove, "stove"},
    {ScanCategory::dishwasher, "dishwasher"},
    {ScanCategory::washerDryer, "washerDryer"},
    {ScanCategory::fireplace, "fireplace"},
    {ScanCategory::sink, "sink"},
    {ScanCategory::bathtub, "bathtub"},
    {ScanCategory::toilet, "toilet"},
    {ScanCategory::stairs, "stairs"},
    {ScanCategory::television, "television"},
}};

OpeningSpec parse_opening(const Json& j, const std::string& path) {
  detail::object(j, path);
  detail::only_keys(j, {"offset", "width", "bottom", "top"}, path);
  OpeningSpec o;
  o.offset = detail::number(detail::require(j, "offset", path), detail::join(path, "offset"));
  o.width = detail::number(detail::require(j, "width", path), detail::join(path, "width"));
  o.bottom = detail::number(detail::require(j, "bottom", path), detail::join(path, "bottom"));
  o.top = detail::number(detail::require(j, "top", path), detail::join(path, "top"));
  return o;
}

WallSpec parse_wall(const Json& j, const std::string& path) {
  detail::object(j, path);
  detail::only_keys(j, {"start", "end", "height", "thickness", "openings"}, path);
  WallSpec w;
  w.start = detail::vec<2>(detail::require(j, "start", path), detail::join(path, "start"));
  w.end = detail::vec<2>(detail::require(j, "end", path), detail::join(path, "end"));
  w.height = detail::number(detail::require(j, "height", path), detail::join(path, "height"));
  if (const Json* t = detail::optional(j, "thickness"))
    w.thickness = detail::number(*t, detail::join(path, "thickness"));
  if (const Json* ops = detail::optional(j, "openings")) {
    const std::string opath = detail::join(path, "openings");
    detail::array(*ops, opath);
    for (std::size_t i = 0; i < ops->size(); ++i)
      w.openings.push_back(parse_opening((*ops)[i], detail::index(opath, i)));
  }
  return w;
}

ScannedObject parse_object(const Json& j, const std::string& path) {
  detail::object(j, path);
  detail::only_keys(j, {"category", "box", "forward", "wall_mounted"}, path);
  ScannedObject o;
  const std::string cpath = detail::join(path, "category");
  const std::string name = detail::string(detail::require(j, "category", path), cpath);
  const auto cat = parse_scan_category(name);
  if (!cat) throw UnknownCategoryError(cpath, "unknown scan category '" + name + "'");
  o.category = *cat;
  o.box = detail::box_from_json(detail::require(j, "box", path), detail::join(path, "box"));
  o.forward = detail::vec<2>(detail::require(j, "forward", path), detail::join(path, "forward"));
  if (const Json* wm = detail::optional(j, "wall_mounted"))
    o.wall_mounted = detail::boolean(*wm, detail::join(path, "wall_mounted"));
  return o;
}

}  // namespace

const std::array<ScanCategory, kScanCategoryCount>& all_scan_categories() {
  static const auto all = [] {
    std::array<ScanCategory, kScanCategoryCount> out{};
    for (std::size_t i = 0; i < kNames.size(); ++i) out[i] = kNames[i].first;
    return out;
  }();
  return all;
}

std::string_view to_string(ScanCategory c) {
  for (const auto& [cat, name] : kNames)
    if (cat == c) return name;
  return "unknown";
}

std::optional<ScanCategory> parse_scan_category(std::string_view name) {
  for (const auto& [cat, n] : kNames)
    if (n == name) return cat;
  return std::nullopt;
}

void validate_template(const EnvironmentTemplate& t) {
  if (t.walls.size() < 3) throw ValidationError("walls", "at least 3 walls are required");
  for (std::size_t i = 0; i < t.walls.size(); ++i) {
    const WallSpec& w = t.walls[i];
    const std::string path = detail::index("walls", i);
    if (w.start == w.end) throw ValidationError(detail::join(path, "end"), "wall start equals end");
    if (!(w.height > 0)) throw ValidationError(detail::join(path, "height"), "height must be > 0");
    if (!(w.thickness > 0))
      throw ValidationError(detail::join(path, "thickness"), "thickness must be > 0");
    const double len = w.length();
    for (std::size_t k = 0; k < w.openings.size(); ++k) {
      const OpeningSpec& o = w.openings[k];
      const std::string opath = detail::index(detail::join(path, "openings"), k);
      if (!(o.offset >= 0)) throw ValidationError(detail::join(opath, "offset"), "offset must be >= 0");
      if (!(o.width > 0)) throw ValidationError(detail::join(opath, "width"), "width must be > 0");
      if (o.offset + o.width > len + 1e-9)
        throw ValidationError(detail::join(opath, "width"), "opening extends past the wall end");
      if (!(o.bottom >= 0)) throw ValidationError(detail::join(opath, "bottom"), "bottom must be >= 0");
      if (!(o.bottom < o.top))
        throw ValidationError(detail::join(opath, "top"), "top must be above bottom");
      if (o.top > w.height + 1e-9)
        throw ValidationError(detail::join(opath, "top"), "opening is taller than the wall");
    }
  }
  for (std::size_t i = 0; i < t.objects.size(); ++i) {
    const ScannedObject& o = t.objects[i];
    const std::string path = detail::index("objects", i);
    if (!o.box.valid()) throw ValidationError(detail::join(path, "box"), "invalid box");
    if (std::abs(o.forward.norm() - 1.0) > 1e-6)
      throw ValidationError(detail::join(path, "forward"), "forward must be a unit vector");
  }
}

EnvironmentTemplate parse_template(std::string_view bytes) {
  const Json root = detail::parse_json(bytes, "<template>");
  detail::object(root, "");
  EnvironmentTemplate t;
  Json extra = Json::object();
  for (const auto& [key, value] : root.items()) {
    if (key == "format") {
      if (!value.is_string() || value.get<std::string>() != kFormat)
        throw SchemaError("format", "expected \"" + std::string(kFormat) + "\"");
    } else if (key == "meta") {
      if (!value.is_object()) throw SchemaError("meta", "expected an object");
      for (const auto& [mk, mv] : value.items()) t.meta[mk] = mv;
    } else if (key == "walls") {
      detail::array(value, "walls");
      for (std::size_t i = 0; i < value.size(); ++i)
        t.walls.push_back(parse_wall(value[i], detail::index("walls", i)));
    } else if (key == "objects") {
      detail::array(value, "objects");
      for (std::size_t i = 0; i < value.size(); ++i)
        t.objects.push_back(parse_object(value[i], detail::index("objects", i)));
    } else {
      extra[key] = value;
    }
  }
  if (!root.contains("walls")) throw SchemaError("walls", "missing required field");
  for (const auto& [key, value] : extra.items()) {
    if (t.meta.contains(key)) throw SchemaError(key, "unknown field collides with meta." + key);
    t.meta[key] = value;
  }
  validate_template(t);
  return t;
}

std::string write_template(const EnvironmentTemplate& t) {
  Json root = Json::object();
  root["format"] = kFormat;
  root["meta"] = t.meta;
  Json walls = Json::array();
  for (const WallSpec& w : t.walls) {
    Json jw = Json::object();
    jw["start"] = detail::to_json(w.start);
    jw["end"] = detail::to_json(w.end);
    jw["height"] = w.height;
    jw["thickness"] = w.thickness;
    Json ops = Json::array();
    for (const OpeningSpec& o : w.openings)
      ops.push_back(Json{{"offset", o.offset}, {"width", o.width}, {"bottom", o.bottom}, {"top", o.top}});
    jw["openings"] = std::move(ops);
    walls.push_back(std::move(jw));
  }
  root["walls"] = std::move(walls);
  Json objects = Json::array();
  for (const ScannedObject& o : t.objects) {
    Json jo = Json::object();
    jo["category"] = std::string(to_string(o.category));
    jo["box"] = detail::box_to_json(o.box);
    jo["forward"] = detail::to_json(o.forward);
    jo["wall_mounted"] = o.wall_mounted;
    objects.push_back(std::move(jo));
  }
  root["objects"] = std::move(objects);
  return root.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EnvironmentTemplate load_template(const std::filesystem::path& path) {
  return parse_template(read_file(path));
}

}  // namespace scenesmith
