#include "scenesmith/catalog.hpp"

#include <algorithm>
#include <set>

#include "json_fields.hpp"
#include "scenesmith/errors.hpp"

namespace scenesmith {

using detail::Json;

namespace {

constexpr std::string_view kFormat = "scenesmith-catalog/1";

Mount parse_mount(const Json& j, const std::string& path) {
  const std::string s = detail::string(j, path);
  if (s == "floor") return Mount::floor;
  if (s == "surface") return Mount::surface;
  if (s == "wall") return Mount::wall;
  throw SchemaError(path, "expected floor, surface or wall");
}

AssetDef parse_asset(const Json& j, const std::string& path) {
  detail::object(j, path);
  detail::only_keys(j, {"id", "type", "half_extents", "placeable_on", "material_class", "receptacles", "tags"},
                    path);
  AssetDef a;
  a.id = detail::string(detail::require(j, "id", path), detail::join(path, "id"));
  a.asset_type = detail::string(detail::require(j, "type", path), detail::join(path, "type"));
  if (a.id.empty()) throw SchemaError(detail::join(path, "id"), "must not be empty");
  if (a.asset_type.empty()) throw SchemaError(detail::join(path, "type"), "must not be empty");
  a.bounding = detail::vec<3>(detail::require(j, "half_extents", path), detail::join(path, "half_extents"));
  if (const Json* m = detail::optional(j, "placeable_on"))
    a.placeable_on = parse_mount(*m, detail::join(path, "placeable_on"));
  if (const Json* m = detail::optional(j, "material_class"))
    a.material_class = detail::string(*m, detail::join(path, "material_class"));
  if (const Json* rs = detail::optional(j, "receptacles")) {
    const std::string rpath = detail::join(path, "receptacles");
    detail::array(*rs, rpath);
    for (std::size_t i = 0; i < rs->size(); ++i) {
      const std::string p = detail::index(rpath, i);
      const Json& r = detail::object((*rs)[i], p);
      detail::only_keys(r, {"center", "half_size", "height"}, p);
      ReceptacleSurface s;
      s.center = detail::vec<2>(detail::require(r, "center", p), detail::join(p, "center"));
      s.half_size = detail::vec<2>(detail::require(r, "half_size", p), detail::join(p, "half_size"));
      s.height = detail::number(detail::require(r, "height", p), detail::join(p, "height"));
      a.receptacle_surfaces.push_back(s);
    }
  }
  if (const Json* t = detail::optional(j, "tags")) {
    const std::string tpath = detail::join(path, "tags");
    detail::object(*t, tpath);
    detail::only_keys(*t, {"clutter", "small", "target"}, tpath);
    if (const Json* v = detail::optional(*t, "clutter")) a.tags.is_clutter = detail::boolean(*v, detail::join(tpath, "clutter"));
    if (const Json* v = detail::optional(*t, "small")) a.tags.is_small = detail::boolean(*v, detail::join(tpath, "small"));
    if (const Json* v = detail::optional(*t, "target")) a.tags.is_target_candidate = detail::boolean(*v, detail::join(tpath, "target"));
  }
  return a;
}

void validate_asset(const AssetDef& a, const std::string& path) {
  for (int i = 0; i < 3; ++i)
    if (!(a.bounding[i] > 0))
      throw ValidationError(detail::index(detail::join(path, "half_extents"), static_cast<std::size_t>(i)),
                            "half extents must be > 0");
  for (std::size_t i = 0; i < a.receptacle_surfaces.size(); ++i) {
    const ReceptacleSurface& s = a.receptacle_surfaces[i];
    const std::string p = detail::index(detail::join(path, "receptacles"), i);
    if (!(s.half_size.array() > 0).all()) throw ValidationError(detail::join(p, "half_size"), "must be > 0");
    if (std::abs(s.center.x()) + s.half_size.x() > a.bounding.x() + 1e-9 ||
        std::abs(s.center.y()) + s.half_size.y() > a.bounding.z() + 1e-9)
      throw ValidationError(p, "receptacle surface exceeds the asset footprint");
    if (s.height < 0 || s.height > 2 * a.bounding.y() + 1e-9)
      throw ValidationError(detail::join(p, "height"), "surface height outside the asset");
  }
}

const std::vector<const AssetDef*> kNoAssets;
const std::vector<std::string> kNoTypes;

}  // namespace

std::string_view to_string(Mount m) {
  switch (m) {
    case Mount::floor: return "floor";
    case Mount::surface: return "surface";
    case Mount::wall: return "wall";
  }
  return "floor";
}

Catalog::Catalog(std::vector<AssetDef> assets, std::map<ScanCategory, std::vector<std::string>> category_map)
    : assets_(std::move(assets)), category_map_(std::move(category_map)) {
  if (assets_.empty()) throw SchemaError("assets", "catalog must contain at least one asset");
  std::sort(assets_.begin(), assets_.end(), [](const AssetDef& a, const AssetDef& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < assets_.size(); ++i) {
    validate_asset(assets_[i], "assets[" + assets_[i].id + "]");
    if (i > 0 && assets_[i].id == assets_[i - 1].id)
      throw SchemaError("assets[" + assets_[i].id + "].id", "duplicate asset id");
  }
  build_index();
  for (ScanCategory c : all_scan_categories()) {
    const std::string path = "category_map." + std::string(to_string(c));
    auto it = category_map_.find(c);
    if (it == category_map_.end() || it->second.empty())
      throw SchemaError(path, "every scan category needs at least one asset type");
    for (const std::string& type : it->second)
      if (!has_type(type)) throw DanglingTypeError(path, "asset type '" + type + "' has no assets");
  }
}

Catalog::Catalog(const Catalog& other) : assets_(other.assets_), category_map_(other.category_map_) {
  build_index();
}

Catalog& Catalog::operator=(const Catalog& other) {
  if (this != &other) {
    assets_ = other.assets_;
    category_map_ = other.category_map_;
    build_index();
  }
  return *this;
}

void Catalog::build_index() {
  by_type_.clear();
  small_.clear();
  clutter_.clear();
  for (const AssetDef& a : assets_) {
    by_type_[a.asset_type].push_back(&a);
    if (a.tags.is_small) small_.push_back(&a);
    if (a.tags.is_clutter) clutter_.push_back(&a);
  }
}

const AssetDef* Catalog::find(std::string_view id) const {
  auto it = std::lower_bound(assets_.begin(), assets_.end(), id,
                             [](const AssetDef& a, std::string_view key) { return a.id < key; });
  return it != assets_.end() && it->id == id ? &*it : nullptr;
}

const std::vector<const AssetDef*>& Catalog::of_type(std::string_view type) const {
  auto it = by_type_.find(type);
  return it == by_type_.end() ? kNoAssets : it->second;
}

const std::vector<std::string>& Catalog::types_for(ScanCategory c) const {
  auto it = category_map_.find(c);
  return it == category_map_.end() ? kNoTypes : it->second;
}

Catalog load_catalog(std::string_view bytes) {
  const Json root = detail::parse_json(bytes, "<catalog>");
  detail::object(root, "");
  detail::only_keys(root, {"format", "assets", "category_map"}, "");
  if (const Json* f = detail::optional(root, "format")) {
    if (!f->is_string() || f->get<std::string>() != kFormat)
      throw SchemaError("format", "expected \"" + std::string(kFormat) + "\"");
  }
  const Json& assets = detail::array(detail::require(root, "assets", ""), "assets");
  std::vector<AssetDef> defs;
  for (std::size_t i = 0; i < assets.size(); ++i) defs.push_back(parse_asset(assets[i], detail::index("assets", i)));

  const Json& map = detail::object(detail::require(root, "category_map", ""), "category_map");
  std::map<ScanCategory, std::vector<std::string>> cmap;
  for (const auto& [key, value] : map.items()) {
    const std::string path = detail::join("category_map", key);
    const auto cat = parse_scan_category(key);
    if (!cat) throw UnknownCategoryError(path, "unknown scan category '" + key + "'");
    detail::array(value, path);
    std::vector<std::string> types;
    for (std::size_t i = 0; i < value.size(); ++i) types.push_back(detail::string(value[i], detail::index(path, i)));
    cmap[*cat] = std::move(types);
  }
  return Catalog(std::move(defs), std::move(cmap));
}

Catalog load_catalog_file(const std::filesystem::path& path) { return load_catalog(read_file(path)); }

std::string write_catalog(const Catalog& c) {
  Json root = Json::object();
  root["format"] = kFormat;
  Json assets = Json::array();
  for (const AssetDef& a : c.assets()) {
    Json j = Json::object();
    j["id"] = a.id;
    j["type"] = a.asset_type;
    j["half_extents"] = detail::to_json(a.bounding);
    j["placeable_on"] = std::string(to_string(a.placeable_on));
    j["material_class"] = a.material_class;
    Json rs = Json::array();
    for (const ReceptacleSurface& s : a.receptacle_surfaces)
      rs.push_back(Json{{"center", detail::to_json(s.center)}, {"half_size", detail::to_json(s.half_size)}, {"height", s.height}});
    j["receptacles"] = std::move(rs);
    j["tags"] = Json{{"clutter", a.tags.is_clutter}, {"small", a.tags.is_small}, {"target", a.tags.is_target_candidate}};
    assets.push_back(std::move(j));
  }
  root["assets"] = std::move(assets);
  Json map = Json::object();
  for (ScanCategory cat : all_scan_categories()) map[std::string(to_string(cat))] = c.types_for(cat);
  root["category_map"] = std::move(map);
  return root.dump(2) + "\n";
}

OrientedBoxd pose_like(const AssetDef& asset, const OrientedBoxd& scanned) {
  Vec3d center = scanned.center;
  center.y() = scanned.bottom() + asset.bounding.y();
  return OrientedBoxd(center, asset.bounding, scanned.yaw);
}

std::vector<Candidate> eligible_assets(const ScannedObject& scanned, const Catalog& catalog, double tau) {
  std::vector<Candidate> out;
  for (const std::string& type : catalog.types_for(scanned.category)) {
    for (const AssetDef* a : catalog.of_type(type)) {
      const OrientedBoxd posed = pose_like(*a, scanned.box);
      const double iou = obb_iou(posed, scanned.box);
      if (iou >= tau) out.push_back({a, iou, footprint_iou(posed, scanned.box)});
    }
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.asset->id < b.asset->id; });
  // A type listed twice in the map must not double an asset's weight.
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Candidate& a, const Candidate& b) { return a.asset == b.asset; }),
            out.end());
  return out;
}

std::optional<Candidate> sample_replacement(const ScannedObject& scanned, const Catalog& catalog, double tau,
                                            Rng& rng, FallbackMode fallback) {
  const auto eligible = eligible_assets(scanned, catalog, tau);
  if (!eligible.empty()) return eligible[rng.below(eligible.size())];
  if (fallback == FallbackMode::skip) return std::nullopt;
  const auto all = eligible_assets(scanned, catalog, 0.0);
  if (all.empty()) return std::nullopt;
  return *std::max_element(all.begin(), all.end(),
                           [](const Candidate& a, const Candidate& b) { return a.iou < b.iou; });
}

}  // namespace scenesmith
