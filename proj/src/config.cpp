#include "scenesmith/config.hpp"

#include <functional>
#include <variant>

#include "json_fields.hpp"
#include "scenesmith/template.hpp"

namespace scenesmith {

namespace {

using detail::Json;

// One entry per flat key, pointing into a RunConfig.
struct Field {
  const char* key;
  std::variant<double*, int*, std::size_t*> target;
};

std::vector<Field> fields(RunConfig& c) {
  GenerationConfig& g = c.gen;
  return {
      {"iou_threshold", &g.iou_threshold},
      {"clearance", &g.clearance},
      {"small_density", &g.small_density},
      {"clutter_density", &g.clutter_density},
      {"max_tries", &g.max_tries},
      {"snap_tol", &g.layout.snap_tol},
      {"floor_eps", &g.layout.floor_eps},
      {"leaf_probability", &g.layout.leaf_probability},
      {"openness_lo", &g.layout.openness_lo},
      {"openness_hi", &g.layout.openness_hi},
      {"extra_lights_per_room", &g.lighting.extra_lights_per_room},
      {"intensity_lo", &g.lighting.intensity_lo},
      {"intensity_hi", &g.lighting.intensity_hi},
      {"rgb_lo", &g.lighting.rgb_lo},
      {"shadow_bias_lo", &g.lighting.shadow_bias_lo},
      {"shadow_bias_hi", &g.lighting.shadow_bias_hi},
      {"ceiling_offset", &g.lighting.ceiling_offset},
      {"agent_radius", &c.nav.agent_radius},
      {"agent_height", &c.nav.agent_height},
      {"cell_size", &c.nav.cell_size},
      {"area_cutoff", &c.nav.area_cutoff},
      {"min_start_dist", &c.nav.min_start_dist},
      {"visibility_dist", &c.nav.visibility_dist},
      {"exact_limit", &c.nav.exact_limit},
      {"fit_tol", &c.fit.tol},
      {"fit_max_iter", &c.fit.max_iter},
      {"ridge", &c.fit.ridge},
  };
}

std::vector<std::string> string_list(const Json& j, const std::string& path) {
  detail::array(j, path);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(detail::string(j[i], detail::index(path, i)));
  if (out.empty()) throw ValidationError(path, "palette must not be empty");
  return out;
}

Palettes parse_palettes(const Json& j, const std::string& path) {
  detail::object(j, path);
  detail::only_keys(j, {"wall", "floor", "ceiling", "object"}, path);
  Palettes p;
  p.wall = string_list(detail::require(j, "wall", path), detail::join(path, "wall"));
  p.floor = string_list(detail::require(j, "floor", path), detail::join(path, "floor"));
  p.ceiling = string_list(detail::require(j, "ceiling", path), detail::join(path, "ceiling"));
  const std::string opath = detail::join(path, "object");
  const Json& obj = detail::object(detail::require(j, "object", path), opath);
  for (const auto& [k, v] : obj.items()) p.object[k] = string_list(v, detail::join(opath, k));
  return p;
}

void check(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ValidationError(key, what);
}

}  // namespace

void validate_config(const RunConfig& c) {
  const GenerationConfig& g = c.gen;
  check(g.iou_threshold > 0 && g.iou_threshold <= 1, "iou_threshold", "must be in (0, 1]");
  check(g.clearance >= 0, "clearance", "must be >= 0");
  check(g.small_density >= 0, "small_density", "must be >= 0");
  check(g.clutter_density >= 0, "clutter_density", "must be >= 0");
  check(g.max_tries >= 1, "max_tries", "must be >= 1");
  check(g.layout.snap_tol > 0, "snap_tol", "must be > 0");
  check(g.layout.floor_eps >= 0, "floor_eps", "must be >= 0");
  check(g.layout.leaf_probability >= 0 && g.layout.leaf_probability <= 1, "leaf_probability", "must be in [0, 1]");
  check(g.layout.openness_lo >= 0 && g.layout.openness_lo <= g.layout.openness_hi && g.layout.openness_hi <= 1,
        "openness_lo", "need 0 <= openness_lo <= openness_hi <= 1");
  check(g.lighting.extra_lights_per_room >= 0, "extra_lights_per_room", "must be >= 0");
  check(g.lighting.intensity_lo > 0 && g.lighting.intensity_lo <= g.lighting.intensity_hi, "intensity_lo",
        "need 0 < intensity_lo <= intensity_hi");
  check(g.lighting.rgb_lo >= 0 && g.lighting.rgb_lo <= 1, "rgb_lo", "must be in [0, 1]");
  check(g.lighting.shadow_bias_lo >= 0 && g.lighting.shadow_bias_lo <= g.lighting.shadow_bias_hi, "shadow_bias_lo",
        "need 0 <= shadow_bias_lo <= shadow_bias_hi");
  check(g.lighting.ceiling_offset >= 0, "ceiling_offset", "must be >= 0");
  check(c.nav.agent_radius > 0, "agent_radius", "must be > 0");
  check(c.nav.agent_height > 0, "agent_height", "must be > 0");
  check(c.nav.cell_size > 0, "cell_size", "must be > 0");
  check(c.nav.area_cutoff > 0, "area_cutoff", "must be > 0");
  check(c.nav.min_start_dist >= 0, "min_start_dist", "must be >= 0");
  check(c.nav.visibility_dist > 0, "visibility_dist", "must be > 0");
  check(c.fit.tol > 0, "fit_tol", "must be > 0");
  check(c.fit.max_iter >= 1, "fit_max_iter", "must be >= 1");
  check(c.fit.ridge >= 0, "ridge", "must be >= 0");
  for (const auto* list : {&g.palettes.wall, &g.palettes.floor, &g.palettes.ceiling})
    check(!list->empty(), "palettes", "palettes must not be empty");
  for (const auto& [k, v] : g.palettes.object) check(!v.empty(), "palettes", "palette '" + k + "' is empty");
}

RunConfig parse_config(std::string_view bytes) {
  const Json j = detail::parse_json(bytes, "config");
  detail::object(j, "");
  RunConfig c;
  auto table = fields(c);
  for (const auto& [key, value] : j.items()) {
    if (key == "fallback") {
      const std::string mode = detail::string(value, key);
      if (mode == "skip") c.gen.fallback = FallbackMode::skip;
      else if (mode == "best_iou") c.gen.fallback = FallbackMode::best_iou;
      else throw ValidationError(key, "expected \"skip\" or \"best_iou\"");
      continue;
    }
    if (key == "palettes") {
      c.gen.palettes = parse_palettes(value, key);
      continue;
    }
    auto f = std::find_if(table.begin(), table.end(), [&](const Field& f) { return key == f.key; });
    if (f == table.end()) throw SchemaError(key, "unknown field");
    std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, double>) *p = detail::number(value, key);
          else if constexpr (std::is_same_v<T, int>) *p = static_cast<int>(detail::integer(value, key));
          else *p = static_cast<std::size_t>(detail::unsigned_integer(value, key));
        },
        f->target);
  }
  validate_config(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::string write_config(const RunConfig& cfg) {
  RunConfig c = cfg;
  Json j = Json::object();
  for (const Field& f : fields(c)) std::visit([&](auto* p) { j[f.key] = *p; }, f.target);
  j["fallback"] = c.gen.fallback == FallbackMode::skip ? "skip" : "best_iou";
  Json objects = Json::object();
  for (const auto& [k, v] : c.gen.palettes.object) objects[k] = v;
  j["palettes"] = {{"wall", c.gen.palettes.wall},
                   {"floor", c.gen.palettes.floor},
                   {"ceiling", c.gen.palettes.ceiling},
                   {"object", objects}};
  return j.dump(2) + "\n";
}

}  // namespace scenesmith
