#include "scenesmith/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <string_view>

#include "json_fields.hpp"
#include "scenesmith/analysis.hpp"
#include "scenesmith/catalog.hpp"
#include "scenesmith/config.hpp"
#include "scenesmith/digest.hpp"
#include "scenesmith/populate.hpp"
#include "scenesmith/scene_io.hpp"
#include "scenesmith/template.hpp"
#include "scenesmith/validate.hpp"

namespace scenesmith {

namespace {

using detail::Json;

// Loads `file` with `loader`, naming the file in schema errors (which only carry a
// field path).
template <typename F>
auto load(const fs::path& file, F&& loader) {
  try {
    return loader(file);
  } catch (const SchemaError& e) {
    throw Error(file.string() + ": " + e.what());
  }
}

RunConfig config_from(const std::optional<fs::path>& path) {
  if (!path) return RunConfig{};
  return load(*path, [](const fs::path& p) { return load_config(p); });
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write file: " + path.string());
  f << bytes;
  if (!f) throw Error("failed writing file: " + path.string());
}

Json input_entry(const fs::path& path, const std::string& bytes) {
  return Json{{"path", path.string()}, {"sha256", sha256_hex(bytes)}};
}

std::vector<fs::path> expand_scene_paths(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> out;
  for (const fs::path& p : inputs) {
    if (!fs::is_directory(p)) {
      out.push_back(p);
      continue;
    }
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(p)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.ends_with(".scene.json")) found.push_back(entry.path());
    }
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

std::string scene_name(const fs::path& p) {
  std::string name = p.filename().string();
  constexpr std::string_view suffix = ".scene.json";
  if (name.ends_with(suffix)) name.resize(name.size() - suffix.size());
  return name;
}

}  // namespace

unsigned resolve_workers(std::optional<unsigned> flag) {
  if (flag) return std::max(1u, *flag);
  if (const char* env = std::getenv("SCENESMITH_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(std::min(v, 1024ul));
  }
  return 1;
}

int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  EnvironmentTemplate tmpl;
  std::optional<Catalog> catalog;
  Json inputs = Json::object();
  try {
    const std::string tbytes = read_file(opts.template_path);
    const std::string cbytes = read_file(opts.catalog_path);
    tmpl = load(opts.template_path, [&](const fs::path&) { return parse_template(tbytes); });
    catalog = load(opts.catalog_path, [&](const fs::path&) { return load_catalog(cbytes); });
    inputs["template"] = input_entry(opts.template_path, tbytes);
    inputs["catalog"] = input_entry(opts.catalog_path, cbytes);
    if (opts.config_path) {
      const std::string bytes = read_file(*opts.config_path);
      cfg = load(*opts.config_path, [&](const fs::path&) { return parse_config(bytes); });
      inputs["config"] = input_entry(*opts.config_path, bytes);
    } else {
      inputs["config"] = nullptr;
    }
    fs::create_directories(opts.out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const unsigned workers = resolve_workers(opts.workers);
  std::vector<Json> entries(opts.n);
  std::vector<std::optional<std::string>> failures(opts.n);
  parallel_for(opts.n, workers, [&](std::size_t i) {
    const std::uint64_t seed = split_seed(opts.seed, i);
    const std::string file = "scene_" + std::to_string(i) + "_" + std::to_string(seed) + ".scene.json";
    try {
      const std::string bytes = write_scene(generate_scene(tmpl, *catalog, cfg.gen, seed));
      write_file(opts.out / file, bytes);
      entries[i] = Json{{"index", i}, {"seed", seed}, {"file", file}, {"sha256", sha256_hex(bytes)}};
    } catch (const std::exception& e) {
      failures[i] = e.what();
      entries[i] = Json{{"index", i}, {"seed", seed}, {"file", nullptr}, {"error", e.what()}};
    }
  });

  std::size_t failed = 0;
  for (std::size_t i = 0; i < opts.n; ++i)
    if (failures[i]) {
      ++failed;
      err << "scene " << i << " (seed " << split_seed(opts.seed, i) << "): " << *failures[i] << "\n";
    }

  Json manifest{{"format", "scenesmith-manifest/1"},
                {"base_seed", opts.seed},
                {"n", opts.n},
                {"inputs", inputs},
                {"config", Json::parse(write_config(cfg))},
                {"scenes", entries}};
  try {
    write_file(opts.out / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  out << "generated " << (opts.n - failed) << " of " << opts.n << " scenes in " << opts.out.string() << "\n";
  return failed == 0 ? kExitOk : kExitUsage;
}

int cmd_validate(const ValidateOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::optional<EnvironmentTemplate> tmpl;
  std::optional<Catalog> catalog;
  std::vector<fs::path> files;
  try {
    cfg = config_from(opts.config_path);
    if (opts.template_path)
      tmpl = load(*opts.template_path, [](const fs::path& p) { return load_template(p); });
    if (opts.catalog_path)
      catalog = load(*opts.catalog_path, [](const fs::path& p) { return load_catalog_file(p); });
    files = expand_scene_paths(opts.scenes);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (files.empty()) {
    err << "error: no scene files given\n";
    return kExitUsage;
  }

  CheckOptions check;
  check.clearance = cfg.gen.clearance;
  check.openness_lo = cfg.gen.layout.openness_lo;
  check.openness_hi = cfg.gen.layout.openness_hi;
  check.source_template = tmpl ? &*tmpl : nullptr;
  check.catalog = catalog ? &*catalog : nullptr;

  struct Outcome {
    std::optional<std::string> load_error;
    std::vector<Violation> violations;
    SceneMetrics metrics;
  };
  std::vector<Outcome> results(files.size());
  parallel_for(files.size(), resolve_workers(opts.workers), [&](std::size_t i) {
    Outcome& r = results[i];
    try {
      const SceneSpec scene = load(files[i], [](const fs::path& p) { return load_scene(p); });
      r.violations = check_scene(scene, check);
      const OccupancyGrid grid = rasterize(scene, cfg.nav);
      try {
        r.metrics = tmpl ? scene_metrics(scene, *tmpl, grid, cfg.nav.exact_limit)
                         : scene_metrics(scene, grid, cfg.nav.exact_limit);
      } catch (const ValidationError& e) {
        r.violations.push_back({"template-digest", e.what()});
        r.metrics = scene_metrics(scene, grid, cfg.nav.exact_limit);
      }
    } catch (const std::exception& e) {
      r.load_error = e.what();
    }
  });

  bool io_error = false, invalid = false;
  std::vector<std::pair<std::string, SceneMetrics>> rows;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string name = scene_name(files[i]);
    if (results[i].load_error) {
      io_error = true;
      err << "error: " << *results[i].load_error << "\n";
      continue;
    }
    for (const Violation& v : results[i].violations) {
      invalid = true;
      out << name << ": " << v.invariant << ": " << v.detail << "\n";
    }
    rows.emplace_back(name, results[i].metrics);
  }
  if (!rows.empty()) out << render_metrics_table(rows);
  if (invalid) return kExitInvalid;
  return io_error ? kExitUsage : kExitOk;
}

int cmd_preview(const PreviewOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = config_from(opts.config_path);
    const SceneSpec scene = load(opts.scene, [](const fs::path& p) { return load_scene(p); });
    std::optional<OccupancyGrid> grid;
    if (opts.show_grid) grid = rasterize(scene, cfg.nav);
    fs::path target = opts.out.value_or(fs::path(opts.scene).replace_extension(".svg"));
    write_file(target, render_preview(scene, grid ? &*grid : nullptr));
    out << "wrote " << target.string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_episodes(const EpisodesOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = config_from(opts.config_path);
    const SceneSpec scene = load(opts.scene, [](const fs::path& p) { return load_scene(p); });
    std::optional<Catalog> catalog;
    if (opts.catalog_path)
      catalog = load(*opts.catalog_path, [](const fs::path& p) { return load_catalog_file(p); });
    const OccupancyGrid grid = rasterize(scene, cfg.nav);
    std::vector<std::string> types = reachable_target_types(scene, grid, cfg.nav, catalog ? &*catalog : nullptr);
    if (types.size() < opts.targets)
      throw UnreachableTargetError("scene has " + std::to_string(types.size()) + " reachable target types, " +
                                   std::to_string(opts.targets) + " requested");
    Rng rng = Rng::stream(opts.seed, "episodes");
    // Partial Fisher-Yates: the first `targets` entries are a uniform subset.
    for (std::size_t i = 0; i < opts.targets; ++i)
      std::swap(types[i], types[i + rng.below(types.size() - i)]);
    types.resize(opts.targets);
    std::sort(types.begin(), types.end());
    const auto episodes =
        sample_episodes(scene, grid, cfg.nav, rng, types, opts.per_target, opts.scene.filename().string());
    const std::string bytes = write_episodes(episodes);
    if (opts.out) {
      write_file(*opts.out, bytes);
      out << "wrote " << episodes.size() << " episodes to " << opts.out->string() << "\n";
    } else {
      out << bytes;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_stats(const StatsOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = config_from(opts.config_path);
    const auto records = load(opts.trials, [](const fs::path& p) { return load_trials(p); });
    if (records.empty()) throw Error(opts.trials.string() + ": no trial records");
    const TrialSummary summary = summarize_trials(records);
    out << render_summary(summary) << "\n";
    const Design design = build_design(records, FactorSet::parse(opts.factors));
    RegressionReport report;
    int status = kExitOk;
    try {
      report = fit_logistic(design, cfg.fit);
    } catch (const NonConvergenceError& e) {
      err << "error: " << e.what() << "\n";
      report = e.report;
      status = kExitUsage;
    }
    out << render_report(report);
    if (opts.json_out) write_file(*opts.json_out, write_stats_json(summary, &report));
    return status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace scenesmith
