#include <cstdlib>
#include <fstream>
#include <unistd.h>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "scenesmith/commands.hpp"
#include "scenesmith/scene_io.hpp"
#include "scenesmith/template.hpp"

using namespace scenesmith;

namespace {

// Fresh directory per test, removed on exit.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / ("scenesmith_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

GenOptions gen_options(const fs::path& out, std::size_t n, std::optional<unsigned> workers = std::nullopt) {
  GenOptions o;
  o.template_path = oracle::data("templates/robothor_like.tmpl.json");
  o.catalog_path = oracle::data("catalogs/desk.catalog.json");
  o.seed = 11;
  o.n = n;
  o.out = out;
  o.workers = workers;
  return o;
}

std::vector<fs::path> scene_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename().string().ends_with(".scene.json")) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("gen is reproducible and writes a manifest") {
  TempDir a("gen_a"), b("gen_b");
  std::ostringstream out, err;
  REQUIRE(cmd_gen(gen_options(a.path, 3, 1), out, err) == kExitOk);
  REQUIRE(cmd_gen(gen_options(b.path, 3, 4), out, err) == kExitOk);
  CHECK(err.str().empty());

  const auto fa = scene_files(a.path), fb = scene_files(b.path);
  REQUIRE(fa.size() == 3);
  REQUIRE(fb.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(fa[i].filename() == fb[i].filename());
    CHECK(read_file(fa[i]) == read_file(fb[i]));
  }
  CHECK(read_file(a.path / "manifest.json") == read_file(b.path / "manifest.json"));

  const auto m = nlohmann::json::parse(read_file(a.path / "manifest.json"));
  CHECK(m["format"] == "scenesmith-manifest/1");
  CHECK(m["base_seed"] == 11);
  CHECK(m["n"] == 3);
  CHECK(m["scenes"].size() == 3);
  CHECK(m["inputs"]["config"].is_null());
  CHECK(m["inputs"]["template"]["sha256"].get<std::string>().size() == 64);
  for (const auto& s : m["scenes"]) {
    const fs::path f = a.path / s["file"].get<std::string>();
    CHECK(fs::exists(f));
    CHECK(load_scene(f).seed == s["seed"].get<std::uint64_t>());
  }
}

TEST_CASE("gen reports a missing catalog") {
  TempDir d("missing");
  GenOptions o = gen_options(d.path, 1);
  o.catalog_path = d.path / "nowhere.catalog.json";
  std::ostringstream out, err;
  CHECK(cmd_gen(o, out, err) == kExitUsage);
  CHECK(err.str().find("nowhere.catalog.json") != std::string::npos);
  CHECK(scene_files(d.path).empty());
}

TEST_CASE("validate passes fresh scenes and catches an injected overlap") {
  TempDir d("validate");
  std::ostringstream out, err;
  REQUIRE(cmd_gen(gen_options(d.path, 2), out, err) == kExitOk);

  ValidateOptions v;
  v.scenes = {d.path};
  v.template_path = oracle::data("templates/robothor_like.tmpl.json");
  v.catalog_path = oracle::data("catalogs/desk.catalog.json");
  std::ostringstream vout, verr;
  CHECK(cmd_validate(v, vout, verr) == kExitOk);
  CHECK(vout.str().find("Longest Path (m)") != std::string::npos);
  CHECK(vout.str().find("34.5") != std::string::npos);

  // Verdicts do not depend on the worker count.
  v.workers = 8;
  std::ostringstream wout, werr;
  CHECK(cmd_validate(v, wout, werr) == kExitOk);
  CHECK(wout.str() == vout.str());

  const fs::path f = scene_files(d.path).front();
  SceneSpec s = load_scene(f);
  std::vector<Placement*> big;
  for (Placement& p : s.placements)
    if (p.source == PlacementSource::semantic && !p.supported_by && !p.wall_mounted) big.push_back(&p);
  REQUIRE(big.size() >= 2);
  big[1]->box.center = big[0]->box.center;
  std::ofstream(d.path / "broken.scene.json") << write_scene(s);

  ValidateOptions one;
  one.scenes = {d.path / "broken.scene.json"};
  std::ostringstream bout, berr;
  CHECK(cmd_validate(one, bout, berr) == kExitInvalid);
  CHECK(bout.str().find("broken: no-overlap") != std::string::npos);

  one.scenes = {d.path / "absent.scene.json"};
  std::ostringstream aout, aerr;
  CHECK(cmd_validate(one, aout, aerr) == kExitUsage);
}

TEST_CASE("worker count resolution") {
  CHECK(resolve_workers(5u) == 5);
  CHECK(resolve_workers(0u) == 1);
  const char* env = std::getenv("SCENESMITH_WORKERS");
  if (env && std::string(env) == "3") CHECK(resolve_workers(std::nullopt) == 3);
  ::setenv("SCENESMITH_WORKERS", "junk", 1);
  CHECK(resolve_workers(std::nullopt) == 1);
  ::setenv("SCENESMITH_WORKERS", "6", 1);
  CHECK(resolve_workers(std::nullopt) == 6);
  CHECK(resolve_workers(2u) == 2);
  if (env) ::setenv("SCENESMITH_WORKERS", env, 1);
  else ::unsetenv("SCENESMITH_WORKERS");
}

TEST_CASE("preview and episodes") {
  TempDir d("preview");
  std::ostringstream out, err;
  REQUIRE(cmd_gen(gen_options(d.path, 1), out, err) == kExitOk);
  const fs::path scene = scene_files(d.path).front();

  PreviewOptions p;
  p.scene = scene;
  p.show_grid = true;
  CHECK(cmd_preview(p, out, err) == kExitOk);
  const fs::path svg = fs::path(scene).replace_extension(".svg");
  REQUIRE(fs::exists(svg));
  CHECK(read_file(svg).rfind("<svg", 0) == 0);

  EpisodesOptions e;
  e.scene = scene;
  e.seed = 4;
  std::ostringstream eout, eerr;
  REQUIRE(cmd_episodes(e, eout, eerr) == kExitOk);
  const auto j = nlohmann::json::parse(eout.str());
  REQUIRE(j["episodes"].size() == 15);
  std::set<std::string> types;
  for (const auto& ep : j["episodes"]) {
    types.insert(ep["target_type"].get<std::string>());
    CHECK(ep["step_budget"] == 250);
    const double fov = ep["fov_deg"];
    CHECK(fov >= 48.0);
    CHECK(fov <= 65.0);
  }
  CHECK(types.size() == 5);

  std::ostringstream again;
  REQUIRE(cmd_episodes(e, again, eerr) == kExitOk);
  CHECK(again.str() == eout.str());

  e.targets = 500;
  std::ostringstream tout, terr;
  CHECK(cmd_episodes(e, tout, terr) == kExitUsage);
  CHECK(terr.str().find("reachable target types") != std::string::npos);
}

TEST_CASE("stats prints the summary and the regression") {
  TempDir d("stats");
  StatsOptions s;
  s.trials = oracle::data("trials/synthetic_150.csv");
  s.json_out = d.path / "stats.json";
  std::ostringstream out, err;
  REQUIRE(cmd_stats(s, out, err) == kExitOk);
  CHECK(out.str().find("model[Phone2Proc-analog]") != std::string::npos);
  CHECK(out.str().find("odds ratio exp(") != std::string::npos);
  const auto j = nlohmann::json::parse(read_file(d.path / "stats.json"));
  CHECK(j.contains("summary"));
  CHECK(j.contains("regression"));

  s.factors = "model,weather";
  std::ostringstream bout, berr;
  CHECK(cmd_stats(s, bout, berr) == kExitUsage);

  s.factors = "model";
  s.trials = d.path / "none.csv";
  std::ostringstream mout, merr;
  CHECK(cmd_stats(s, mout, merr) == kExitUsage);
  CHECK(merr.str().find("none.csv") != std::string::npos);
}
