// scenesmith: generate, validate, preview and analyze procedural scene variants.

#include <iostream>

#include "CLI11.hpp"
#include "scenesmith/commands.hpp"

using namespace scenesmith;

int main(int argc, char** argv) {
  CLI::App app{"Conditional procedural scene generation from environment templates"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Generate scene variants of a template");
  g->add_option("template", gen.template_path, "Environment template (.tmpl.json)")->required();
  g->add_option("catalog", gen.catalog_path, "Asset catalog (.catalog.json)")->required();
  g->add_option("--config", gen.config_path, "Run configuration (JSON)");
  g->add_option("--seed", gen.seed, "Base seed")->capture_default_str();
  g->add_option("--n", gen.n, "Number of variants")->capture_default_str();
  g->add_option("--out", gen.out, "Output directory")->capture_default_str();
  g->add_option("--workers", gen.workers, "Worker threads (default: $SCENESMITH_WORKERS or 1)");

  ValidateOptions val;
  auto* v = app.add_subcommand("validate", "Check scene invariants and print the metrics table");
  v->add_option("scenes", val.scenes, "Scene files or directories")->required();
  v->add_option("--config", val.config_path, "Run configuration (JSON)");
  v->add_option("--template", val.template_path, "Source template, enables semantic-fidelity checks");
  v->add_option("--catalog", val.catalog_path, "Catalog, enables category mapping checks");
  v->add_option("--workers", val.workers, "Worker threads (default: $SCENESMITH_WORKERS or 1)");

  PreviewOptions prev;
  auto* p = app.add_subcommand("preview", "Render a top-down SVG of a scene");
  p->add_option("scene", prev.scene, "Scene file")->required();
  p->add_option("--out", prev.out, "Output SVG (default: next to the scene)");
  p->add_option("--config", prev.config_path, "Run configuration (JSON), for the grid overlay");
  p->add_flag("--grid", prev.show_grid, "Overlay the blocked occupancy cells");

  EpisodesOptions ep;
  auto* e = app.add_subcommand("episodes", "Sample object-navigation episode specs");
  e->add_option("scene", ep.scene, "Scene file")->required();
  e->add_option("--per-target", ep.per_target, "Start positions per target type")->capture_default_str();
  e->add_option("--targets", ep.targets, "Number of target types")->capture_default_str();
  e->add_option("--seed", ep.seed, "Seed")->capture_default_str();
  e->add_option("--catalog", ep.catalog_path, "Catalog, restricts targets to target-tagged assets");
  e->add_option("--config", ep.config_path, "Run configuration (JSON)");
  e->add_option("--out", ep.out, "Output JSON (default: stdout)");

  StatsOptions st;
  auto* s = app.add_subcommand("stats", "Success rates and fixed-effects logistic regression");
  s->add_option("trials", st.trials, "Trial records (CSV)")->required();
  s->add_option("--formula-factors", st.factors, "Comma list of model,target,environment,position")
      ->capture_default_str();
  s->add_option("--config", st.config_path, "Run configuration (JSON)");
  s->add_option("--json", st.json_out, "Write the structured report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*g) return cmd_gen(gen, std::cout, std::cerr);
  if (*v) return cmd_validate(val, std::cout, std::cerr);
  if (*p) return cmd_preview(prev, std::cout, std::cerr);
  if (*e) return cmd_episodes(ep, std::cout, std::cerr);
  return cmd_stats(st, std::cout, std::cerr);
}
