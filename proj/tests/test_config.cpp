#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "scenesmith/config.hpp"
#include "scenesmith/errors.hpp"

using namespace scenesmith;

namespace {

std::string with(const std::string& key, const nlohmann::json& value) {
  nlohmann::json j = nlohmann::json::object();
  j[key] = value;
  return j.dump();
}

}  // namespace

TEST_CASE("empty object gives the defaults") {
  const RunConfig c = parse_config("{}");
  CHECK(c == RunConfig{});
  CHECK(c.gen.iou_threshold == 0.75);
  CHECK(c.gen.fallback == FallbackMode::skip);
  CHECK(c.nav.agent_radius == 0.2);
  CHECK(c.nav.cell_size == 0.05);
  CHECK(c.nav.area_cutoff == 70.0);
  CHECK(c.fit.max_iter == 100);
}

TEST_CASE("shipped default config equals the built-in defaults") {
  CHECK(load_config(oracle::data("configs/default.json")) == RunConfig{});
}

TEST_CASE("round trip") {
  RunConfig c;
  c.gen.iou_threshold = 0.6;
  c.gen.clutter_density = 0.0;
  c.gen.fallback = FallbackMode::best_iou;
  c.gen.layout.leaf_probability = 1.0;
  c.gen.palettes.wall = {"only_one"};
  c.nav.cell_size = 0.1;
  c.nav.exact_limit = 123;
  c.fit.ridge = 0.5;
  const std::string text = write_config(c);
  CHECK(parse_config(text) == c);
  CHECK(write_config(parse_config(text)) == text);

  // Every written key is accepted on its own.
  const auto j = nlohmann::json::parse(text);
  for (const auto& [k, v] : j.items()) CHECK_NOTHROW(parse_config(with(k, v)));
}

TEST_CASE("partial configs override only what they name") {
  const RunConfig c = parse_config(R"({"agent_radius": 0.25, "fallback": "best_iou"})");
  CHECK(c.nav.agent_radius == 0.25);
  CHECK(c.gen.fallback == FallbackMode::best_iou);
  RunConfig expect;
  expect.nav.agent_radius = 0.25;
  expect.gen.fallback = FallbackMode::best_iou;
  CHECK(c == expect);
}

TEST_CASE("schema errors") {
  CHECK_THROWS_AS(parse_config(with("iou_treshold", 0.7)), SchemaError);
  CHECK_THROWS_AS(parse_config(with("iou_threshold", "high")), SchemaError);
  CHECK_THROWS_AS(parse_config(with("max_tries", 2.5)), SchemaError);
  CHECK_THROWS_AS(parse_config(with("exact_limit", -1)), SchemaError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), SchemaError);
  CHECK_THROWS_AS(parse_config("{"), SchemaError);
  try {
    parse_config(with("colour", 1));
    FAIL("expected an error");
  } catch (const SchemaError& e) {
    CHECK(e.path() == "colour");
  }
}

TEST_CASE("range errors") {
  CHECK_THROWS_AS(parse_config(with("iou_threshold", 0.0)), ValidationError);
  CHECK_THROWS_AS(parse_config(with("iou_threshold", 1.5)), ValidationError);
  CHECK_THROWS_AS(parse_config(with("cell_size", 0)), ValidationError);
  CHECK_THROWS_AS(parse_config(with("leaf_probability", -0.1)), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"openness_lo": 0.9, "openness_hi": 0.85})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"intensity_lo": 3.0})"), ValidationError);
  CHECK_THROWS_AS(parse_config(with("fallback", "retry")), ValidationError);
  CHECK_NOTHROW(parse_config(with("iou_threshold", 1.0)));

  RunConfig c;
  c.nav.agent_radius = -1;
  CHECK_THROWS_AS(validate_config(c), ValidationError);
}

TEST_CASE("palettes") {
  const std::string full = write_config(RunConfig{});
  auto j = nlohmann::json::parse(full);
  j["palettes"]["wall"] = nlohmann::json::array();
  CHECK_THROWS_AS(parse_config(j.dump()), ValidationError);

  j = nlohmann::json::parse(full);
  j["palettes"]["object"]["stone"] = nlohmann::json::array();
  CHECK_THROWS_AS(parse_config(j.dump()), ValidationError);

  j = nlohmann::json::parse(full);
  j["palettes"].erase("ceiling");
  CHECK_THROWS_AS(parse_config(j.dump()), SchemaError);

  j = nlohmann::json::parse(full);
  j["palettes"]["sky"] = {"blue"};
  CHECK_THROWS_AS(parse_config(j.dump()), SchemaError);

  j = nlohmann::json::parse(full);
  j["palettes"]["object"]["stone"] = {"granite"};
  CHECK(parse_config(j.dump()).gen.palettes.object.at("stone") == std::vector<std::string>{"granite"});
}
