#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "scenesmith/errors.hpp"
#include "scenesmith/template.hpp"

using namespace scenesmith;
using nlohmann::json;

namespace {

json square_json() {
  return json::parse(read_file(oracle::data("templates/square_room.tmpl.json")));
}

// Expects parse_template to throw E whose field path contains `field`.
template <typename E>
void expect_error(const json& j, const std::string& field) {
  try {
    parse_template(j.dump());
    FAIL("no error for " << field);
  } catch (const E& e) {
    CHECK_MESSAGE(e.path().find(field) != std::string::npos, e.path() << " vs " << field);
  }
}

}  // namespace

TEST_CASE("minimal square room parses") {
  const EnvironmentTemplate t = parse_template(square_json().dump());
  CHECK(t.walls.size() == 4);
  CHECK(t.objects.empty());
  CHECK(t.walls[0].length() == doctest::Approx(3));
  CHECK(t.meta["name"] == "square_room");
}

TEST_CASE("thickness defaults and unknown top-level keys land in meta") {
  json j = square_json();
  j["walls"][1].erase("thickness");
  j["scanner"] = {{"app", "x"}, {"version", 3}};
  const EnvironmentTemplate t = parse_template(j.dump());
  CHECK(t.walls[1].thickness == kDefaultWallThickness);
  CHECK(t.meta["scanner"]["version"] == 3);
  CHECK(parse_template(write_template(t)) == t);
}

TEST_CASE("inverted opening interval is rejected") {
  json j = square_json();
  j["walls"][0]["openings"] = json::array({{{"offset", 1.0}, {"width", 0.8}, {"bottom", 0.9}, {"top", 0.5}}});
  expect_error<ValidationError>(j, "walls[0].openings[0]");
}

TEST_CASE("single-field corruptions name the field") {
  json j = square_json();
  j["walls"][2]["height"] = -1;
  expect_error<ValidationError>(j, "walls[2].height");

  j = square_json();
  j["walls"][1]["openings"] = json::array({{{"offset", 3.5}, {"width", 0.8}, {"bottom", 0}, {"top", 2}}});
  expect_error<ValidationError>(j, "walls[1].openings[0]");

  j = square_json();
  j["walls"][0]["openings"] = json::array({{{"offset", 0.5}, {"width", 0.8}, {"bottom", 0}, {"top", 2.6}}});
  expect_error<ValidationError>(j, "walls[0].openings[0].top");

  j = json::parse(read_file(oracle::data("templates/robothor_like.tmpl.json")));
  j["objects"][3]["category"] = "whiteboard";
  expect_error<UnknownCategoryError>(j, "objects[3].category");

  j = json::parse(read_file(oracle::data("templates/robothor_like.tmpl.json")));
  j["objects"][0]["forward"] = {0.5, 0.5};
  expect_error<ValidationError>(j, "objects[0].forward");

  j = json::parse(read_file(oracle::data("templates/robothor_like.tmpl.json")));
  j["objects"][1]["box"]["half_extents"][2] = 0;
  expect_error<ValidationError>(j, "objects[1].box");

  j = square_json();
  j["walls"][3].erase("start");
  expect_error<SchemaError>(j, "walls[3].start");

  j = square_json();
  j["walls"][0]["colour"] = "red";
  expect_error<SchemaError>(j, "walls[0].colour");

  j = square_json();
  j["walls"][0]["end"] = j["walls"][0]["start"];
  expect_error<ValidationError>(j, "walls[0]");

  j = square_json();
  j["walls"] = json::array({j["walls"][0], j["walls"][1]});
  expect_error<ValidationError>(j, "walls");
}

TEST_CASE("malformed text is a schema error") {
  CHECK_THROWS_AS(parse_template("{\"walls\": [}"), SchemaError);
  CHECK_THROWS_AS(parse_template("[]"), SchemaError);
}

TEST_CASE("round trip preserves every fixture field for field") {
  for (const char* name : {"square_room", "robothor_like", "six_room", "three_room", "conference", "cafeteria"}) {
    CAPTURE(name);
    const EnvironmentTemplate t = oracle::fixture(name);
    const std::string once = write_template(t);
    const EnvironmentTemplate back = parse_template(once);
    CHECK(back == t);
    CHECK(write_template(back) == once);
  }
  const EnvironmentTemplate six = oracle::fixture("six_room");
  REQUIRE(six.objects.size() == 57);
  const EnvironmentTemplate back = parse_template(write_template(six));
  for (std::size_t i = 0; i < 57; ++i) CHECK(back.objects[i].box == six.objects[i].box);
}

TEST_CASE("unicode meta serializes idempotently") {
  EnvironmentTemplate t = parse_template(square_json().dump());
  t.meta = nlohmann::ordered_json::object();
  t.meta["room"] = "Wohnzimmer \xc3\xbc\xc3\x9f \xe6\xb5\x8b\xe8\xaf\x95";
  t.meta["units"] = "m";
  const std::string first = write_template(t);
  const std::string second = write_template(parse_template(first));
  CHECK(first == second);
  CHECK(parse_template(first) == t);
}

TEST_CASE("six-room fixture encloses six faces") {
  const EnvironmentTemplate t = oracle::fixture("six_room");
  std::vector<Segment2d> segs;
  for (const auto& w : t.walls) segs.push_back({w.start, w.end});
  CHECK(oracle::half_edge_face_areas(segs).size() == 6);
  CHECK(extract_faces(segs).size() == 6);
}

TEST_CASE("scan categories round trip by name") {
  CHECK(all_scan_categories().size() == 16);
  for (ScanCategory c : all_scan_categories()) CHECK(parse_scan_category(to_string(c)) == c);
  CHECK_FALSE(parse_scan_category("hovercraft").has_value());
  CHECK(parse_scan_category("washerDryer") == ScanCategory::washerDryer);
}
