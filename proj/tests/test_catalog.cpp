#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "scenesmith/catalog.hpp"
#include "scenesmith/errors.hpp"

using namespace scenesmith;

namespace {

AssetDef box_asset(const std::string& id, const std::string& type, Vec3d half) {
  AssetDef a;
  a.id = id;
  a.asset_type = type;
  a.bounding = half;
  a.material_class = "fabric";
  return a;
}

// Desk catalog with `category` remapped to a single test type made of `extra`.
Catalog with_test_type(ScanCategory category, const std::vector<AssetDef>& extra) {
  const Catalog desk = oracle::desk_catalog();
  std::vector<AssetDef> assets = desk.assets();
  assets.insert(assets.end(), extra.begin(), extra.end());
  auto map = desk.category_map();
  map[category] = {extra.front().asset_type};
  return Catalog(assets, map);
}

ScannedObject scanned_sofa() {
  ScannedObject s;
  s.category = ScanCategory::sofa;
  s.box = OrientedBoxd(Vec3d(2, 0.5, 1), Vec3d(1.0, 0.5, 0.5), 0.4);
  s.forward = forward_from_yaw(0.4);
  return s;
}

std::vector<std::string> ids(const std::vector<Candidate>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.asset->id);
  return out;
}

}  // namespace

TEST_CASE("shipped desk catalog loads") {
  const Catalog c = oracle::desk_catalog();
  CHECK(c.assets().size() >= 100);
  std::set<std::string> types;
  for (const auto& a : c.assets()) types.insert(a.asset_type);
  CHECK(types.size() >= 30);
  CHECK(c.category_map().size() == 16);
  CHECK_FALSE(c.small_assets().empty());
  CHECK_FALSE(c.clutter_assets().empty());
  CHECK(load_catalog(write_catalog(c)).assets() == c.assets());
}

TEST_CASE("catalog schema errors") {
  nlohmann::json j = nlohmann::json::parse(read_file(oracle::data("catalogs/desk.catalog.json")));
  nlohmann::json bad = j;
  bad["category_map"]["sofa"].push_back("hovercraft");
  CHECK_THROWS_AS(load_catalog(bad.dump()), DanglingTypeError);

  bad = j;
  bad["assets"] = nlohmann::json::array();
  CHECK_THROWS_AS(load_catalog(bad.dump()), SchemaError);

  bad = j;
  bad["category_map"].erase("toilet");
  CHECK_THROWS_AS(load_catalog(bad.dump()), SchemaError);

  bad = j;
  bad["assets"][0]["half_extents"][1] = -0.1;
  CHECK_THROWS_AS(load_catalog(bad.dump()), SchemaError);

  bad = j;
  bad["assets"][0]["receptacles"][0]["half_size"][0] = 5.0;
  CHECK_THROWS_AS(load_catalog(bad.dump()), SchemaError);
}

TEST_CASE("IoU gate keeps 0.76 and rejects 0.74") {
  // Nested, bottom-aligned boxes: IoU is the volume ratio.
  const Catalog c = with_test_type(ScanCategory::sofa, {box_asset("t_sofa_074", "t_sofa", Vec3d(0.74, 0.5, 0.5)),
                                                        box_asset("t_sofa_076", "t_sofa", Vec3d(0.76, 0.5, 0.5)),
                                                        box_asset("t_sofa_100", "t_sofa", Vec3d(1.0, 0.5, 0.5))});
  const auto elig = eligible_assets(scanned_sofa(), c, 0.75);
  CHECK(ids(elig) == std::vector<std::string>{"t_sofa_076", "t_sofa_100"});
  CHECK(elig[0].iou == doctest::Approx(0.76).epsilon(1e-12));
  CHECK(elig[1].iou == doctest::Approx(1.0).epsilon(1e-12));
  const OrientedBoxd posed = pose_like(*c.find("t_sofa_074"), scanned_sofa().box);
  CHECK(obb_iou(posed, scanned_sofa().box) == doctest::Approx(0.74).epsilon(1e-12));
}

TEST_CASE("eligibility matches hand-computed IoUs") {
  // width 1.6 -> 0.8, height 0.4 (bottom aligned) -> 0.8, depth 1.5x -> 1/1.5
  const Catalog c = with_test_type(ScanCategory::sofa, {box_asset("s_narrow", "t_sofa", Vec3d(0.8, 0.5, 0.5)),
                                                        box_asset("s_low", "t_sofa", Vec3d(1.0, 0.4, 0.5)),
                                                        box_asset("s_deep", "t_sofa", Vec3d(1.0, 0.5, 0.75))});
  const auto all = eligible_assets(scanned_sofa(), c, 0.01);
  REQUIRE(all.size() == 3);
  std::map<std::string, double> iou;
  for (const auto& cand : all) iou[cand.asset->id] = cand.iou;
  CHECK(iou["s_narrow"] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(iou["s_low"] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(iou["s_deep"] == doctest::Approx(1 / 1.5).epsilon(1e-12));
  // Footprint IoU ignores height: the low sofa has the full footprint.
  for (const auto& cand : all)
    if (cand.asset->id == "s_low") CHECK(cand.footprint_iou == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ids(eligible_assets(scanned_sofa(), c, 0.75)) == std::vector<std::string>{"s_low", "s_narrow"});
}

TEST_CASE("eligibility is order invariant and monotone in tau") {
  const Catalog desk = oracle::desk_catalog();
  const EnvironmentTemplate t = oracle::fixture("six_room");
  std::vector<AssetDef> reversed(desk.assets().rbegin(), desk.assets().rend());
  const Catalog shuffled(reversed, desk.category_map());
  for (const ScannedObject& o : t.objects) {
    const auto base = ids(eligible_assets(o, desk, 0.75));
    CHECK(ids(eligible_assets(o, shuffled, 0.75)) == base);
    std::size_t prev = SIZE_MAX;
    for (double tau : {0.3, 0.5, 0.75, 0.9, 1.0}) {
      const auto e = eligible_assets(o, desk, tau);
      CHECK(e.size() <= prev);
      prev = e.size();
      for (const auto& cand : e) {
        const auto& types = desk.types_for(o.category);
        CHECK(std::find(types.begin(), types.end(), cand.asset->asset_type) != types.end());
        CHECK(cand.iou >= tau);
      }
    }
  }
}

TEST_CASE("replacement sampling") {
  const Catalog one = with_test_type(ScanCategory::sofa, {box_asset("only", "t_sofa", Vec3d(1.0, 0.5, 0.5))});
  Rng rng(1);
  for (int i = 0; i < 50; ++i) CHECK(sample_replacement(scanned_sofa(), one, 0.75, rng)->asset->id == "only");

  const Catalog three = with_test_type(ScanCategory::sofa, {box_asset("a", "t_sofa", Vec3d(1.0, 0.5, 0.5)),
                                                            box_asset("b", "t_sofa", Vec3d(0.95, 0.5, 0.5)),
                                                            box_asset("c", "t_sofa", Vec3d(1.0, 0.45, 0.5))});
  std::map<std::string, int> counts;
  const int n = 30000;
  for (int i = 0; i < n; ++i) ++counts[sample_replacement(scanned_sofa(), three, 0.75, rng)->asset->id];
  const double sigma = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
  REQUIRE(counts.size() == 3);
  for (const auto& [id, k] : counts) CHECK(std::abs(k - n / 3.0) < 3 * sigma);

  const Catalog none = with_test_type(ScanCategory::sofa, {box_asset("tiny", "t_sofa", Vec3d(0.3, 0.3, 0.3))});
  CHECK_FALSE(sample_replacement(scanned_sofa(), none, 0.75, rng).has_value());
  const auto best = sample_replacement(scanned_sofa(), none, 0.75, rng, FallbackMode::best_iou);
  REQUIRE(best);
  CHECK(best->asset->id == "tiny");
  CHECK(best->iou < 0.75);
}
