#include "doctest.h"
#include "oracles.hpp"
#include "scenesmith/errors.hpp"
#include "scenesmith/geometry.hpp"

using namespace scenesmith;

namespace {

std::vector<Segment2d> rect(double x0, double z0, double x1, double z1) {
  return {{Vec2d(x0, z0), Vec2d(x1, z0)},
          {Vec2d(x1, z0), Vec2d(x1, z1)},
          {Vec2d(x1, z1), Vec2d(x0, z1)},
          {Vec2d(x0, z1), Vec2d(x0, z0)}};
}

std::vector<double> areas(const std::vector<Polygon2d>& faces) {
  std::vector<double> out;
  for (const auto& f : faces) out.push_back(oracle::shoelace(f.vertices));
  std::sort(out.begin(), out.end());
  return out;
}

void check_well_formed(const std::vector<Polygon2d>& faces, const std::vector<Segment2d>& segs) {
  std::vector<Vec2d> pts;
  for (const auto& s : segs) pts.push_back(s.a), pts.push_back(s.b);
  const auto hull = convex_hull(pts);
  double total = 0;
  for (const auto& f : faces) {
    // Rings around inner walls repeat the slit vertices; all others must be simple.
    const auto& v = f.vertices;
    std::set<std::pair<double, double>> distinct;
    for (const auto& p : v) distinct.insert({p.x(), p.y()});
    if (distinct.size() == v.size()) CHECK(is_simple(f));
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j)
        CHECK_FALSE(oracle::proper_cross(v[i], v[(i + 1) % v.size()], v[j], v[(j + 1) % v.size()]));
    CHECK(signed_area(f) > 0);
    total += signed_area(f);
  }
  CHECK(total <= oracle::shoelace(hull) + 1e-9);
}

}  // namespace

TEST_CASE("a rectangle is one face") {
  const auto segs = rect(0, 0, 3, 4);
  const auto faces = extract_faces(segs);
  REQUIRE(faces.size() == 1);
  CHECK(signed_area(faces[0]) == doctest::Approx(12));
  check_well_formed(faces, segs);
}

TEST_CASE("a dangling wall bounds nothing") {
  auto segs = rect(0, 0, 3, 4);
  segs.push_back({Vec2d(1.5, 0), Vec2d(1.5, 2)});
  segs.push_back({Vec2d(1, 3), Vec2d(2, 3)});  // free-floating, touches nothing
  const auto faces = extract_faces(segs);
  REQUIRE(faces.size() == 1);
  CHECK(signed_area(faces[0]) == doctest::Approx(12));
}

TEST_CASE("two squares sharing an edge") {
  std::vector<Segment2d> segs = {
      {Vec2d(0, 0), Vec2d(3, 0)}, {Vec2d(3, 0), Vec2d(6, 0)}, {Vec2d(6, 0), Vec2d(6, 3)},
      {Vec2d(6, 3), Vec2d(3, 3)}, {Vec2d(3, 3), Vec2d(0, 3)}, {Vec2d(0, 3), Vec2d(0, 0)},
      {Vec2d(3, 0), Vec2d(3, 3)}};
  const auto faces = extract_faces(segs);
  CHECK(areas(faces) == std::vector<double>{9, 9});
  CHECK(oracle::half_edge_face_areas(segs) == areas(faces));
}

TEST_CASE("endpoints within the snap tolerance are merged") {
  std::vector<Segment2d> segs = {{Vec2d(0, 0), Vec2d(3, 0.01)},
                                 {Vec2d(3.02, 0), Vec2d(3, 4)},
                                 {Vec2d(2.99, 4.03), Vec2d(0, 4)},
                                 {Vec2d(0.01, 3.98), Vec2d(0, -0.02)}};
  const auto faces = extract_faces(segs, 0.05);
  REQUIRE(faces.size() == 1);
  CHECK(signed_area(faces[0]) == doctest::Approx(12).epsilon(0.02));
  CHECK(extract_faces(segs, 0.001).empty());
}

TEST_CASE("crossing segments are split") {
  // A plus sign of two long walls inside a square: four rooms.
  auto segs = rect(0, 0, 4, 4);
  segs.push_back({Vec2d(2, 0), Vec2d(2, 4)});
  segs.push_back({Vec2d(0, 2), Vec2d(4, 2)});
  CHECK(areas(extract_faces(segs)) == std::vector<double>{4, 4, 4, 4});
  // Overhanging walls that cross the outline still produce the enclosed faces.
  segs = {{Vec2d(-1, 0), Vec2d(5, 0)}, {Vec2d(4, -1), Vec2d(4, 5)}, {Vec2d(5, 4), Vec2d(-1, 4)},
          {Vec2d(0, 5), Vec2d(0, -1)}};
  CHECK(areas(extract_faces(segs)) == std::vector<double>{16});
}

TEST_CASE("rooms inside rooms do not overlap the room around them") {
  // Inner room tied to the outline by a wall.
  auto segs = rect(0, 0, 6, 6);
  for (const auto& s : rect(2, 2, 4, 4)) segs.push_back(s);
  segs.push_back({Vec2d(0, 3), Vec2d(2, 3)});
  CHECK(areas(extract_faces(segs)) == std::vector<double>{4, 32});
  CHECK(oracle::half_edge_face_areas(segs) == std::vector<double>{4, 32});
  // Free-standing inner room.
  segs.pop_back();
  const auto faces = extract_faces(segs);
  CHECK(areas(faces) == std::vector<double>{4, 32});
  check_well_formed(faces, segs);
  // A point inside the inner room belongs to exactly one face.
  int owners = 0;
  for (const auto& f : faces) owners += oracle::winding_number(Vec2d(3, 3.2), f.vertices) != 0;
  CHECK(owners == 1);
}

TEST_CASE("degenerate inputs throw") {
  CHECK_THROWS_AS(extract_faces(std::vector<Segment2d>{}), DegenerateInputError);
  CHECK_THROWS_AS(extract_faces(std::vector<Segment2d>{{Vec2d(0, 0), Vec2d(1, 0)}, {Vec2d(2, 0), Vec2d(3, 0)}}),
                  DegenerateInputError);
}

TEST_CASE("output is deterministic and order independent") {
  const auto m = oracle::random_maze(5);
  auto segs = m.segments;
  const auto first = extract_faces(segs);
  std::reverse(segs.begin(), segs.end());
  for (auto& s : segs) std::swap(s.a, s.b);
  CHECK(areas(extract_faces(segs)) == areas(first));
  CHECK(extract_faces(m.segments) == first);
}

TEST_CASE("random grid mazes match the half-edge and flood-fill oracles") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto m = oracle::random_maze(seed);
    const auto faces = extract_faces(m.segments);
    const auto expect = oracle::half_edge_face_areas(m.segments);
    CAPTURE(seed);
    CHECK(areas(faces) == expect);
    CHECK(oracle::flood_fill_areas(m.edges, m.w, m.h) == expect);
    check_well_formed(faces, m.segments);
  }
}
