#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <utility>

#include "scenesmith/errors.hpp"
#include "scenesmith/geometry.hpp"

namespace scenesmith {

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Lower index wins so the representative is the earliest input point.
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

class VertexPool {
 public:
  explicit VertexPool(double tol) : tol_(tol) {}

  std::size_t add(const Vec2d& p) {
    for (std::size_t i = 0; i < pts_.size(); ++i)
      if ((pts_[i] - p).norm() <= tol_) return i;
    pts_.push_back(p);
    return pts_.size() - 1;
  }
  const std::vector<Vec2d>& points() const { return pts_; }

 private:
  double tol_;
  std::vector<Vec2d> pts_;
};

using Edge = std::pair<std::size_t, std::size_t>;

bool all_collinear(const std::vector<Vec2d>& pts, double tol) {
  if (pts.size() < 3) return true;
  const Vec2d a = pts.front();
  std::size_t far = 0;
  double best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = (pts[i] - a).norm();
    if (d > best) {
      best = d;
      far = i;
    }
  }
  if (best <= tol) return true;
  const Vec2d b = pts[far];
  for (const auto& p : pts) {
    if (std::abs(cross2<double>(b - a, p - a)) / best > tol) return false;
  }
  return true;
}

struct FaceWalk {
  std::vector<std::size_t> face_of;                 // per half-edge
  std::vector<std::vector<std::size_t>> faces;      // half-edge ids per face
};

// Half-edge 2e runs edges[e].first -> second, 2e+1 the reverse.
FaceWalk walk_faces(const std::vector<Vec2d>& pts, const std::vector<Edge>& edges) {
  const std::size_t nh = edges.size() * 2;
  auto origin = [&](std::size_t h) { return h % 2 == 0 ? edges[h / 2].first : edges[h / 2].second; };
  auto target = [&](std::size_t h) { return h % 2 == 0 ? edges[h / 2].second : edges[h / 2].first; };

  std::vector<std::vector<std::size_t>> outgoing(pts.size());
  for (std::size_t h = 0; h < nh; ++h) outgoing[origin(h)].push_back(h);
  std::vector<std::size_t> slot(nh);
  for (auto& out : outgoing) {
    std::vector<double> angle(out.size());
    std::vector<std::size_t> order(out.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Vec2d d = pts[target(out[i])] - pts[origin(out[i])];
      angle[i] = std::atan2(d.y(), d.x());
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });
    std::vector<std::size_t> sorted(out.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = out[order[i]];
    out = std::move(sorted);
    for (std::size_t i = 0; i < out.size(); ++i) slot[out[i]] = i;
  }

  auto next = [&](std::size_t h) {
    const std::size_t twin = h ^ 1U;
    const auto& out = outgoing[target(h)];
    const std::size_t i = slot[twin];
    return out[(i + out.size() - 1) % out.size()];
  };

  FaceWalk walk;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  walk.face_of.assign(nh, kNone);
  for (std::size_t start = 0; start < nh; ++start) {
    if (walk.face_of[start] != kNone) continue;
    std::vector<std::size_t> ring;
    std::size_t h = start;
    do {
      walk.face_of[h] = walk.faces.size();
      ring.push_back(h);
      h = next(h);
    } while (h != start && ring.size() <= nh);
    walk.faces.push_back(std::move(ring));
  }
  return walk;
}

std::vector<Edge> prune_dangling(std::size_t n_pts, std::vector<Edge> edges) {
  for (;;) {
    std::vector<std::size_t> degree(n_pts, 0);
    for (const auto& [a, b] : edges) {
      ++degree[a];
      ++degree[b];
    }
    const std::size_t before = edges.size();
    std::erase_if(edges, [&](const Edge& e) { return degree[e.first] < 2 || degree[e.second] < 2; });
    if (edges.size() == before) return edges;
  }
}

// Joins every wall component to whatever lies to its left: a horizontal ray from the
// component's leftmost vertex is cast to the nearest edge of another component, which is
// split there and linked by a synthetic bridge. A component standing free inside a room
// thereby becomes a slit in that room's ring instead of an uncut hole.
void bridge_islands(std::vector<Vec2d>& verts, std::vector<Edge>& edges, double snap_tol) {
  for (;;) {
    UnionFind uf(verts.size());
    for (const auto& [a, b] : edges) uf.unite(a, b);
    std::map<std::size_t, std::size_t> leftmost;  // component root -> vertex
    for (const auto& [a, b] : edges)
      for (std::size_t v : {a, b}) {
        auto [it, fresh] = leftmost.emplace(uf.find(v), v);
        const Vec2d& cur = verts[it->second];
        if (!fresh && (verts[v].x() < cur.x() || (verts[v].x() == cur.x() && verts[v].y() < cur.y())))
          it->second = v;
      }
    bool bridged = false;
    for (const auto& [root, v] : leftmost) {
      const Vec2d o = verts[v];
      double best = std::numeric_limits<double>::infinity();
      std::size_t hit = 0;
      Vec2d at;
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [a, b] = edges[e];
        if (uf.find(a) == root) continue;
        const Vec2d pa = verts[a], pb = verts[b];
        if ((pa.y() - o.y()) * (pb.y() - o.y()) > 0) continue;
        Vec2d p;
        if (pa.y() == pb.y()) {
          p = pa.x() > pb.x() ? pa : pb;  // nearer end of a collinear edge
        } else {
          const double t = (o.y() - pa.y()) / (pb.y() - pa.y());
          p = pa + t * (pb - pa);
        }
        const double d = o.x() - p.x();
        if (d > 0 && d < best) best = d, hit = e, at = p;
      }
      if (!std::isfinite(best)) continue;
      // Split the hit edge at the landing point unless it lands on an end.
      const auto [a, b] = edges[hit];
      std::size_t land;
      if ((verts[a] - at).norm() <= snap_tol) {
        land = a;
      } else if ((verts[b] - at).norm() <= snap_tol) {
        land = b;
      } else {
        verts.push_back(at);
        land = verts.size() - 1;
        edges[hit] = {std::min(a, land), std::max(a, land)};
        edges.emplace_back(std::min(b, land), std::max(b, land));
      }
      edges.emplace_back(std::min(v, land), std::max(v, land));
      bridged = true;
      break;  // components changed; recompute
    }
    if (!bridged) return;
  }
}

std::vector<Vec2d> drop_collinear(std::vector<Vec2d> ring) {
  bool changed = true;
  while (changed && ring.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Vec2d& prev = ring[(i + ring.size() - 1) % ring.size()];
      const Vec2d& cur = ring[i];
      const Vec2d& nxt = ring[(i + 1) % ring.size()];
      const Vec2d d1 = cur - prev, d2 = nxt - cur;
      const double scale = d1.norm() * d2.norm();
      if (scale > 0 && std::abs(cross2<double>(d1, d2)) <= 1e-12 * scale && d1.dot(d2) > 0) {
        ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  // Canonical start: lexicographically smallest vertex.
  const auto lowest = std::min_element(ring.begin(), ring.end(), [](const Vec2d& a, const Vec2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  std::rotate(ring.begin(), lowest, ring.end());
  return ring;
}

}  // namespace

std::vector<Polygon2d> extract_faces(std::span<const Segment2d> segments, double snap_tol) {
  if (segments.empty()) throw DegenerateInputError("extract_faces: no segments");

  // Snap endpoints.
  std::vector<Vec2d> ends;
  ends.reserve(segments.size() * 2);
  for (const auto& s : segments) {
    ends.push_back(s.a);
    ends.push_back(s.b);
  }
  UnionFind uf(ends.size());
  for (std::size_t i = 0; i < ends.size(); ++i)
    for (std::size_t j = i + 1; j < ends.size(); ++j)
      if ((ends[i] - ends[j]).norm() <= snap_tol) uf.unite(i, j);

  VertexPool pool(0.0);
  std::vector<std::pair<std::size_t, std::size_t>> segs;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const std::size_t a = pool.add(ends[uf.find(2 * s)]);
    const std::size_t b = pool.add(ends[uf.find(2 * s + 1)]);
    if (a != b) segs.emplace_back(a, b);
  }
  if (segs.empty() || all_collinear(pool.points(), snap_tol))
    throw DegenerateInputError("extract_faces: segments are empty or collinear after snapping");

  // Crossing points become vertices, merged with anything within snap_tol.
  std::vector<Vec2d> verts = pool.points();
  auto add_vertex = [&](const Vec2d& p) {
    for (std::size_t i = 0; i < verts.size(); ++i)
      if ((verts[i] - p).norm() <= snap_tol) return i;
    verts.push_back(p);
    return verts.size() - 1;
  };
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Vec2d p = verts[segs[i].first], r = verts[segs[i].second] - p;
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      const Vec2d q = verts[segs[j].first], s = verts[segs[j].second] - q;
      const double denom = cross2<double>(r, s);
      if (std::abs(denom) <= 1e-12 * r.norm() * s.norm()) continue;
      const double t = cross2<double>(q - p, s) / denom;
      const double u = cross2<double>(q - p, r) / denom;
      if (t > 0 && t < 1 && u > 0 && u < 1) add_vertex(p + t * r);
    }
  }

  // Split every segment at the vertices lying on it.
  std::set<Edge> edge_set;
  for (const auto& [ia, ib] : segs) {
    const Vec2d a = verts[ia], ab = verts[ib] - a;
    const double len = ab.norm();
    std::vector<std::pair<double, std::size_t>> stops{{0.0, ia}, {1.0, ib}};
    for (std::size_t k = 0; k < verts.size(); ++k) {
      if (k == ia || k == ib) continue;
      const double t = (verts[k] - a).dot(ab) / (len * len);
      if (t <= 0 || t >= 1) continue;
      if (point_segment_distance(verts[k], a, verts[ib]) <= snap_tol) stops.emplace_back(t, k);
    }
    std::sort(stops.begin(), stops.end());
    for (std::size_t k = 0; k + 1 < stops.size(); ++k) {
      std::size_t u = stops[k].second, v = stops[k + 1].second;
      if (u == v) continue;
      if (v < u) std::swap(u, v);
      edge_set.emplace(u, v);
    }
  }
  std::vector<Edge> edges(edge_set.begin(), edge_set.end());

  // Dangling chains bound nothing. Bridges stay: they tie an inner room to the room
  // around it, which then comes back as one ring with a zero-width slit.
  edges = prune_dangling(verts.size(), std::move(edges));
  if (edges.empty()) return {};
  bridge_islands(verts, edges, snap_tol);
  const FaceWalk walk = walk_faces(verts, edges);

  std::vector<Polygon2d> faces;
  for (const auto& ring : walk.faces) {
    std::vector<Vec2d> pts;
    pts.reserve(ring.size());
    for (std::size_t h : ring) pts.push_back(verts[h % 2 == 0 ? edges[h / 2].first : edges[h / 2].second]);
    const double area = signed_area<double>(std::span<const Vec2d>(pts));
    if (area <= 1e-12) continue;  // unbounded face of a component, or a sliver
    faces.push_back(Polygon2d{drop_collinear(std::move(pts))});
  }
  return faces;
}

}  // namespace scenesmith
