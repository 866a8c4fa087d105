#pragma once

// Independent reference implementations used to check the library. Nothing here calls
// into the geometry, validate or analysis code it is meant to check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "scenesmith/catalog.hpp"
#include "scenesmith/geometry.hpp"
#include "scenesmith/template.hpp"

namespace oracle {

using scenesmith::OrientedBoxd;
using scenesmith::Vec2d;

inline std::filesystem::path data(const std::string& rel) {
  return std::filesystem::path(SCENESMITH_DATA_DIR) / rel;
}

inline scenesmith::EnvironmentTemplate fixture(const std::string& name) {
  return scenesmith::load_template(data("templates/" + name + ".tmpl.json"));
}

inline scenesmith::Catalog desk_catalog() {
  return scenesmith::load_catalog_file(data("catalogs/desk.catalog.json"));
}

// Test-side generator, deliberately not the library's Rng.
struct SplitMix {
  std::uint64_t s;
  explicit SplitMix(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

// ---- boxes -------------------------------------------------------------------------

// Point membership of an upright box, written from the rotation matrix directly.
struct BoxTest {
  double cx, cy, cz, hx, hy, hz, c, s;
  explicit BoxTest(const OrientedBoxd& b)
      : cx(b.center.x()), cy(b.center.y()), cz(b.center.z()), hx(b.half_extents.x()),
        hy(b.half_extents.y()), hz(b.half_extents.z()), c(std::cos(b.yaw)), s(std::sin(b.yaw)) {}
  bool contains(double x, double y, double z) const {
    const double dx = x - cx, dz = z - cz;
    // inverse rotation: local = R^T (p - c) with R columns (c, s) and (-s, c)
    const double lu = c * dx + s * dz;
    const double lv = -s * dx + c * dz;
    // bitwise & keeps the hot Monte-Carlo loop free of data-dependent branches
    return (std::abs(lu) <= hx) & (std::abs(lv) <= hz) & (std::abs(y - cy) <= hy);
  }
  // World-space axis-aligned bounds.
  void extend(double lo[3], double hi[3]) const {
    const double ex = std::abs(c) * hx + std::abs(s) * hz;
    const double ez = std::abs(s) * hx + std::abs(c) * hz;
    lo[0] = std::min(lo[0], cx - ex), hi[0] = std::max(hi[0], cx + ex);
    lo[1] = std::min(lo[1], cy - hy), hi[1] = std::max(hi[1], cy + hy);
    lo[2] = std::min(lo[2], cz - ez), hi[2] = std::max(hi[2], cz + ez);
  }
};

/// Monte-Carlo volume IoU: uniform samples over the joint bounding box.
inline double mc_iou(const OrientedBoxd& a, const OrientedBoxd& b, std::size_t samples,
                     std::uint64_t seed) {
  const BoxTest ta(a), tb(b);
  double lo[3] = {1e300, 1e300, 1e300}, hi[3] = {-1e300, -1e300, -1e300};
  ta.extend(lo, hi);
  tb.extend(lo, hi);
  SplitMix rng(seed);
  constexpr double k21 = 1.0 / (1u << 21);
  const double sx = (hi[0] - lo[0]) * k21, sy = (hi[1] - lo[1]) * k21, sz = (hi[2] - lo[2]) * k21;
  std::size_t in_a = 0, in_b = 0, both = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    // three 21-bit coordinates from one draw, jittered to cell centers
    const std::uint64_t r = rng.next();
    const double x = lo[0] + (static_cast<double>(r & 0x1fffff) + 0.5) * sx;
    const double y = lo[1] + (static_cast<double>((r >> 21) & 0x1fffff) + 0.5) * sy;
    const double z = lo[2] + (static_cast<double>((r >> 42) & 0x1fffff) + 0.5) * sz;
    const bool pa = ta.contains(x, y, z), pb = tb.contains(x, y, z);
    in_a += pa;
    in_b += pb;
    both += pa & pb;
  }
  const std::size_t uni = in_a + in_b - both;
  return uni == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(uni);
}

inline std::vector<Vec2d> corners(const OrientedBoxd& b, double inflate = 0) {
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  const double hx = b.half_extents.x() + inflate, hz = b.half_extents.z() + inflate;
  std::vector<Vec2d> out;
  for (auto [u, v] : {std::pair{-1, -1}, {1, -1}, {1, 1}, {-1, 1}})
    out.emplace_back(b.center.x() + u * hx * c - v * hz * s, b.center.z() + u * hx * s + v * hz * c);
  return out;
}

inline double orient(const Vec2d& a, const Vec2d& b, const Vec2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

inline bool proper_cross(const Vec2d& a, const Vec2d& b, const Vec2d& c, const Vec2d& d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
}

inline bool strictly_inside_convex(const Vec2d& p, const std::vector<Vec2d>& ccw) {
  for (std::size_t i = 0; i < ccw.size(); ++i)
    if (orient(ccw[i], ccw[(i + 1) % ccw.size()], p) <= 0) return false;
  return true;
}

/// Interior overlap of two convex CCW quads: some pair of edges properly crosses, or
/// one polygon has a vertex strictly inside the other. Exact up to the general-position
/// assumption of random inputs.
inline bool quads_overlap(const std::vector<Vec2d>& p, const std::vector<Vec2d>& q) {
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j)
      if (proper_cross(p[i], p[(i + 1) % p.size()], q[j], q[(j + 1) % q.size()])) return true;
  for (const Vec2d& v : p)
    if (strictly_inside_convex(v, q)) return true;
  for (const Vec2d& v : q)
    if (strictly_inside_convex(v, p)) return true;
  return false;
}

inline bool boxes_overlap(const OrientedBoxd& a, const OrientedBoxd& b, double clearance) {
  const double m = clearance / 2;
  const double y_gap = std::abs(a.center.y() - b.center.y()) - (a.half_extents.y() + b.half_extents.y() + 2 * m);
  if (y_gap >= 0) return false;
  return quads_overlap(corners(a, m), corners(b, m));
}

// ---- polygons ----------------------------------------------------------------------

/// Winding number of the closed ring around p; nonzero means inside.
inline int winding_number(const Vec2d& p, const std::vector<Vec2d>& ring) {
  int wn = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Vec2d& a = ring[i];
    const Vec2d& b = ring[(i + 1) % ring.size()];
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && orient(a, b, p) > 0) ++wn;
    } else if (b.y() <= p.y() && orient(a, b, p) < 0) {
      --wn;
    }
  }
  return wn;
}

inline double shoelace(const std::vector<Vec2d>& ring) {
  double s = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Vec2d& a = ring[i];
    const Vec2d& b = ring[(i + 1) % ring.size()];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return s / 2;
}

// ---- planar faces ------------------------------------------------------------------

using GridPoint = std::pair<int, int>;
using GridEdge = std::pair<GridPoint, GridPoint>;

/// Bounded face areas of the planar graph of `segs` by brute force: every segment is
/// split at the endpoints of others lying on it and at proper crossings (O(n^2)), then
/// faces are traced by the half-edge rule that the successor of u->v is v->w with w the
/// first neighbor of v clockwise from u. No snapping: inputs must meet exactly.
inline std::vector<double> half_edge_face_areas(const std::vector<scenesmith::Segment2d>& segs) {
  using Key = std::pair<long long, long long>;
  auto key = [](const Vec2d& p) { return Key{std::llround(p.x() * 1e7), std::llround(p.y() * 1e7)}; };
  std::map<Key, Vec2d> pos;
  std::set<std::pair<Key, Key>> edges;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Vec2d a = segs[i].a, d = segs[i].b - segs[i].a;
    std::vector<std::pair<double, Vec2d>> cuts{{0.0, a}, {1.0, segs[i].b}};
    auto on_segment = [&](const Vec2d& p) {
      const double t = (p - a).dot(d) / d.squaredNorm();
      if (t > 0 && t < 1 && (a + t * d - p).norm() < 1e-9) cuts.push_back({t, p});
    };
    for (std::size_t j = 0; j < segs.size(); ++j) {
      if (j == i) continue;
      on_segment(segs[j].a);
      on_segment(segs[j].b);
      if (proper_cross(segs[i].a, segs[i].b, segs[j].a, segs[j].b)) {
        const Vec2d e = segs[j].b - segs[j].a;
        const double t = ((segs[j].a - a).x() * e.y() - (segs[j].a - a).y() * e.x()) / (d.x() * e.y() - d.y() * e.x());
        cuts.push_back({t, a + t * d});
      }
    }
    std::sort(cuts.begin(), cuts.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      Key p = key(cuts[k].second), q = key(cuts[k + 1].second);
      pos.emplace(p, cuts[k].second);
      pos.emplace(q, cuts[k + 1].second);
      if (p == q) continue;
      if (q < p) std::swap(p, q);
      edges.insert({p, q});
    }
  }
  std::map<Key, std::vector<Key>> nbr;
  for (const auto& [a, b] : edges) {
    nbr[a].push_back(b);
    nbr[b].push_back(a);
  }
  auto angle = [&](const Key& from, const Key& to) {
    const Vec2d v = pos[to] - pos[from];
    return std::atan2(v.y(), v.x());
  };
  using Half = std::pair<Key, Key>;
  std::set<Half> used;
  std::vector<double> areas;
  for (const auto& [a, b] : edges) {
    for (const Half& start : {Half{a, b}, Half{b, a}}) {
      if (used.count(start)) continue;
      std::vector<Vec2d> ring;
      Half h = start;
      do {
        used.insert(h);
        ring.push_back(pos[h.first]);
        const Key u = h.first, v = h.second;
        const double back = angle(v, u);
        const Key* best = nullptr;
        double best_turn = 0;
        for (const Key& w : nbr[v]) {
          double turn = back - angle(v, w);
          while (turn <= 0) turn += 2 * M_PI;
          if (!best || turn < best_turn) best = &w, best_turn = turn;
        }
        h = {v, *best};
      } while (h != start);
      const double area = shoelace(ring);
      if (area > 1e-12) areas.push_back(area);
    }
  }
  std::sort(areas.begin(), areas.end());
  return areas;
}

/// Region areas by flood fill over unit cells; cells are adjacent unless a wall edge
/// separates them. Cross-check for the half-edge walk.
inline std::vector<double> flood_fill_areas(const std::set<GridEdge>& edges, int w, int h) {
  auto wall = [&](GridPoint a, GridPoint b) {
    if (b < a) std::swap(a, b);
    return edges.count({a, b}) > 0;
  };
  std::vector<int> label(w * h, -1);
  std::vector<double> areas;
  for (int start = 0; start < w * h; ++start) {
    if (label[start] >= 0) continue;
    const int id = static_cast<int>(areas.size());
    areas.push_back(0);
    std::vector<int> stack{start};
    label[start] = id;
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      areas[id] += 1;
      const int x = c % w, y = c / w;
      // neighbor, and the wall edge between
      const std::tuple<int, int, GridPoint, GridPoint> steps[] = {
          {x + 1, y, {x + 1, y}, {x + 1, y + 1}},
          {x - 1, y, {x, y}, {x, y + 1}},
          {x, y + 1, {x, y + 1}, {x + 1, y + 1}},
          {x, y - 1, {x, y}, {x + 1, y}}};
      for (const auto& [nx, ny, ea, eb] : steps) {
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const int n = ny * w + nx;
        if (label[n] >= 0 || wall(ea, eb)) continue;
        label[n] = id;
        stack.push_back(n);
      }
    }
  }
  std::sort(areas.begin(), areas.end());
  return areas;
}

struct Maze {
  int w = 0, h = 0;
  std::set<GridEdge> edges;             ///< unit edges, normalized (a < b)
  std::vector<scenesmith::Segment2d> segments;  ///< what the library sees
};

/// Rectangular outline plus interior walls grown by random walks from existing wall
/// vertices, so every wall is connected to the outline. The outline is handed over as
/// four long segments to exercise T-junction splitting.
inline Maze random_maze(std::uint64_t seed) {
  SplitMix rng(seed);
  Maze m;
  m.w = 3 + rng.below(7);
  m.h = 3 + rng.below(7);
  auto add = [&](GridPoint a, GridPoint b) {
    if (b < a) std::swap(a, b);
    m.edges.insert({a, b});
  };
  std::vector<GridPoint> on_wall;
  for (int x = 0; x < m.w; ++x) add({x, 0}, {x + 1, 0}), add({x, m.h}, {x + 1, m.h});
  for (int y = 0; y < m.h; ++y) add({0, y}, {0, y + 1}), add({m.w, y}, {m.w, y + 1});
  for (const auto& [a, b] : m.edges) on_wall.push_back(a), on_wall.push_back(b);
  const int walks = 1 + rng.below(2 * (m.w + m.h) / 3);
  for (int k = 0; k < walks; ++k) {
    GridPoint p = on_wall[rng.below(static_cast<int>(on_wall.size()))];
    const int len = 1 + rng.below(std::max(m.w, m.h));
    for (int s = 0; s < len; ++s) {
      static constexpr int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
      const int d = rng.below(4);
      const GridPoint q{p.first + dx[d], p.second + dy[d]};
      if (q.first < 0 || q.second < 0 || q.first > m.w || q.second > m.h) continue;
      add(p, q);
      on_wall.push_back(q);
      p = q;
    }
  }
  const double W = m.w, H = m.h;
  m.segments = {{Vec2d(0, 0), Vec2d(W, 0)}, {Vec2d(W, 0), Vec2d(W, H)},
                {Vec2d(W, H), Vec2d(0, H)}, {Vec2d(0, H), Vec2d(0, 0)}};
  for (const auto& [a, b] : m.edges) {
    const bool boundary = (a.second == b.second && (a.second == 0 || a.second == m.h)) ||
                          (a.first == b.first && (a.first == 0 || a.first == m.w));
    if (!boundary) m.segments.push_back({Vec2d(a.first, a.second), Vec2d(b.first, b.second)});
  }
  return m;
}

// ---- grids -------------------------------------------------------------------------

/// Diameter of the 8-connected free-cell graph (no corner cutting) by running
/// Dijkstra from every free cell. `blocked(r, c)` is any callable.
template <typename Blocked>
double all_pairs_diameter(long rows, long cols, double cell, Blocked blocked) {
  const long n = rows * cols;
  std::vector<double> dist(n);
  double best = 0;
  using Item = std::pair<double, long>;
  for (long src = 0; src < n; ++src) {
    if (blocked(src / cols, src % cols)) continue;
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0;
    pq.push({0, src});
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      best = std::max(best, d);
      const long r = u / cols, c = u % cols;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if (!dr && !dc) continue;
          const long nr = r + dr, nc = c + dc;
          if (nr < 0 || nc < 0 || nr >= rows || nc >= cols || blocked(nr, nc)) continue;
          if (dr && dc && (blocked(r + dr, c) || blocked(r, c + dc))) continue;
          const double w = (dr && dc) ? cell * std::sqrt(2.0) : cell;
          if (d + w < dist[nr * cols + nc]) {
            dist[nr * cols + nc] = d + w;
            pq.push({d + w, nr * cols + nc});
          }
        }
    }
  }
  return best;
}

/// Distance from p to the footprint rectangle of b (0 inside), via edge distances.
inline double footprint_gap(const Vec2d& p, const OrientedBoxd& b) {
  const auto q = corners(b);
  if (strictly_inside_convex(p, q)) return 0;
  double best = 1e300;
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2d a = q[i], e = q[(i + 1) % 4] - a;
    const double t = std::clamp((p - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (a + t * e - p).norm());
  }
  return best;
}

// ---- statistics --------------------------------------------------------------------

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
template <typename Cdf>
double ks_continuous(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

/// KS distance between the empirical CDF of integer counts and Poisson(mean).
inline double ks_poisson(const std::vector<std::uint64_t>& counts, double mean) {
  const std::uint64_t kmax = *std::max_element(counts.begin(), counts.end()) + 20;
  std::vector<double> hist(kmax + 1, 0);
  for (auto k : counts) hist[k] += 1;
  double emp = 0, pmf = std::exp(-mean), cdf = 0, d = 0;
  for (std::uint64_t k = 0; k <= kmax; ++k) {
    emp += hist[k] / static_cast<double>(counts.size());
    cdf += pmf;
    d = std::max(d, std::abs(emp - cdf));
    pmf *= mean / static_cast<double>(k + 1);
  }
  return d;
}

/// 1% critical value of the one-sample KS test, large-sample form.
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

/// Logistic MLE by gradient ascent with Barzilai-Borwein steps and a backtracking
/// safeguard. Slow but shares nothing with IRLS.
inline Eigen::VectorXd gradient_mle(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    double grad_tol = 1e-11, int max_iter = 2000000) {
  auto loglik = [&](const Eigen::VectorXd& b) {
    double s = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double eta = X.row(i).dot(b);
      // log(1 + e^eta) computed stably
      const double softplus = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
      s += y(i) * eta - softplus;
    }
    return s;
  };
  auto grad = [&](const Eigen::VectorXd& b) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double p = 1.0 / (1.0 + std::exp(-X.row(i).dot(b)));
      g += (y(i) - p) * X.row(i).transpose();
    }
    return g;
  };
  Eigen::VectorXd b = Eigen::VectorXd::Zero(X.cols());
  Eigen::VectorXd g = grad(b);
  double step = 1e-3;
  for (int it = 0; it < max_iter && g.lpNorm<Eigen::Infinity>() > grad_tol; ++it) {
    double f = loglik(b);
    Eigen::VectorXd nb = b + step * g;
    while (loglik(nb) < f - 1e-14 * std::abs(f) && step > 1e-12) {
      step /= 2;
      nb = b + step * g;
    }
    const Eigen::VectorXd ng = grad(nb);
    const Eigen::VectorXd s = nb - b, dy = g - ng;
    const double sy = s.dot(dy);
    step = sy > 0 ? s.squaredNorm() / sy : 1e-3;
    b = nb;
    g = ng;
  }
  return b;
}

}  // namespace oracle
