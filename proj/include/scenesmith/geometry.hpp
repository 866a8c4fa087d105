#pragma once

// Geometric primitives shared by layout, placement and navigability analysis.
//
// Frame: right-handed, y is up, the floor is the (x, z) plane. Every 2D point in the
// library is a floor-plane point (x, z). Boxes are upright: they rotate only about y.
// A box's local u axis (half_extents.x) maps to (cos yaw, sin yaw) in (x, z) and its
// local v axis (half_extents.z) maps to (-sin yaw, cos yaw). "Forward" is local +v.

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace scenesmith {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec2d = Vec2<double>;
using Vec3d = Vec3<double>;

/// Wraps an angle into [-pi, pi).
template <typename Scalar>
Scalar normalize_yaw(Scalar yaw) {
  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  Scalar r = yaw - two_pi * std::floor((yaw + std::numbers::pi_v<Scalar>) / two_pi);
  if (r >= std::numbers::pi_v<Scalar>) r -= two_pi;
  return r;
}

/// Yaw whose forward axis (local +v) points along `forward` in the floor plane.
template <typename Scalar>
Scalar yaw_from_forward(const Vec2<Scalar>& forward) {
  return normalize_yaw(std::atan2(-forward.x(), forward.y()));
}

template <typename Scalar>
Vec2<Scalar> forward_from_yaw(Scalar yaw) {
  return Vec2<Scalar>(-std::sin(yaw), std::cos(yaw));
}

template <typename Scalar>
struct OrientedBox {
  Vec3<Scalar> center = Vec3<Scalar>::Zero();
  Vec3<Scalar> half_extents = Vec3<Scalar>::Constant(Scalar(0.5));
  Scalar yaw = 0;

  OrientedBox() = default;
  OrientedBox(const Vec3<Scalar>& c, const Vec3<Scalar>& h, Scalar y)
      : center(c), half_extents(h), yaw(normalize_yaw(y)) {}

  bool valid() const {
    return (half_extents.array() > Scalar(0)).all() && center.allFinite() &&
           std::isfinite(yaw);
  }

  Scalar bottom() const { return center.y() - half_extents.y(); }
  Scalar top() const { return center.y() + half_extents.y(); }
  Scalar volume() const { return Scalar(8) * half_extents.prod(); }
  Scalar footprint_area() const { return Scalar(4) * half_extents.x() * half_extents.z(); }

  Vec2<Scalar> center2() const { return {center.x(), center.z()}; }
  Vec2<Scalar> axis_u() const { return {std::cos(yaw), std::sin(yaw)}; }
  Vec2<Scalar> axis_v() const { return {-std::sin(yaw), std::cos(yaw)}; }

  /// World floor-plane position of a point given in local (u, v) coordinates.
  Vec2<Scalar> to_world(const Vec2<Scalar>& local) const {
    return center2() + local.x() * axis_u() + local.y() * axis_v();
  }
  Vec2<Scalar> to_local(const Vec2<Scalar>& world) const {
    const Vec2<Scalar> d = world - center2();
    return {d.dot(axis_u()), d.dot(axis_v())};
  }

  /// Footprint corners, counter-clockwise.
  std::array<Vec2<Scalar>, 4> footprint() const {
    const Vec2<Scalar> c = center2();
    const Vec2<Scalar> u = axis_u() * half_extents.x();
    const Vec2<Scalar> v = axis_v() * half_extents.z();
    return {c - u - v, c + u - v, c + u + v, c - u + v};
  }

  OrientedBox inflated(Scalar margin) const {
    OrientedBox out = *this;
    out.half_extents.array() += margin;
    return out;
  }

  bool operator==(const OrientedBox&) const = default;
};

using OrientedBoxd = OrientedBox<double>;

template <typename Scalar>
struct Polygon2 {
  std::vector<Vec2<Scalar>> vertices;

  bool operator==(const Polygon2&) const = default;
};

using Polygon2d = Polygon2<double>;

template <typename Scalar>
Scalar cross2(const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Shoelace area, positive for counter-clockwise rings.
template <typename Scalar>
Scalar signed_area(std::span<const Vec2<Scalar>> ring) {
  Scalar twice = 0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross2(ring[i], ring[(i + 1) % n]);
  return twice / Scalar(2);
}

template <typename Scalar>
Scalar signed_area(const Polygon2<Scalar>& poly) {
  return signed_area<Scalar>(std::span<const Vec2<Scalar>>(poly.vertices));
}

template <typename Scalar>
Vec2<Scalar> centroid(const Polygon2<Scalar>& poly) {
  Vec2<Scalar> acc = Vec2<Scalar>::Zero();
  Scalar twice = 0;
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    const Scalar c = cross2(a, b);
    twice += c;
    acc += (a + b) * c;
  }
  return acc / (Scalar(3) * twice);
}

template <typename Scalar>
std::pair<Vec2<Scalar>, Vec2<Scalar>> bounds(std::span<const Vec2<Scalar>> pts) {
  Vec2<Scalar> lo = pts.front(), hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo, hi};
}

template <typename Scalar>
Scalar point_segment_distance(const Vec2<Scalar>& p, const Vec2<Scalar>& a,
                              const Vec2<Scalar>& b) {
  const Vec2<Scalar> ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  Scalar t = len2 > 0 ? (p - a).dot(ab) / len2 : Scalar(0);
  t = std::clamp(t, Scalar(0), Scalar(1));
  return (a + t * ab - p).norm();
}

/// Proper or improper intersection of closed segments ab and cd.
template <typename Scalar>
bool segments_intersect(const Vec2<Scalar>& a, const Vec2<Scalar>& b, const Vec2<Scalar>& c,
                        const Vec2<Scalar>& d) {
  auto orient = [](const Vec2<Scalar>& p, const Vec2<Scalar>& q, const Vec2<Scalar>& r) {
    const Scalar v = cross2<Scalar>(q - p, r - p);
    return (v > 0) - (v < 0);
  };
  auto on_segment = [](const Vec2<Scalar>& p, const Vec2<Scalar>& q, const Vec2<Scalar>& r) {
    return std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) &&
           std::min(p.y(), q.y()) <= r.y() && r.y() <= std::max(p.y(), q.y());
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

/// No two non-adjacent edges touch and no adjacent edges overlap.
template <typename Scalar>
bool is_simple(const Polygon2<Scalar>& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] == v[(i + 1) % n]) return false;
  }
  return true;
}

/// Even-odd rule. Points within `boundary_eps` of an edge count as inside.
template <typename Scalar>
bool point_in_polygon(const Vec2<Scalar>& p, const Polygon2<Scalar>& poly,
                      Scalar boundary_eps = Scalar(1e-9)) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = v[i];
    const auto& b = v[j];
    if (point_segment_distance(p, a, b) <= boundary_eps) return true;
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const Scalar x_cross = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

/// Sutherland-Hodgman clip of `subject` against the convex counter-clockwise `clip`.
template <typename Scalar>
std::vector<Vec2<Scalar>> clip_convex(std::span<const Vec2<Scalar>> subject,
                                      std::span<const Vec2<Scalar>> clip) {
  std::vector<Vec2<Scalar>> out(subject.begin(), subject.end());
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Vec2<Scalar> a = clip[e];
    const Vec2<Scalar> b = clip[(e + 1) % m];
    const Vec2<Scalar> edge = b - a;
    auto side = [&](const Vec2<Scalar>& p) { return cross2<Scalar>(edge, p - a); };
    std::vector<Vec2<Scalar>> in;
    in.swap(out);
    const std::size_t k = in.size();
    for (std::size_t i = 0; i < k; ++i) {
      const Vec2<Scalar>& cur = in[i];
      const Vec2<Scalar>& nxt = in[(i + 1) % k];
      const Scalar sc = side(cur);
      const Scalar sn = side(nxt);
      if (sc >= 0) out.push_back(cur);
      if ((sc >= 0) != (sn >= 0)) {
        const Scalar t = sc / (sc - sn);
        out.push_back(cur + t * (nxt - cur));
      }
    }
  }
  return out;
}

/// Intersection area of two box footprints.
template <typename Scalar>
Scalar footprint_overlap_area(const OrientedBox<Scalar>& a, const OrientedBox<Scalar>& b) {
  const auto fa = a.footprint();
  const auto fb = b.footprint();
  const auto clipped = clip_convex<Scalar>(std::span<const Vec2<Scalar>>(fa),
                                           std::span<const Vec2<Scalar>>(fb));
  if (clipped.size() < 3) return Scalar(0);
  return std::max(Scalar(0), signed_area<Scalar>(std::span<const Vec2<Scalar>>(clipped)));
}

template <typename Scalar>
Scalar vertical_overlap(const OrientedBox<Scalar>& a, const OrientedBox<Scalar>& b) {
  return std::max(Scalar(0), std::min(a.top(), b.top()) - std::max(a.bottom(), b.bottom()));
}

/// Volume intersection-over-union of two upright boxes: the intersection is the
/// footprint clip area times the vertical interval overlap.
template <typename Scalar>
Scalar obb_iou(const OrientedBox<Scalar>& a, const OrientedBox<Scalar>& b) {
  const Scalar inter = footprint_overlap_area(a, b) * vertical_overlap(a, b);
  const Scalar uni = a.volume() + b.volume() - inter;
  if (!(uni > 0)) return Scalar(0);
  return std::clamp(inter / uni, Scalar(0), Scalar(1));
}

/// Footprint-only IoU, kept for diagnostics next to the volume IoU.
template <typename Scalar>
Scalar footprint_iou(const OrientedBox<Scalar>& a, const OrientedBox<Scalar>& b) {
  const Scalar inter = footprint_overlap_area(a, b);
  const Scalar uni = a.footprint_area() + b.footprint_area() - inter;
  return uni > 0 ? std::clamp(inter / uni, Scalar(0), Scalar(1)) : Scalar(0);
}

/// Penetration below this depth counts as contact, not overlap.
inline constexpr double kContactEps = 1e-9;

/// True iff the boxes, each inflated by clearance / 2, overlap with positive depth.
/// Separating-axis test on the footprints plus an interval test on y; closed-boundary
/// contact is not overlap.
template <typename Scalar>
bool obb_intersects(const OrientedBox<Scalar>& a, const OrientedBox<Scalar>& b,
                    Scalar clearance) {
  const Scalar m = clearance / Scalar(2);
  const Scalar eps = Scalar(kContactEps);
  const Scalar ay = a.half_extents.y() + m, by = b.half_extents.y() + m;
  if (std::abs(a.center.y() - b.center.y()) >= ay + by - eps) return false;

  const Vec2<Scalar> d = b.center2() - a.center2();
  const std::array<Vec2<Scalar>, 2> au{a.axis_u(), a.axis_v()};
  const std::array<Vec2<Scalar>, 2> bu{b.axis_u(), b.axis_v()};
  const Scalar ah[2] = {a.half_extents.x() + m, a.half_extents.z() + m};
  const Scalar bh[2] = {b.half_extents.x() + m, b.half_extents.z() + m};
  auto separated_on = [&](const Vec2<Scalar>& n) {
    const Scalar ra = ah[0] * std::abs(au[0].dot(n)) + ah[1] * std::abs(au[1].dot(n));
    const Scalar rb = bh[0] * std::abs(bu[0].dot(n)) + bh[1] * std::abs(bu[1].dot(n));
    return std::abs(d.dot(n)) >= ra + rb - eps;
  };
  for (const auto& n : au)
    if (separated_on(n)) return false;
  for (const auto& n : bu)
    if (separated_on(n)) return false;
  return true;
}

/// Distance from a floor point to a box footprint (0 inside).
template <typename Scalar>
Scalar footprint_distance(const Vec2<Scalar>& p, const OrientedBox<Scalar>& box) {
  const Vec2<Scalar> l = box.to_local(p);
  const Scalar dx = std::max(Scalar(0), std::abs(l.x()) - box.half_extents.x());
  const Scalar dz = std::max(Scalar(0), std::abs(l.y()) - box.half_extents.z());
  return std::hypot(dx, dz);
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
template <typename Scalar>
std::vector<Vec2<Scalar>> convex_hull(std::vector<Vec2<Scalar>> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2<Scalar>> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2<Scalar>(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross2<Scalar>(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0)
      --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

/// A wall or any other straight 2D segment.
struct Segment2d {
  Vec2d a;
  Vec2d b;
};

/// Bounded faces of the planar subdivision induced by `segments`.
///
/// Endpoints closer than `snap_tol` are merged, segments are split where they cross or
/// where an endpoint lies on another segment, dangling edges are dropped, and every
/// bounded face is returned as a counter-clockwise ring. Output order is deterministic
/// for a given input.
///
/// A face that surrounds other walls (an inner room, say) is returned as a weakly simple
/// ring that runs out to them and back along a zero-width slit: the connecting wall if
/// there is one, otherwise a horizontal cut from the inner group's leftmost vertex. Face
/// areas therefore never overlap.
///
/// Throws DegenerateInputError when nothing non-collinear is left after snapping.
std::vector<Polygon2d> extract_faces(std::span<const Segment2d> segments,
                                     double snap_tol = 0.05);

}  // namespace scenesmith
