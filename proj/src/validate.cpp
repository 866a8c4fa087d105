#include "scenesmith/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "json_fields.hpp"
#include "scenesmith/digest.hpp"
#include "scenesmith/errors.hpp"

namespace scenesmith {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v, int decimals = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

bool related(const Placement& a, const Placement& b) {
  return a.parent == b.id || b.parent == a.id || a.supported_by == b.id || b.supported_by == a.id;
}

struct Bounds {
  Vec2d lo = Vec2d::Constant(kInf);
  Vec2d hi = Vec2d::Constant(-kInf);
  void add(const Vec2d& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
};

}  // namespace

std::vector<OrientedBoxd> blocking_boxes(const SceneSpec& scene, const NavConfig& cfg) {
  std::vector<OrientedBoxd> out;
  for (const OrientedBoxd& w : scene.wall_solids)
    if (w.bottom() < cfg.agent_height) out.push_back(w);
  for (const Placement& p : scene.placements)
    if (p.source != PlacementSource::small && p.box.bottom() < cfg.agent_height) out.push_back(p.box);
  for (const Portal& p : scene.portals) {
    if (p.kind != PortalKind::door || !p.door_state) continue;
    if (!p.door_state->has_leaf || p.door_state->openness > 0) continue;
    const Vec2d d = p.along();
    const Vec2d mid = p.midpoint();
    const double h = p.opening.top - p.opening.bottom;
    out.emplace_back(Vec3d(mid.x(), p.opening.bottom + h / 2, mid.y()),
                     Vec3d(p.opening.width / 2, h / 2, p.wall_thickness / 4), std::atan2(d.y(), d.x()));
  }
  return out;
}

OccupancyGrid rasterize(const SceneSpec& scene, const NavConfig& cfg) {
  OccupancyGrid grid;
  grid.cell = cfg.cell_size;
  Bounds b;
  for (const Room& r : scene.rooms)
    for (const Vec2d& v : r.polygon.vertices) b.add(v);
  if (scene.rooms.empty()) {
    grid.blocked.resize(1, 1);
    grid.blocked.setConstant(true);
    return grid;
  }
  const double margin = cfg.cell_size;
  grid.origin = b.lo - Vec2d::Constant(margin);
  const auto cols = static_cast<Eigen::Index>(std::ceil((b.hi.x() - b.lo.x() + 2 * margin) / cfg.cell_size));
  const auto rows = static_cast<Eigen::Index>(std::ceil((b.hi.y() - b.lo.y() + 2 * margin) / cfg.cell_size));
  grid.blocked.setConstant(rows, cols, true);

  auto cell_range = [&](const Vec2d& lo, const Vec2d& hi) {
    const auto c0 = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor((lo.x() - grid.origin.x()) / grid.cell)));
    const auto r0 = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor((lo.y() - grid.origin.y()) / grid.cell)));
    const auto c1 = std::min<Eigen::Index>(cols - 1, static_cast<Eigen::Index>(std::floor((hi.x() - grid.origin.x()) / grid.cell)));
    const auto r1 = std::min<Eigen::Index>(rows - 1, static_cast<Eigen::Index>(std::floor((hi.y() - grid.origin.y()) / grid.cell)));
    return std::array<Eigen::Index, 4>{r0, r1, c0, c1};
  };

  for (const Room& room : scene.rooms) {
    const auto [lo, hi] = bounds<double>(std::span<const Vec2d>(room.polygon.vertices));
    const auto [r0, r1, c0, c1] = cell_range(lo, hi);
    for (Eigen::Index r = r0; r <= r1; ++r)
      for (Eigen::Index c = c0; c <= c1; ++c)
        if (grid.blocked(r, c) && point_in_polygon(grid.center(r, c), room.polygon)) grid.blocked(r, c) = false;
  }

  const double radius = cfg.agent_radius;
  for (const OrientedBoxd& box : blocking_boxes(scene, cfg)) {
    const auto fp = box.footprint();
    auto [lo, hi] = bounds<double>(std::span<const Vec2d>(fp));
    lo.array() -= radius;
    hi.array() += radius;
    const auto [r0, r1, c0, c1] = cell_range(lo, hi);
    for (Eigen::Index r = r0; r <= r1; ++r)
      for (Eigen::Index c = c0; c <= c1; ++c)
        if (!grid.blocked(r, c) && footprint_distance(grid.center(r, c), box) < radius) grid.blocked(r, c) = true;
  }
  return grid;
}

FreeSpaceGraph::FreeSpaceGraph(const OccupancyGrid& grid) : cell_(grid.cell) {
  index_.setConstant(grid.rows(), grid.cols(), -1);
  for (Eigen::Index r = 0; r < grid.rows(); ++r)
    for (Eigen::Index c = 0; c < grid.cols(); ++c)
      if (!grid.blocked(r, c)) {
        index_(r, c) = static_cast<std::int64_t>(cells_.size());
        cells_.emplace_back(r, c);
      }
  auto free = [&](Eigen::Index r, Eigen::Index c) {
    return r >= 0 && c >= 0 && r < grid.rows() && c < grid.cols() && !grid.blocked(r, c);
  };
  adjacency_.resize(cells_.size());
  const double diag = std::sqrt(2.0) * cell_;
  for (std::size_t n = 0; n < cells_.size(); ++n) {
    const auto [r, c] = cells_[n];
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        if (!free(r + dr, c + dc)) continue;
        const bool diagonal = dr != 0 && dc != 0;
        if (diagonal && (!free(r + dr, c) || !free(r, c + dc))) continue;
        adjacency_[n].push_back({static_cast<std::size_t>(index_(r + dr, c + dc)), diagonal ? diag : cell_});
      }
  }
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  component_.assign(cells_.size(), kUnset);
  for (std::size_t s = 0; s < cells_.size(); ++s) {
    if (component_[s] != kUnset) continue;
    std::vector<std::size_t> stack{s};
    component_[s] = n_components_;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (const Arc& a : adjacency_[u])
        if (component_[a.to] == kUnset) {
          component_[a.to] = n_components_;
          stack.push_back(a.to);
        }
    }
    ++n_components_;
  }
}

std::optional<std::size_t> FreeSpaceGraph::node_at(Eigen::Index r, Eigen::Index c) const {
  if (r < 0 || c < 0 || r >= index_.rows() || c >= index_.cols() || index_(r, c) < 0) return std::nullopt;
  return static_cast<std::size_t>(index_(r, c));
}

std::vector<double> FreeSpaceGraph::distances(std::size_t source) const {
  std::vector<double> dist(cells_.size(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const Arc& a : adjacency_[u]) {
      const double nd = d + a.cost;
      if (nd < dist[a.to]) {
        dist[a.to] = nd;
        heap.emplace(nd, a.to);
      }
    }
  }
  return dist;
}

namespace {

double farthest(const std::vector<double>& d, std::size_t* at = nullptr) {
  double best = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (std::isfinite(d[i]) && d[i] > best) {
      best = d[i];
      if (at) *at = i;
    }
  return best;
}

// Exact diameter of one component by eccentricity bounds: every search from v tightens
// max(d, ecc(v) - d) <= ecc(w) <= ecc(v) + d for all w, and nodes whose upper bound
// cannot beat the best lower bound are dropped.
double exact_component_diameter(const FreeSpaceGraph& g, const std::vector<std::size_t>& nodes) {
  const std::size_t n = nodes.size();
  if (n < 2) return 0;
  std::vector<double> lo(n, 0), hi(n, kInf);
  std::vector<bool> active(n, true);
  std::size_t remaining = n;
  double best = 0;
  bool pick_high = true;
  constexpr double tol = 1e-9;
  while (remaining > 0) {
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      if (pick == n || (pick_high ? hi[i] > hi[pick] : lo[i] < lo[pick])) pick = i;
    }
    pick_high = !pick_high;
    const auto d = g.distances(nodes[pick]);
    double ecc = 0;
    for (std::size_t i = 0; i < n; ++i) ecc = std::max(ecc, d[nodes[i]]);
    best = std::max(best, ecc);
    active[pick] = false;
    --remaining;
    for (std::size_t i = 0; i < n; ++i) {
      const double di = d[nodes[i]];
      lo[i] = std::max({lo[i], di, ecc - di});
      hi[i] = std::min(hi[i], ecc + di);
      best = std::max(best, lo[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      if (hi[i] <= best + tol || hi[i] - lo[i] <= tol) {
        active[i] = false;
        --remaining;
      }
    }
  }
  return best;
}

}  // namespace

PathLength longest_shortest_path(const OccupancyGrid& grid, std::size_t exact_limit) {
  const FreeSpaceGraph g(grid);
  PathLength out;
  if (g.size() == 0) return out;
  std::vector<std::vector<std::size_t>> members(g.component_count());
  for (std::size_t i = 0; i < g.size(); ++i) members[g.components()[i]].push_back(i);

  out.exact = g.size() < exact_limit;
  for (const auto& nodes : members) {
    if (out.exact) {
      out.meters = std::max(out.meters, exact_component_diameter(g, nodes));
    } else {
      std::size_t a = nodes.front();
      farthest(g.distances(nodes.front()), &a);
      out.meters = std::max(out.meters, farthest(g.distances(a)));
    }
  }
  return out;
}

SceneMetrics scene_metrics(const SceneSpec& scene, const OccupancyGrid& grid, std::size_t exact_limit) {
  SceneMetrics m;
  for (const Room& r : scene.rooms) m.area_m2 += r.area();
  m.n_rooms = scene.rooms.size();
  m.n_objects = scene.placements.size();
  m.n_scanned_objects = static_cast<std::size_t>(std::count_if(
      scene.placements.begin(), scene.placements.end(),
      [](const Placement& p) { return p.source == PlacementSource::semantic; }));
  const PathLength lp = longest_shortest_path(grid, exact_limit);
  m.longest_path_m = lp.meters;
  m.longest_path_exact = lp.exact;
  return m;
}

SceneMetrics scene_metrics(const SceneSpec& scene, const EnvironmentTemplate& t, const OccupancyGrid& grid,
                           std::size_t exact_limit) {
  if (scene.template_digest != sha256_hex(write_template(t)))
    throw ValidationError("template_digest", "scene was not generated from this template");
  return scene_metrics(scene, grid, exact_limit);
}

std::string render_metrics_table(const std::vector<std::pair<std::string, SceneMetrics>>& rows) {
  const std::vector<std::string> header{"Environment", "Area (m2)", "Longest Path (m)", "# Rooms", "# Objects",
                                        "# Scanned Objects"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& [name, m] : rows)
    cells.push_back({name, fmt(m.area_m2, 1), fmt(m.longest_path_m, 1), std::to_string(m.n_rooms),
                     std::to_string(m.n_objects), std::to_string(m.n_scanned_objects)});
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << " | ";
      const std::size_t pad = width[c] - row[c].size();
      if (c == 0) out << row[c] << std::string(pad, ' ');
      else out << std::string(pad, ' ') << row[c];
    }
    out << "\n";
  };
  line(header);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  out << std::string(total + 3 * (width.size() - 1), '-') << "\n";
  for (const auto& row : cells) line(row);
  return out.str();
}

int step_budget_for(double area_m2, double area_cutoff) {
  return area_m2 < area_cutoff ? kShortBudget : kLongBudget;
}

double sample_fov(Rng& rng) {
  constexpr int steps = 85;  // (65 - 48) / 0.2
  const auto i = static_cast<int>(rng.below(steps + 1));
  return (480.0 + 2.0 * i) / 10.0;
}

namespace {

struct TargetReach {
  std::vector<const Placement*> instances;
  std::set<std::size_t> components;  // components with a cell that sees some instance
};

TargetReach reach_of(const std::string& type, const SceneSpec& scene, const OccupancyGrid& grid,
                     const FreeSpaceGraph& g, const NavConfig& cfg) {
  TargetReach out;
  for (const Placement& p : scene.placements)
    if (p.asset_type == type) out.instances.push_back(&p);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto [r, c] = g.cell(n);
    const Vec2d at = grid.center(r, c);
    for (const Placement* p : out.instances)
      if (footprint_distance(at, p->box) <= cfg.visibility_dist) {
        out.components.insert(g.components()[n]);
        break;
      }
  }
  return out;
}

}  // namespace

std::vector<std::string> reachable_target_types(const SceneSpec& scene, const OccupancyGrid& grid, const NavConfig& cfg,
                                                const Catalog* catalog) {
  std::set<std::string> types;
  for (const Placement& p : scene.placements) {
    if (catalog) {
      const AssetDef* a = catalog->find(p.asset_id);
      if (!a || !a->tags.is_target_candidate) continue;
    }
    types.insert(p.asset_type);
  }
  const FreeSpaceGraph g(grid);
  std::vector<std::string> out;
  for (const std::string& t : types)
    if (!reach_of(t, scene, grid, g, cfg).components.empty()) out.push_back(t);
  return out;
}

std::vector<EpisodeSpec> sample_episodes(const SceneSpec& scene, const OccupancyGrid& grid, const NavConfig& cfg,
                                         Rng& rng, const std::vector<std::string>& target_types,
                                         std::size_t per_target, const std::string& scene_ref) {
  const FreeSpaceGraph g(grid);
  double area = 0;
  for (const Room& r : scene.rooms) area += r.area();
  const int budget = step_budget_for(area, cfg.area_cutoff);

  std::vector<EpisodeSpec> out;
  for (const std::string& type : target_types) {
    const TargetReach reach = reach_of(type, scene, grid, g, cfg);
    if (reach.instances.empty()) throw UnreachableTargetError("no '" + type + "' in the scene");
    if (reach.components.empty())
      throw UnreachableTargetError("no free cell within reach of any '" + type + "'");
    std::vector<std::size_t> starts;
    for (std::size_t n = 0; n < g.size(); ++n) {
      if (!reach.components.contains(g.components()[n])) continue;
      const auto [r, c] = g.cell(n);
      const Vec2d at = grid.center(r, c);
      bool far_enough = true;
      for (const Placement* p : reach.instances)
        far_enough = far_enough && footprint_distance(at, p->box) >= cfg.min_start_dist;
      if (far_enough) starts.push_back(n);
    }
    if (starts.empty())
      throw UnreachableTargetError("no reachable start at least " + fmt(cfg.min_start_dist, 2) + " m from every '" +
                                   type + "'");
    for (std::size_t k = 0; k < per_target; ++k) {
      EpisodeSpec e;
      e.scene = scene_ref;
      const auto [r, c] = g.cell(starts[rng.below(starts.size())]);
      e.start = grid.center(r, c);
      e.start_yaw_deg = 30.0 * static_cast<double>(rng.below(12));
      e.target_type = type;
      e.step_budget = budget;
      e.fov_deg = sample_fov(rng);
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::string write_episodes(const std::vector<EpisodeSpec>& episodes) {
  detail::Json arr = detail::Json::array();
  for (const EpisodeSpec& e : episodes)
    arr.push_back(detail::Json{{"scene", e.scene},
                               {"start", detail::to_json(e.start)},
                               {"start_yaw_deg", e.start_yaw_deg},
                               {"target_type", e.target_type},
                               {"step_budget", e.step_budget},
                               {"fov_deg", e.fov_deg}});
  return detail::Json{{"episodes", std::move(arr)}}.dump(2) + "\n";
}

std::string render_preview(const SceneSpec& scene, const OccupancyGrid* grid) {
  constexpr double kScale = 100.0;  // px per meter
  Bounds b;
  for (const Room& r : scene.rooms)
    for (const Vec2d& v : r.polygon.vertices) b.add(v);
  for (const OrientedBoxd& w : scene.wall_solids)
    for (const Vec2d& v : w.footprint()) b.add(v);
  if (!std::isfinite(b.lo.x())) b.add(Vec2d::Zero());
  const Vec2d lo = b.lo - Vec2d::Constant(0.5);
  const Vec2d size = b.hi - b.lo + Vec2d::Constant(1.0);
  auto px = [&](const Vec2d& p) { return (p - lo) * kScale; };
  auto pts = [&](auto&& range) {
    std::string s;
    for (const Vec2d& v : range) {
      const Vec2d q = px(v);
      if (!s.empty()) s += ' ';
      s += fmt(q.x(), 1) + "," + fmt(q.y(), 1);
    }
    return s;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(size.x() * kScale, 0) << "\" height=\""
      << fmt(size.y() * kScale, 0) << "\" viewBox=\"0 0 " << fmt(size.x() * kScale, 0) << " "
      << fmt(size.y() * kScale, 0) << "\">\n";
  svg << "<style>.room{fill:#f4efe6;stroke:none}.wall{stroke:#333;stroke-linecap:square}"
         ".door{stroke:#b5651d;stroke-width:4}.window{stroke:#4a90d9;stroke-width:4}"
         ".placement{stroke:#555;stroke-width:1}.semantic{fill:#9fb8d6}.small{fill:#e8c170}"
         ".clutter{fill:#d98c8c}.light{fill:#ffd800;stroke:#a08800}.blocked{fill:#000;fill-opacity:0.08}"
         ".label{font:10px sans-serif;text-anchor:middle}</style>\n";

  for (const Room& r : scene.rooms)
    svg << "<polygon class=\"room\" data-id=\"" << r.id << "\" points=\"" << pts(r.polygon.vertices) << "\"/>\n";

  if (grid) {
    std::string path;
    for (Eigen::Index r = 0; r < grid->rows(); ++r)
      for (Eigen::Index c = 0; c < grid->cols(); ++c) {
        if (!grid->blocked(r, c)) continue;
        const Vec2d corner = px(grid->origin + Vec2d(static_cast<double>(c) * grid->cell, static_cast<double>(r) * grid->cell));
        path += "M" + fmt(corner.x(), 1) + "," + fmt(corner.y(), 1) + "h" + fmt(grid->cell * kScale, 1) + "v" +
                fmt(grid->cell * kScale, 1) + "h-" + fmt(grid->cell * kScale, 1) + "z";
      }
    if (!path.empty()) svg << "<path class=\"blocked\" d=\"" << path << "\"/>\n";
  }

  for (const OrientedBoxd& w : scene.wall_solids) {
    const Vec2d u = w.axis_u() * w.half_extents.x();
    const Vec2d a = px(w.center2() - u), c = px(w.center2() + u);
    svg << "<line class=\"wall\" x1=\"" << fmt(a.x(), 1) << "\" y1=\"" << fmt(a.y(), 1) << "\" x2=\"" << fmt(c.x(), 1)
        << "\" y2=\"" << fmt(c.y(), 1) << "\" stroke-width=\"" << fmt(2 * w.half_extents.z() * kScale, 1)
        << "\" stroke-opacity=\"" << (w.bottom() > 0 ? "0.35" : "1") << "\"/>\n";
  }

  for (const Portal& p : scene.portals) {
    const Vec2d s = p.wall.a + p.along() * p.opening.offset;
    const Vec2d e = s + p.along() * p.opening.width;
    const Vec2d a = px(s), c = px(e);
    svg << "<line class=\"" << to_string(p.kind) << "\" x1=\"" << fmt(a.x(), 1) << "\" y1=\"" << fmt(a.y(), 1)
        << "\" x2=\"" << fmt(c.x(), 1) << "\" y2=\"" << fmt(c.y(), 1) << "\"/>\n";
  }

  for (const Placement& p : scene.placements) {
    const Vec2d c = px(p.box.center2());
    svg << "<g class=\"placement " << to_string(p.source) << "\" data-id=\"" << p.id << "\"><polygon points=\""
        << pts(p.box.footprint()) << "\"/><text class=\"label\" x=\"" << fmt(c.x(), 1) << "\" y=\"" << fmt(c.y(), 1)
        << "\">" << p.asset_type << "</text></g>\n";
  }

  for (const Light& l : scene.lights) {
    const Vec2d c = px(Vec2d(l.position.x(), l.position.z()));
    svg << "<circle class=\"light\" cx=\"" << fmt(c.x(), 1) << "\" cy=\"" << fmt(c.y(), 1) << "\" r=\"6\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<Violation> check_scene(const SceneSpec& scene, const CheckOptions& opts) {
  std::vector<Violation> out;
  auto fail = [&](std::string inv, std::string detail) { out.push_back({std::move(inv), std::move(detail)}); };

  const auto& ps = scene.placements;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      if (related(ps[i], ps[j])) continue;
      if (obb_intersects(ps[i].box, ps[j].box, opts.clearance)) fail("no-overlap", ps[i].id + " intersects " + ps[j].id);
    }
    if (ps[i].wall_mounted) continue;
    for (std::size_t w = 0; w < scene.wall_solids.size(); ++w)
      if (obb_intersects(ps[i].box, scene.wall_solids[w], opts.clearance))
        fail("no-overlap", ps[i].id + " intersects wall_solids[" + std::to_string(w) + "]");
  }

  for (const Room& r : scene.rooms) {
    const bool lit = std::any_of(scene.lights.begin(), scene.lights.end(), [&](const Light& l) { return l.room == r.id; });
    if (!lit) fail("light-coverage", r.id + " has no light");
  }
  for (std::size_t i = 0; i < scene.lights.size(); ++i) {
    const Light& l = scene.lights[i];
    const Room* room = nullptr;
    for (const Room& r : scene.rooms)
      if (r.id == l.room) room = &r;
    if (!room || !point_in_polygon(Vec2d(l.position.x(), l.position.z()), room->polygon) ||
        !(l.position.y() < room->ceiling_y))
      fail("light-inside-room", "lights[" + std::to_string(i) + "] is not inside " + l.room);
  }

  for (std::size_t i = 0; i < scene.portals.size(); ++i) {
    const Portal& p = scene.portals[i];
    const std::string name = "portals[" + std::to_string(i) + "]";
    if (p.kind == PortalKind::window) {
      if (p.door_state) fail("window-state", name + " is a window with a door state");
      continue;
    }
    if (!p.door_state) {
      fail("door-openness", name + " has no door state");
      continue;
    }
    if (p.exterior) {
      if (!p.door_state->has_leaf || p.door_state->openness != 0.0)
        fail("exterior-doors-closed", name + " is exterior but not closed");
    } else if (p.door_state->openness < opts.openness_lo || p.door_state->openness > opts.openness_hi) {
      fail("door-openness", name + " openness " + fmt(p.door_state->openness, 4) + " out of range");
    }
  }

  for (const Placement& p : ps) {
    const Room* room = nullptr;
    for (const Room& r : scene.rooms)
      if (r.id == p.room) room = &r;
    if (!room || !point_in_polygon(p.box.center2(), room->polygon))
      fail("room-containment", p.id + " center is not inside " + p.room);

    if (p.parent) {
      const Placement* parent = scene.find(*p.parent);
      bool ok = parent && p.surface;
      if (ok) {
        const ReceptacleSurface& s = *p.surface;
        for (const Vec2d& corner : p.box.footprint()) {
          const Vec2d l = parent->box.to_local(corner) - s.center;
          ok = ok && std::abs(l.x()) <= s.half_size.x() + 1e-9 && std::abs(l.y()) <= s.half_size.y() + 1e-9;
        }
        ok = ok && std::abs(p.box.bottom() - (parent->box.bottom() + s.height)) <= 1e-9;
      }
      if (!ok) fail("receptacle-containment", p.id + " does not rest inside its parent's surface");
    }
    if (p.supported_by) {
      const Placement* support = scene.find(*p.supported_by);
      if (!support || std::abs(p.box.bottom() - support->box.top()) > 1e-9)
        fail("support-contact", p.id + " does not rest on " + *p.supported_by);
    }
  }

  std::vector<OrientedBoxd> clearances;
  for (const Portal& p : scene.portals) {
    if (p.kind != PortalKind::door) continue;
    for (const std::string& r : p.rooms) clearances.push_back(door_clearance(p, scene.rooms, r));
  }
  for (const Placement& p : ps) {
    if (p.source != PlacementSource::clutter) continue;
    for (const OrientedBoxd& c : clearances)
      if (obb_intersects(p.box, c, 0.0)) {
        fail("door-clearance", p.id + " blocks a door clearance region");
        break;
      }
  }

  if (opts.source_template) {
    const auto& objects = opts.source_template->objects;
    for (const Placement& p : ps) {
      if (p.source != PlacementSource::semantic) continue;
      if (!p.scanned_index || *p.scanned_index >= objects.size()) {
        fail("semantic-fidelity", p.id + " has no scanned source");
        continue;
      }
      const ScannedObject& src = objects[*p.scanned_index];
      if ((p.box.center2() - src.box.center2()).cwiseAbs().maxCoeff() > 1e-9)
        fail("semantic-fidelity", p.id + " moved away from its scanned position");
      if (opts.catalog) {
        const auto& types = opts.catalog->types_for(src.category);
        if (std::find(types.begin(), types.end(), p.asset_type) == types.end())
          fail("semantic-fidelity", p.id + " type " + p.asset_type + " is not mapped from " +
                                        std::string(to_string(src.category)));
      }
    }
  }
  return out;
}

}  // namespace scenesmith
