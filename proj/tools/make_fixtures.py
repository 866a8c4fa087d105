#!/usr/bin/env python3
"""Regenerates the bundled fixtures under data/.

Templates are rectangular room grids with doors, windows and scanned furniture placed by
rejection sampling; the catalog holds size variants around each furniture type's base
size; the trials file is a synthetic 2 x 3 x 5 x 5 success dataset.

    python3 tools/make_fixtures.py [data_dir]
"""

import csv
import io
import json
import math
import random
import sys
from pathlib import Path

from shapely.geometry import Polygon, box as rect

HEIGHT = 2.5
THICK = 0.16
DOOR_W = 0.9
DOOR_TOP = 2.1

# type: (half x, half y, half z, scan category, material class)
FURNITURE = {
    "dresser": (0.6, 0.45, 0.25, "storage", "wood"),
    "bookshelf": (0.45, 0.9, 0.18, "storage", "wood"),
    "cabinet": (0.4, 0.5, 0.3, "storage", "wood"),
    "sofa": (1.0, 0.42, 0.45, "sofa", "fabric"),
    "dining_table": (0.8, 0.38, 0.45, "table", "wood"),
    "coffee_table": (0.55, 0.22, 0.3, "table", "wood"),
    "desk": (0.7, 0.38, 0.35, "table", "wood"),
    "chair": (0.23, 0.45, 0.23, "chair", "wood"),
    "bed": (0.8, 0.3, 1.0, "bed", "fabric"),
    "fridge": (0.38, 0.9, 0.35, "refrigerator", "metal"),
    "oven": (0.3, 0.45, 0.3, "oven", "metal"),
    "stove": (0.38, 0.46, 0.32, "stove", "metal"),
    "dishwasher": (0.3, 0.43, 0.3, "dishwasher", "metal"),
    "washing_machine": (0.3, 0.43, 0.3, "washerDryer", "metal"),
    "fireplace": (0.75, 0.55, 0.25, "fireplace", "ceramic"),
    "sink": (0.4, 0.45, 0.28, "sink", "ceramic"),
    "bathtub": (0.85, 0.28, 0.38, "bathtub", "ceramic"),
    "toilet": (0.2, 0.4, 0.33, "toilet", "ceramic"),
    "stairs": (0.5, 1.4, 1.5, "stairs", "wood"),
    "television": (0.55, 0.33, 0.04, "television", "plastic"),
}
WITH_SURFACE = {"dresser", "cabinet", "dining_table", "coffee_table", "desk"}
# (sx, sy, sz) per variant; the last one fails the 0.75 IoU gate against the base size.
VARIANTS = [(1.0, 1.0, 1.0), (0.95, 1.0, 0.95), (1.04, 1.0, 1.04), (0.9, 0.95, 0.92), (1.25, 1.1, 1.25)]

SMALL = {
    "mug": (0.05, 0.06, 0.05, "ceramic"),
    "book": (0.1, 0.02, 0.14, "fabric"),
    "vase": (0.07, 0.15, 0.07, "ceramic"),
    "laptop": (0.17, 0.01, 0.12, "metal"),
    "bowl": (0.08, 0.04, 0.08, "ceramic"),
    "alarm_clock": (0.06, 0.05, 0.04, "plastic"),
    "potted_plant": (0.08, 0.12, 0.08, "ceramic"),
    "remote": (0.03, 0.01, 0.09, "plastic"),
}
CLUTTER = {
    "cardboard_box": (0.2, 0.15, 0.2, "wood"),
    "basketball": (0.12, 0.12, 0.12, "plastic"),
    "garbage_can": (0.15, 0.3, 0.15, "plastic"),
    "houseplant": (0.2, 0.5, 0.2, "ceramic"),
    "toy_truck": (0.15, 0.08, 0.1, "plastic"),
    "laundry_basket": (0.25, 0.2, 0.18, "fabric"),
}
TARGETS = {"bed", "chair", "garbage_can", "sofa", "television", "vase", "alarm_clock"}
PORTALS = {"door": (0.45, 1.05, 0.05, "wood"), "window": (0.6, 0.55, 0.03, "glass")}


def r6(v):
    return round(v, 6)


def catalog():
    assets = []
    for t, (hx, hy, hz, _, mat) in FURNITURE.items():
        for k, (sx, sy, sz) in enumerate(VARIANTS):
            a = {"id": f"{t}_{k:02d}", "type": t, "half_extents": [r6(hx * sx), r6(hy * sy), r6(hz * sz)],
                 "placeable_on": "floor", "material_class": mat}
            if t in WITH_SURFACE:
                a["receptacles"] = [{"center": [0.0, 0.0], "half_size": [r6(hx * sx - 0.04), r6(hz * sz - 0.04)],
                                     "height": r6(2 * hy * sy)}]
            if t in TARGETS:
                a["tags"] = {"target": True}
            assets.append(a)
    for group, tag in ((SMALL, "small"), (CLUTTER, "clutter")):
        for t, (hx, hy, hz, mat) in group.items():
            for k, s in enumerate((0.85, 1.0, 1.15)):
                a = {"id": f"{t}_{k:02d}", "type": t, "half_extents": [r6(hx * s), r6(hy * s), r6(hz * s)],
                     "placeable_on": "surface" if tag == "small" else "floor", "material_class": mat,
                     "tags": {tag: True}}
                if t in TARGETS:
                    a["tags"]["target"] = True
                assets.append(a)
    for t, (hx, hy, hz, mat) in PORTALS.items():
        for k, s in enumerate((0.9, 1.0, 1.1)):
            assets.append({"id": f"{t}_{k:02d}", "type": t, "half_extents": [r6(hx * s), r6(hy), r6(hz)],
                           "placeable_on": "wall", "material_class": mat})
    cmap = {}
    for t, spec in FURNITURE.items():
        cmap.setdefault(spec[3], []).append(t)
    return {"format": "scenesmith-catalog/1", "category_map": cmap, "assets": assets}


def footprint(cx, cz, hx, hz, yaw):
    u = (math.cos(yaw), math.sin(yaw))
    v = (-math.sin(yaw), math.cos(yaw))
    return Polygon([(cx + a * hx * u[0] + b * hz * v[0], cz + a * hx * u[1] + b * hz * v[1])
                    for a, b in ((-1, -1), (1, -1), (1, 1), (-1, 1))])


def obj(category, t, cx, cz, forward, bottom=0.0, wall_mounted=False, center_y=None):
    hx, hy, hz = FURNITURE[t][:3]
    yaw = math.atan2(-forward[0], forward[1])
    cy = bottom + hy if center_y is None else center_y
    o = {"category": category, "box": {"center": [r6(cx), r6(cy), r6(cz)], "half_extents": [hx, hy, hz], "yaw": yaw},
         "forward": [float(forward[0]), float(forward[1])]}
    if wall_mounted:
        o["wall_mounted"] = True
    return o


class Plan:
    """A grid of rooms between xs and zs with doors and windows on the walls."""

    def __init__(self, xs, zs, doors, exterior_door, windows):
        self.xs, self.zs = xs, zs
        w, d = xs[-1], zs[-1]
        # Walls: outer ring, then full-length interior lines.
        self.walls = [
            {"start": [0.0, 0.0], "end": [w, 0.0]},
            {"start": [w, 0.0], "end": [w, d]},
            {"start": [w, d], "end": [0.0, d]},
            {"start": [0.0, d], "end": [0.0, 0.0]},
        ]
        for x in xs[1:-1]:
            self.walls.append({"start": [x, 0.0], "end": [x, d]})
        for z in zs[1:-1]:
            self.walls.append({"start": [0.0, z], "end": [w, z]})
        for wall in self.walls:
            wall.update({"height": HEIGHT, "thickness": THICK, "openings": []})
        self.keepout = []
        for (i, j), (k, l) in doors:
            if k == i + 1:  # east neighbour: vertical wall x = xs[i+1]
                zc = (zs[j] + zs[j + 1]) / 2
                self.opening_at((xs[i + 1], zc), DOOR_W, 0.0, DOOR_TOP)
            else:  # north neighbour: horizontal wall z = zs[j+1]
                self.opening_at((xs[i] + 1.0, zs[j + 1]), DOOR_W, 0.0, DOOR_TOP)
        if exterior_door is not None:
            col, north = exterior_door if isinstance(exterior_door, tuple) else (exterior_door, False)
            self.opening_at((xs[col] + 1.0, zs[-1] if north else 0.0), DOOR_W, 0.0, DOOR_TOP)
        for (i, j) in windows:
            xc = (xs[i] + xs[i + 1]) / 2
            z = zs[-1] if j == len(zs) - 2 else 0.0
            self.opening_at((xc + 0.8, z), 1.0, 0.9, 2.0)

    def opening_at(self, point, width, bottom, top):
        px, pz = point
        for wall in self.walls:
            (ax, az), (bx, bz) = wall["start"], wall["end"]
            length = math.hypot(bx - ax, bz - az)
            dx, dz = (bx - ax) / length, (bz - az) / length
            t = (px - ax) * dx + (pz - az) * dz
            off = abs((px - ax) * dz - (pz - az) * dx)
            if off < 1e-9 and 0 < t < length:
                wall["openings"].append({"offset": r6(t - width / 2), "width": width, "bottom": bottom, "top": top})
                wall["openings"].sort(key=lambda o: o["offset"])
                if bottom == 0.0:
                    # Keep furniture out of the swing on both sides.
                    nx, nz = -dz, dx
                    depth = THICK / 2 + 0.95
                    self.keepout.append(Polygon([
                        (px - dx * 0.5 - nx * depth, pz - dz * 0.5 - nz * depth),
                        (px + dx * 0.5 - nx * depth, pz + dz * 0.5 - nz * depth),
                        (px + dx * 0.5 + nx * depth, pz + dz * 0.5 + nz * depth),
                        (px - dx * 0.5 + nx * depth, pz - dz * 0.5 + nz * depth)]))
                return
        raise ValueError(f"no wall through {point}")

    def room(self, i, j):
        return self.xs[i], self.zs[j], self.xs[i + 1], self.zs[j + 1]


MARGIN = 0.14  # centerline to furniture: half wall + 4% variant growth + clearance
GAP = 0.05     # per-side buffer between independently placed items


def wall_slot(rng, room, hx, hz, inset):
    """Random pose with the back against one of the room's walls, facing inward."""
    x0, z0, x1, z1 = room
    inset += 1e-6
    side = rng.randrange(4)
    if side == 0:
        f = (0.0, 1.0)
        return rng.uniform(x0 + inset + hx, x1 - inset - hx), z0 + inset + hz, f
    if side == 1:
        f = (0.0, -1.0)
        return rng.uniform(x0 + inset + hx, x1 - inset - hx), z1 - inset - hz, f
    if side == 2:
        f = (1.0, 0.0)
        return x0 + inset + hz, rng.uniform(z0 + inset + hx, z1 - inset - hx), f
    f = (-1.0, 0.0)
    return x1 - inset - hz, rng.uniform(z0 + inset + hx, z1 - inset - hx), f


def try_place(rng, plan, room, item, taken):
    """One attempt; returns (objects, footprints) or None."""
    kind, t = item[0], item[1]
    x0, z0, x1, z1 = room
    inner = rect(x0 + MARGIN, z0 + MARGIN, x1 - MARGIN, z1 - MARGIN)
    hx, hy, hz = FURNITURE[t][:3] if t in FURNITURE else (0.0, 0.0, 0.0)
    objs, prints = [], []
    if kind == "wall":
        if hx > (x1 - x0) / 2 - MARGIN and hx > (z1 - z0) / 2 - MARGIN:
            return None
        try:
            cx, cz, f = wall_slot(rng, room, hx, hz, MARGIN)
        except ValueError:
            return None
        yaw = math.atan2(-f[0], f[1])
        objs.append(obj(FURNITURE[t][3], t, cx, cz, f))
        prints.append(footprint(cx, cz, hx, hz, yaw))
    elif kind == "free":
        cx, cz = rng.uniform(x0, x1), rng.uniform(z0, z1)
        ang = rng.choice([0, 90, 180, 270]) + rng.choice([0, 0, 0, 30, -30])
        f = (round(-math.sin(math.radians(ang)), 12), round(math.cos(math.radians(ang)), 12))
        yaw = math.atan2(-f[0], f[1])
        objs.append(obj(FURNITURE[t][3], t, cx, cz, f))
        prints.append(footprint(cx, cz, hx, hz, yaw))
    elif kind == "wall_tv":
        thx, thy, thz = FURNITURE["television"][:3]
        try:
            cx, cz, f = wall_slot(rng, room, thx, thz, THICK / 2 + 0.005)
        except ValueError:
            return None
        yaw = math.atan2(-f[0], f[1])
        objs.append(obj("television", "television", cx, cz, f, wall_mounted=True, center_y=1.5))
        # Keep the space in front of the screen clear.
        prints.append(footprint(cx + f[0] * 0.15, cz + f[1] * 0.15, thx, thz + 0.15, yaw))
        inner = rect(x0, z0, x1, z1)
    elif kind == "tv_stand":  # a table against a wall with a television on it
        cx, cz, f = wall_slot(rng, room, hx, hz, MARGIN)
        yaw = math.atan2(-f[0], f[1])
        objs.append(obj("table", t, cx, cz, f))
        objs.append(obj("television", "television", cx, cz, f, bottom=2 * hy))
        prints.append(footprint(cx, cz, hx, hz, yaw))
    elif kind == "dining":  # t = number of chairs (2, 4 or 6)
        thx, thy, thz = FURNITURE["dining_table"][:3]
        chx, _, chz = FURNITURE["chair"][:3]
        cx, cz = rng.uniform(x0, x1), rng.uniform(z0, z1)
        objs.append(obj("table", "dining_table", cx, cz, (0.0, 1.0)))
        prints.append(footprint(cx, cz, thx, thz, 0.0))
        off = thz + chz + 0.12
        seats = [(-0.4, -off, (0.0, 1.0)), (0.4, -off, (0.0, 1.0)), (-0.4, off, (0.0, -1.0)), (0.4, off, (0.0, -1.0)),
                 (-(thx + chz + 0.12), 0.0, (1.0, 0.0)), (thx + chz + 0.12, 0.0, (-1.0, 0.0))]
        n = {2: [0, 2], 4: [0, 1, 2, 3], 6: [0, 1, 2, 3, 4, 5]}[item[2] if len(item) > 2 else 4]
        for s in n:
            dx, dz, f = seats[s]
            objs.append(obj("chair", "chair", cx + dx, cz + dz, f))
            prints.append(footprint(cx + dx, cz + dz, chx, chz, math.atan2(-f[0], f[1])))
    else:
        raise ValueError(kind)

    for p in prints:
        if not inner.contains(p):
            return None
        grown = p.buffer(GAP, join_style=2)
        if any(grown.intersects(q) for q in taken) or any(p.intersects(k) for k in plan.keepout):
            return None
    return objs, [p.buffer(GAP, join_style=2) for p in prints]


def furnish(plan, recipes, seed, expected):
    worst = {}
    for attempt in range(60):
        rng = random.Random(seed * 1000 + attempt)
        objects, ok = [], True
        for (i, j), items in recipes.items():
            room = plan.room(i, j)
            taken = []
            order = {"dining": 0, "tv_stand": 1, "wall": 2, "wall_tv": 3, "free": 4}
            for item in sorted(items, key=lambda it: order[it[0]]):
                for _ in range(1500):
                    got = try_place(rng, plan, room, item, taken)
                    if got:
                        objects.extend(got[0])
                        taken.extend(got[1])
                        break
                else:
                    worst[((i, j), str(item))] = worst.get(((i, j), str(item)), 0) + 1
                    ok = False
                    break
            if not ok:
                break
        if ok:
            assert len(objects) == expected, (len(objects), expected)
            return objects
    raise RuntimeError(f"could not furnish fixture; failing items: {worst}")


def template(name, plan, objects, meta):
    return {"format": "scenesmith-template/1", "meta": dict(name=name, **meta), "walls": plan.walls, "objects": objects}


def w(t):
    return ("wall", t)


def f(t):
    return ("free", t)


def fixtures():
    out = {}

    sq = Plan([0.0, 3.0], [0.0, 4.0], [], None, [])
    out["square_room"] = template("square_room", sq, [], {"note": "empty 3 m x 4 m room"})

    # 6.9 m x 5.0 m, four rooms.
    p = Plan([0.0, 3.45, 6.9], [0.0, 2.0, 5.0], [((0, 0), (1, 0)), ((0, 1), (1, 1)), ((1, 0), (1, 1))], (1, True),
             [(0, 1)])
    rec = {(0, 0): [w("bed")],
           (1, 0): [w("fridge"), w("sink")],
           (0, 1): [w("sofa"), ("tv_stand", "desk"), f("chair"), f("chair"), w("dresser")],
           (1, 1): [("dining", None, 2), w("cabinet"), w("stove")]}
    out["robothor_like"] = template("robothor_like", p, furnish(p, rec, 1, 14), {"rooms": 4})

    # 12.0 m x 8.7 m, six rooms.
    p = Plan([0.0, 4.0, 8.0, 12.0], [0.0, 4.35, 8.7],
             [((0, 0), (1, 0)), ((1, 0), (2, 0)), ((0, 1), (1, 1)), ((1, 1), (2, 1)), ((1, 0), (1, 1))], 2,
             [(0, 0), (2, 0), (0, 1), (2, 1)])
    rec = {(0, 0): [w("fridge"), w("oven"), w("stove"), w("dishwasher"), w("sink"), ("dining", None, 4)],
           (1, 0): [w("sofa"), ("tv_stand", "desk"), w("bookshelf"), f("chair"), f("chair"), f("chair"), f("chair"),
                    f("coffee_table")],
           (2, 0): [("dining", None, 4), w("cabinet"), w("dresser"), w("bookshelf"), f("chair"), f("chair"),
                    f("chair")],
           (0, 1): [w("bed"), w("dresser"), w("desk"), f("chair"), w("bookshelf"), ("wall_tv", None), w("cabinet"),
                    f("chair"), f("chair")],
           (1, 1): [w("bed"), w("dresser"), ("tv_stand", "coffee_table"), w("bookshelf"), f("chair"), w("cabinet"),
                    f("chair"), f("chair")],
           (2, 1): [w("toilet"), w("sink"), w("bathtub"), w("cabinet"), w("washing_machine"), w("cabinet"),
                    w("toilet"), w("sink"), w("cabinet")]}
    out["six_room"] = template("six_room", p, furnish(p, rec, 2, 57), {"rooms": 6})

    # 10.9 m x 6.0 m, three rooms side by side.
    p = Plan([0.0, 3.6, 7.2, 10.9], [0.0, 6.0], [((0, 0), (1, 0)), ((1, 0), (2, 0))], 0, [(1, 0), (2, 0)])
    rec = {(0, 0): [w("sofa"), ("tv_stand", "coffee_table"), w("bookshelf"), f("chair"), f("chair"), w("fireplace"),
                    w("cabinet")],
           (1, 0): [w("fridge"), w("stove"), w("oven"), w("sink"), w("dishwasher"), ("dining", None, 4)],
           (2, 0): [w("bed"), w("dresser"), w("desk"), f("chair"), w("bookshelf"), ("wall_tv", None), w("cabinet"),
                    w("cabinet")]}
    out["three_room"] = template("three_room", p, furnish(p, rec, 3, 26), {"rooms": 3})

    # 9.83 m x 10.0 m single room.
    p = Plan([0.0, 9.83], [0.0, 10.0], [], 0, [(0, 0)])
    rec = {(0, 0): [("dining", None, 6)] * 4 + [("wall_tv", None), w("cabinet"), w("cabinet"), w("bookshelf")]}
    out["conference"] = template("conference", p, furnish(p, rec, 4, 32), {"rooms": 1})

    # 14.8 m x 9.0 m single room.
    p = Plan([0.0, 14.8], [0.0, 9.0], [], 0, [(0, 0)])
    rec = {(0, 0): [("dining", None, 6)] * 8 + [w("fridge"), w("fridge"), w("sink"), w("sink"), w("stove"), w("oven"),
                                                 w("dishwasher"), w("cabinet"), w("cabinet"), w("bookshelf"),
                                                 w("dresser")]}
    out["cafeteria"] = template("cafeteria", p, furnish(p, rec, 5, 67), {"rooms": 1})
    return out


def trials(seed=11):
    """2 models x 5 environments x 3 positions x 5 targets, Bernoulli outcomes."""
    rng = random.Random(seed)
    target_effect = {"Bed": 0.0, "Chair": 0.41, "GarbageCan": -0.12, "Sofa": 0.2, "TV": -0.03}
    model_effect = {"Baseline": -0.6, "Phone2Proc-analog": 0.9}
    env_effect = {"Apartment1": 0.1, "Apartment2": -0.2, "Cafeteria": 0.0, "Conference": 0.15, "RoboTHOR": -0.1}
    rows = []
    for env, ee in env_effect.items():
        for pos in ("p1", "p2", "p3"):
            for target, te in target_effect.items():
                for model, me in model_effect.items():
                    eta = 0.17 + me + te + ee + rng.gauss(0, 0.2)
                    success = rng.random() < 1 / (1 + math.exp(-eta))
                    length = rng.randint(40, 180) if success else 250 if env in ("RoboTHOR", "Apartment2") else 500
                    rows.append([env, pos, target, model, int(success), length])
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["environment", "position", "target", "model", "success", "episode_len"])
    wr.writerows(rows)
    return buf.getvalue()


def main():
    data = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    (data / "templates").mkdir(parents=True, exist_ok=True)
    (data / "catalogs").mkdir(parents=True, exist_ok=True)
    (data / "trials").mkdir(parents=True, exist_ok=True)
    for name, t in fixtures().items():
        (data / "templates" / f"{name}.tmpl.json").write_text(json.dumps(t, indent=2) + "\n")
    (data / "catalogs" / "desk.catalog.json").write_text(json.dumps(catalog(), indent=2) + "\n")
    (data / "trials" / "synthetic_150.csv").write_text(trials())


if __name__ == "__main__":
    main()
