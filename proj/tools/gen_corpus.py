#!/usr/bin/env python3
"""Writes the scene fixtures under tests/fixtures.

corpus/scene_NN.json: 50 seeded random scenes with at most 16 discs, circle and polygon outers.
The named fixtures next to it are hand-picked scenes used by the CLI and acceptance tests.
Output is deterministic for a given seed.
"""

import argparse
import json
import math
import random
from pathlib import Path

GAP = 0.04  # minimum clearance between components, relative to the outer diameter


def seg_dist(p, a, b):
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy)))
    return math.hypot(px - ax - t * dx, py - ay - t * dy)


def inside_polygon(p, v):
    x, y = p
    inside = False
    for i in range(len(v)):
        (x0, y0), (x1, y1) = v[i], v[(i + 1) % len(v)]
        if (y0 > y) != (y1 > y) and x < x0 + (y - y0) * (x1 - x0) / (y1 - y0):
            inside = not inside
    return inside


def signed_area(v):
    return 0.5 * sum(v[i][0] * v[(i + 1) % len(v)][1] - v[(i + 1) % len(v)][0] * v[i][1] for i in range(len(v)))


class Outer:
    def __init__(self, circle=None, polygon=None):
        self.circle = circle
        self.polygon = polygon

    def clearance(self, p):
        if self.circle:
            (cx, cy), r = self.circle
            return r - math.hypot(p[0] - cx, p[1] - cy)
        v = self.polygon
        d = min(seg_dist(p, v[i], v[(i + 1) % len(v)]) for i in range(len(v)))
        return d if inside_polygon(p, v) else -d

    def bbox(self):
        if self.circle:
            (cx, cy), r = self.circle
            return cx - r, cy - r, cx + r, cy + r
        xs = [x for x, _ in self.polygon]
        ys = [y for _, y in self.polygon]
        return min(xs), min(ys), max(xs), max(ys)

    def diameter(self):
        if self.circle:
            return 2 * self.circle[1]
        v = self.polygon
        return max(math.hypot(a[0] - b[0], a[1] - b[1]) for a in v for b in v)

    def marks(self):
        if self.circle:
            (cx, cy), r = self.circle
            return [[cx + r, cy], [cx, cy + r], [cx - r, cy]]
        n = len(self.polygon)
        return [list(self.polygon[0]), list(self.polygon[n // 3]), list(self.polygon[(2 * n) // 3])]

    def to_json(self):
        if self.circle:
            (cx, cy), r = self.circle
            return {"circle": {"c": [cx, cy], "r": r}}
        return {"polyline": [list(p) for p in self.polygon]}


def rnd(x):
    return round(x, 4)


def random_outer(rng):
    kind = rng.randrange(5)
    if kind == 0:
        return Outer(circle=((0.0, 0.0), 1.0))
    if kind == 1:
        r = rnd(rng.uniform(0.8, 1.5))
        return Outer(circle=((rnd(rng.uniform(-0.3, 0.3)), rnd(rng.uniform(-0.3, 0.3))), r))
    if kind == 2:
        a, b = rnd(rng.uniform(0.8, 1.2)), rnd(rng.uniform(0.8, 1.2))
        return Outer(polygon=[(-a, -b), (a, -b), (a, b), (-a, b)])
    if kind == 3:
        return Outer(polygon=[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)])
    n = rng.randrange(5, 10)
    v = [(rnd((1.0 + 0.25 * rng.random()) * math.cos(2 * math.pi * k / n)),
          rnd((1.0 + 0.25 * rng.random()) * math.sin(2 * math.pi * k / n))) for k in range(n)]
    return Outer(polygon=v)


def random_scene(rng, max_discs):
    outer = random_outer(rng)
    if outer.polygon and signed_area(outer.polygon) < 0:
        outer.polygon.reverse()
    diam = outer.diameter()
    gap = GAP * diam
    xmin, ymin, xmax, ymax = outer.bbox()
    target = rng.randrange(1, max_discs + 1)
    discs = []
    for _ in range(2000):
        if len(discs) >= target:
            break
        c = (rnd(rng.uniform(xmin, xmax)), rnd(rng.uniform(ymin, ymax)))
        r = rnd(rng.uniform(0.02, 0.18) * diam)
        if outer.clearance(c) - r < gap:
            continue
        if all(math.hypot(c[0] - d[0][0], c[1] - d[0][1]) - r - d[1] >= gap for d in discs):
            discs.append((c, r))
    return {
        "outer": outer.to_json(),
        "discs": [{"c": list(c), "r": r} for c, r in discs],
        "marks": outer.marks(),
        "meta": {},
    }


def square(a, discs, meta):
    return {
        "outer": {"polyline": [[-a, -a], [a, -a], [a, a], [-a, a]]},
        "discs": [{"c": list(c), "r": r} for c, r in discs],
        "marks": [[a, 0.0], [0.0, a], [-a, 0.0]],
        "meta": meta,
    }


def disc_domain(radius, discs, meta):
    return {
        "outer": {"circle": {"c": [0.0, 0.0], "r": radius}},
        "discs": [{"c": list(c), "r": r} for c, r in discs],
        "marks": [[radius, 0.0], [0.0, radius], [-radius, 0.0]],
        "meta": meta,
    }


def spread_discs(rng, outer, count, rmin, rmax):
    diam = outer.diameter()
    xmin, ymin, xmax, ymax = outer.bbox()
    discs = []
    while len(discs) < count:
        c = (rnd(rng.uniform(xmin, xmax)), rnd(rng.uniform(ymin, ymax)))
        r = rnd(rng.uniform(rmin, rmax))
        if outer.clearance(c) - r < GAP * diam:
            continue
        if all(math.hypot(c[0] - d[0][0], c[1] - d[0][1]) - r - d[1] >= GAP * diam for d in discs):
            discs.append((c, r))
    return discs


def named_fixtures(seed):
    rng = random.Random(seed + 1)
    out = {}
    out["identity.json"] = disc_domain(1.0, [((0.3, 0.2), 0.2), ((-0.4, -0.3), 0.25)], {"note": "circle domain"})
    out["one_disc.json"] = square(1.0, [((0.3, -0.2), 0.3)], {})
    out["eight_discs.json"] = square(1.0, [((-0.4, 0.3), 0.3), ((0.45, -0.35), 0.22), ((0.5, 0.45), 0.16),
                                           ((-0.5, -0.5), 0.12), ((0.05, -0.25), 0.09), ((0.05, 0.72), 0.07),
                                           ((-0.8, 0.75), 0.05), ((0.8, 0.0), 0.04)], {})
    out["annulus.json"] = disc_domain(math.e, [((0.0, 0.0), 1.0)], {"note": "1 < |z| < e"})
    out["diameter_disc.json"] = disc_domain(2.5, [((0.0, 0.0), 1.0)], {})
    out["overlap.json"] = disc_domain(1.0, [((0.0, 0.0), 0.3), ((0.4, 0.0), 0.2)], {})
    sq = Outer(polygon=[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)])
    out["twenty_discs.json"] = square(1.0, spread_discs(rng, sq, 20, 0.04, 0.12), {})
    for name in ("a", "b", "c"):
        out[f"twelve_discs_{name}.json"] = square(1.0, spread_discs(rng, sq, 12, 0.05, 0.16), {})
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "fixtures"))
    ap.add_argument("--seed", type=int, default=20240611)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--max-discs", type=int, default=16)
    args = ap.parse_args()

    out = Path(args.out)
    corpus = out / "corpus"
    corpus.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    for i in range(args.count):
        scene = random_scene(rng, args.max_discs)
        scene["meta"] = {"corpus_index": i}
        (corpus / f"scene_{i:02d}.json").write_text(json.dumps(scene, indent=2) + "\n")
    for name, scene in named_fixtures(args.seed).items():
        (out / name).write_text(json.dumps(scene, indent=2) + "\n")
    (out / "malformed.json").write_text('{"outer": {"circle": {"c": [0, 0], "r": 1}, "discs": [\n')
    (out / "diameter_curve.json").write_text(json.dumps({"polyline": [[-2.0, 0.0], [2.0, 0.0]]}, indent=2) + "\n")


if __name__ == "__main__":
    main()
