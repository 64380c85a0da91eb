"""Multi-scale graphs over built-in compact model spaces.

Vertices are centers of balls at geometric scales s^k; edges join balls
that overlap. All adjacency decisions compare exact rationals, never
floats. Levels index scales, with the single level-0 ball covering the
whole space.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import ConstructionError, InputError, ResolutionExhausted
from .graph import UdbgGraph

POINT_BUDGET = 1 << 15

SPACE_KINDS = ("cantor13", "interval", "circle")


@dataclass(frozen=True)
class ModelSpace:
    """Finite point model of a compact metric space, diameter <= 1."""

    kind: str
    resolution: int
    points: tuple[Fraction, ...]
    min_spacing: Fraction

    def metric(self, i: int, j: int) -> Fraction:
        d = abs(self.points[i] - self.points[j])
        if self.kind == "circle":
            return min(d, 1 - d)
        return d

    @property
    def n(self) -> int:
        return len(self.points)


def make_space(kind: str, resolution: int) -> ModelSpace:
    """cantor13: the 2^L left endpoints of the level-L middle-thirds
    intervals; interval/circle: uniform grids of step 1/resolution."""
    if kind == "cantor13":
        if resolution < 1:
            raise InputError("cantor13 resolution must be >= 1")
        if 2**resolution > POINT_BUDGET:
            raise ConstructionError(f"point budget exceeded at resolution {resolution}")
        pts = [Fraction(0)]
        for i in range(1, resolution + 1):
            digit = Fraction(2, 3**i)
            pts = [p for p in pts] + [p + digit for p in pts]
        pts.sort()
        return ModelSpace(kind, resolution, tuple(pts), Fraction(2, 3**resolution))
    if kind == "interval":
        if resolution < 1:
            raise InputError("interval resolution must be >= 1")
        if resolution + 1 > POINT_BUDGET:
            raise ConstructionError("point budget exceeded")
        pts = tuple(Fraction(k, resolution) for k in range(resolution + 1))
        return ModelSpace(kind, resolution, pts, Fraction(1, resolution))
    if kind == "circle":
        if resolution < 2:
            raise InputError("circle resolution must be >= 2")
        if resolution > POINT_BUDGET:
            raise ConstructionError("point budget exceeded")
        pts = tuple(Fraction(k, resolution) for k in range(resolution))
        return ModelSpace(kind, resolution, pts, Fraction(1, resolution))
    raise InputError(f"unknown space kind {kind!r}; choose from {SPACE_KINDS}")


def max_usable_level(space: ModelSpace, s: Fraction) -> int:
    level = 0
    radius = Fraction(1)
    while radius * s > space.min_spacing:
        radius *= s
        level += 1
    return level


def greedy_net(space: ModelSpace, s: Fraction, k: int, seed: int) -> list[int]:
    """Maximal s^k-separated subset, greedy in seeded order.

    Returned indices are sorted by point value. Maximality makes the net
    also cover: every point lies within s^k of some center.
    """
    if not 0 < s < 1:
        raise InputError("scale must lie strictly between 0 and 1")
    if k < 0:
        raise InputError("level must be nonnegative")
    radius = s**k
    if radius <= space.min_spacing:
        limit = max_usable_level(space, s)
        raise ResolutionExhausted(
            f"scale {s}^{k} is at or below the resolution of this {space.kind} "
            f"model; maximum usable level is {limit}",
            max_level=limit,
        )
    order = list(range(space.n))
    random.Random(seed).shuffle(order)
    chosen: list[int] = []
    for idx in order:
        if all(space.metric(idx, c) >= radius for c in chosen):
            chosen.append(idx)
    chosen.sort(key=lambda i: space.points[i])
    return chosen


@dataclass(frozen=True)
class Filling:
    graph: UdbgGraph
    space: ModelSpace
    scale: Fraction
    tau: Fraction
    centers: tuple[int, ...]  # point index per vertex
    seed: int

    @property
    def max_level(self) -> int:
        return max(self.graph.levels)

    def center_value(self, v: int) -> Fraction:
        return self.space.points[self.centers[v]]

    def radius(self, v: int) -> Fraction:
        return self.scale ** self.graph.levels[v]

    def level_sizes(self) -> list[int]:
        sizes = [0] * (self.max_level + 1)
        for l in self.graph.levels:
            sizes[l] += 1
        return sizes


def build_filling(
    space: ModelSpace,
    s: Fraction,
    tau: Fraction,
    max_level: int,
    seed: int = 0,
) -> Filling:
    """Nets at scales s^0..s^max_level, horizontally and vertically wired.

    Horizontal edges join same-level centers with d <= 2*tau*s^k (their
    dilated balls overlap); vertical edges join consecutive levels with
    d <= tau*(s^k + s^(k+1)). Level 0 is a single seeded center.
    """
    s = Fraction(s)
    tau = Fraction(tau)
    if tau < 1:
        raise InputError("tau must be at least 1")
    if max_level < 0:
        raise InputError("max_level must be nonnegative")
    nets: list[list[int]] = []
    for k in range(max_level + 1):
        level_seed = seed * 1_000_003 + k
        if k == 0:
            order = list(range(space.n))
            random.Random(level_seed).shuffle(order)
            nets.append([order[0]])
        else:
            nets.append(greedy_net(space, s, k, level_seed))
    offsets = []
    total = 0
    for net in nets:
        offsets.append(total)
        total += len(net)
    centers = [idx for net in nets for idx in net]
    levels = [k for k, net in enumerate(nets) for _ in net]
    adjacency: list[list[int]] = [[] for _ in range(total)]

    def link(a, b):
        adjacency[a].append(b)
        adjacency[b].append(a)

    for k, net in enumerate(nets):
        horizontal = 2 * tau * s**k
        for i in range(len(net)):
            for j in range(i + 1, len(net)):
                if space.metric(net[i], net[j]) <= horizontal:
                    link(offsets[k] + i, offsets[k] + j)
        if k + 1 <= max_level:
            vertical = tau * (s**k + s ** (k + 1))
            for i, p in enumerate(net):
                for j, q in enumerate(nets[k + 1]):
                    if space.metric(p, q) <= vertical:
                        link(offsets[k] + i, offsets[k + 1] + j)
    graph = UdbgGraph(adjacency, root=0, levels=levels)  # raises if disconnected
    return Filling(
        graph=graph,
        space=space,
        scale=s,
        tau=tau,
        centers=tuple(centers),
        seed=seed,
    )


def filling_sanity(f: Filling) -> dict:
    """Degree, connectivity and pole-visibility report.

    visual_constant is the largest distance from any vertex to the union
    of shortest paths from the root to deepest-level vertices.
    """
    g = f.graph
    max_level = f.max_level
    per_level = [0] * (max_level + 1)
    for v in g.vertices():
        per_level[g.levels[v]] = max(per_level[g.levels[v]], g.degree(v))
    deepest = [v for v in g.vertices() if g.levels[v] == max_level]
    root_row = g.bfs_row(g.root)
    on_ray = set()
    for z in deepest:
        z_row = g.bfs_row(z)
        target = root_row[z]
        for v in g.vertices():
            if root_row[v] + z_row[v] == target:
                on_ray.add(v)
    to_ray = g.distances_from_set(on_ray)
    return {
        "vertices": g.n,
        "level_sizes": f.level_sizes(),
        "max_degree_per_level": per_level,
        "max_degree": max(per_level),
        "connected": True,  # construction would have raised otherwise
        "visual_constant": max(to_ray),
    }


def nearest_center_map(fa: Filling, fb: Filling) -> dict[int, int]:
    """Level-preserving vertex map sending each center to the nearest
    center of the other filling (ties to the smaller id)."""
    if fa.scale != fb.scale or fa.max_level != fb.max_level:
        raise InputError("fillings must share scale and level count")
    by_level: dict[int, list[int]] = {}
    for v in fb.graph.vertices():
        by_level.setdefault(fb.graph.levels[v], []).append(v)
    out = {}
    for v in fa.graph.vertices():
        candidates = by_level[fa.graph.levels[v]]
        best: Optional[int] = None
        best_d: Optional[Fraction] = None
        pa = fa.center_value(v)
        for w in candidates:
            d = abs(pa - fb.center_value(w))
            if fa.space.kind == "circle":
                d = min(d, 1 - d)
            if best_d is None or d < best_d:
                best, best_d = w, d
        out[v] = best
    return out
