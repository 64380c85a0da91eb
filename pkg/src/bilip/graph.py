"""Finite bounded-degree graphs with the graph metric.

Vertices are dense integers 0..n-1. Graphs are immutable after
construction; all queries are pure reads, so they are safe to run
concurrently. The per-source BFS row cache fills under a single-writer
(GIL) / multi-reader contract.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import InputError
from .parallel import map_chunks

UNREACHED = -1


class UdbgGraph:
    """Connected graph with a recorded degree bound, optional root and levels.

    Invariants enforced at construction: symmetric adjacency, no self
    loops or parallel edges, connectedness, deg(v) <= mu, and when both
    root and levels are present, level(root) = 0 with every edge changing
    level by at most 1.
    """

    __slots__ = ("_adj", "root", "levels", "mu", "_rows", "_tree_parent", "_tree_depth", "_is_tree")

    def __init__(
        self,
        adjacency: Sequence[Iterable[int]],
        root: Optional[int] = None,
        levels: Optional[Sequence[int]] = None,
        mu: Optional[int] = None,
        validate: bool = True,
    ):
        adj = tuple(tuple(sorted(set(nbrs))) for nbrs in adjacency)
        n = len(adj)
        self._adj = adj
        self.root = root
        self.levels = tuple(levels) if levels is not None else None
        max_deg = max((len(a) for a in adj), default=0)
        self.mu = max_deg if mu is None else mu
        self._rows: dict[int, list[int]] = {}
        self._is_tree: Optional[bool] = None
        self._tree_parent: Optional[list[int]] = None
        self._tree_depth: Optional[list[int]] = None
        if validate:
            self._validate(n, adjacency)

    def _validate(self, n, raw_adjacency):
        if n == 0:
            raise InputError("graph must have at least one vertex")
        for v, nbrs in enumerate(raw_adjacency):
            seen = set()
            for u in nbrs:
                if not 0 <= u < n:
                    raise InputError(f"neighbor {u} of vertex {v} out of range")
                if u == v:
                    raise InputError(f"self-loop at vertex {v}")
                if u in seen:
                    raise InputError(f"parallel edge {v}-{u}")
                seen.add(u)
        for v in range(n):
            for u in self._adj[v]:
                if v not in self._adj[u]:
                    raise InputError(f"adjacency not symmetric at edge {v}-{u}")
        if max(len(a) for a in self._adj) > self.mu:
            raise InputError("degree bound mu exceeded")
        row = self._bfs(0)
        if UNREACHED in row:
            raise InputError("graph is not connected")
        if self.root is not None:
            self.check_vertex(self.root)
        if self.levels is not None:
            if len(self.levels) != n:
                raise InputError("levels array length mismatch")
            if any(l < 0 for l in self.levels):
                raise InputError("levels must be nonnegative")
            if self.root is not None:
                if self.levels[self.root] != 0:
                    raise InputError("root must have level 0")
                for v in range(n):
                    for u in self._adj[v]:
                        if abs(self.levels[u] - self.levels[v]) > 1:
                            raise InputError(f"edge {v}-{u} jumps more than one level")

    # -- basic queries ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._adj)

    def vertices(self) -> range:
        return range(len(self._adj))

    def neighbors(self, v: int) -> tuple[int, ...]:
        self.check_vertex(v)
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def edges(self):
        """Edges as (u, v) with u < v, in sorted order."""
        for u in range(len(self._adj)):
            for v in self._adj[u]:
                if u < v:
                    yield (u, v)

    def edge_count(self) -> int:
        return sum(len(a) for a in self._adj) // 2

    @property
    def is_tree(self) -> bool:
        if self._is_tree is None:
            self._is_tree = self.edge_count() == len(self._adj) - 1
        return self._is_tree

    def check_vertex(self, v):
        if not isinstance(v, int) or not 0 <= v < len(self._adj):
            raise InputError(f"unknown vertex id {v!r}")

    # -- metric ----------------------------------------------------------

    def _bfs(self, source: int, cutoff: Optional[int] = None) -> list[int]:
        dist = [UNREACHED] * len(self._adj)
        dist[source] = 0
        q = deque([source])
        while q:
            v = q.popleft()
            d = dist[v]
            if cutoff is not None and d >= cutoff:
                continue
            for u in self._adj[v]:
                if dist[u] == UNREACHED:
                    dist[u] = d + 1
                    q.append(u)
        return dist

    def bfs_row(self, source: int) -> list[int]:
        """Distances from source to every vertex, cached per source."""
        self.check_vertex(source)
        row = self._rows.get(source)
        if row is None:
            row = self._bfs(source)
            self._rows[source] = row
        return row

    def _tree_arrays(self):
        if self._tree_parent is None:
            parent = [UNREACHED] * len(self._adj)
            depth = [UNREACHED] * len(self._adj)
            depth[self.root] = 0
            q = deque([self.root])
            while q:
                v = q.popleft()
                for u in self._adj[v]:
                    if depth[u] == UNREACHED:
                        depth[u] = depth[v] + 1
                        parent[u] = v
                        q.append(u)
            self._tree_parent = parent
            self._tree_depth = depth
        return self._tree_parent, self._tree_depth

    def tree_arrays(self) -> tuple[list[int], list[int]]:
        """(parent, depth) arrays for a rooted tree; InputError otherwise."""
        if self.root is None or not self.is_tree:
            raise InputError("graph is not a rooted tree")
        return self._tree_arrays()

    def distance(self, u: int, v: int) -> int:
        """Graph-metric distance (edge count of a shortest path)."""
        self.check_vertex(u)
        self.check_vertex(v)
        if u == v:
            return 0
        if self.root is not None and self.is_tree:
            parent, depth = self._tree_arrays()
            du, dv = depth[u], depth[v]
            steps = 0
            while du > dv:
                u = parent[u]
                du -= 1
                steps += 1
            while dv > du:
                v = parent[v]
                dv -= 1
                steps += 1
            while u != v:
                u = parent[u]
                v = parent[v]
                steps += 2
            return steps
        row = self._rows.get(u)
        if row is None:
            row = self._rows.get(v)
            if row is not None:
                return row[u]
            row = self.bfs_row(u)
            return row[v]
        return row[v]

    def ball(self, v: int, r: int) -> set[int]:
        """Closed metric ball {u : d(u, v) <= r}."""
        self.check_vertex(v)
        if r < 0:
            raise InputError("radius must be nonnegative")
        dist = self._bfs(v, cutoff=r)
        return {u for u, d in enumerate(dist) if d != UNREACHED}

    def sphere(self, v0: int, t: int) -> set[int]:
        """Metric sphere {u : d(u, v0) = t}."""
        self.check_vertex(v0)
        if t < 0:
            raise InputError("radius must be nonnegative")
        dist = self._bfs(v0, cutoff=t)
        return {u for u, d in enumerate(dist) if d == t}

    def distances_from_set(self, sources: Iterable[int]) -> list[int]:
        """Multi-source BFS row: d(v, sources) for every v."""
        dist = [UNREACHED] * len(self._adj)
        q = deque()
        for s in sources:
            self.check_vertex(s)
            if dist[s] != 0:
                dist[s] = 0
                q.append(s)
        if not q:
            raise InputError("source set is empty")
        while q:
            v = q.popleft()
            for u in self._adj[v]:
                if dist[u] == UNREACHED:
                    dist[u] = dist[v] + 1
                    q.append(u)
        return dist

    def boundary(self, vertex_set: Iterable[int], r: int = 1) -> set[int]:
        """r-boundary: vertices outside the set at distance <= r from it.

        An empty input yields an empty boundary; callers enforce
        nonemptiness where their own contracts require it.
        """
        if r < 1:
            raise InputError("boundary radius must be positive")
        inside = set(vertex_set)
        if not inside:
            return set()
        dist = [UNREACHED] * len(self._adj)
        q = deque()
        for s in inside:
            self.check_vertex(s)
            dist[s] = 0
            q.append(s)
        out = set()
        while q:
            v = q.popleft()
            d = dist[v]
            if d >= r:
                continue
            for u in self._adj[v]:
                if dist[u] == UNREACHED:
                    dist[u] = d + 1
                    q.append(u)
                    if u not in inside:
                        out.add(u)
        return out


def rips_scale_graph(g: UdbgGraph, r: int) -> UdbgGraph:
    """Graph on the same vertices with edges between pairs at distance <= r.

    Levels are kept only for r = 1 (larger scales break the one-level-per-edge
    rule); the degree bound is recomputed.
    """
    if r < 1:
        raise InputError("scale must be at least 1")
    adjacency = []
    for v in g.vertices():
        dist = g._bfs(v, cutoff=r)
        adjacency.append([u for u, d in enumerate(dist) if d != UNREACHED and u != v])
    return UdbgGraph(
        adjacency,
        root=g.root,
        levels=g.levels if r == 1 else None,
        validate=False,
    )


def geometry_profile(g: UdbgGraph, r_max: int) -> list[int]:
    """N_r = max ball cardinality, for r = 1..r_max (nondecreasing)."""
    if r_max < 1:
        raise InputError("r_max must be at least 1")

    def worst_in(chunk):
        best = [0] * r_max
        for v in chunk:
            dist = g._bfs(v, cutoff=r_max)
            counts = [0] * (r_max + 1)
            for d in dist:
                if d != UNREACHED:
                    counts[d] += 1
            total = counts[0]
            for r in range(1, r_max + 1):
                total += counts[r]
                if total > best[r - 1]:
                    best[r - 1] = total
        return best

    verts = list(g.vertices())
    step = max(1, len(verts) // max(1, min(len(verts), 8)))
    results = map_chunks(worst_in, [verts[i : i + step] for i in range(0, len(verts), step)])
    return [max(col) for col in zip(*results)]


@dataclass(frozen=True)
class Truncation:
    """A graph observed through a finite depth window.

    trunc_sphere is the outermost level; vertices close to it carry
    boundary effects and are excluded from "interior" computations.
    """

    graph: UdbgGraph
    depth: int
    trunc_sphere: frozenset[int] = field(repr=False)
    collar_width: int = 0

    @classmethod
    def from_graph(cls, g: UdbgGraph, collar_width: int = 0) -> "Truncation":
        if g.levels is None:
            raise InputError("truncation requires level labels")
        depth = max(g.levels)
        sphere = frozenset(v for v in g.vertices() if g.levels[v] == depth)
        return cls(graph=g, depth=depth, trunc_sphere=sphere, collar_width=collar_width)

    def __post_init__(self):
        if not self.trunc_sphere:
            raise InputError("truncation sphere is empty")
        if self.collar_width < 0:
            raise InputError("collar width must be nonnegative")
        levels = self.graph.levels
        if levels is not None:
            expected = frozenset(v for v in self.graph.vertices() if levels[v] == self.depth)
            if expected != self.trunc_sphere:
                raise InputError("truncation sphere does not match level labels")

    def interior(self, w: int) -> frozenset[int]:
        """Vertices at distance > w from the truncation sphere."""
        if w < 0:
            raise InputError("collar width must be nonnegative")
        dist = self.graph.distances_from_set(self.trunc_sphere)
        inner = frozenset(v for v in self.graph.vertices() if dist[v] > w)
        if not inner:
            raise InputError(f"interior is empty at collar width {w} (depth too small)")
        return inner
