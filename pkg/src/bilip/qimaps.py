"""Vertex maps between trees built from end-space correspondences.

The correspondence pairs nested agreement balls of the two end spaces
recursively: at each ball the child sub-balls of both sides are split
into contiguous groups, as evenly as possible, in planar order. The
recursion bottoms out at single rays. A vertex map falls out by sending
each vertex to the deepest target vertex whose shadow (the rays through
it) contains the image of the source shadow.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import InputError
from .ends import EndSpace, leaf_intervals
from .graph import UdbgGraph
from .trees import RootedTree

Interval = tuple[int, int]  # half-open


@dataclass(frozen=True)
class EndMap:
    """Order-preserving correspondence between two end spaces.

    leaf_pairs partition both ray ranges into aligned intervals; when all
    leaves are 1-to-1 the correspondence is a ray bijection. The
    distortion sample records (source agreement, target agreement) for
    seeded ray pairs, standing in for the distortion modulus.
    """

    n_source: int
    n_target: int
    leaf_pairs: tuple[tuple[Interval, Interval], ...]
    bijective: bool
    distortion_sample: tuple[tuple[int, int], ...] = ()
    _starts: tuple[int, ...] = field(default=(), repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_starts", tuple(a[0] for a, _ in self.leaf_pairs))

    def leaf_of(self, ray: int) -> int:
        if not 0 <= ray < self.n_source:
            raise InputError(f"ray index {ray} out of range")
        return bisect_right(self._starts, ray) - 1

    def image_of_ray(self, ray: int) -> int:
        """Canonical target ray (first of the paired block)."""
        return self.leaf_pairs[self.leaf_of(ray)][1][0]

    def image_interval(self, interval: Interval) -> Interval:
        lo, hi = interval
        if not (0 <= lo < hi <= self.n_source):
            raise InputError(f"bad ray interval {interval}")
        first = self.leaf_pairs[self.leaf_of(lo)][1]
        last = self.leaf_pairs[self.leaf_of(hi - 1)][1]
        return (first[0], last[1])

    def ray_map(self) -> Optional[dict[int, int]]:
        if not self.bijective:
            return None
        return {a[0]: b[0] for a, b in self.leaf_pairs}


def _split(adjacent, lo: int, hi: int) -> list[Interval]:
    """Child sub-balls of the interval: split at its minimum agreement."""
    m = min(adjacent[lo : hi - 1])
    parts = []
    start = lo
    for cut in range(lo, hi - 1):
        if adjacent[cut] == m:
            parts.append((start, cut + 1))
            start = cut + 1
    parts.append((start, hi))
    return parts


def _group(parts: list[Interval], g: int) -> list[Interval]:
    """Merge contiguous parts into g intervals with sizes as even as possible."""
    q, rem = divmod(len(parts), g)
    out = []
    idx = 0
    for i in range(g):
        take = q + (1 if i < rem else 0)
        out.append((parts[idx][0], parts[idx + take - 1][1]))
        idx += take
    return out


def hierarchical_end_map(
    es_a: EndSpace,
    es_b: EndSpace,
    distortion_samples: int = 400,
    seed: int = 0,
) -> EndMap:
    """Deterministic ball-hierarchy correspondence between two end spaces.

    Expects end spaces of regularly branching trees (run perfectness_check
    first if in doubt); any valid planar end space is accepted.
    """
    adj_a = es_a.consistent_adjacent()
    adj_b = es_b.consistent_adjacent()
    na, nb = es_a.n, es_b.n
    leaves: list[tuple[Interval, Interval]] = []
    stack: list[tuple[Interval, Interval]] = [((0, na), (0, nb))]
    while stack:
        (alo, ahi), (blo, bhi) = stack.pop()
        if ahi - alo == 1 or bhi - blo == 1:
            leaves.append(((alo, ahi), (blo, bhi)))
            continue
        parts_a = _split(adj_a, alo, ahi)
        parts_b = _split(adj_b, blo, bhi)
        g = min(len(parts_a), len(parts_b))
        groups_a = _group(parts_a, g)
        groups_b = _group(parts_b, g)
        for pair in reversed(list(zip(groups_a, groups_b))):
            stack.append(pair)
    leaves.sort(key=lambda ab: ab[0][0])
    bijective = all(a[1] - a[0] == 1 and b[1] - b[0] == 1 for a, b in leaves)
    em = EndMap(
        n_source=na,
        n_target=nb,
        leaf_pairs=tuple(leaves),
        bijective=bijective,
    )
    rng = random.Random(seed)
    sample = []
    if na >= 2:
        for _ in range(distortion_samples):
            i = rng.randrange(na)
            j = rng.randrange(na)
            if i == j:
                continue
            bi = em.image_of_ray(i)
            bj = em.image_of_ray(j)
            sample.append((es_a.product(i, j), es_b.product(bi, bj)))
    return EndMap(
        n_source=na,
        n_target=nb,
        leaf_pairs=em.leaf_pairs,
        bijective=bijective,
        distortion_sample=tuple(sample),
    )


@dataclass
class VertexMap:
    """Total map between vertex sets with measured comparison constants."""

    mapping: dict[int, int]
    n_source: int
    n_target: int
    measured: Optional[dict] = None

    def __getitem__(self, v: int) -> int:
        return self.mapping[v]

    def image(self) -> set[int]:
        return set(self.mapping.values())


def induced_vertex_map(tree_t: RootedTree, tree_u: RootedTree, em: EndMap) -> VertexMap:
    """Deepest-shadow vertex map.

    For each source vertex the rays through it form an interval; its image
    interval is contained in the shadows of a root-anchored path of target
    vertices, whose deepest member is the image. The root maps to the root.
    """
    lo_t, hi_t = leaf_intervals(tree_t)
    lo_u, hi_u = leaf_intervals(tree_u)
    if hi_t[tree_t.root] != em.n_source or hi_u[tree_u.root] != em.n_target:
        raise InputError("end map does not match the given trees")
    mapping = {}
    for v in range(tree_t.n):
        blo, bhi = em.image_interval((lo_t[v], hi_t[v]))
        w = tree_u.root
        descended = True
        while descended:
            descended = False
            kids = tree_u.children[w]
            # shadows of the children partition the shadow of w, so at
            # most one child can contain the image interval
            for c in kids:
                if lo_u[c] <= blo and bhi <= hi_u[c]:
                    w = c
                    descended = True
                    break
        mapping[v] = w
    return VertexMap(mapping=mapping, n_source=tree_t.n, n_target=tree_u.n)


def tree_vertex_map(
    tree_t: RootedTree,
    tree_u: RootedTree,
    seed: int = 0,
) -> VertexMap:
    """End-to-end map between rooted trees, dead ends included.

    Cores are matched through their end spaces; vertices off the core ride
    along their retraction. Complete trees pass through unchanged.
    """
    from .ends import enumerate_ends
    from .trees import complete_core

    core_t = complete_core(tree_t)
    core_u = complete_core(tree_u)
    em = hierarchical_end_map(
        enumerate_ends(core_t.core), enumerate_ends(core_u.core), seed=seed
    )
    core_vm = induced_vertex_map(core_t.core, core_u.core, em)
    mapping = {
        v: core_u.core_to_orig[core_vm[core_t.retraction[v]]]
        for v in range(tree_t.n)
    }
    return VertexMap(mapping=mapping, n_source=tree_t.n, n_target=tree_u.n)


def paired_depth(k: int, depth: int, target_k: int) -> int:
    """Depth for the target branching factor matching boundary scales."""
    if k < 2 or target_k < 2:
        raise InputError("branching factors must be at least 2")
    return int(round(depth * math.log(k) / math.log(target_k)))


@dataclass(frozen=True)
class QiConstants:
    c_mult: Fraction
    d_add: Fraction
    surj_radius: int
    c_step: int

    def as_json_dict(self) -> dict:
        return {
            "c_mult": {"num": self.c_mult.numerator, "den": self.c_mult.denominator},
            "d_add": {"num": self.d_add.numerator, "den": self.d_add.denominator},
            "surj_radius": self.surj_radius,
            "c_step": self.c_step,
        }


def qi_constants(
    vm: Union[VertexMap, dict],
    g_x: UdbgGraph,
    g_y: UdbgGraph,
    mode: str = "exact",
    seed: int = 0,
    samples: int = 50_000,
) -> QiConstants:
    """Measured comparison constants of a vertex map.

    c_mult is the worst multiplicative distortion over tested pairs with
    both distances positive; d_add is then the smallest additive slack
    making both two-sided inequalities hold at that c_mult. surj_radius
    is exact in every mode. c_step is the worst target distance across a
    single source edge.
    """
    mapping = vm.mapping if isinstance(vm, VertexMap) else dict(vm)
    if len(mapping) != g_x.n:
        raise InputError("vertex map must be total on the source graph")
    if mode not in ("exact", "sampled"):
        raise InputError(f"unknown mode {mode!r}")
    domain = sorted(mapping)

    def pair_stream():
        if mode == "exact":
            for i, u in enumerate(domain):
                for v in domain[i + 1 :]:
                    yield u, v
        else:
            rng = random.Random(seed)
            n = len(domain)
            for _ in range(samples):
                u = domain[rng.randrange(n)]
                v = domain[rng.randrange(n)]
                if u != v:
                    yield u, v

    # pass 1: multiplicative constant over pairs with d_X, d_Y >= 1
    up_n, up_d = 1, 1  # max d_Y/d_X
    dn_n, dn_d = 1, 1  # max d_X/d_Y
    for u, v in pair_stream():
        a = g_x.distance(u, v)
        b = g_y.distance(mapping[u], mapping[v])
        if a >= 1 and b >= 1:
            if b * up_d > up_n * a:
                up_n, up_d = b, a
            if a * dn_d > dn_n * b:
                dn_n, dn_d = a, b
    c_mult = max(Fraction(up_n, up_d), Fraction(dn_n, dn_d), Fraction(1))
    # pass 2: additive slack at that multiplicative constant
    d_add = Fraction(0)
    for u, v in pair_stream():
        a = g_x.distance(u, v)
        b = g_y.distance(mapping[u], mapping[v])
        need = max(b - c_mult * a, Fraction(a, 1) / c_mult - b)
        if need > d_add:
            d_add = need
    image = set(mapping.values())
    surj_radius = max(g_y.distances_from_set(image))
    c_step = 0
    for u, v in g_x.edges():
        d = g_y.distance(mapping[u], mapping[v])
        if d > c_step:
            c_step = d
    return QiConstants(c_mult=c_mult, d_add=d_add, surj_radius=surj_radius, c_step=c_step)
