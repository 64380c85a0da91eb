"""Isoperimetric ratios on truncation interiors.

Candidate sets always live in the interior of a truncation while their
boundaries are computed in the full graph: the collar stands in for the
rest of the infinite object, so sets hugging the truncation sphere cannot
fake small boundaries. Ratios are exact rationals throughout.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Optional, Sequence

from .errors import InputError
from .graph import Truncation
from .trees import CheckResult

FAMILY_NAMES = ("balls", "level-bands", "descendant-subtrees", "random-connected")

EXACT_INTERIOR_LIMIT = 24


@dataclass(frozen=True)
class CheegerCertificate:
    best_ratio: Fraction
    argmin_set: tuple[int, ...]
    method: str
    family_description: str
    collar: int

    def as_json_dict(self) -> dict:
        return {
            "best_ratio": {
                "num": self.best_ratio.numerator,
                "den": self.best_ratio.denominator,
            },
            "argmin_set": list(self.argmin_set),
            "method": self.method,
            "family_description": self.family_description,
            "collar": self.collar,
        }


def interior_of_truncation(t: Truncation, w: int) -> frozenset[int]:
    """Vertices at distance > w from the truncation sphere (errors if empty)."""
    return t.interior(w)


def _ratio_key(g, vertex_set):
    size = len(vertex_set)
    boundary = len(g.boundary(vertex_set, 1))
    ratio = Fraction(boundary, size)
    return ratio, (ratio, size, tuple(sorted(vertex_set)))


def cheeger_exact(t: Truncation, w: int, max_size: Optional[int] = None) -> CheegerCertificate:
    """Exact minimum of |boundary(A)| / |A| over interior subsets.

    Enumerates every nonempty subset up to max_size (not only connected
    ones; the infimum ranges over all finite sets). Ties break toward the
    smaller set, then the lexicographically smallest vertex tuple.
    """
    interior = sorted(t.interior(w))
    n = len(interior)
    if max_size is None:
        if n > EXACT_INTERIOR_LIMIT:
            raise InputError(
                f"interior has {n} > {EXACT_INTERIOR_LIMIT} vertices; "
                "cap max_size or use cheeger_family"
            )
        max_size = n
    if max_size < 1:
        raise InputError("max_size must be at least 1")
    total = sum(comb(n, s) for s in range(1, min(max_size, n) + 1))
    if total > 20_000_000:
        raise InputError(
            f"{total} subsets exceed the enumeration budget; "
            "lower max_size or use cheeger_family"
        )
    g = t.graph
    best_key = None
    best = None
    for size in range(1, min(max_size, n) + 1):
        for combo in combinations(interior, size):
            ratio, key = _ratio_key(g, combo)
            if best_key is None or key < best_key:
                best_key = key
                best = (ratio, combo)
    ratio, argmin = best
    return CheegerCertificate(
        best_ratio=ratio,
        argmin_set=tuple(argmin),
        method="exact",
        family_description=f"all nonempty interior subsets of size <= {max_size}",
        collar=w,
    )


def family_sets(
    t: Truncation,
    w: int,
    families: Iterable[str],
    seed: int,
    ball_centers: int = 64,
    rc_count: int = 40,
    rc_size: int = 200,
) -> list[frozenset[int]]:
    """Deterministic candidate sets inside the interior, deduplicated.

    Both the Cheeger estimate and the chain criterion iterate this exact
    list, so cross-checks between the two see identical sets.
    """
    families = list(families)
    if not families:
        raise InputError("no families requested")
    for name in families:
        if name not in FAMILY_NAMES:
            raise InputError(f"unknown family {name!r}; choose from {FAMILY_NAMES}")
    g = t.graph
    interior = t.interior(w)
    rng = random.Random(seed)
    sets: list[frozenset[int]] = []
    seen = set()

    def push(vertex_set):
        fs = frozenset(vertex_set)
        if fs and fs not in seen:
            seen.add(fs)
            sets.append(fs)

    interior_sorted = sorted(interior)
    for name in families:
        if name == "balls":
            centers = list(interior_sorted)
            if g.root is not None and g.root in interior:
                centers.remove(g.root)
                centers.insert(0, g.root)
            if len(centers) > ball_centers:
                head = centers[:1]
                tail = rng.sample(centers[1:], ball_centers - 1)
                centers = head + sorted(tail)
            for c in centers:
                radius = 0
                prev = None
                while True:
                    inside = g.ball(c, radius) & interior
                    if inside == prev:
                        break
                    push(inside)
                    prev = inside
                    radius += 1
        elif name == "level-bands":
            if g.levels is None:
                raise InputError("level-bands family needs level labels")
            top = max(g.levels)
            for a in range(top + 1):
                for b in range(a, top + 1):
                    push(v for v in interior if a <= g.levels[v] <= b)
        elif name == "descendant-subtrees":
            parent, _depth = g.tree_arrays()
            children = [[] for _ in range(g.n)]
            for v, p in enumerate(parent):
                if p != -1:
                    children[p].append(v)
            for v in interior_sorted:
                stack = [v]
                sub = []
                while stack:
                    u = stack.pop()
                    sub.append(u)
                    stack.extend(children[u])
                push(u for u in sub if u in interior)
        elif name == "random-connected":
            for _ in range(rc_count):
                target = rng.randint(1, min(rc_size, len(interior)))
                start = rng.choice(interior_sorted)
                grown = {start}
                frontier = [start]
                while frontier and len(grown) < target:
                    v = frontier.pop(rng.randrange(len(frontier)))
                    for u in g.neighbors(v):
                        if u in interior and u not in grown:
                            grown.add(u)
                            frontier.append(u)
                            if len(grown) >= target:
                                break
                push(grown)
    if not sets:
        raise InputError("families produced no candidate sets")
    return sets


def cheeger_family(
    t: Truncation,
    w: int,
    families: Iterable[str],
    seed: int,
    **caps,
) -> CheegerCertificate:
    """Upper estimate of the isoperimetric constant over generated families."""
    families = list(families)
    g = t.graph
    best_key = None
    best = None
    for vertex_set in family_sets(t, w, families, seed, **caps):
        ratio, key = _ratio_key(g, vertex_set)
        if best_key is None or key < best_key:
            best_key = key
            best = (ratio, tuple(sorted(vertex_set)))
    ratio, argmin = best
    return CheegerCertificate(
        best_ratio=ratio,
        argmin_set=argmin,
        method="family",
        family_description=",".join(families) + f" (seed={seed})",
        collar=w,
    )


def certify_linear_iso(
    t: Truncation,
    w: int,
    C,
    families: Iterable[str],
    seed: int,
    sets: Optional[Sequence[frozenset[int]]] = None,
) -> CheckResult:
    """|A| <= C * |boundary(A)| for every tested set, exact arithmetic."""
    C = Fraction(C)
    if C <= 0:
        raise InputError("C must be positive")
    g = t.graph
    if sets is None:
        sets = family_sets(t, w, families, seed)
    for vertex_set in sets:
        if len(vertex_set) > C * len(g.boundary(vertex_set, 1)):
            return CheckResult(False, witness=tuple(sorted(vertex_set)))
    return CheckResult(True)
