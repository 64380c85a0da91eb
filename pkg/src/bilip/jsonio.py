"""Interchange formats: JSON graphs, DOT, CSV, run configs.

The JSON graph schema is
    {"vertices": [{"id": 0, "level": 0}, ...],
     "edges": [[u, v], ...],        # u < v, listed once, sorted
     "root": 0,                     # optional
     "meta": {...}}
Rationals serialize as {"num": int, "den": int}; certificate fields never
carry floats. All writers emit canonical bytes (sorted keys, two-space
indent, trailing newline) so reruns are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from .errors import InputError
from .filling import Filling, make_space
from .graph import UdbgGraph
from .trees import RootedTree

CONFIG_KEYS = {"name", "seed", "output_dir", "stages"}
PIPELINE_STAGES = ("generate", "analyze", "promote", "verify")


def rational(value: Union[Fraction, int]) -> dict:
    f = Fraction(value)
    return {"num": f.numerator, "den": f.denominator}


def parse_rational(obj) -> Fraction:
    if isinstance(obj, dict):
        extra = set(obj) - {"num", "den"}
        if extra or "num" not in obj or "den" not in obj:
            raise InputError(f"bad rational object {obj!r}")
        return Fraction(obj["num"], obj["den"])
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, str):
        return Fraction(obj)
    raise InputError(f"bad rational value {obj!r}")


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def save_json(path, obj) -> None:
    Path(path).write_text(dumps_canonical(obj), encoding="utf-8")


def load_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


# -- graphs ------------------------------------------------------------------


def graph_to_dict(g: UdbgGraph, meta: Optional[dict] = None) -> dict:
    vertices = []
    for v in g.vertices():
        entry = {"id": v}
        if g.levels is not None:
            entry["level"] = g.levels[v]
        vertices.append(entry)
    out = {
        "vertices": vertices,
        "edges": [[u, v] for u, v in g.edges()],
        "meta": meta or {},
    }
    if g.root is not None:
        out["root"] = g.root
    return out


def graph_from_dict(d: dict) -> tuple[UdbgGraph, dict]:
    if not isinstance(d, dict) or "vertices" not in d or "edges" not in d:
        raise InputError("graph JSON needs 'vertices' and 'edges'")
    ids = []
    levels = []
    has_levels = None
    for entry in d["vertices"]:
        if not isinstance(entry, dict) or "id" not in entry:
            raise InputError(f"bad vertex entry {entry!r}")
        ids.append(entry["id"])
        here = "level" in entry
        if has_levels is None:
            has_levels = here
        elif has_levels != here:
            raise InputError("either all vertices carry a level or none do")
        if here:
            levels.append(entry["level"])
    n = len(ids)
    if sorted(ids) != list(range(n)):
        raise InputError("vertex ids must be dense 0..n-1")
    order = sorted(range(n), key=lambda i: ids[i])
    level_by_id = [levels[i] for i in order] if has_levels else None
    adjacency = [[] for _ in range(n)]
    for edge in d["edges"]:
        if not isinstance(edge, list) or len(edge) != 2:
            raise InputError(f"bad edge entry {edge!r}")
        u, v = edge
        if not (isinstance(u, int) and isinstance(v, int)):
            raise InputError(f"bad edge entry {edge!r}")
        adjacency[u].append(v)
        adjacency[v].append(u)
    root = d.get("root")
    g = UdbgGraph(adjacency, root=root, levels=level_by_id)
    return g, d.get("meta", {})


def tree_to_dict(t: RootedTree, meta: Optional[dict] = None) -> dict:
    full = dict(meta or {})
    full["parent"] = [p if p is not None else None for p in t.parent]
    return graph_to_dict(t.graph, meta=full)


def tree_from_graph(g: UdbgGraph) -> RootedTree:
    """Rebuild the rooted-tree view of a loaded graph."""
    if g.root is None or not g.is_tree:
        raise InputError("graph is not a rooted tree")
    parent, depth = g.tree_arrays()
    if g.levels is not None and list(g.levels) != depth:
        raise InputError("level labels disagree with distance from the root")
    parents = [p if p != -1 else None for p in parent]
    return RootedTree.from_parents(parents)


def filling_to_dict(f: Filling) -> dict:
    meta = {
        "space": f.space.kind,
        "resolution": f.space.resolution,
        "scale": rational(f.scale),
        "tau": rational(f.tau),
        "seed": f.seed,
        "centers": [rational(f.center_value(v)) for v in f.graph.vertices()],
        "radius": [rational(f.radius(v)) for v in f.graph.vertices()],
    }
    return graph_to_dict(f.graph, meta=meta)


def filling_from_dict(d: dict) -> Filling:
    g, meta = graph_from_dict(d)
    needed = {"space", "resolution", "scale", "tau", "seed", "centers"}
    if not needed <= set(meta):
        raise InputError("filling JSON lacks center metadata")
    space = make_space(meta["space"], meta["resolution"])
    index_of = {p: i for i, p in enumerate(space.points)}
    centers = []
    for obj in meta["centers"]:
        value = parse_rational(obj)
        if value not in index_of:
            raise InputError(f"center {value} is not a point of the model space")
        centers.append(index_of[value])
    return Filling(
        graph=g,
        space=space,
        scale=parse_rational(meta["scale"]),
        tau=parse_rational(meta["tau"]),
        centers=tuple(centers),
        seed=meta["seed"],
    )


def vertex_map_to_dict(mapping: dict, meta: Optional[dict] = None) -> dict:
    return {"map": {str(x): y for x, y in sorted(mapping.items())}, "meta": meta or {}}


def vertex_map_from_dict(d: dict) -> dict[int, int]:
    if not isinstance(d, dict) or "map" not in d:
        raise InputError("map JSON needs a 'map' table")
    out = {}
    for k, v in d["map"].items():
        try:
            out[int(k)] = int(v)
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad map entry {k!r}: {v!r}") from exc
    return out


# -- exports -----------------------------------------------------------------


def to_dot(g: UdbgGraph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    if g.levels is not None:
        by_level: dict[int, list[int]] = {}
        for v in g.vertices():
            by_level.setdefault(g.levels[v], []).append(v)
        for level in sorted(by_level):
            members = " ".join(f"v{v};" for v in sorted(by_level[level]))
            lines.append(f"  {{ rank=same; {members} }}")
    for v in g.vertices():
        label = f"v{v}"
        if g.root == v:
            lines.append(f"  {label} [shape=doublecircle];")
        else:
            lines.append(f"  {label};")
    for u, v in g.edges():
        lines.append(f"  v{u} -- v{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def gromov_csv(table: list[list[int]]) -> str:
    n = len(table)
    header = "ray," + ",".join(str(j) for j in range(n))
    rows = [header]
    for i in range(n):
        rows.append(str(i) + "," + ",".join(str(x) for x in table[i]))
    return "\n".join(rows) + "\n"


# -- run configuration -------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved parameters of one reproducible run.

    Embedded verbatim in every report; round-trips losslessly and rejects
    unknown keys, so a report always names the exact run that made it.
    """

    name: str
    seed: int
    output_dir: str
    stages: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "output_dir": self.output_dir,
            "stages": self.stages,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise InputError("config must be a JSON object")
        extra = set(d) - CONFIG_KEYS
        if extra:
            raise InputError(f"unknown config keys: {sorted(extra)}")
        missing = CONFIG_KEYS - set(d)
        if missing:
            raise InputError(f"missing config keys: {sorted(missing)}")
        if not isinstance(d["name"], str):
            raise InputError("config name must be a string")
        if not isinstance(d["seed"], int):
            raise InputError("config seed must be an integer")
        if not isinstance(d["output_dir"], str):
            raise InputError("config output_dir must be a string")
        stages = d["stages"]
        if not isinstance(stages, dict):
            raise InputError("config stages must be an object")
        for stage, params in stages.items():
            if not isinstance(params, dict):
                raise InputError(f"stage {stage!r} parameters must be an object")
        return cls(
            name=d["name"],
            seed=d["seed"],
            output_dir=d["output_dir"],
            stages=stages,
        )
