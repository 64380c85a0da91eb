from fractions import Fraction

import pytest

from bilip import jsonio
from bilip.errors import InputError
from bilip.filling import build_filling, make_space
from bilip.jsonio import ExperimentConfig
from bilip.trees import gen_kary


def test_rational_round_trip():
    assert jsonio.rational(Fraction(6, 4)) == {"num": 3, "den": 2}
    assert jsonio.parse_rational({"num": 3, "den": 2}) == Fraction(3, 2)
    assert jsonio.parse_rational(5) == 5
    assert jsonio.parse_rational("1/3") == Fraction(1, 3)
    with pytest.raises(InputError):
        jsonio.parse_rational({"num": 1})
    with pytest.raises(InputError):
        jsonio.parse_rational({"num": 1, "den": 2, "x": 3})
    with pytest.raises(InputError):
        jsonio.parse_rational(1.5)


def test_graph_round_trip():
    t = gen_kary(3, 3)
    d = jsonio.graph_to_dict(t.graph, meta={"note": "x"})
    g, meta = jsonio.graph_from_dict(d)
    assert meta == {"note": "x"}
    assert list(g.edges()) == list(t.graph.edges())
    assert g.levels == t.graph.levels
    assert g.root == t.graph.root
    assert jsonio.graph_to_dict(g, meta=meta) == d


def test_graph_from_dict_validation():
    with pytest.raises(InputError):
        jsonio.graph_from_dict({"edges": []})
    with pytest.raises(InputError):
        jsonio.graph_from_dict({"vertices": [{"id": 0}, {"id": 2}], "edges": []})
    with pytest.raises(InputError):
        jsonio.graph_from_dict(
            {"vertices": [{"id": 0}, {"id": 1, "level": 1}], "edges": [[0, 1]]}
        )
    with pytest.raises(InputError):
        jsonio.graph_from_dict({"vertices": [{"id": 0}, {"id": 1}], "edges": [[0]]})


def test_tree_round_trip_with_parent_meta():
    t = gen_kary(2, 3)
    d = jsonio.tree_to_dict(t)
    assert d["meta"]["parent"][0] is None
    assert d["meta"]["parent"][1] == 0
    g, _ = jsonio.graph_from_dict(d)
    t2 = jsonio.tree_from_graph(g)
    assert t2.parent == t.parent


def test_tree_from_graph_rejects_bad_levels():
    d = {
        "vertices": [{"id": 0, "level": 0}, {"id": 1, "level": 1}, {"id": 2, "level": 1}],
        "edges": [[0, 1], [1, 2]],
        "root": 0,
        "meta": {},
    }
    with pytest.raises(InputError):
        jsonio.tree_from_graph(jsonio.graph_from_dict(d)[0])


def test_filling_round_trip():
    f = build_filling(make_space("cantor13", 8), Fraction(1, 3), Fraction(1), 3, seed=4)
    d = jsonio.filling_to_dict(f)
    f2 = jsonio.filling_from_dict(d)
    assert list(f2.graph.edges()) == list(f.graph.edges())
    assert f2.centers == f.centers
    assert f2.scale == f.scale and f2.tau == f.tau
    broken = jsonio.graph_to_dict(f.graph, meta={"space": "cantor13"})
    with pytest.raises(InputError):
        jsonio.filling_from_dict(broken)


def test_vertex_map_round_trip():
    d = jsonio.vertex_map_to_dict({2: 3, 0: 1})
    assert list(d["map"]) == ["0", "2"]
    assert jsonio.vertex_map_from_dict(d) == {0: 1, 2: 3}
    with pytest.raises(InputError):
        jsonio.vertex_map_from_dict({"map": {"a": None}})
    with pytest.raises(InputError):
        jsonio.vertex_map_from_dict({})


def test_dot_and_csv():
    t = gen_kary(2, 2)
    dot = jsonio.to_dot(t.graph)
    assert dot.count(" -- ") == t.graph.edge_count()
    assert "rank=same" in dot
    table = [[3, 1], [1, 3]]
    csv = jsonio.gromov_csv(table)
    lines = csv.strip().split("\n")
    assert lines[0] == "ray,0,1"
    assert len(lines) == 3


def test_experiment_config_round_trip():
    cfg = ExperimentConfig(
        name="promote",
        seed=11,
        output_dir="runs",
        stages={"promote": {"rmax": 8}},
    )
    text = jsonio.dumps_canonical(cfg.to_dict())
    back = ExperimentConfig.from_dict(cfg.to_dict())
    assert back == cfg
    assert jsonio.dumps_canonical(back.to_dict()) == text


def test_experiment_config_rejects_bad_shapes():
    base = {"name": "x", "seed": 0, "output_dir": ".", "stages": {}}
    with pytest.raises(InputError, match="unknown"):
        ExperimentConfig.from_dict({**base, "extra": 1})
    with pytest.raises(InputError, match="missing"):
        ExperimentConfig.from_dict({"name": "x"})
    with pytest.raises(InputError):
        ExperimentConfig.from_dict({**base, "seed": "0"})
    with pytest.raises(InputError):
        ExperimentConfig.from_dict({**base, "stages": {"generate": 3}})


def test_canonical_dumps_is_stable(tmp_path):
    payload = {"b": 1, "a": {"z": [1, 2], "y": None}}
    path = tmp_path / "x.json"
    jsonio.save_json(path, payload)
    first = path.read_bytes()
    jsonio.save_json(path, jsonio.load_json(path))
    assert path.read_bytes() == first
