from bilip.ends import enumerate_ends, verify_ultrametric
from bilip.graph import geometry_profile
from bilip.parallel import map_chunks, thread_budget
from bilip.trees import gen_kary


def test_thread_budget_env(monkeypatch):
    monkeypatch.delenv("BILIP_THREADS", raising=False)
    assert thread_budget() == 1
    monkeypatch.setenv("BILIP_THREADS", "4")
    assert thread_budget() == 4
    monkeypatch.setenv("BILIP_THREADS", "0")
    assert thread_budget() == 1
    monkeypatch.setenv("BILIP_THREADS", "lots")
    assert thread_budget() == 1


def test_results_independent_of_budget(monkeypatch):
    t = gen_kary(2, 5)
    es = enumerate_ends(t)
    monkeypatch.setenv("BILIP_THREADS", "1")
    base_profile = geometry_profile(t.graph, 4)
    base_check = verify_ultrametric(es, mode="exhaustive").passed
    monkeypatch.setenv("BILIP_THREADS", "4")
    assert geometry_profile(t.graph, 4) == base_profile
    assert verify_ultrametric(es, mode="exhaustive").passed == base_check


def test_map_chunks_preserves_order(monkeypatch):
    monkeypatch.setenv("BILIP_THREADS", "3")
    out = map_chunks(lambda c: sum(c), [[1, 2], [3], [4, 5]])
    assert out == [3, 3, 9]
