import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invgraphs import families
from invgraphs.errors import GraphError, TruncationError
from invgraphs.graph import accepts, loads
from invgraphs.morphisms import is_cover
from invgraphs.quotients import (
    automorphisms,
    dv_quotient,
    eta_evaluate,
    eta_walk,
    is_quasi_transitive,
    orbit_partition,
)
from oracles import z_sum


def _line_int(key):
    return 0 if key == "1" else (key.count("a") - 2 * key.count("a'"))


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_line_quotient_has_k_classes(k):
    line = families.free_group(1, 12)
    q = dv_quotient(line, ["1", "a" * k])
    assert q.n_classes == k
    assert is_cover(q.projection)
    assert not q.saturated
    ints = [_line_int(line.graph.key(v)) for v in range(len(line.graph))]
    for u in range(len(ints)):
        for v in range(len(ints)):
            assert (q.class_of[u] == q.class_of[v]) == ((ints[u] - ints[v]) % k == 0)


def test_quotient_class_keys_name_first_member():
    line = families.free_group(1, 6)
    q = dv_quotient(line, ["1", "aa"])
    assert sorted(q.quotient.graph.keys) == ["[1]", "[a]"]
    assert sorted(q.members(0)) == sorted(
        v for v in range(len(line.graph)) if _line_int(line.graph.key(v)) % 2 == 0
    )


def test_cycle_quotient_is_saturated():
    q = dv_quotient(families.cycle(6), ["0", "2"])
    assert q.saturated and q.n_classes == 2
    assert accepts(q.quotient, "a a")


def test_free_group_quotient_by_two_seeds():
    rg = families.free_group(2, 6)
    q = dv_quotient(rg, ["1", "ab"])
    # the closure of {1, ab} identifies the whole ball along powers of ab
    assert accepts(q.quotient, "a b")
    assert not accepts(q.quotient, "a")


def test_empty_seed_set_rejected():
    with pytest.raises(ValueError):
        dv_quotient(families.cycle(3), [])


@pytest.mark.parametrize("k", [2, 3])
def test_eta_lifts_and_is_homomorphism(k):
    line = families.free_group(1, 12)
    q = dv_quotient(line, ["1", "a" * k])
    A = line.alphabet
    circuits = [w for w in A.words(6) if accepts(q.quotient, w)]
    assert circuits
    for u in circuits[:40]:
        for v in circuits[:40]:
            assert _line_int(eta_evaluate(q, u + v)) == _line_int(eta_evaluate(q, u)) + _line_int(eta_evaluate(q, v))
    for w in circuits:
        assert (eta_evaluate(q, w) == "1") == accepts(line, w)
        assert _line_int(eta_evaluate(q, w)) == z_sum(w)


def test_eta_rejects_non_circuits_and_exits():
    line = families.free_group(1, 3)
    q = dv_quotient(line, ["1", "aa"])
    with pytest.raises(GraphError):
        eta_walk(q, "a")
    with pytest.raises(TruncationError):
        eta_walk(q, "a a a a a a a a")


@pytest.mark.parametrize("n", [2, 3, 7])
def test_cycle_automorphisms(n):
    autos = automorphisms(families.cycle(n).graph)
    assert len(autos) == n
    assert orbit_partition(families.cycle(n).graph, autos).count == 1


def test_bicyclic_tree_is_rigid():
    g = families.bicyclic_tree(10).graph
    assert len(automorphisms(g)) == 1
    assert orbit_partition(g).count == len(g)


def test_free_group_ball_is_rigid():
    assert len(automorphisms(families.free_group(2, 2).graph)) == 1


def test_quasi_transitive_orbit_count():
    g = loads("alphabet a b\nedge 0 a 1\nedge 1 a 0\nedge 0 b 0\n").graph
    ok, count = is_quasi_transitive(g)
    assert ok and count == 2
    assert orbit_partition(g).orbit_of("0") == [0]


@settings(max_examples=30)
@given(st.integers(2, 8), st.data())
def test_cycle_quotient_index_is_gcd(n, data):
    from math import gcd

    s = data.draw(st.integers(1, n - 1))
    q = dv_quotient(families.cycle(n), ["0", str(s)])
    assert q.n_classes == gcd(n, s)
    assert is_cover(q.projection)
