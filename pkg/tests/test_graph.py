import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invgraphs import families
from invgraphs.alphabet import InvolutiveAlphabet
from invgraphs.errors import FormatError, GraphError, TruncationError
from invgraphs.graph import (
    GraphBuilder,
    InverseGraph,
    RootedGraph,
    accepts,
    accepts_strict,
    dumps,
    induced_subgraph,
    is_dyck_at,
    load,
    loads,
    relabel,
    to_dot,
    trace,
    trace_status,
    trace_walk,
    validate,
)
from invgraphs.morphisms import find_morphism
from oracles import reduce_bruteforce, trace_edges

AB = InvolutiveAlphabet("ab")

TRIANGLE = """\
# a 3-cycle on a with a b-loop at the root
alphabet a b
edge 0 a 1
edge 1 a 2
edge 2 a 0
edge 0 b 0
root 0
"""


@st.composite
def inverse_graphs(draw, rank=2, max_n=8):
    """Random connected inverse graphs: a random spanning tree plus extra edges."""
    A = InvolutiveAlphabet("abcd"[:rank])
    n = draw(st.integers(1, max_n))
    b = GraphBuilder(A)
    for v in range(n):
        b.vertex(str(v))
    out = set()

    def free(u, c, v):
        return (u, c) not in out and (v, c ^ 1) not in out

    def put(u, c, v):
        b.add_edge_ids(u, c, v)
        out.add((u, c))
        out.add((v, c ^ 1))

    for v in range(1, n):
        opts = [(u, c) for u in range(v) for c in A.codes if free(u, c, v)]
        if not opts:
            return draw(inverse_graphs(rank, max_n))
        u, c = draw(st.sampled_from(opts))
        put(u, c, v)
    for _ in range(draw(st.integers(0, n))):
        u = draw(st.integers(0, n - 1))
        v = draw(st.integers(0, n - 1))
        c = draw(st.sampled_from(list(A.codes)))
        if free(u, c, v) and (u != v or c ^ 1 not in [x for (y, x) in out if y == u]):
            if u == v and (u, c ^ 1) in out:
                continue
            put(u, c, v)
    return RootedGraph(b.build(), 0)


def test_loads_triangle():
    rg = loads(TRIANGLE)
    g = rg.graph
    assert len(g) == 3 and g.n_edges == 4
    assert accepts(rg, "a a a") and accepts(rg, "b") and accepts(rg, "a a a b")
    assert not accepts(rg, "a")
    assert trace(g, "1", "a'") == g.vertex("0")


def test_spec_bouquet_example():
    rg = families.bouquet(["a"])
    assert accepts(rg, "a a'")
    assert accepts(rg, "a a")


def test_free_group_accepts_only_trivial_words():
    rg = families.free_group(2, 4)
    assert accepts(rg, "a b' b a'")
    assert not accepts(rg, "a b a' b'")


def test_round_trip_is_isomorphic():
    rg = loads(TRIANGLE)
    back = loads(dumps(rg))
    f, g = find_morphism(rg, back), find_morphism(back, rg)
    assert f is not None and g is not None and f.is_isomorphism()
    assert dumps(back) == dumps(rg)


@settings(max_examples=40)
@given(inverse_graphs())
def test_random_round_trip(rg):
    back = loads(dumps(rg))
    assert find_morphism(rg, back).is_isomorphism()
    assert find_morphism(back, rg).is_isomorphism()


def test_truncation_round_trip():
    rg = families.free_group(1, 3)
    back = loads(dumps(rg))
    assert back.graph.truncated == rg.graph.truncated
    assert back.radius == 3


def test_load_from_file(tmp_path):
    p = tmp_path / "t.ig"
    p.write_text(TRIANGLE)
    assert len(load(p).graph) == 3


def test_determinism_clash_reports_line():
    text = "alphabet a\nedge 0 a 1\n\nedge 0 a 2\n"
    with pytest.raises(FormatError) as exc:
        loads(text, path="x.ig")
    assert exc.value.lineno == 4
    assert "x.ig:4:" in str(exc.value)


@pytest.mark.parametrize(
    "text,line",
    [
        ("edge 0 a 1\n", 1),
        ("alphabet a\nedge 0 z 1\n", 2),
        ("alphabet a\nedge 0 a\n", 2),
        ("alphabet a\nfrobnicate\n", 2),
        ("alphabet a\nalphabet b\n", 2),
        ("alphabet a\nvertex 0\nroot 0 1\n", 3),
    ],
)
def test_format_errors_carry_line_numbers(text, line):
    with pytest.raises(FormatError) as exc:
        loads(text)
    assert exc.value.lineno == line


@pytest.mark.malformed
def test_disconnected_file_rejected_when_strict():
    with pytest.raises(FormatError):
        loads("alphabet a\nvertex 0 1\n")


@pytest.mark.malformed
def test_validate_reports_each_kind():
    A = InvolutiveAlphabet("a")
    g = InverseGraph(A, ["0", "1", "2"], [(0, 0, 1), (0, 0, 2), (2, 1, 0)])
    assert {"involution", "determinism"} <= validate(g).kinds()
    g2 = InverseGraph(A, ["0"], [(0, 5, 0)])
    assert "unknown-letter" in validate(g2).kinds()
    g3 = InverseGraph(A, ["0"], [(0, 0, 7)])
    assert "vertex-range" in validate(g3).kinds()
    g4 = InverseGraph(A, ["0", "1"], [])
    assert validate(g4).kinds() == {"disconnected"}


@pytest.mark.malformed
def test_non_strict_load_keeps_clashes():
    rg = loads("alphabet a\nedge 0 a 1\nedge 0 a 2\n", strict=False)
    assert "determinism" in validate(rg.graph).kinds()
    with pytest.raises(GraphError):
        rg.graph.table


def test_duplicate_keys_rejected():
    with pytest.raises(GraphError):
        InverseGraph(AB, ["x", "x"], [])


@settings(max_examples=40)
@given(inverse_graphs(), st.lists(st.integers(0, 3), max_size=10))
def test_trace_agrees_with_edge_oracle(rg, w):
    g = rg.graph
    assert trace(g, 0, w) == trace_edges(g.edges, 0, w)
    walk = trace_walk(g, 0, w)
    assert (walk is None) == (trace(g, 0, w) is None)
    if walk is not None:
        assert walk.end == trace(g, 0, w)
        assert all(g.target(u, c) == v for u, c, v in walk.edges())


@settings(max_examples=40)
@given(inverse_graphs(), st.lists(st.integers(0, 3), max_size=10))
def test_acceptance_depends_on_reduced_form(rg, w):
    # deterministic + involutive: a walk for w exists iff ... and ends where its reduction ends
    g = rg.graph
    r = reduce_bruteforce(w)
    end = trace(g, 0, w)
    if end is not None:
        assert trace(g, 0, r) == end


@settings(max_examples=40)
@given(inverse_graphs(), st.lists(st.integers(0, 3), max_size=8))
def test_dyck_membership_oracle(rg, w):
    expect = reduce_bruteforce(w) == () and trace_edges(rg.graph.edges, 0, w) is not None
    assert is_dyck_at(rg.graph, 0, w) == expect


@settings(max_examples=40)
@given(inverse_graphs())
def test_random_graphs_validate(rg):
    assert validate(rg.graph).ok


def test_norms_and_radius():
    rg = families.free_group(2, 3)
    assert rg.norm("1") == 0 and rg.norm("ab'") == 2
    assert rg.radius == 3
    assert rg.trusts(3) and not rg.trusts(4)
    assert loads(TRIANGLE).radius is None


def test_accepts_strict_detects_exits():
    rg = families.free_group(1, 2)
    assert accepts_strict(rg, "a a a' a'")
    with pytest.raises(TruncationError):
        accepts_strict(rg, "a a a a' a' a'")
    assert not accepts(rg, "a a a a' a' a'")
    assert trace_status(rg.graph, 0, "a a a") == (None, True)


def test_induced_subgraph_maps_back():
    rg = families.free_group(1, 3)
    g = rg.graph
    ids = [g.vertex(k) for k in ("1", "a", "aa")]
    sub = induced_subgraph(g, ids, truncate=[g.vertex("aa")])
    assert [g.key(o) for o in sub.origin] == [sub.key(i) for i in range(3)]
    assert sub.n_edges == 2
    assert sub.truncated == {sub.vertex("aa")}


def test_relabel_swaps_letters():
    rg = loads(TRIANGLE)
    swapped = relabel(rg.graph, AB, {0: 2, 2: 0})
    assert trace(swapped, 0, "b b b") == 0
    assert trace(swapped, 0, "a") == 0


def test_dot_export_is_positive_edges_only():
    rg = families.free_group(1, 2)
    dot = to_dot(rg)
    assert dot.count("->") == rg.graph.n_edges
    assert "doublecircle" in dot and "dashed" in dot
    assert dot == to_dot(rg)


def test_vertex_lookup_errors():
    g = loads(TRIANGLE).graph
    with pytest.raises(GraphError):
        g.vertex("nope")
    with pytest.raises(GraphError):
        g.vertex(99)


def test_star_and_degree():
    g = loads(TRIANGLE).graph
    v = g.vertex("0")
    assert g.degree(v) == 4
    assert sorted(g.star(v)) == [(0, g.vertex("1")), (1, g.vertex("2")), (2, v), (3, v)]
    assert np.all(g.table[v] >= 0)
