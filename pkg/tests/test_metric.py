import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from invgraphs import families
from invgraphs.errors import GraphError, TruncationError
from invgraphs.graph import validate
from invgraphs.metric import (
    components,
    cone,
    cone_vertices,
    disk,
    distance,
    distances,
    end_cone,
    frontiers,
    geodesic_words,
    set_diameter,
)
from oracles import abelianize, bfs_edges, reduced_words
from test_graph import inverse_graphs


@settings(max_examples=40)
@given(inverse_graphs())
def test_distances_match_reference(rg):
    g = rg.graph
    assert distances(g, 0).tolist() == bfs_edges(g.edges, 0, len(g))


def test_lattice_distance_is_l1():
    rg = families.free_abelian(2, 6)
    for key in ("(3,-2)", "(0,6)", "(-1,-1)"):
        x, y = map(int, key.strip("()").split(","))
        assert distance(rg.graph, "(0,0)", key) == abs(x) + abs(y)


def test_set_diameter():
    rg = families.free_group(2, 4)
    g = rg.graph
    ids = [g.vertex(k) for k in ("a", "b", "a'a'")]
    assert set_diameter(g, ids) == 3
    assert set_diameter(g, ids[:1]) == 0


@pytest.mark.malformed
def test_set_diameter_across_components():
    from invgraphs.alphabet import InvolutiveAlphabet
    from invgraphs.graph import InverseGraph

    g = InverseGraph(InvolutiveAlphabet("a"), ["0", "1"], [])
    with pytest.raises(GraphError):
        set_diameter(g, [0, 1])


def test_disk_marks_only_boundary_with_outward_edges():
    rg = families.free_abelian(2, 6)
    d = disk(rg.graph, "(0,0)", 2)
    assert len(d) == 13
    assert {d.key(t) for t in d.truncated} == {
        "(2,0)", "(-2,0)", "(0,2)", "(0,-2)", "(1,1)", "(1,-1)", "(-1,1)", "(-1,-1)"
    }
    # a cycle's disk of radius covering it all has nothing leaving it
    c = disk(families.cycle(4).graph, "0", 2)
    assert len(c) == 4 and not c.truncated


def test_end_cone_of_free_group_is_a_branch():
    rg = families.free_group(2, 6)
    c = end_cone(rg, "ab", depth=2)
    assert len(c.frontier) == 1 and c.base_norm == 2
    # anchor plus 3 + 9 descendants
    assert len(c.graph) == 13
    assert c.exact
    assert validate(c.graph).ok


def test_end_cone_of_lattice_is_the_annulus():
    rg = families.free_abelian(2, 8)
    c = end_cone(rg, "(2,0)", depth=1)
    assert len(c.frontier) == 8
    assert len(c.graph) == 8 + 12
    assert {rg.graph.key(o) for o in c.origin_frontier()} >= {"(2,0)", "(0,2)", "(1,-1)"}


def test_end_cone_refuses_root():
    rg = families.free_group(1, 3)
    with pytest.raises(GraphError):
        end_cone(rg, "1")


def test_cone_depth_beyond_trust_is_inexact():
    rg = families.free_group(1, 5)
    assert not end_cone(rg, "aaa", depth=3).exact
    assert end_cone(rg, "aaa", depth=2).exact


def test_frontiers_partition_sphere():
    rg = families.free_group(2, 5)
    fs = frontiers(rg, 3)
    assert len(fs) == 4 * 9
    assert all(len(f) == 1 for f in fs)
    z = families.free_abelian(2, 6)
    (only,) = frontiers(z, 3)
    assert len(only) == 12


def test_components_labels():
    rg = families.free_group(1, 4)
    norms = rg.norms
    lab = components(rg.graph, norms >= 2)
    assert len(set(lab[norms >= 2])) == 2
    assert (lab[norms < 2] == -1).all()


def test_cone_vertices_in_lattice():
    rg = families.free_abelian(2, 6)
    g = rg.graph
    got = {g.key(v) for v in cone_vertices(rg, "(1,1)", radius=2)}
    expect = {f"({x},{y})" for x in range(1, 4) for y in range(1, 4) if x + y <= 4}
    assert got == expect
    sub = cone(rg, "(1,1)", radius=2)
    assert len(sub) == len(expect)


def test_geodesics_of_free_group_are_reduced_words():
    rg = families.free_group(2, 5)
    got = geodesic_words(rg, 4)
    assert got == set(reduced_words(4, 4))


def test_geodesics_of_lattice():
    rg = families.free_abelian(2, 6)
    got = geodesic_words(rg, 4)
    expect = set()
    for n in range(5):
        for w in itertools.product(range(4), repeat=n):
            if sum(map(abs, abelianize(w, 2))) == n:
                expect.add(w)
    assert got == expect


def test_geodesics_refuse_untrusted_length():
    with pytest.raises(TruncationError):
        geodesic_words(families.free_group(1, 3), 4)
    with pytest.raises(ValueError):
        geodesic_words(families.free_group(1, 3), -1)


def test_masked_distances():
    rg = families.cycle(6)
    g = rg.graph
    allowed = np.ones(6, dtype=np.uint8)
    allowed[1] = 0
    assert distances(g, "0", allowed)[g.vertex("2")] == 4
