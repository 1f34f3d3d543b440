import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invgraphs import families
from invgraphs.alphabet import InvolutiveAlphabet
from invgraphs.errors import FormatError, GraphError, MachineError, TruncationError
from invgraphs.graph import accepts, validate
from invgraphs.morphisms import find_morphism
from invgraphs.transducers import (
    GroupAssembly,
    InverseTransducer,
    build_group_transducer,
    dihedral_assembly,
    dumps_assembly,
    dumps_transducer,
    identity_transducer,
    load_assembly,
    loads_assembly,
    loads_transducer,
    product,
    transduce,
    wp_member,
    wp_sweep,
    z2_assembly,
)
from oracles import abelianize, all_words, dinf_normal_form

A1 = InvolutiveAlphabet("a")
AB = InvolutiveAlphabet("ab")
T1 = InvolutiveAlphabet("t")


def _doubling():
    return InverseTransducer.from_edges(T1, A1, ("p",), "p", [("p", "t", "a a", "p")])


def _two_state():
    # t moves between p and q writing a; only even-length inputs return to p
    return InverseTransducer.from_edges(T1, A1, ("p", "q"), "p", [("p", "t", "a", "q"), ("q", "t", "a", "p")])


def test_identity_transduces_to_itself():
    ident = identity_transducer(AB)
    for w in all_words(4, 3):
        assert transduce(ident, w) == w


def test_transduce_undefined_off_root():
    a = _two_state()
    assert transduce(a, "t") is None
    assert transduce(a, "t t") == (0, 0)
    assert a.run("t") == ((0,), "q")


def test_from_edges_adds_reverses():
    a = _doubling()
    assert a.edges[("p", 1)] == ((1, 1), "p")
    assert a.validate().ok


def test_conflicting_edges_rejected():
    with pytest.raises(MachineError):
        InverseTransducer.from_edges(T1, A1, ("p",), "p", [("p", "t", "a", "p"), ("p", "t", "a a", "p")])


def test_unpaired_edge_rejected():
    with pytest.raises(MachineError):
        InverseTransducer(T1, A1, ("p",), "p", {("p", 0): ((0,), "p")})


def test_identity_product_is_isomorphic():
    rg = families.free_group(2, 4)
    p = product(identity_transducer(AB), rg)
    f, g = find_morphism(p, rg), find_morphism(rg, p)
    assert f is not None and g is not None and f.is_isomorphism()
    assert p.graph.truncated == rg.graph.truncated


def test_doubling_product_is_relabelled_line():
    rg = families.free_group(1, 12)
    p = product(_doubling(), rg)
    target = families.free_group(1, 6, ["t"])
    f, g = find_morphism(p, target), find_morphism(target, p)
    assert f is not None and g is not None and f.is_isomorphism()
    assert {p.graph.key(t) for t in p.graph.truncated} == {"p@aaaaaaaaaaaa", "p@a'a'a'a'a'a'a'a'a'a'a'a'"}


def test_product_alphabet_mismatch():
    with pytest.raises(GraphError):
        product(_doubling(), families.free_group(2, 2))


def _language_law(a, rg, max_len):
    prod = product(a, rg)
    for w in all_words(a.inputs.size, max_len):
        out = transduce(a, w)
        expect = out is not None and accepts(rg, out)
        assert accepts(prod, w) == expect, w


def test_language_law_identity():
    _language_law(identity_transducer(AB), families.free_group(2, 6), 4)


def test_language_law_dihedral():
    asm = dihedral_assembly()
    a = build_group_transducer(asm)
    _language_law(a, families.free_group(1, 6, ["x"]), 5)


def test_dihedral_table():
    asm = dihedral_assembly()
    Y, X = asm.generators, asm.subgroup
    assert Y.letters == ("x", "s")
    assert asm.table[("1", Y.code("x"))] == (X.parse("x"), "1")
    assert asm.table[("1", Y.code("s"))] == ((), "s")
    assert asm.table[("s", Y.code("x"))] == (X.parse("x'"), "s")
    assert asm.table[("s", Y.code("s"))] == ((), "1")
    assert asm.validate().ok
    a = build_group_transducer(asm)
    assert a.validate().ok and set(a.states) == {"1", "s"}


def test_trivial_transversal():
    X = InvolutiveAlphabet("a")
    asm = GroupAssembly(X, ("1",), {("1", 0): ((0,), "1"), ("1", 1): ((1,), "1")}, ({0: (0,)},), (X,))
    a = build_group_transducer(asm)
    assert a.states == ("1",) and a.edges[("1", 0)] == ((0,), "1")


def test_wp_examples():
    asm = dihedral_assembly()
    assert wp_member(asm, ())
    assert wp_member(asm, asm.generators.parse("s x s x"))
    assert not wp_member(asm, asm.generators.parse("x s"))


def test_wp_matches_dihedral_normal_form():
    asm = dihedral_assembly()
    a = build_group_transducer(asm)
    for w in all_words(4, 7):
        assert wp_member(asm, w, a) == (dinf_normal_form(w) == (0, 0))


def test_wp_matches_abelianization():
    asm = z2_assembly()
    a = build_group_transducer(asm)
    for w in all_words(4, 6):
        assert wp_member(asm, w, a) == (abelianize(w, 2) == (0, 0))


@settings(max_examples=100)
@given(st.lists(st.integers(0, 3), max_size=16))
def test_wp_random_long_words(w):
    assert wp_member(dihedral_assembly(), w) == (dinf_normal_form(w) == (0, 0))
    assert wp_member(z2_assembly(), w) == (abelianize(w, 2) == (0, 0))


def test_wp_fixed_radius_refuses_long_images():
    asm = dihedral_assembly(radius=2)
    assert wp_member(asm, asm.generators.parse("x x x' x'"))
    with pytest.raises(TruncationError):
        wp_member(asm, asm.generators.parse("x x x"))


def test_missing_row_is_reported():
    asm = dihedral_assembly()
    table = dict(asm.table)
    del table[("s", asm.generators.code("x"))]
    broken = GroupAssembly(asm.subgroup, asm.transversal, table, asm.projections, asm.targets)
    assert "totality" in broken.validate().kinds()
    with pytest.raises(MachineError):
        build_group_transducer(broken)


def test_projection_must_cover_subgroup():
    X = InvolutiveAlphabet("xy")
    with pytest.raises(MachineError):
        GroupAssembly(X, ("1",), {}, ({0: (0,)},), (InvolutiveAlphabet("x"),))


def test_assembly_text_round_trip(tmp_path):
    for asm in (dihedral_assembly(), z2_assembly(radius=9)):
        text = dumps_assembly(asm)
        back = loads_assembly(text)
        assert back.table == asm.table and back.radius == asm.radius
        assert dumps_assembly(back) == text
    p = tmp_path / "d.asm"
    p.write_text(dumps_assembly(dihedral_assembly()))
    assert load_assembly(p).transversal == ("1", "s")


def test_assembly_format_errors():
    base = dumps_assembly(dihedral_assembly())
    with pytest.raises(FormatError) as exc:
        loads_assembly(base + "row 1 x -> x 1\n")
    assert exc.value.lineno == len(base.splitlines()) + 1
    with pytest.raises(FormatError) as exc:
        loads_assembly("alphabet x\ntransversal 1\nrow 1 q -> x 1\nproj 1 x -> x\n")
    assert exc.value.lineno == 3
    with pytest.raises(FormatError):
        loads_assembly("alphabet x\ntransversal 1\nproj 2 x -> x\n")


def test_transducer_text_round_trip():
    a = _two_state()
    text = dumps_transducer(a)
    back = loads_transducer(text)
    assert back.edges == a.edges
    assert dumps_transducer(back) == text


def test_transducer_format_errors():
    with pytest.raises(FormatError) as exc:
        loads_transducer("input t\noutput a\nroot p\nedge p t a p\n")
    assert exc.value.lineno == 4
    with pytest.raises(FormatError):
        loads_transducer("input t\noutput a\nedge p t -> a p\n")


def test_product_validates():
    p = product(build_group_transducer(dihedral_assembly()), families.free_group(1, 5, ["x"]))
    assert validate(p.graph).ok


@pytest.mark.parametrize("make", [dihedral_assembly, z2_assembly])
def test_sweep_matches_member(make):
    asm = make()
    seen = 0
    for w, ok in wp_sweep(asm, 6):
        assert ok == wp_member(asm, w), w
        seen += 1
    assert seen == sum(asm.generators.size**n for n in range(7))
    with pytest.raises(ValueError):
        list(wp_sweep(asm, -1))
