import itertools
import random

from hypothesis import given, settings, strategies as st

from schreierkit.corpus import a_n, an_hn, b_n, fig3_pair, petersen_schreier, random_coset_table
from schreierkit.isoauto import rooted_x_iso
from schreierkit.lgraph import ball_truncate
from schreierkit.perms import PermAction, Permutation
from schreierkit.schreier import (
    CosetTable,
    SubgroupPresentation,
    bfs_renumber,
    coset_closure,
    from_action,
    reconstruct_subgroup,
)
from schreierkit.words import Alphabet, normalize

F2 = Alphabet.of(["x", "y"])
XA = Alphabet.of(["x"], ["a"])


def test_from_action_an():
    act, g = an_hn(7)
    assert g.n == 7 and g.root == 6
    assert g.is_complete() and g.is_deterministic() and g.check_wellformed() == []
    direct = from_action(PermAction(Alphabet.of(["a", "b"]), [a_n(7), b_n(7)]), 7)
    assert bfs_renumber(direct) == bfs_renumber(g)


def test_from_action_identity_disconnected():
    A = Alphabet.of(["x"])
    g = from_action(PermAction(A, [Permutation.identity(3)]), 1)
    assert g.n == 3 and not g.is_connected()
    assert all(g.follow(v, A.parse_word("x")) == v for v in range(3))


def test_from_action_bouquet():
    g = from_action(PermAction(XA, [Permutation.identity(1)] * 2), 1)
    assert g.n == 1 and g.degree(0) == XA.degree


def test_infinite_index_partial():
    t = coset_closure(SubgroupPresentation.parse(F2, ["x"]), max_vertices=10)
    assert not t.complete and t.size == 10


def test_index_two():
    H = SubgroupPresentation.parse(F2, ["x^2", "y", "x y x^-1"])
    t = coset_closure(H)
    assert t.complete and t.size == 2
    g = t.to_graph()
    # membership oracle: even exponent sum in x
    for n in range(5):
        for seq in itertools.product(F2.letters(), repeat=n):
            w = normalize(F2, seq)
            even = sum(l.sign for l in w if l.index == 0) % 2 == 0
            assert (g.follow(g.root, w) == g.root) == even


def test_whole_group():
    t = coset_closure(SubgroupPresentation.parse(XA, ["x", "a"]))
    g = t.to_graph()
    assert t.complete and g.n == 1 and g.degree(0) == 3


def test_table_json_roundtrip():
    t = coset_closure(SubgroupPresentation.parse(XA, ["x^3", "a x a"]))
    assert CosetTable.from_json(t.to_json()) == t


def test_conjugator():
    H = SubgroupPresentation.parse(XA, ["x^2", "a x a"], conjugator="a")
    g = coset_closure(H).to_graph()
    assert g.follow(g.root, XA.parse_word("a x^2 a")) == g.root


def test_ball_truncations():
    line = coset_closure(SubgroupPresentation.parse(Alphabet.of(["x"]), []), max_vertices=50).to_graph()
    b = ball_truncate(line, line.root, 3)
    assert b.n == 7 and len(b.boundary) == 2
    p = petersen_schreier()
    assert ball_truncate(p, 0, 10).n == 10
    top = fig3_pair(8).top
    assert len(top.boundary) == 4


def test_reconstruct_petersen():
    g = petersen_schreier()
    w = XA.parse_word("x a x^-1 x^-1 a")
    undirected = len(g.unoriented_edges())
    for root, member in ((0, True), (5, False)):
        gens = reconstruct_subgroup(g, root)
        assert len(gens) == undirected - g.n + 1 == 6
        h = coset_closure(SubgroupPresentation(XA, gens)).to_graph()
        assert rooted_x_iso(h, h.root, g, root) is not None
        assert (h.follow(h.root, w) == h.root) == member


def test_single_loop():
    A = Alphabet.of(["x"])
    g = coset_closure(SubgroupPresentation.parse(A, ["x"])).to_graph()
    assert reconstruct_subgroup(g) == [A.parse_word("x")]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([F2, XA, Alphabet.of(["x"], ["a", "b"])]))
def test_closure_roundtrip(seed, A):
    H, t = random_coset_table(A, random.Random(seed), max_vertices=40)
    g = t.to_graph()
    assert g.is_complete() and g.is_deterministic()
    for w in H.generator_words():
        assert g.follow(g.root, w) == g.root
    gens = reconstruct_subgroup(g)
    h = coset_closure(SubgroupPresentation(A, gens)).to_graph()
    assert h.n == g.n
    assert bfs_renumber(h) == bfs_renumber(g)
