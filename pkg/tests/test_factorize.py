import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from oracles import configuration_model, has_perfect_matching, random_graph
from schreierkit.corpus import circulant, no_one_factor_cubic, petersen_schreier, plain_petersen
from schreierkit.factorize import (
    NotSchreier,
    PlainGraph,
    max_matching,
    perfect_matching,
    plain_from_labeled,
    schreierize,
    two_factorize,
)
from schreierkit.isoauto import rooted_x_iso
from schreierkit.lgraph import strip_labels


def check_one_factor(g, idx):
    cover = Counter()
    for i in idx:
        u, v = g.edges[i]
        assert u != v
        cover[u] += 1
        cover[v] += 1
    assert cover == Counter(range(g.n))


def check_two_factor(g, factor):
    outd, ind = Counter(), Counter()
    for e, t, h in factor:
        assert tuple(sorted(g.edges[e])) == tuple(sorted((t, h)))
        outd[t] += 1
        ind[h] += 1
    assert outd == ind == Counter(range(g.n))


def test_petersen_matching():
    g = plain_petersen()
    pm = perfect_matching(g)
    assert pm is not None and len(pm) == 5
    check_one_factor(g, pm)


def test_odd_has_none():
    assert perfect_matching(PlainGraph(3, [(0, 1), (1, 2), (2, 0)])) is None


def test_no_one_factor_cubic():
    g = no_one_factor_cubic()
    assert g.n == 16 and g.regular_degree() == 3
    assert perfect_matching(g) is None
    assert not has_perfect_matching(g.n, g.edges)
    with pytest.raises(NotSchreier):
        schreierize(g)


def test_matching_against_brute_force():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(1, 12)
        edges = random_graph(n, rng.uniform(0.1, 0.6), rng)
        g = PlainGraph(n, edges)
        pm = perfect_matching(g)
        assert (pm is not None) == has_perfect_matching(n, edges)
        if pm is not None:
            check_one_factor(g, pm)


def test_max_matching_is_matching():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(2, 15)
        edges = random_graph(n, 0.3, rng)
        adj = [[] for _ in range(n)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        m = max_matching(n, adj)
        for u, v in enumerate(m):
            if v != -1:
                assert m[v] == u and v in adj[u]


def test_circulant_two_factors():
    g = plain_from_labeled(circulant(7, (1, 2)))
    factors = two_factorize(g)
    assert len(factors) == 2
    for f in factors:
        check_two_factor(g, f)


def test_bouquet_two_loops():
    g = PlainGraph(1, [(0, 0), (0, 0)])
    factors = two_factorize(g)
    assert [len(f) for f in factors] == [1, 1]


def test_disjoint_union():
    g = PlainGraph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)] * 2)
    for f in two_factorize(g):
        check_two_factor(g, f)
    with pytest.raises(NotSchreier):
        schreierize(g)


def test_cycle_single_symbol():
    g = PlainGraph(5, [(i, (i + 1) % 5) for i in range(5)])
    lab = schreierize(g)
    assert [n for n, _ in lab.alphabet.symbols] == ["x"]
    x = lab.alphabet.letters()[0]
    assert lab.follow(0, [x]) == 1  # lowest vertex steps to its lower neighbour


def test_petersen_labeling_shape():
    lab = schreierize(plain_petersen())
    assert lab.alphabet.degree == 3 and lab.is_complete() and lab.is_deterministic()
    assert plain_from_labeled(lab).edge_multiset() == plain_petersen().edge_multiset()
    fig = petersen_schreier()
    # same shape: x-cycles of length 5 plus a matching; X-iso to the figure at some root
    assert any(rooted_x_iso(lab, 0, fig, r) is not None for r in range(10))


def test_irregular_rejected():
    with pytest.raises(NotSchreier):
        schreierize(PlainGraph(3, [(0, 1), (1, 2)]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 5))
def test_schreierize_roundtrip(seed, d):
    rng = random.Random(seed)
    n = rng.randint(1, 16 if d > 2 else 5)
    if d % 2 and n % 2:
        n += 1
    g = configuration_model(n, d, rng)
    if d % 2 and not has_perfect_matching(g.n, g.edges):
        with pytest.raises(NotSchreier):
            schreierize(g)
        return
    lab = schreierize(g)
    assert lab.check_wellformed() == [] and lab.is_complete() and lab.is_deterministic()
    assert lab.alphabet.degree == d
    assert plain_from_labeled(strip_labels(lab)).edge_multiset() == g.edge_multiset()


def test_json_roundtrip():
    g = plain_petersen()
    assert PlainGraph.from_json(g.to_json()) == g
