"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is repeated in the pytest terminal
summary.  Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import random
from collections import Counter

import pytest

from oracles import configuration_model, has_perfect_matching, run_pipeline
from schreierkit.corpus import (
    a_n,
    an_hn,
    an_hn_even,
    avoid_subgroup_gens,
    b_n,
    circulant,
    fig3_pair,
    fig4_pair,
    fig5_pair,
    full_generating_system,
    no_one_factor_cubic,
    petersen_beta,
    petersen_schreier,
    plain_petersen,
    random_coset_table,
    random_permutation_graph,
    schreier_of,
    strong_simple_scan,
    window_family,
)
from schreierkit.cover import ends_estimate, interior, qi_certificate, x_cover_find
from schreierkit.factorize import NotSchreier, PlainGraph, perfect_matching, plain_from_labeled, schreierize
from schreierkit.isoauto import (
    Verdict,
    is_transitive,
    iso_from_vertex_map,
    orbit_partition,
    rooted_iso,
    rooted_x_iso,
    x_orbits,
)
from schreierkit.lengthiso import alpha_from_beta, gamma_extend, lemma_properties_check
from schreierkit.lgraph import from_transitions, strip_labels
from schreierkit.perms import (
    all_subgroups,
    evaluate,
    group_elements,
    group_order,
    normalizer,
    parse_cycles,
)
from schreierkit.schreier import SubgroupPresentation, bfs_renumber, coset_closure, reconstruct_subgroup
from schreierkit.words import Alphabet, Letter, ball, extensions, invert, multiply

XA = Alphabet.of(["x"], ["a"])
F2 = Alphabet.of(["x", "y"])
ABC = Alphabet.of([], ["a", "b", "c"])
XAB = Alphabet.of(["x"], ["a", "b"])
ABCD = Alphabet.of([], ["a", "b", "c", "d"])
SAME_DEGREE = {XA: [ABC], ABC: [XA], F2: [XAB, ABCD], XAB: [F2, ABCD], ABCD: [F2, XAB]}
MAX_ECC = 6


# -- helpers -----------------------------------------------------------------------


def rebuilt(g, v):
    """Schreier graph of the subgroup read off at v, rebuilt by coset closure."""
    gens = reconstruct_subgroup(g, v)
    t = coset_closure(SubgroupPresentation(g.alphabet, gens))
    assert t.complete
    return t.to_graph()


def diameter(g):
    return max(g.eccentricity(v) for v in range(g.n))


def small_closure_graph(A, rng, max_vertices=40):
    while True:
        _, t = random_coset_table(A, rng, max_vertices=max_vertices)
        g = t.to_graph()
        if diameter(g) <= MAX_ECC:
            return g


def small_perm_graph(A, n, rng):
    while True:
        g = rebuilt(random_permutation_graph(A, n, rng), 0)
        if diameter(g) <= MAX_ECC:
            return g


def relabelled(g, rng):
    """Shuffle vertex ids, forget labels, label again; rebuilt by coset closure."""
    perm = list(range(g.n))
    rng.shuffle(perm)
    plain = PlainGraph(g.n, [(perm[g.src[e]], perm[g.dst(e)]) for e in g.unoriented_edges()])
    lab = schreierize(plain, root=perm[g.root])
    return rebuilt(lab, lab.root)


def lex_image(A1, A2, w):
    """Image of w under the lexicographic length/prefix preserving bijection."""
    out = ()
    for k, l in enumerate(w):
        i = extensions(A1, w[:k]).index(l)
        out += (extensions(A2, out)[i],)
    return out


def letterwise_image(A1, A2, w):
    return tuple(w) if [o for _, o in A1.symbols] == [o for _, o in A2.symbols] else None


def verified(alpha, g1, g2, R):
    out = run_pipeline(alpha, g1, g1.root, g2, g2.root, R)
    if out is None:
        return False, None
    gamma, beta = out
    vm = beta.vertex_map
    ok = beta.covers_all and vm.get(g1.root) == g2.root and iso_from_vertex_map(g1, g2, vm) is not None
    return ok, gamma


def make_pairs(count, seed):
    rng = random.Random(seed)
    pairs = []
    alphabets = [F2, XA, ABC, XAB, ABCD]
    while len(pairs) < count:
        kind = len(pairs) % 4
        A1 = alphabets[len(pairs) // 4 % len(alphabets)]
        g1 = small_closure_graph(A1, rng)
        if kind == 0:
            if any(g1.is_degenerate(e) for e in range(g1.num_edges)):
                continue
            g2 = relabelled(g1, rng)
            if diameter(g2) > MAX_ECC:
                continue
        elif kind == 1:
            g2 = rebuilt(g1, rng.randrange(g1.n))
        elif kind == 2:
            g2 = small_perm_graph(A1, g1.n, rng)
        else:
            g2 = small_perm_graph(rng.choice(SAME_DEGREE[A1]), g1.n, rng)
        pairs.append((kind, g1, g2))
    return pairs


@pytest.fixture(scope="module")
def round_trips():
    """Criterion-2 data, shared with the gamma certification."""
    results = []
    for kind, g1, g2 in make_pairs(120, seed=2024):
        A1, A2 = g1.alphabet, g2.alphabet
        R = max(1, g1.eccentricity(g1.root), g2.eccentricity(g2.root))
        hgens = reconstruct_subgroup(g1)
        iso = rooted_iso(g1, g1.root, g2, g2.root)
        from_beta = None
        if iso is not None:
            alpha = alpha_from_beta(iso, g1, g2, hgens)
            from_beta = verified(alpha, g1, g2, R)[0]
        guesses = []
        for image in (lex_image, letterwise_image):
            if image(A1, A2, ()) is None:
                continue
            guesses.append(verified({h: image(A1, A2, h) for h in hgens}, g1, g2, R)[0])
        results.append(dict(kind=kind, g1=g1, g2=g2, iso=iso, from_beta=from_beta, guesses=guesses))
    return results


# -- criteria ----------------------------------------------------------------------


def test_criterion_1_petersen(criterion):
    with criterion(1, "Petersen suite") as rec:
        g = petersen_schreier()
        assert {g.degree(v) for v in range(g.n)} == {3}
        assert is_transitive(g) is Verdict.TRUE
        assert rooted_x_iso(g, 0, g, 5) is None
        h = XA.parse_word("x a x^-1 x^-1 a")
        assert g.follow(0, h) == 0 and g.follow(5, h) != 5
        alpha = alpha_from_beta(petersen_beta(g), g, g, [h], root1=0)
        assert alpha[h] == XA.parse_word("x^-1 a x^-1 x^-1 a")
        rec.detail = "alpha(x a x^-2 a) = " + XA.format_word(alpha[h])


def test_criterion_2_round_trip(criterion, round_trips):
    with criterion(2, "rooted iso <=> alpha-gamma-beta pipeline") as rec:
        assert len(round_trips) >= 100
        positives = x_checked = x_positive = 0
        for r in round_trips:
            g1, g2 = r["g1"], r["g2"]
            assert g1.n <= 40 and g1.alphabet.degree == g2.alphabet.degree
            if r["iso"] is not None:
                positives += 1
                assert r["from_beta"], "pipeline failed on an isomorphic pair"
            else:
                assert not any(r["guesses"]), "pipeline produced an isomorphism where none exists"
            if g1.alphabet == g2.alphabet:
                x_checked += 1
                has_x = rooted_x_iso(g1, g1.root, g2, g2.root) is not None
                x_positive += has_x
                assert has_x == (bfs_renumber(g1) == bfs_renumber(g2))
        assert positives >= 20 and positives < len(round_trips)
        assert x_positive >= 5 and x_positive < x_checked
        rec.detail = (
            f"{len(round_trips)} pairs, {positives} isomorphic; "
            f"{x_checked} same-alphabet pairs, {x_positive} X-isomorphic"
        )


def certify_gamma(gamma, g1, g2):
    """Exhaustive in-ball checks; returns the number of identities verified."""
    A1, A2, R = gamma.A1, gamma.A2, gamma.radius
    b1, b2 = ball(A1, R), ball(A2, R)
    fwd = {w: gamma(w) for w in b1}
    assert sorted(fwd.values()) == sorted(b2), "gamma is not a bijection of balls"
    bwd = {y: w for w, y in fwd.items()}
    for m in (fwd, bwd):
        for w, y in m.items():
            assert len(y) == len(w)
            assert not w or m[w[:-1]] == y[:-1]
    checks = 0
    H1 = [h for h in b1 if g1.follow(g1.root, h) == g1.root]
    H2 = [k for k in b2 if g2.follow(g2.root, k) == g2.root]
    assert sorted(fwd[h] for h in H1) == sorted(H2), "gamma does not match the subgroups"
    for h in H1:
        assert fwd[h] == gamma.alpha(h)
    for H, m, A, B in ((H1, fwd, A1, A2), (H2, bwd, A2, A1)):
        for h in H:
            for k in range(len(h) + 1):
                f, g = h[:k], invert(A, h[k:])
                assert m[h] == multiply(B, m[f], invert(B, m[g]))
                checks += 1
    rep = lemma_properties_check(gamma)
    assert rep.ok, rep.violations[:3]
    return checks + rep.checked


def test_criterion_3_gamma_certification(criterion, round_trips):
    with criterion(3, "gamma certification") as rec:
        built = checks = 0
        g = petersen_schreier()
        alpha = alpha_from_beta(petersen_beta(g), g, g, reconstruct_subgroup(g, 0), root1=0)
        checks += certify_gamma(gamma_extend(alpha, XA, XA, 5), g, g.with_root(5))
        built += 1
        for r in round_trips:
            g1, g2 = r["g1"], r["g2"]
            if r["iso"] is None or len(g1.alphabet) != 2 or len(g2.alphabet) != 2:
                continue
            alpha = alpha_from_beta(r["iso"], g1, g2, reconstruct_subgroup(g1))
            for R in (3, 5):
                checks += certify_gamma(gamma_extend(alpha, g1.alphabet, g2.alphabet, R), g1, g2)
                built += 1
        trivial = gamma_extend({}, F2, XAB, 4)
        assert all(trivial(w) == lex_image(F2, XAB, w) for w in ball(F2, 4))
        assert built >= 10
        rec.detail = f"{built} gammas, {checks} identities checked, 0 violations"


def test_criterion_4_alternating(criterion):
    with criterion(4, "A_n suite") as rec:
        a7, b7 = a_n(7), b_n(7)
        assert group_order([a7, b7]) == 2520
        assert evaluate("b a^-2 b^-1 a^2", {"a": a7, "b": b7}) == parse_cycles("(4,3,6)", 7)
        assert b_n(5) * b_n(5) == a_n(5)
        _, g7 = an_hn(7)
        assert rooted_iso(g7, g7.root, circulant(7, (1, 2)), 0) is not None
        assert is_transitive(g7) is Verdict.TRUE
        _, g6 = an_hn_even(6)
        assert is_transitive(g6) is Verdict.TRUE
        rec.detail = "|<a7,b7>| = 2520, (4,3,6) identity, b5^2 = a5, both graphs transitive"


def random_cover(g2, k, rng):
    """Random connected k-sheeted X-cover of g2, rooted over its root."""
    A = g2.alphabet
    while True:
        targets = {}
        for v in range(g2.n):
            for i in range(len(A)):
                l = Letter(i, 1)
                w = g2.follow(v, (l,))
                if not A.is_order2(i):
                    sigma = list(range(k))
                    rng.shuffle(sigma)
                    for j in range(k):
                        targets[(v * k + j, l)] = w * k + sigma[j]
                elif v < w:
                    sigma = list(range(k))
                    rng.shuffle(sigma)
                    for j in range(k):
                        targets[(v * k + j, l)] = w * k + sigma[j]
                        targets[(w * k + sigma[j], l)] = v * k + j
                elif v == w:
                    pts = list(range(k))
                    rng.shuffle(pts)
                    inv = list(range(k))
                    for j in range(rng.randint(0, k // 2)):
                        p, q = pts[2 * j], pts[2 * j + 1]
                        inv[p], inv[q] = q, p
                    for j in range(k):
                        targets[(v * k + j, l)] = v * k + inv[j]
        g1 = from_transitions(A, g2.n * k, targets, root=g2.root * k)
        if g1.is_connected():
            return g1


def index_oracle(G1, H2gens):
    """[H2:H1] as the orbit of the root of G1 under the H2 generators."""
    A = G1.alphabet
    words = list(H2gens) + [invert(A, h) for h in H2gens]
    seen, todo = {G1.root}, [G1.root]
    while todo:
        v = todo.pop()
        for h in words:
            w = G1.follow(v, h)
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return len(seen)


def test_criterion_5_coverings(criterion):
    with criterion(5, "covering suite") as rec:
        rng = random.Random(5)
        chains = 0
        for i in range(25):
            A = [XA, F2, XAB][i % 3]
            k = 2 + i % 5
            _, t2 = random_coset_table(A, rng, max_vertices=8)
            cover = random_cover(t2.to_graph(), k, rng)
            H1 = reconstruct_subgroup(cover)
            H2 = reconstruct_subgroup(t2.to_graph())
            G1 = coset_closure(SubgroupPresentation(A, H1)).to_graph()
            G2 = coset_closure(SubgroupPresentation(A, H2)).to_graph()
            assert all(G2.follow(G2.root, h) == G2.root for h in H1), "H1 is not inside H2"
            index = index_oracle(G1, H2)
            assert index == k == G1.n // G2.n
            phis = x_cover_find(G1, G2, all_images=True)
            assert phis and any(p.vmap[G1.root] == G2.root for p in phis)
            for phi in phis:
                assert phi.is_valid(labeled=True)
                assert phi.degree == index
                assert {len(f) for f in phi.fibers()} == {index}
            chains += 1
        pairs = 0
        for make in (fig3_pair, fig4_pair, fig5_pair):
            for W in (8, 16, 32):
                phi = make(W).phi
                cert = qi_certificate(phi)
                n = len(interior(phi.source))
                assert cert.checked == n * (n + 1) // 2
                assert cert.ok, cert.violations[:3]
                pairs += cert.checked
        rec.detail = f"{chains} chains (index 2-6), QI inequality on {pairs} interior pairs"


def test_criterion_6_ends(criterion):
    with criterion(6, "ends suite") as rec:
        expected = {"fig3-top": 4, "fig3-base": 2, "fig4-top": 2, "fig4-base": 1, "line": 2}
        got = {}
        for name, want in expected.items():
            est = ends_estimate(window_family(name), [2, 3, 4], width=lambda r: 6 * r)
            assert est.per_radius == {2: want, 3: want, 4: want}, (name, est.per_radius)
            got[name] = est.count
        rec.detail = ", ".join(f"{k}={v}" for k, v in got.items())


def test_criterion_7_schreierize(criterion):
    with criterion(7, "schreierize suite") as rec:
        rng = random.Random(7)
        graphs = [configuration_model(rng.randint(1, 50), 4, rng) for _ in range(50)] + [plain_petersen()]
        for g in graphs:
            lab = schreierize(g)
            assert lab.check_wellformed() == [] and lab.is_complete() and lab.is_deterministic()
            assert plain_from_labeled(strip_labels(lab)).edge_multiset() == g.edge_multiset()
        bad = no_one_factor_cubic()
        assert bad.n <= 20 and not has_perfect_matching(bad.n, bad.edges)
        assert perfect_matching(bad) is None
        with pytest.raises(NotSchreier):
            schreierize(bad)
        rec.detail = f"{len(graphs)} graphs labelled and stripped back; no-1-factor graph rejected"


ORBIT_GROUPS = [
    ("S3", ["(1,2)", "(1,2,3)"], 3),
    ("Z6", ["(1,2,3,4,5,6)"], 6),
    ("D4", ["(1,2,3,4)", "(1,3)"], 4),
    ("D5", ["(1,2,3,4,5)", "(2,5)(3,4)"], 5),
    ("A4", ["(1,2,3)", "(2,3,4)"], 4),
    ("S4", ["(1,2)", "(1,2,3,4)"], 4),
    ("A5", ["(1,2,3)", "(1,2,3,4,5)"], 5),
]


def test_criterion_8_orbit_counts(criterion):
    with criterion(8, "orbit-count suite") as rec:
        rng = random.Random(8)
        triples = 0
        for name, cycles, n in ORBIT_GROUPS:
            X = [parse_cycles(c, n) for c in cycles]
            elems = group_elements(X)
            assert len(elems) <= 60
            subs = all_subgroups(elems)
            chosen = subs if len(subs) <= 12 else rng.sample(subs, 6) + [subs[0]]
            for K in chosen:
                g = schreier_of(X, K, elems)
                N = normalizer(sorted(K), X)
                blocks = x_orbits(g)
                assert len(blocks) == len(elems) // len(N)
                assert {len(b) for b in blocks} == {len(N) // len(K)}
                for orbit in orbit_partition(g):
                    assert set(orbit) == set().union(*(b for b in blocks if set(b) & set(orbit)))
                triples += 1
        assert triples >= 10
        rec.detail = f"{triples} (A, K, X) triples over {len(ORBIT_GROUPS)} groups"


def test_criterion_9_constructions(criterion):
    with criterion(9, "generating-system constructions") as rec:
        graphs = 0
        for cycles, n in ((["(1,2)", "(1,2,3)"], 3), (["(1,2,3)", "(2,3,4)"], 4)):
            gens = [parse_cycles(c, n) for c in cycles]
            elems = group_elements(gens)
            _, X = full_generating_system(gens)
            census = Counter(g.order() for g in elems[1:])
            assert len(X) == census[2] + sum(m for o, m in census.items() if o > 2) // 2
            for H in all_subgroups(elems):
                assert is_transitive(schreier_of(X, H, elems)) is Verdict.TRUE
                graphs += 1
        rng = random.Random(9)
        avoided = 0
        while avoided < 12:
            _, cycles, n = rng.choice(ORBIT_GROUPS[:6])
            elems = group_elements([parse_cycles(c, n) for c in cycles])
            X = [rng.choice(elems) for _ in range(rng.randint(2, 3))]
            if set(group_elements(X)) != set(elems):
                continue
            H = rng.choice([S for S in all_subgroups(elems) if len(S) < len(elems)])
            Y = avoid_subgroup_gens(X, H)
            assert len(Y) == len(X) and not set(Y) & set(H)
            assert set(group_elements(Y)) == set(elems)
            avoided += 1
        for p in (2, 3, 5, 7):
            gen = parse_cycles("(" + ",".join(map(str, range(1, p + 1))) + ")", p)
            assert len(all_subgroups(group_elements([gen]))) == 2
            assert strong_simple_scan([gen], 2).exhausted
        S3 = [parse_cycles("(1,2)", 3), parse_cycles("(1,2,3)", 3)]
        H = frozenset(group_elements([S3[0]]))
        res = strong_simple_scan(S3, 3, subgroups=[H])
        assert res.witness is not None
        Xw, Hw = res.witness
        assert len(orbit_partition(schreier_of(Xw, Hw))) == 1
        rec.detail = (
            f"{graphs} full-system graphs transitive, {avoided} avoiding systems, "
            f"Z/p strongly simple for p in 2,3,5,7, S3 witness of size {len(Xw)}"
        )
