"""Built-in graphs and group constructions.

Window constructors return finite pieces of periodic infinite graphs; the
vertices where the piece was cut off are marked as boundary.  Each
constructor names its vertices so they can be compared against drawings.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

from .cover import CoveringMap
from .factorize import PlainGraph
from .isoauto import orbit_partition
from .lgraph import LabeledGraph
from .perms import (
    PermAction,
    Permutation,
    all_subgroups,
    coset_action,
    group_elements,
    parse_cycles,
)
from .schreier import SubgroupPresentation, coset_closure, from_action
from .words import Alphabet, Letter, MalformedInput

F2 = Alphabet.of(["x", "y"])
XA = Alphabet.of(["x"], ["a"])
X, Y = Letter(0, 1), Letter(1, 1)
A_ = Letter(1, 1)  # the involution in XA


class _Builder:
    """Named-vertex helper for hand-built graphs."""

    def __init__(self, alphabet: Alphabet):
        self.g = LabeledGraph(0, alphabet)
        self.ids: dict = {}
        self.keys: list = []

    def v(self, key) -> int:
        if key not in self.ids:
            self.ids[key] = self.g.add_vertex()
            self.keys.append(key)
        return self.ids[key]

    def edge(self, a, b, letter: Letter) -> None:
        self.g.add_edge(self.v(a), self.v(b), letter)

    def loop(self, a, letter: Letter) -> None:
        self.g.add_degenerate_loop(self.v(a), letter)

    def done(self, root, boundary=()) -> LabeledGraph:
        self.g.names = [_fmt(k) for k in self.keys]
        self.g.root = self.ids[root]
        self.g.boundary = {self.ids[b] for b in boundary}
        return self.g


def _fmt(key) -> str:
    if isinstance(key, tuple):
        return "(" + ",".join(map(str, key)) + ")"
    return str(key)


# -- Petersen ------------------------------------------------------------------


def petersen_schreier() -> LabeledGraph:
    """Petersen graph over <x, a | a^2>.

    Ids 0..4 are v1..v5, ids 5..9 are w1..w5.  x runs along the outer cycle
    v1 v3 v5 v2 v4 and the inner cycle w1 w2 w3 w4 w5; a joins vi and wi.
    Root v1.
    """
    b = _Builder(XA)
    for i in range(1, 6):
        b.v(f"v{i}")
    for i in range(1, 6):
        b.v(f"w{i}")
    outer = [1, 3, 5, 2, 4]
    for i in range(5):
        b.edge(f"v{outer[i]}", f"v{outer[(i + 1) % 5]}", X)
        b.edge(f"w{i + 1}", f"w{(i + 1) % 5 + 1}", X)
    for i in range(1, 6):
        b.edge(f"v{i}", f"w{i}", A_)
    return b.done("v1")


PETERSEN_BETA = {
    "v1": "w1", "v2": "w3", "v3": "w5", "v4": "w2", "v5": "w4",
    "w1": "v1", "w2": "v3", "w3": "v5", "w4": "v2", "w5": "v4",
}


def petersen_beta(g: Optional[LabeledGraph] = None):
    """The explicit root-moving automorphism v1 -> w1 as an IsoResult."""
    from .isoauto import iso_from_vertex_map

    g = g or petersen_schreier()
    idx = {name: i for i, name in enumerate(g.names)}
    vmap = {idx[a]: idx[b] for a, b in PETERSEN_BETA.items()}
    return iso_from_vertex_map(g, g, vmap)


# -- figure windows -----------------------------------------------------------------


def fig2_window(W: int) -> LabeledGraph:
    """Non-transitive graph over <x, a | a^2>, periods k in [-W, W].

    Each period is A_k -x-> B_k -x-> C_k -x-> D_k -x-> A_{k+1}; a joins B_k
    and C_k; A_k and D_k carry degenerate a-loops.  Root B_0.
    """
    if W < 1:
        raise MalformedInput("window must be >= 1")
    b = _Builder(XA)
    for k in range(-W, W + 1):
        A, B, C, D = (f"A{k}", f"B{k}", f"C{k}", f"D{k}")
        b.edge(A, B, X)
        b.edge(B, C, X)
        b.edge(C, D, X)
        if k < W:
            b.edge(D, f"A{k + 1}", X)
        b.edge(B, C, A_)
        b.loop(A, A_)
        b.loop(D, A_)
    return b.done("B0", boundary=[f"A{-W}", f"D{W}"])


@dataclass
class FigurePair:
    top: LabeledGraph
    base: LabeledGraph
    phi: CoveringMap
    preimages: list  # fiber over the base root
    top_keys: list
    base_keys: list


def _pair(t: _Builder, b: _Builder, f) -> FigurePair:
    """Covering from an explicit vertex rule; edges follow the labels."""
    top, base = t.g, b.g
    vmap = {t.ids[k]: b.ids[f(k)] for k in t.keys}
    emap = {e: base.out_edge(vmap[top.src[e]], top.label[e]) for e in range(top.num_edges)}
    phi = CoveringMap(top, base, vmap, emap)
    problems = phi.problems(labeled=True)
    if problems:
        raise AssertionError(f"figure covering broken: {problems[:3]}")
    return FigurePair(top, base, phi, phi.fibers()[base.root], list(t.keys), list(b.keys))


def fig3_pair(W: int) -> FigurePair:
    """Degree-2 X-covering over the free group on x, y.

    Top: rows r = 0, 1 of vertices (i, r), i in [-W, W], x along each row,
    y a loop everywhere except at i = 0 where y swaps (0,0) and (0,1).
    Base: vertices (i,), x along the row, y loops.  phi(i, r) = i.
    """
    if W < 1:
        raise MalformedInput("window must be >= 1")
    t = _Builder(F2)
    for r in (0, 1):
        for i in range(-W, W + 1):
            t.v((i, r))
    for r in (0, 1):
        for i in range(-W, W):
            t.edge((i, r), (i + 1, r), X)
        for i in range(-W, W + 1):
            if i != 0:
                t.edge((i, r), (i, r), Y)
    t.edge((0, 0), (0, 1), Y)
    t.edge((0, 1), (0, 0), Y)
    t.done((0, 0), boundary=[(s, r) for s in (-W, W) for r in (0, 1)])
    b = _Builder(F2)
    for i in range(-W, W + 1):
        b.v((i,))
    for i in range(-W, W):
        b.edge((i,), (i + 1,), X)
    for i in range(-W, W + 1):
        b.edge((i,), (i,), Y)
    b.done((0,), boundary=[(-W,), (W,)])
    return _pair(t, b, lambda k: (k[0],))


def fig4_pair(W: int) -> FigurePair:
    """Degree-2 X-covering over <x, a | a^2> folding a ladder in half.

    Top: ladder (i, r), i in [-W, W-1]; row 0 has x: (i,0) -> (i-1,0), row 1
    has x: (i-1,1) -> (i,1), a joins (i,0) and (i,1).  Base: the part i >= 0
    with an extra x-edge (0,0) -> (0,1).  phi(i, r) = (i, r) for i >= 0 and
    (-1-i, 1-r) otherwise.
    """
    if W < 1:
        raise MalformedInput("window must be >= 1")
    t = _Builder(XA)
    for i in range(-W, W):
        for r in (0, 1):
            t.v((i, r))
    for i in range(-W, W):
        if i > -W:
            t.edge((i, 0), (i - 1, 0), X)
            t.edge((i - 1, 1), (i, 1), X)
        t.edge((i, 0), (i, 1), A_)
    t.done((0, 0), boundary=[(s, r) for s in (-W, W - 1) for r in (0, 1)])
    b = _Builder(XA)
    for i in range(W):
        for r in (0, 1):
            b.v((i, r))
    for i in range(W):
        if i > 0:
            b.edge((i, 0), (i - 1, 0), X)
            b.edge((i - 1, 1), (i, 1), X)
        b.edge((i, 0), (i, 1), A_)
    b.edge((0, 0), (0, 1), X)
    b.done((0, 0), boundary=[(W - 1, 0), (W - 1, 1)])
    return _pair(t, b, lambda k: (k[0], k[1]) if k[0] >= 0 else (-1 - k[0], 1 - k[1]))


_SIGMA = {"00": "11", "11": "00", "01": "10", "10": "01"}


def fig5_pair(W: int) -> FigurePair:
    """Degree-2 X-covering over the free group on x, y with a deck involution.

    Vertices (i, s), s in 00 01 11 10; y cycles 00 -> 01 -> 11 -> 10 -> 00.
    x: rows 00 and 10 step i-1 -> i, rows 01 and 11 step i -> i-1.  Top
    covers i in [-W, W-1]; base covers i in [0, W-1] plus x-edges
    (0,11) -> (0,00) and (0,01) -> (0,10).  phi folds i < 0 onto -1-i and
    swaps 00 <-> 11, 01 <-> 10.
    """
    if W < 1:
        raise MalformedInput("window must be >= 1")
    states = ["00", "01", "11", "10"]

    def build(lo: int, hi: int, extra: bool) -> _Builder:
        b = _Builder(F2)
        for i in range(lo, hi):
            for s in states:
                b.v((i, s))
        for i in range(lo, hi):
            for s, s2 in zip(states, states[1:] + states[:1]):
                b.edge((i, s), (i, s2), Y)
            if i > lo:
                b.edge((i - 1, "00"), (i, "00"), X)
                b.edge((i - 1, "10"), (i, "10"), X)
                b.edge((i, "01"), (i - 1, "01"), X)
                b.edge((i, "11"), (i - 1, "11"), X)
        if extra:
            b.edge((0, "11"), (0, "00"), X)
            b.edge((0, "01"), (0, "10"), X)
        ends = [hi - 1] if extra else [lo, hi - 1]
        b.done((0, "00"), boundary=[(i, s) for i in ends for s in states])
        return b

    return _pair(build(-W, W, False), build(0, W, True), lambda k: k if k[0] >= 0 else (-1 - k[0], _SIGMA[k[1]]))


def fig5_deck(pair: FigurePair) -> dict:
    """The involution (i, s) -> (-1-i, sigma s) of the fig-5 top window."""
    tid = {k: i for i, k in enumerate(pair.top_keys)}
    return {tid[k]: tid[(-1 - k[0], _SIGMA[k[1]])] for k in pair.top_keys}


def line_window(W: int) -> LabeledGraph:
    """Bi-infinite x-line cut to [-W, W]; root 0."""
    b = _Builder(Alphabet.of(["x"]))
    for i in range(-W, W + 1):
        b.v(i)
    for i in range(-W, W):
        b.edge(i, i + 1, X)
    return b.done(0, boundary=[-W, W])


def window_family(name: str):
    """``W -> (graph, center)`` for the ends estimator."""
    table = {
        "line": lambda W: line_window(W),
        "fig3-top": lambda W: fig3_pair(W).top,
        "fig3-base": lambda W: fig3_pair(W).base,
        "fig4-top": lambda W: fig4_pair(W).top,
        "fig4-base": lambda W: fig4_pair(W).base,
        "fig5-top": lambda W: fig5_pair(W).top,
        "fig5-base": lambda W: fig5_pair(W).base,
    }
    if name not in table:
        raise MalformedInput(f"unknown window family {name!r}; choose from {sorted(table)}")
    build = table[name]

    def family(W: int):
        g = build(W)
        return g, g.root

    return family


# -- alternating groups ------------------------------------------------------------


def a_n(n: int) -> Permutation:
    """(1, 3, 4, ..., n, 2)."""
    return parse_cycles("(" + ",".join(map(str, [1] + list(range(3, n + 1)) + [2])) + ")", n)


def b_n(n: int) -> Permutation:
    """(2, 4, ..., n-1, 1, n, n-2, ..., 5, 3) for odd n."""
    pts = list(range(2, n, 2)) + [1] + list(range(n, 2, -2))
    return parse_cycles("(" + ",".join(map(str, pts)) + ")", n)


def an_hn(n: int) -> tuple[PermAction, LabeledGraph]:
    """Action of <a_n, b_n> on n points; root n (the coset of the stabiliser of n)."""
    if not (5 <= n <= 12) or n % 2 == 0:
        raise MalformedInput("an_hn needs odd n in 5..12")
    act = PermAction(Alphabet.of(["a", "b"]), [a_n(n), b_n(n)])
    return act, from_action(act, n)


def c_i(n: int, i: int) -> Permutation:
    pts = [k for k in range(1, n + 1) if k != i]
    return parse_cycles("(" + ",".join(map(str, pts)) + ")", n)


def an_hn_even(n: int) -> tuple[PermAction, LabeledGraph]:
    """Action of the n cycles c_i on n points; root n."""
    if not (6 <= n <= 12) or n % 2:
        raise MalformedInput("an_hn_even needs even n in 6..12")
    act = PermAction(Alphabet.of([f"c{i}" for i in range(1, n + 1)]), [c_i(n, i) for i in range(1, n + 1)])
    return act, from_action(act, n)


def circulant(n: int, jumps: Sequence[int] = (1, 2)) -> LabeledGraph:
    """C_n with i -> i+j for each jump j (labelled x1, x2, ...)."""
    A = Alphabet.of([f"x{k + 1}" for k in range(len(jumps))])
    g = LabeledGraph(n, A)
    for k, j in enumerate(jumps):
        for i in range(n):
            g.add_edge(i, (i + j) % n, Letter(k, 1))
    g.root = 0
    return g


def no_one_factor_cubic() -> PlainGraph:
    """16-vertex cubic graph without a perfect matching.

    Vertex 0 is joined to three gadgets; a gadget is K4 minus an edge on
    q1..q4 (q1 q2 missing) plus p adjacent to q1, q2 and the centre.
    """
    edges = []
    for k in range(3):
        p, q1, q2, q3, q4 = (1 + 5 * k + j for j in range(5))
        edges += [(0, p), (p, q1), (p, q2), (q1, q3), (q1, q4), (q2, q3), (q2, q4), (q3, q4)]
    return PlainGraph(16, edges)


def plain_petersen() -> PlainGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return PlainGraph(10, outer + inner + spokes)


# -- generating systems ----------------------------------------------------------


def order_census(elements: Sequence[Permutation]) -> Counter:
    return Counter(g.order() for g in elements)


def alphabet_for(gens: Sequence[Permutation]) -> Alphabet:
    """Involutions (and the identity) become order-2 symbols, the rest infinite."""
    inf = [f"x{i + 1}" for i, g in enumerate(gens) if not (g * g).is_identity()]
    two = [f"a{i + 1}" for i, g in enumerate(gens) if (g * g).is_identity()]
    return Alphabet.of(inf, two)


def ordered_for(gens: Sequence[Permutation]) -> list[Permutation]:
    """gens reordered to match :func:`alphabet_for` (infinite first)."""
    return [g for g in gens if not (g * g).is_identity()] + [g for g in gens if (g * g).is_identity()]


def schreier_of(gens: Sequence[Permutation], H, group=None) -> LabeledGraph:
    """Schreier graph of H in <gens>, with gens as the generating system."""
    gens = ordered_for(gens)
    act = coset_action(alphabet_for(gens), gens, H, group)
    return from_action(act, 1)


def full_generating_system(groupgens: Sequence[Permutation], bound: int = 1000) -> tuple[Alphabet, list[Permutation]]:
    """X = involutions plus one element from each pair {g, g^-1}; |X| = d(A)."""
    elems = group_elements(groupgens, limit=bound)
    S = [g for g in elems[1:] if (g * g).is_identity()]
    T = []
    seen = set(S)
    for g in sorted(elems[1:]):
        if g in seen:
            continue
        seen |= {g, g.inverse()}
        T.append(g)
    A = Alphabet.of([f"t{i + 1}" for i in range(len(T))], [f"s{i + 1}" for i in range(len(S))])
    return A, T + S


def avoid_subgroup_gens(X: Sequence[Permutation], H) -> list[Permutation]:
    """Generating system of the same size avoiding H.

    H-members first; x0 the first non-member; members x become x * x0.
    """
    H = set(H)
    X = list(X)
    inside = [x for x in X if x in H]
    outside = [x for x in X if x not in H]
    if not outside:
        raise ValueError("every generator lies in H, so H is the whole group")
    x0 = outside[0]
    Y = outside + [x * x0 for x in inside]
    if set(group_elements(Y)) != set(group_elements(X)):
        raise AssertionError("rewritten system does not generate the same group")
    return Y


@dataclass
class ScanResult:
    witness: Optional[tuple]  # (X, H) with a transitive Schreier graph
    non_transitive: Optional[tuple]
    systems: int
    subgroups: int

    @property
    def exhausted(self) -> bool:
        return self.witness is None


def generating_systems(elements: Sequence[Permutation], size: int):
    """Multisets of ``size`` elements (identity allowed) that generate the group."""
    full = set(elements)
    for X in itertools.combinations_with_replacement(sorted(elements), size):
        if set(group_elements(list(X))) == full:
            yield list(X)


def strong_simple_scan(groupgens: Sequence[Permutation], max_gen_size: int, subgroups=None, bound: int = 60) -> ScanResult:
    """Search generating systems up to ``max_gen_size`` and proper nontrivial
    subgroups for a transitive Schreier graph.  No witness: strongly simple
    at that size.
    """
    elems = group_elements(groupgens, limit=bound)
    if subgroups is None:
        subgroups = [S for S in all_subgroups(elems) if 1 < len(S) < len(elems)]
    res = ScanResult(None, None, 0, len(subgroups))
    if not subgroups:
        return res
    for k in range(1, max_gen_size + 1):
        for X in generating_systems(elems, k):
            res.systems += 1
            for H in subgroups:
                g = schreier_of(X, H, elems)
                transitive = len(orbit_partition(g)) == 1
                if transitive and res.witness is None:
                    res.witness = (X, H)
                if not transitive and res.non_transitive is None:
                    res.non_transitive = (X, H)
                if res.witness and res.non_transitive:
                    return res
    return res


# -- random instances -------------------------------------------------------------


def random_word(A: Alphabet, length: int, rng: random.Random) -> tuple:
    from .words import extensions

    w: tuple = ()
    for _ in range(length):
        w = w + (rng.choice(extensions(A, w)),)
    return w


def random_coset_table(A: Alphabet, rng: random.Random, max_vertices: int = 40, tries: int = 200):
    """A finite-index subgroup from random short words; returns (presentation, table)."""
    for _ in range(tries):
        words = [random_word(A, rng.randint(1, 5), rng) for _ in range(rng.randint(1, 4))]
        H = SubgroupPresentation(A, words)
        table = coset_closure(H, max_vertices=max_vertices * 4)
        if table.complete and table.size <= max_vertices:
            return H, table
    raise RuntimeError("no finite-index subgroup found")


def random_permutation_graph(A: Alphabet, n: int, rng: random.Random, max_tries: int = 100) -> LabeledGraph:
    """Connected Schreier graph from random permutations (involutions for order-2 symbols)."""
    for _ in range(max_tries):
        perms = []
        for i in range(len(A)):
            if A.is_order2(i):
                pts = list(range(n))
                rng.shuffle(pts)
                img = list(range(n))
                k = rng.randint(0, n // 2)
                for j in range(k):
                    a, b = pts[2 * j], pts[2 * j + 1]
                    img[a], img[b] = b, a
                perms.append(Permutation(img))
            else:
                img = list(range(n))
                rng.shuffle(img)
                perms.append(Permutation(img))
        g = from_action(PermAction(A, perms), 1)
        if g.is_connected():
            return g
    raise RuntimeError("could not draw a connected graph")
