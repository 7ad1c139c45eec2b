"""Coverings between Schreier graphs, fibers, QI constants and ends.

Windows (graphs with boundary vertices) are handled throughout: stars at
boundary vertices may be partial, so star maps there are only required
to be injective.
"""

from __future__ import annotations

import random
import sys
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .isoauto import backtrack
from .lgraph import LabeledGraph, PreconditionError


@dataclass
class CoveringMap:
    source: LabeledGraph
    target: LabeledGraph
    vmap: dict
    emap: dict

    def problems(self, labeled: bool = False) -> list[str]:
        """Violated covering invariants (empty list when valid)."""
        s, t = self.source, self.target
        out = []
        if len(self.vmap) != s.n:
            out.append("vertex map is not total")
        for e in range(s.num_edges):
            if e not in self.emap:
                out.append(f"edge {e} unmapped")
                continue
            f = self.emap[e]
            if t.src[f] != self.vmap.get(s.src[e]):
                out.append(f"edge {e}: source not preserved")
            if self.emap.get(s.inv[e]) != t.inv[f]:
                out.append(f"edge {e}: inverse not preserved")
            if labeled and s.label[e] != t.label[f]:
                out.append(f"edge {e}: label not preserved")
        if out:
            return out
        for v in range(s.n):
            imgs = [self.emap[e] for e in s.star(v)]
            if len(set(imgs)) != len(imgs):
                out.append(f"star of {v} not injective")
            elif v not in s.boundary and self.vmap[v] not in t.boundary:
                if sorted(imgs) != sorted(t.star(self.vmap[v])):
                    out.append(f"star of {v} not onto")
        sizes = {len(f) for f in self.fibers()}
        if len(sizes) > 1:
            out.append(f"fiber sizes differ: {sorted(sizes)}")
        return out

    def is_valid(self, labeled: bool = False) -> bool:
        return not self.problems(labeled)

    def fibers(self) -> list[list[int]]:
        out = [[] for _ in range(self.target.n)]
        for v, w in sorted(self.vmap.items()):
            out[w].append(v)
        return out

    @property
    def degree(self) -> int:
        sizes = {len(f) for f in self.fibers()}
        if len(sizes) != 1:
            raise PreconditionError("fibers have different sizes")
        return sizes.pop()


# -- X-coverings -------------------------------------------------------------


def _x_attempt(g1: LabeledGraph, r1: int, g2: LabeledGraph, v0: int) -> Optional[CoveringMap]:
    letters = g1.alphabet.letters()
    vmap, emap = {r1: v0}, {}
    q = deque([r1])
    while q:
        u = q.popleft()
        v = vmap[u]
        for l in letters:
            e1 = g1.out_edge(u, l)
            if e1 is None:
                continue
            e2 = g2.out_edge(v, l)
            if e2 is None:
                if v in g2.boundary:
                    continue
                return None
            if g1.is_degenerate(e1) and not g2.is_degenerate(e2):
                return None
            w1, w2 = g1.dst(e1), g2.dst(e2)
            if w1 not in vmap:
                vmap[w1] = w2
                q.append(w1)
            elif vmap[w1] != w2:
                return None
            emap[e1] = e2
    if len(vmap) != g1.n:
        return None
    phi = CoveringMap(g1, g2, vmap, emap)
    return phi if phi.is_valid(labeled=True) else None


def x_cover_find(g1: LabeledGraph, g2: LabeledGraph, root1: Optional[int] = None, all_images: bool = False):
    """Label-preserving covering g1 -> g2; root images are tried in id order.

    Returns the first success, or every success when ``all_images``.
    """
    if g1.alphabet != g2.alphabet:
        raise PreconditionError("alphabets differ")
    r1 = g1.root if root1 is None else root1
    found = []
    for v0 in range(g2.n):
        phi = _x_attempt(g1, r1, g2, v0)
        if phi is not None:
            if not all_images:
                return phi
            found.append(phi)
    return found if all_images else None


# -- plain coverings -----------------------------------------------------------


def plain_cover_find(g1: LabeledGraph, g2: LabeledGraph) -> Optional[CoveringMap]:
    """Label-blind covering of finite graphs by backtracking on star bijections."""
    if g1.n == 0 or g2.n == 0 or g1.boundary or g2.boundary:
        raise PreconditionError("plain_cover_find needs finite non-empty graphs")
    if g1.n % g2.n:
        return None
    if sorted({g1.degree(v) for v in range(g1.n)}) != sorted({g2.degree(v) for v in range(g2.n)}):
        return None
    order = _bfs_order(g1, 0)
    if len(order) != g1.n:
        raise PreconditionError("source graph is not connected")

    vmap: dict = {}
    emap: dict = {}

    def set_edge(e: int, f: int, trail: list) -> bool:
        ie, jf = g1.inv[e], g2.inv[f]
        if g1.is_degenerate(e) and not g2.is_degenerate(f):
            return False
        for a, b in ((e, f), (ie, jf)):
            if a in emap:
                if emap[a] != b:
                    return False
                continue
            emap[a] = b
            trail.append(("e", a))
        w = g1.dst(e)
        if w in vmap:
            return vmap[w] == g2.dst(f)
        vmap[w] = g2.dst(f)
        trail.append(("v", w))
        return True

    def undo(trail: list) -> None:
        for kind, k in reversed(trail):
            (emap if kind == "e" else vmap).pop(k)

    def vertex(i: int) -> bool:
        if i == len(order):
            return True
        u = order[i]
        v = vmap[u]
        if g1.degree(u) != g2.degree(v):
            return False
        done = [emap[e] for e in g1.star(u) if e in emap]
        if len(set(done)) != len(done) or not set(done) <= set(g2.star(v)):
            return False
        pending = [e for e in g1.star(u) if e not in emap]
        return edges(i, u, v, pending, 0, set(done))

    def edges(i: int, u: int, v: int, pending: list, j: int, taken: set) -> bool:
        while j < len(pending) and pending[j] in emap:
            j += 1
        if j == len(pending):
            return vertex(i + 1)
        e = pending[j]
        ie = g1.inv[e]
        for f in g2.star(v):
            if f in taken:
                continue
            trail: list = []
            ok = set_edge(e, f, trail)
            new = {f}
            if ok and ie != e and g1.src[ie] == u:
                # a loop at u uses two star slots
                new.add(emap[ie])
                ok = len(new) == 2 and not (new & taken)
            if ok and edges(i, u, v, pending, j + 1, taken | new):
                return True
            undo(trail)
        return False

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 8 * g1.num_edges + 200))
    try:
        return _first_cover(g1, g2, order, vmap, emap, vertex)
    finally:
        sys.setrecursionlimit(old)


def _first_cover(g1, g2, order, vmap, emap, vertex) -> Optional[CoveringMap]:
    for v0 in range(g2.n):
        vmap.clear()
        emap.clear()
        vmap[order[0]] = v0
        if vertex(0):
            phi = CoveringMap(g1, g2, dict(vmap), dict(emap))
            if phi.is_valid():
                return phi
    return None


def _bfs_order(g: LabeledGraph, root: int) -> list[int]:
    d = g.bfs_distances(root)
    return sorted((v for v in range(g.n) if d[v] is not None), key=lambda v: (d[v], v))


# -- metric --------------------------------------------------------------------


def fiber_diameter(phi: CoveringMap, w: int, dist: Optional[list] = None) -> int:
    fib = phi.fibers()[w]
    if len(fib) < 2:
        return 0
    best = 0
    for v in fib:
        d = dist[v] if dist is not None else phi.source.bfs_distances(v)
        for u in fib:
            if d[u] is None:
                raise PreconditionError("fiber spans several components")
            best = max(best, d[u])
    return best


def max_fiber_diameter(phi: CoveringMap) -> int:
    dist = phi.source.all_distances()
    return max((fiber_diameter(phi, w, dist) for w in range(phi.target.n)), default=0)


@dataclass
class QICertificate:
    A: int
    B: int
    C: int
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"A": self.A, "B": self.B, "C": self.C}


def interior(g: LabeledGraph) -> list[int]:
    return [v for v in range(g.n) if v not in g.boundary]


def qi_certificate(phi: CoveringMap, sample: Optional[int] = None, seed: int = 0) -> QICertificate:
    """Check ``d2(phi v, phi w) <= d1(v, w) <= d2(phi v, phi w) + B`` on interior pairs.

    ``B`` is the largest fiber diameter measured in the source.
    """
    s, t = phi.source, phi.target
    B = max_fiber_diameter(phi)
    cert = QICertificate(1, B, 0)
    vs = interior(s)
    pairs = [(v, w) for i, v in enumerate(vs) for w in vs[i:]]
    if sample is not None and len(pairs) > sample:
        pairs = random.Random(seed).sample(pairs, sample)
    d1: dict = {}
    d2: dict = {}
    for v, w in pairs:
        if v not in d1:
            d1[v] = s.bfs_distances(v)
        pv = phi.vmap[v]
        if pv not in d2:
            d2[pv] = t.bfs_distances(pv)
        a, b = d2[pv][phi.vmap[w]], d1[v][w]
        cert.checked += 1
        if a is None or b is None or not (a <= b <= a + B):
            cert.violations.append((v, w, b, a))
    return cert


# -- ends ----------------------------------------------------------------------


@dataclass
class EndsEstimate:
    count: Optional[int]  # None when the counts did not stabilise
    per_radius: dict

    def to_json(self) -> dict:
        return {"ends": self.count if self.count is not None else "unknown", "per_radius": self.per_radius}


def ends_in_window(g: LabeledGraph, center: int, r: int) -> int:
    """Components of g minus the closed r-ball that reach the window boundary."""
    d = g.bfs_distances(center)
    removed = [v for v in range(g.n) if d[v] is not None and d[v] <= r]
    return sum(1 for comp in g.components(removed) if g.boundary.intersection(comp))


def ends_estimate(family: Callable[[int], tuple], r_list, width: Callable[[int], int] = lambda r: 6 * r) -> EndsEstimate:
    """``family(W) -> (graph, center)``; windows of width ``width(r)`` per radius."""
    per = {}
    for r in r_list:
        g, center = family(width(r))
        per[r] = ends_in_window(g, center, r)
    counts = set(per.values())
    return EndsEstimate(counts.pop() if len(counts) == 1 else None, per)


# -- lifting -------------------------------------------------------------------


def _nbr_counts(g: LabeledGraph, v: int) -> Counter:
    return Counter(g.dst(e) for e in g.star(v) if g.dst(e) != v)


def _loop_sig(g: LabeledGraph, v: int) -> tuple:
    deg = sum(1 for e in g.star(v) if g.is_degenerate(e))
    return (g.degree(v), deg, v in g.boundary)


def lift_automorphism(phi: CoveringMap, psi: dict, all_lifts: bool = False):
    """Automorphisms ``t`` of the source with ``phi(t(v)) = psi(phi(v))``.

    Vertex-level backtracking inside fibers; multiplicities of parallel
    edges and loops must match, boundary goes to boundary.  Returns the
    first lift (or None), or the list of all lifts with ``all_lifts``.
    """
    s = phi.source
    fibers = phi.fibers()
    order = _bfs_order(s, 0)
    for v in range(s.n):
        if v not in order:
            order.append(v)
    nbr = [_nbr_counts(s, v) for v in range(s.n)]
    sig = [_loop_sig(s, v) for v in range(s.n)]
    fwd: dict = {}
    bwd: dict = {}
    found = []

    def cands(u: int) -> list[int]:
        return [x for x in fibers[psi[phi.vmap[u]]] if x not in bwd and sig[x] == sig[u]]

    def fits(u: int, x: int) -> bool:
        for w, m in nbr[u].items():
            if w in fwd and nbr[x].get(fwd[w], 0) != m:
                return False
        for y, m in nbr[x].items():
            if y in bwd and nbr[u].get(bwd[y], 0) != m:
                return False
        return True

    for sol in backtrack(order, lambda i, u: cands(u), fits, fwd, bwd):
        found.append(dict(sol))
        if not all_lifts:
            break
    if all_lifts:
        return found
    return found[0] if found else None
