"""Rooted isomorphisms (labeled and unlabeled), orbits and transitivity.

Graphs with boundary vertices are windows on an infinite graph.  On those
every positive answer is only "true up to radius R" and is reported as
``Verdict.UNKNOWN``; a negative answer found inside the safe radius is a
genuine ``Verdict.FALSE``.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .lgraph import LabeledGraph, PreconditionError
from .schreier import bfs_renumber


class Verdict(str, Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown-at-R"

    def __bool__(self) -> bool:
        return self is Verdict.TRUE

    @staticmethod
    def combine(verdicts) -> "Verdict":
        vs = list(verdicts)
        if Verdict.FALSE in vs:
            return Verdict.FALSE
        if Verdict.UNKNOWN in vs:
            return Verdict.UNKNOWN
        return Verdict.TRUE


@dataclass
class IsoResult:
    vertex_map: dict
    edge_map: dict
    radius_limited: bool = False
    radius: Optional[int] = None

    @property
    def verdict(self) -> Verdict:
        return Verdict.UNKNOWN if self.radius_limited else Verdict.TRUE


def _verdict(res: Optional[IsoResult]) -> Verdict:
    return Verdict.FALSE if res is None else res.verdict


# -- labeled ------------------------------------------------------------------


def rooted_x_iso(g1: LabeledGraph, r1: int, g2: LabeledGraph, r2: int) -> Optional[IsoResult]:
    """The unique label-preserving isomorphism sending r1 to r2, if any.

    Boundary vertices are paired but not expanded; touching one makes the
    result radius-limited.
    """
    if g1.alphabet != g2.alphabet:
        raise PreconditionError("alphabets differ")
    if not (g1.is_deterministic() and g2.is_deterministic()):
        raise PreconditionError("rooted_x_iso needs deterministic graphs")
    letters = g1.alphabet.letters()
    fwd, bwd, emap = {r1: r2}, {r2: r1}, {}
    limited = False
    q = deque([(r1, r2)])
    while q:
        u, v = q.popleft()
        if u in g1.boundary or v in g2.boundary:
            limited = True
            continue
        for l in letters:
            e1, e2 = g1.out_edge(u, l), g2.out_edge(v, l)
            if (e1 is None) != (e2 is None):
                return None
            if e1 is None:
                continue
            if g1.is_degenerate(e1) != g2.is_degenerate(e2):
                return None
            w1, w2 = g1.dst(e1), g2.dst(e2)
            if fwd.get(w1, w2) != w2 or bwd.get(w2, w1) != w1:
                return None
            emap[e1] = e2
            emap[g1.inv[e1]] = g2.inv[e2]
            if w1 not in fwd:
                fwd[w1], bwd[w2] = w2, w1
                q.append((w1, w2))
    return IsoResult(fwd, emap, radius_limited=limited)


def _moore_blocks(g: LabeledGraph) -> list[int]:
    """Coarsest congruence refining the loop signature."""
    letters = g.alphabet.letters()
    succ = [[g.follow(v, (l,)) for l in letters] for v in range(g.n)]
    cls = [hash(tuple(s == v for s in succ[v])) for v in range(g.n)]
    n_cls = -1
    while True:
        keys = [(cls[v], tuple(cls[w] for w in succ[v])) for v in range(g.n)]
        ids: dict = {}
        cls = [ids.setdefault(k, len(ids)) for k in keys]
        if len(ids) == n_cls:
            return cls
        n_cls = len(ids)


def x_orbits(g: LabeledGraph) -> list[list[int]]:
    """Partition into classes of rooted X-isomorphic vertices.

    Moore refinement gives a coarse candidate partition.  Equal behaviour
    is necessary but not sufficient (the closed-path language at a vertex is
    what matters), so each block is split by its BFS-canonical table.
    """
    if g.boundary or not g.is_complete():
        raise PreconditionError("x_orbits needs a finite complete graph")
    blocks: dict = {}
    moore = _moore_blocks(g)
    for v in range(g.n):
        canon = tuple(map(tuple, bfs_renumber(g, v)))
        blocks.setdefault((moore[v], canon), []).append(v)
    return sorted(blocks.values())


def is_x_transitive(g: LabeledGraph) -> Verdict:
    """Every vertex X-isomorphic to the root (window-aware)."""
    root = g.root if g.root is not None else 0
    if not g.boundary:
        return Verdict.TRUE if len(x_orbits(g)) == 1 else Verdict.FALSE
    vs = [v for v in range(g.n) if v not in g.boundary]
    return Verdict.combine(_verdict(rooted_x_iso(g, root, g, v)) for v in vs)


# -- unlabeled ---------------------------------------------------------------


@dataclass
class _Frame:
    """The part of a graph around a root that is certainly known."""

    g: LabeledGraph
    verts: list
    dist: dict
    nbr: dict = field(default_factory=dict)  # u -> Counter{w: #edges}
    pair_edges: dict = field(default_factory=dict)  # (u, w) -> [oriented ids]
    loop_pairs: dict = field(default_factory=dict)  # u -> [(e, inv e)]
    deg_loops: dict = field(default_factory=dict)  # u -> [e]

    @classmethod
    def build(cls, g: LabeledGraph, root: int, R: Optional[int]) -> "_Frame":
        d = g.bfs_distances(root)
        if R is None:
            verts = [v for v in range(g.n) if d[v] is not None]
            inner = set(range(g.n))
        else:
            verts = [v for v in range(g.n) if d[v] is not None and d[v] <= R + 1]
            inner = {v for v in verts if d[v] <= R}
        verts.sort(key=lambda v: (d[v], v))
        f = cls(g, verts, {v: d[v] for v in verts})
        for v in verts:
            f.nbr[v] = Counter()
            f.loop_pairs[v] = []
            f.deg_loops[v] = []
        for e in range(g.num_edges):
            u, w = g.src[e], g.dst(e)
            if u not in f.dist or (u not in inner and w not in inner):
                continue
            if g.is_degenerate(e):
                f.deg_loops[u].append(e)
            elif u == w:
                if e < g.inv[e]:
                    f.loop_pairs[u].append((e, g.inv[e]))
            else:
                f.nbr[u][w] += 1
                f.pair_edges.setdefault((u, w), []).append(e)
        return f

    def base_colour(self, v: int) -> tuple:
        return (self.dist[v], sum(self.nbr[v].values()), len(self.loop_pairs[v]), len(self.deg_loops[v]))


def _refine(f1: _Frame, f2: _Frame) -> tuple[dict, dict]:
    """Joint colour refinement so colours are comparable across frames."""
    c1 = {v: f1.base_colour(v) for v in f1.verts}
    c2 = {v: f2.base_colour(v) for v in f2.verts}
    n_cls = -1
    while True:
        ids: dict = {}

        def step(f, c):
            return {
                v: ids.setdefault(
                    (c[v], tuple(sorted((c[w], m) for w, m in f.nbr[v].items()))), len(ids)
                )
                for v in f.verts
            }

        c1, c2 = step(f1, c1), step(f2, c2)
        if len(ids) == n_cls:
            return c1, c2
        n_cls = len(ids)


def _search(f1: _Frame, f2: _Frame, r1: int, r2: int) -> Optional[dict]:
    c1, c2 = _refine(f1, f2)
    if Counter(c1.values()) != Counter(c2.values()) or c1[r1] != c2[r2]:
        return None
    order = f1.verts  # BFS order, root first
    fwd: dict = {}
    bwd: dict = {}

    def fits(u: int, v: int) -> bool:
        for w, m in f1.nbr[u].items():
            if w in fwd and f2.nbr[v].get(fwd[w], 0) != m:
                return False
        for w, m in f2.nbr[v].items():
            if w in bwd and f1.nbr[u].get(bwd[w], 0) != m:
                return False
        return True

    def candidates(u: int) -> list[int]:
        anchor = next((w for w in f1.nbr[u] if w in fwd), None)
        pool = f2.nbr[fwd[anchor]] if anchor is not None else f2.verts
        return [v for v in pool if v not in bwd and c2[v] == c1[u]]

    for sol in backtrack(order, lambda i, u: [r2] if i == 0 else candidates(u), fits, fwd, bwd):
        return dict(sol)
    return None


def backtrack(order: list, candidates, fits, fwd: dict, bwd: dict):
    """Iterative depth-first search for injective maps of ``order``.

    ``candidates(i, u)`` lists images for ``order[i]``; ``fits(u, v)`` checks
    consistency with the current partial map.  Yields each complete map
    (the same dict object, mutated afterwards).
    """
    if not order:
        yield fwd
        return
    stack = [iter(candidates(0, order[0]))]
    while stack:
        i = len(stack) - 1
        u = order[i]
        if u in fwd:
            del bwd[fwd.pop(u)]
        for v in stack[-1]:
            if v not in bwd and fits(u, v):
                fwd[u], bwd[v] = v, u
                if i + 1 == len(order):
                    yield fwd
                    del bwd[fwd.pop(u)]
                    continue
                stack.append(iter(candidates(i + 1, order[i + 1])))
                break
        else:
            stack.pop()


def safe_radius(g: LabeledGraph, v: int) -> Optional[int]:
    """Largest R with no boundary vertex within distance R of v (None: no boundary)."""
    if not g.boundary:
        return None
    d = g.bfs_distances(v)
    near = [d[b] for b in g.boundary if d[b] is not None]
    return min(near) - 1 if near else None


def rooted_iso(
    g1: LabeledGraph, r1: int, g2: LabeledGraph, r2: int, radius: Optional[int] = None
) -> Optional[IsoResult]:
    """Label-blind rooted isomorphism with explicit vertex and edge bijections.

    With boundary (or an explicit radius) only the certainly-known
    neighbourhood is compared: all edges touching a vertex within distance
    R of the root.
    """
    radii = [r for r in (safe_radius(g1, r1), safe_radius(g2, r2), radius) if r is not None]
    R = min(radii) if radii else None
    if R is not None and R < 0:
        return IsoResult({r1: r2}, {}, radius_limited=True, radius=R)
    f1, f2 = _Frame.build(g1, r1, R), _Frame.build(g2, r2, R)
    if len(f1.verts) != len(f2.verts):
        return None
    vmap = _search(f1, f2, r1, r2)
    if vmap is None:
        return None
    emap = _edge_map(g1, g2, f1, f2, vmap)
    covers_all = len(f1.verts) == g1.n and len(f2.verts) == g2.n
    limited = R is not None and not (covers_all and not g1.boundary and not g2.boundary)
    return IsoResult(vmap, emap, radius_limited=limited, radius=R)


def _edge_map(g1: LabeledGraph, g2: LabeledGraph, f1: _Frame, f2: _Frame, vmap: dict) -> dict:
    """Pair up edges between matched vertices; parallel edges in id order."""
    emap: dict = {}
    for (u, w), es in f1.pair_edges.items():
        if u > w:
            continue
        for e, e2 in zip(es, f2.pair_edges[(vmap[u], vmap[w])]):
            emap[e], emap[g1.inv[e]] = e2, g2.inv[e2]
    for u in f1.verts:
        for (a, b), (a2, b2) in zip(f1.loop_pairs[u], f2.loop_pairs[vmap[u]]):
            emap[a], emap[b] = a2, b2
        for e, e2 in zip(f1.deg_loops[u], f2.deg_loops[vmap[u]]):
            emap[e] = e2
    return emap


def iso_from_vertex_map(g1: LabeledGraph, g2: LabeledGraph, vmap: dict) -> Optional[IsoResult]:
    """Complete a vertex bijection of finite graphs to an isomorphism, if it is one."""
    if len(vmap) != g1.n or sorted(vmap.values()) != list(range(g2.n)):
        return None
    r1 = g1.root if g1.root is not None else 0
    f1, f2 = _Frame.build(g1, r1, None), _Frame.build(g2, vmap[r1], None)
    for u in range(g1.n):
        v = vmap[u]
        if len(f1.loop_pairs[u]) != len(f2.loop_pairs[v]) or len(f1.deg_loops[u]) != len(f2.deg_loops[v]):
            return None
        if Counter({vmap[w]: m for w, m in f1.nbr[u].items()}) != f2.nbr[v]:
            return None
    return IsoResult(dict(vmap), _edge_map(g1, g2, f1, f2, vmap))


def orbit_partition(g: LabeledGraph) -> list[list[int]]:
    """Automorphism orbits of a finite graph (labels ignored)."""
    if g.boundary:
        raise PreconditionError("orbit_partition needs a finite graph without boundary")
    reps: list[int] = []
    blocks: dict = {}
    for v in range(g.n):
        for r in reps:
            if rooted_iso(g, r, g, v) is not None:
                blocks[r].append(v)
                break
        else:
            reps.append(v)
            blocks[v] = [v]
    return [blocks[r] for r in reps]


def is_transitive(g: LabeledGraph) -> Verdict:
    """Vertex-transitivity; on windows compares interior vertices with the root."""
    if not g.boundary:
        return Verdict.TRUE if len(orbit_partition(g)) == 1 else Verdict.FALSE
    root = g.root if g.root is not None else 0
    vs = [v for v in range(g.n) if v not in g.boundary]
    return Verdict.combine(_verdict(rooted_iso(g, root, g, v)) for v in vs)


@dataclass
class LengthTransitivity:
    verdict: Verdict
    per_letter: dict  # formatted letter -> Verdict


def is_length_transitive(g: LabeledGraph, root: Optional[int] = None) -> LengthTransitivity:
    """Compare the root with each of its letter-neighbours, label-blind."""
    root = g.root if root is None else root
    per = {}
    for l in g.alphabet.letters():
        w = g.follow(root, (l,))
        if w is None:
            continue
        per[g.alphabet.format_letter(l)] = _verdict(rooted_iso(g, root, g, w))
    return LengthTransitivity(Verdict.combine(per.values()), per)


def analyze_report(g: LabeledGraph) -> dict:
    finite = not g.boundary
    out = {
        "transitive": is_transitive(g).value,
        "x_transitive": is_x_transitive(g).value,
        "length_transitive": is_length_transitive(g).verdict.value,
        "orbit_blocks": orbit_partition(g) if finite else None,
        "x_orbit_blocks": x_orbits(g) if finite and g.is_complete() else None,
        "radius_limited": not finite,
    }
    return out
