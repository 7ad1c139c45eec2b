"""Recognize Schreier graphs among plain regular graphs.

A regular graph is a Schreier graph exactly when its edges split into
1-factors (one per order-2 generator) and 2-factors (one per infinite-order
generator).  Even degree: orient along Euler circuits, then peel perfect
matchings off the out/in double cover.  Odd degree: remove a perfect
matching first.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Optional

from .lgraph import LabeledGraph
from .words import Alphabet, Letter, MalformedInput


class NotSchreier(ValueError):
    pass


@dataclass
class PlainGraph:
    """Finite multigraph; ``(v, v)`` is a non-degenerate loop of degree 2."""

    n: int
    edges: list = field(default_factory=list)

    def __post_init__(self):
        self.edges = [tuple(e) for e in self.edges]
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise MalformedInput(f"edge {(u, v)} out of range")

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def regular_degree(self) -> Optional[int]:
        deg = set(self.degrees())
        return deg.pop() if len(deg) == 1 else None

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """``adj[u] = [(v, edge_index)]``; a loop appears twice."""
        adj = [[] for _ in range(self.n)]
        for i, (u, v) in enumerate(self.edges):
            adj[u].append((v, i))
            adj[v].append((u, i))
        return adj

    def components(self) -> list[list[int]]:
        adj = self.adjacency()
        seen, comps = set(), []
        for s in range(self.n):
            if s in seen:
                continue
            comp, q = [], deque([s])
            seen.add(s)
            while q:
                u = q.popleft()
                comp.append(u)
                for v, _ in adj[u]:
                    if v not in seen:
                        seen.add(v)
                        q.append(v)
            comps.append(sorted(comp))
        return comps

    def edge_multiset(self) -> Counter:
        return Counter(tuple(sorted(e)) for e in self.edges)

    def to_json(self) -> dict:
        return {"vertices": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, data) -> "PlainGraph":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(int(data["vertices"]), [tuple(e) for e in data["edges"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad plain graph json: {exc}") from exc


def plain_from_labeled(g: LabeledGraph) -> PlainGraph:
    if any(g.is_degenerate(e) for e in range(g.num_edges)):
        raise MalformedInput("degenerate loops have no plain-graph counterpart")
    return PlainGraph(g.n, [(g.src[e], g.dst(e)) for e in g.unoriented_edges()])


# -- 1-factors ---------------------------------------------------------------


def max_matching(n: int, adj: list[list[int]]) -> list[int]:
    """Edmonds' blossom algorithm on a simple graph; ``match[v]`` or -1."""
    match = [-1] * n
    for root in range(n):
        if match[root] != -1:
            continue
        used = [False] * n
        parent = [-1] * n
        base = list(range(n))
        used[root] = True
        q = deque([root])

        def lca(a: int, b: int) -> int:
            seen = [False] * n
            while True:
                a = base[a]
                seen[a] = True
                if match[a] == -1:
                    break
                a = parent[match[a]]
            while True:
                b = base[b]
                if seen[b]:
                    return b
                b = parent[match[b]]

        def mark_path(v: int, b: int, child: int, blossom: list) -> None:
            while base[v] != b:
                blossom[base[v]] = blossom[base[match[v]]] = True
                parent[v] = child
                child = match[v]
                v = parent[match[v]]

        end = -1
        while q and end == -1:
            v = q.popleft()
            for to in adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] != -1 and parent[match[to]] != -1):
                    cur = lca(v, to)
                    blossom = [False] * n
                    mark_path(v, cur, to, blossom)
                    mark_path(to, cur, v, blossom)
                    for i in range(n):
                        if blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                q.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    if match[to] == -1:
                        end = to
                        break
                    used[match[to]] = True
                    q.append(match[to])
        while end != -1:
            pv = parent[end]
            ppv = match[pv]
            match[end], match[pv] = pv, end
            end = ppv
    return match


def perfect_matching(g: PlainGraph) -> Optional[list[int]]:
    """Indices of edges forming a 1-factor, or ``None`` when none exists."""
    if g.n % 2:
        return None
    nbrs = [set() for _ in range(g.n)]
    first_edge = {}
    for i, (u, v) in enumerate(g.edges):
        if u == v:
            continue
        nbrs[u].add(v)
        nbrs[v].add(u)
        first_edge.setdefault((min(u, v), max(u, v)), i)
    adj = [sorted(s) for s in nbrs]
    match = max_matching(g.n, adj)
    if any(m == -1 for m in match):
        return None
    return sorted(first_edge[(v, match[v])] for v in range(g.n) if v < match[v])


# -- 2-factors ---------------------------------------------------------------


def euler_orientation(g: PlainGraph) -> list[tuple[int, int, int]]:
    """``(edge, tail, head)`` for every edge, following Euler circuits."""
    if any(d % 2 for d in g.degrees()):
        raise NotSchreier("Euler orientation needs even degrees")
    adj = g.adjacency()
    ptr = [0] * g.n
    used = [False] * len(g.edges)
    out = []
    for s in range(g.n):
        if ptr[s] >= len(adj[s]):
            continue
        stack = [(s, None)]
        while stack:
            v, via = stack[-1]
            while ptr[v] < len(adj[v]) and used[adj[v][ptr[v]][1]]:
                ptr[v] += 1
            if ptr[v] == len(adj[v]):
                stack.pop()
                if via is not None:
                    out.append(via)
                continue
            w, i = adj[v][ptr[v]]
            used[i] = True
            stack.append((w, (i, v, w)))
    out.reverse()
    return out


def _bipartite_perfect(n: int, arcs: list[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
    """One arc out of and into every vertex (Kuhn augmenting paths)."""
    by_tail = [[] for _ in range(n)]
    for a in arcs:
        by_tail[a[1]].append(a)
    head_owner: dict[int, tuple] = {}

    def augment(u: int, seen: set) -> bool:
        for a in by_tail[u]:
            h = a[2]
            if h in seen:
                continue
            seen.add(h)
            if h not in head_owner or augment(head_owner[h][1], seen):
                head_owner[h] = a
                return True
        return False

    for u in range(n):
        if not augment(u, set()):
            raise NotSchreier("out/in double cover has no perfect matching")
    return sorted(head_owner.values(), key=lambda a: a[1])


def _normalize_cycles(factor: list[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
    """Orient each cycle so that its lowest vertex steps to its lower neighbour."""
    succ = {a[1]: a for a in factor}
    done, out = set(), []
    for start in sorted(succ):
        if start in done:
            continue
        cyc = []
        v = start
        while v not in done:
            done.add(v)
            cyc.append(succ[v])
            v = succ[v][2]
        if len(cyc) >= 3:
            nxt, prv = cyc[0][2], cyc[-1][1]
            if prv < nxt:
                cyc = [(i, h, t) for i, t, h in cyc]
        out.extend(cyc)
    return sorted(out, key=lambda a: a[1])


def two_factorize(g: PlainGraph) -> list[list[tuple[int, int, int]]]:
    """Split a ``2d``-regular graph into ``d`` oriented spanning 2-factors."""
    d2 = g.regular_degree()
    if d2 is None or d2 % 2:
        raise NotSchreier("two_factorize needs an even-regular graph")
    arcs = euler_orientation(g)
    factors = []
    for _ in range(d2 // 2):
        pm = _bipartite_perfect(g.n, arcs)
        taken = {a[0] for a in pm}
        arcs = [a for a in arcs if a[0] not in taken]
        factors.append(_normalize_cycles(pm))
    return factors


def _symbol_names(k: int) -> list[str]:
    return ["x", "y", "z"][:k] if k <= 3 else [f"x{i + 1}" for i in range(k)]


def schreierize(g: PlainGraph, root: int = 0) -> LabeledGraph:
    """Label a connected regular graph as a Schreier graph, or raise NotSchreier."""
    d = g.regular_degree()
    if d is None:
        raise NotSchreier("graph is not regular")
    if len(g.components()) > 1:
        raise NotSchreier("graph is not connected")
    rest = g
    matching: list[int] = []
    if d % 2:
        pm = perfect_matching(g)
        if pm is None:
            raise NotSchreier("odd degree and no perfect matching")
        matching = pm
        taken = set(pm)
        rest = PlainGraph(g.n, [e for i, e in enumerate(g.edges) if i not in taken])
    k = d // 2
    A = Alphabet.of(_symbol_names(k), ["a"] if d % 2 else [])
    out = LabeledGraph(g.n, A)
    if k:
        for s, factor in enumerate(two_factorize(rest)):
            for _, t, h in factor:
                out.add_edge(t, h, Letter(s, 1))
    for i in matching:
        u, v = g.edges[i]
        out.add_edge(u, v, Letter(k, 1))
    out.root = root
    return out
