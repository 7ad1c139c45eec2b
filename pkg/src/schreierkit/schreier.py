"""Schreier graphs from permutation actions, subgroup generators, and balls."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .lgraph import LabeledGraph, PreconditionError, ball_truncate, from_transitions
from .perms import PermAction
from .words import Alphabet, Letter, MalformedInput, Word, conjugate, invert, normalize

DEFAULT_MAX_VERTICES = 10**5


class RelationViolated(ValueError):
    """Folding identified two edges whose tracked images differ."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class Folder:
    """Stallings folding of a bouquet of petals, one petal per word.

    With ``image_alphabet`` set, every edge carries an element of a second
    group (a reduced word there), and the product along any closed path at
    the root is the image of the path's value under the homomorphism that
    sends each petal word to its given image.  Folding keeps this invariant
    by re-potentialising the absorbed vertex; identifying two parallel edges
    with different images means the prescribed map is not a homomorphism.
    """

    def __init__(self, A: Alphabet, image_alphabet: Optional[Alphabet] = None):
        self.A = A
        self.B = image_alphabet
        self.root = 0
        self.stars: dict[int, set[int]] = {0: set()}
        self.src: dict[int, int] = {}
        self.dst: dict[int, int] = {}
        self.letter: dict[int, Letter] = {}
        self.inv: dict[int, int] = {}
        self.lam: dict[int, Word] = {}
        self._next_v = 1
        self._next_e = 0
        self._dirty: deque = deque()

    # -- primitive edits -----------------------------------------------------

    def _new_vertex(self) -> int:
        v = self._next_v
        self._next_v += 1
        self.stars[v] = set()
        return v

    def _binv(self, w: Word) -> Word:
        return invert(self.B, w)

    def _bmul(self, *ws: Word) -> Word:
        out: tuple = ()
        for w in ws:
            out = out + tuple(w)
        return normalize(self.B, out)

    def _add_edge(self, u: int, v: int, l: Letter, lam: Word = ()) -> int:
        A = self.A
        e = self._next_e
        self._next_e += 1
        self.src[e], self.dst[e], self.letter[e] = u, v, l
        self.stars[u].add(e)
        if self.B is not None:
            self.lam[e] = tuple(lam)
        if u == v and A.is_order2(l.index):
            self.inv[e] = e
            if self.B is not None and self._bmul(lam, lam):
                raise RelationViolated(
                    "image of an order-2 loop is not an involution", witness=(l, tuple(lam))
                )
        else:
            f = self._next_e
            self._next_e += 1
            self.src[f], self.dst[f], self.letter[f] = v, u, A.inverse(l)
            self.inv[e], self.inv[f] = f, e
            self.stars[v].add(f)
            if self.B is not None:
                self.lam[f] = self._binv(lam)
        self._dirty.extend([u, v])
        return e

    def _remove_edge(self, e: int) -> None:
        for x in {e, self.inv[e]}:
            self.stars[self.src[x]].discard(x)
            for d in (self.src, self.dst, self.letter, self.inv, self.lam):
                d.pop(x, None)

    # -- petals --------------------------------------------------------------

    def add_word(self, word: Word, image: Word = ()) -> None:
        word = normalize(self.A, word)
        if not word:
            if self.B is not None and normalize(self.B, image):
                raise RelationViolated("trivial word with nontrivial image", witness=((), tuple(image)))
            return
        v = self.root
        for i, l in enumerate(word):
            w = self.root if i == len(word) - 1 else self._new_vertex()
            self._add_edge(v, w, l, image if i == 0 else ())
            v = w
        self.fold()

    # -- folding -------------------------------------------------------------

    def fold(self) -> None:
        while self._dirty:
            v = self._dirty.popleft()
            if v not in self.stars:
                continue
            pair = self._duplicate_at(v)
            if pair is None:
                continue
            self._fold_pair(v, *pair)
            self._dirty.append(v)

    def _duplicate_at(self, v: int):
        seen: dict = {}
        for e in sorted(self.stars[v]):
            l = self.letter[e]
            if l in seen:
                return seen[l], e
            seen[l] = e
        return None

    def _fold_pair(self, v: int, keep: int, drop: int) -> None:
        u_keep, u_drop = self.dst[keep], self.dst[drop]
        if u_keep == u_drop:
            self._merge_parallel(keep, drop)
            return
        if u_drop == self.root:
            keep, drop = drop, keep
            u_keep, u_drop = u_drop, u_keep
        if self.B is not None:
            g = self._bmul(self._binv(self.lam[keep]), self.lam[drop])
            if g:
                self._repotential(u_drop, g)
        self._absorb(u_drop, u_keep)
        self._merge_parallel(keep, drop)

    def _repotential(self, m: int, g: Word) -> None:
        gi = self._binv(g)
        for f in list(self.stars[m]):
            if self.dst[f] == m:
                if f == self.inv[f] or f < self.inv[f]:
                    self.lam[f] = self._bmul(g, self.lam[f], gi)
                    if f != self.inv[f]:
                        self.lam[self.inv[f]] = self._binv(self.lam[f])
            else:
                self.lam[f] = self._bmul(g, self.lam[f])
                self.lam[self.inv[f]] = self._binv(self.lam[f])

    def _absorb(self, m: int, into: int) -> None:
        for f in list(self.stars[m]):
            fi = self.inv[f]
            self.src[f] = into
            self.dst[fi] = into
            self.stars[into].add(f)
        for f in list(self.stars[into]):
            if self.dst[f] == m:
                self.dst[f] = into
        del self.stars[m]
        if self.root == m:
            self.root = into
        self._dirty.append(into)

    def _merge_parallel(self, keep: int, drop: int) -> None:
        if self.B is not None and self.lam[keep] != self.lam[drop]:
            raise RelationViolated(
                "prescribed images do not define a homomorphism",
                witness=(self.lam[keep], self.lam[drop]),
            )
        v = self.src[keep]
        if self.inv[drop] == keep:
            # x, x^-1 both order-2 letters looping at v: becomes degenerate
            self.stars[v].discard(drop)
            for d in (self.src, self.dst, self.letter, self.inv, self.lam):
                d.pop(drop, None)
            self.inv[keep] = keep
            if self.B is not None and self._bmul(self.lam[keep], self.lam[keep]):
                raise RelationViolated("image of an order-2 loop is not an involution", witness=self.lam[keep])
        else:
            # a degenerate drop against a loop pair leaves keep, inv(keep) to fold next
            self._remove_edge(drop)
        self._dirty.append(v)
        self._dirty.append(self.dst[keep])

    # -- results -------------------------------------------------------------

    def vertices_bfs(self) -> list[int]:
        order, seen = [self.root], {self.root}
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            for e in sorted(self.stars[v], key=lambda e: self.letter[e].sort_key()):
                w = self.dst[e]
                if w not in seen:
                    seen.add(w)
                    order.append(w)
        return order

    def transition_table(self) -> tuple[list[int], dict]:
        """BFS-renumbered ``{(v, letter): w}`` over the folded graph."""
        order = self.vertices_bfs()
        idx = {v: i for i, v in enumerate(order)}
        t = {}
        for v in order:
            for e in self.stars[v]:
                t[(idx[v], self.letter[e])] = idx[self.dst[e]]
        return order, t


@dataclass
class SubgroupPresentation:
    alphabet: Alphabet
    words: list
    conjugator: Word = ()

    def generator_words(self) -> list:
        A = self.alphabet
        out = [normalize(A, w) for w in self.words]
        if self.conjugator:
            out = [conjugate(A, w, self.conjugator) for w in out]
        return out

    @classmethod
    def parse(cls, A: Alphabet, texts: Sequence[str], conjugator: str = "") -> "SubgroupPresentation":
        return cls(A, [A.parse_word(t) for t in texts], A.parse_word(conjugator))


@dataclass
class CosetTable:
    """Rows are vertices, columns follow ``alphabet.letters()``; ``None`` is missing."""

    alphabet: Alphabet
    table: list
    complete: bool
    root: int = 0

    @property
    def size(self) -> int:
        return len(self.table)

    def to_graph(self) -> LabeledGraph:
        A = self.alphabet
        letters = A.letters()
        targets = {}
        for v, row in enumerate(self.table):
            for l, w in zip(letters, row):
                if w is not None:
                    targets[(v, l)] = w
        g = from_transitions(A, self.size, targets, self.root)
        g.boundary = {v for v, row in enumerate(self.table) if any(w is None for w in row)}
        return g

    def to_json(self) -> dict:
        return {"alphabet": self.alphabet.to_json(), "table": self.table, "root": self.root, "complete": self.complete}

    @classmethod
    def from_json(cls, data) -> "CosetTable":
        if isinstance(data, str):
            data = json.loads(data)
        A = Alphabet.from_json(data["alphabet"])
        table = [list(r) for r in data["table"]]
        if any(len(r) != len(A.letters()) for r in table):
            raise MalformedInput("table row width does not match alphabet")
        complete = all(w is not None for r in table for w in r)
        return cls(A, table, complete, int(data.get("root", 0)))


def table_from_transitions(A: Alphabet, n: int, t: dict, root: int = 0) -> list:
    letters = A.letters()
    return [[t.get((v, l)) for l in letters] for v in range(n)]


def coset_closure(H: SubgroupPresentation, max_vertices: int = DEFAULT_MAX_VERTICES) -> CosetTable:
    """Fold the generator petals, then grow the missing transitions breadth first.

    A folded graph with no missing transition is the whole Schreier graph
    (finite index).  Otherwise the index is infinite and the table returned
    is the folded core grown by fresh vertices, in BFS order, up to
    ``max_vertices``; it is flagged incomplete.
    """
    A = H.alphabet
    fold = Folder(A)
    for w in H.generator_words():
        fold.add_word(w)
    order, t = fold.transition_table()
    n = len(order)
    letters = A.letters()
    missing = any((v, l) not in t for v in range(n) for l in letters)
    if not missing and n <= max_vertices:
        return CosetTable(A, table_from_transitions(A, n, t), True)
    if missing:
        # hang fresh vertices, tree-like, on missing transitions
        q = deque(range(n))
        while q and n < max_vertices:
            v = q.popleft()
            for l in letters:
                if (v, l) in t or n >= max_vertices:
                    continue
                w = n
                n += 1
                t[(v, l)] = w
                t[(w, A.inverse(l))] = v
                q.append(w)
    return CosetTable(A, table_from_transitions(A, n, t), False)


def bfs_renumber(g: LabeledGraph, root: Optional[int] = None) -> list:
    """Coset table of ``g`` renumbered by BFS from the root (letter order)."""
    root = g.root if root is None else root
    A = g.alphabet
    letters = A.letters()
    order, idx = [root], {root: 0}
    i = 0
    rows = []
    while i < len(order):
        v = order[i]
        i += 1
        row = []
        for l in letters:
            w = g.follow(v, (l,))
            if w is None:
                row.append(None)
                continue
            if w not in idx:
                idx[w] = len(order)
                order.append(w)
            row.append(idx[w])
        rows.append(row)
    return rows


def from_action(act: PermAction, basepoint: int) -> LabeledGraph:
    """Vertices are points (``basepoint`` is 1-based); one edge per point and letter."""
    A = act.alphabet
    n = act.n
    if not 1 <= basepoint <= n:
        raise MalformedInput(f"basepoint {basepoint} not in 1..{n}")
    targets = {}
    for i, p in enumerate(act.perms):
        l = Letter(i, 1)
        for v in range(n):
            targets[(v, l)] = p(v)
    g = from_transitions(A, n, targets, basepoint - 1)
    g.names = [str(v + 1) for v in range(n)]
    return g


def reconstruct_subgroup(g: LabeledGraph, root: Optional[int] = None) -> list:
    """One generator per unoriented non-tree edge of a BFS spanning tree.

    The word reads tree path to the edge, the edge, tree path back.  For a
    complete Schreier graph these words generate the subgroup at the root.
    """
    root = g.root if root is None else root
    if not g.is_deterministic():
        raise PreconditionError("reconstruct_subgroup needs a deterministic graph")
    A = g.alphabet
    parent_edge: dict = {root: None}
    order = [root]
    i = 0
    tree = set()
    while i < len(order):
        v = order[i]
        i += 1
        for e in sorted(g.star(v), key=lambda e: g.label[e].sort_key()):
            w = g.dst(e)
            if w not in parent_edge:
                parent_edge[w] = e
                tree.update({e, g.inv[e]})
                order.append(w)

    def path_to(v) -> Word:
        out = []
        while parent_edge[v] is not None:
            e = parent_edge[v]
            out.append(g.label[e])
            v = g.src[e]
        return tuple(reversed(out))

    pos = {v: i for i, v in enumerate(order)}
    gens = []
    for e in sorted(g.unoriented_edges(), key=lambda e: (pos.get(g.src[e], len(pos)), g.label[e].sort_key())):
        if e in tree or g.src[e] not in parent_edge:
            continue
        u, w = g.src[e], g.dst(e)
        word = path_to(u) + (g.label[e],) + invert(A, path_to(w))
        gens.append(normalize(A, word))
    return gens


def schreier_graph(H: SubgroupPresentation, max_vertices: int = DEFAULT_MAX_VERTICES) -> LabeledGraph:
    return coset_closure(H, max_vertices).to_graph()


__all__ = [
    "CosetTable",
    "Folder",
    "RelationViolated",
    "SubgroupPresentation",
    "ball_truncate",
    "bfs_renumber",
    "coset_closure",
    "from_action",
    "reconstruct_subgroup",
    "schreier_graph",
]
