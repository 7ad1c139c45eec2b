"""Permutations, cycle notation and brute-force small-group enumeration.

Points are 1-based in cycle notation and 0-based internally.  Products are
read left to right, matching right actions: ``(p * q)(i) = q(p(i))``.
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .words import Alphabet, MalformedInput

MAX_POINTS = 12
MAX_GROUP_ORDER = 10**6


class EnumerationBoundExceeded(RuntimeError):
    pass


class Permutation:
    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(images)
        if sorted(images) != list(range(len(images))):
            raise MalformedInput(f"not a permutation: {images}")
        self.images = images

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.n != other.n:
            raise ValueError("degree mismatch")
        o = other.images
        return Permutation(tuple(o[i] for i in self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def __pow__(self, k: int) -> "Permutation":
        base = self if k >= 0 else self.inverse()
        out = Permutation.identity(self.n)
        for _ in range(abs(k)):
            out = out * base
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __lt__(self, other: "Permutation") -> bool:
        return self.images < other.images

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        """Non-trivial cycles, 1-based, each starting at its smallest point."""
        seen, out = set(), []
        for s in range(self.n):
            if s in seen:
                continue
            cyc, i = [], s
            while i not in seen:
                seen.add(i)
                cyc.append(i + 1)
                i = self.images[i]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles())) if self.cycles() else 1

    def is_even(self) -> bool:
        return sum(len(c) - 1 for c in self.cycles()) % 2 == 0

    def __str__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + ",".join(map(str, c)) + ")" for c in cyc)

    def __repr__(self) -> str:
        return f"Permutation({str(self)}, n={self.n})"


def parse_cycles(s: str, n: int) -> Permutation:
    """``"(1,3,4)(2,5)"`` on points ``1..n``."""
    text = s.replace(" ", "")
    if not re.fullmatch(r"(\((\d+(,\d+)*)?\))*", text) or not text:
        raise MalformedInput(f"malformed cycle notation {s!r}")
    images = list(range(n))
    used = set()
    for body in re.findall(r"\(([^)]*)\)", text):
        if not body:
            continue
        pts = [int(p) - 1 for p in body.split(",")]
        for p in pts:
            if not 0 <= p < n:
                raise MalformedInput(f"point {p + 1} out of range 1..{n}")
            if p in used:
                raise MalformedInput(f"point {p + 1} repeated in {s!r}")
            used.add(p)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            images[a] = b
    return Permutation(images)


def perm_from_images(images_1based: Sequence[int]) -> Permutation:
    return Permutation([i - 1 for i in images_1based])


def group_elements(gens: Sequence[Permutation], limit: int = MAX_GROUP_ORDER) -> list[Permutation]:
    """Breadth-first closure, identity first."""
    if not gens:
        raise ValueError("need at least one generator to know the degree")
    n = gens[0].n
    if n > MAX_POINTS:
        raise EnumerationBoundExceeded(f"{n} points exceeds the bound {MAX_POINTS}")
    e = Permutation.identity(n)
    seen = {e}
    order = [e]
    q = deque([e])
    while q:
        g = q.popleft()
        for s in gens:
            h = g * s
            if h not in seen:
                seen.add(h)
                order.append(h)
                if len(order) > limit:
                    raise EnumerationBoundExceeded(f"group order exceeds {limit}")
                q.append(h)
    return order


def group_order(gens: Sequence[Permutation]) -> int:
    return len(group_elements(gens))


def evaluate(expr: str, gens: dict[str, Permutation]) -> Permutation:
    """Evaluate ``"b a^-2 b^-1 a^2"`` left to right."""
    if not gens:
        raise ValueError("no generators")
    n = next(iter(gens.values())).n
    out = Permutation.identity(n)
    for token in expr.split():
        m = re.fullmatch(r"([^\^]+)(?:\^(-?\d+))?", token)
        if not m or m.group(1) not in gens:
            raise MalformedInput(f"bad token {token!r}")
        out = out * (gens[m.group(1)] ** int(m.group(2) or 1))
    return out


check_identity = evaluate


def subgroup_elements(gens: Sequence[Permutation], n: int) -> list[Permutation]:
    gens = [g for g in gens if not g.is_identity()]
    if not gens:
        return [Permutation.identity(n)]
    return group_elements(gens)


def normalizer(subgens: Sequence[Permutation], groupgens: Sequence[Permutation], bound: int = 10**4) -> list[Permutation]:
    """``N_A(K)`` as an explicit element list (in enumeration order of A)."""
    A = group_elements(groupgens, limit=bound)
    K = set(subgroup_elements(subgens, groupgens[0].n))
    return [g for g in A if {g.inverse() * k * g for k in K} == K]


def all_subgroups(elements: Sequence[Permutation]) -> list[frozenset]:
    """Every subgroup of a small group, as frozensets of elements.

    Joins of cyclic subgroups until no new subgroup appears.
    """
    n = elements[0].n
    cyclic = {frozenset(subgroup_elements([g], n)) for g in elements}
    subs = set(cyclic)
    frontier = set(cyclic)
    while frontier:
        new = set()
        for H in frontier:
            for C in cyclic:
                if C <= H:
                    continue
                J = frozenset(group_elements(_generators_of(H) + _generators_of(C)))
                if J not in subs:
                    new.add(J)
        subs |= new
        frontier = new
    return sorted(subs, key=lambda S: (len(S), sorted(S)))


def _generators_of(S: frozenset) -> list[Permutation]:
    """A small generating list for a subgroup given as a set."""
    n = next(iter(S)).n
    gens: list[Permutation] = []
    span = {Permutation.identity(n)}
    for g in sorted(S):
        if g not in span:
            gens.append(g)
            span = set(group_elements(gens))
    return gens or [Permutation.identity(n)]


def right_cosets(elements: Sequence[Permutation], H: Iterable[Permutation]) -> list[frozenset]:
    """Right cosets ``Hg``; the coset ``H`` itself first."""
    H = frozenset(H)
    seen: set = set()
    out = []
    for g in elements:
        if g in seen:
            continue
        coset = frozenset(h * g for h in H)
        seen |= coset
        out.append(coset)
    out.sort(key=lambda c: 0 if c == H else 1)
    return out


@dataclass
class PermAction:
    """One permutation of ``{1..n}`` per alphabet symbol."""

    alphabet: Alphabet
    perms: list[Permutation]

    def __post_init__(self):
        if len(self.perms) != len(self.alphabet):
            raise MalformedInput("need one permutation per symbol")
        ns = {p.n for p in self.perms}
        if len(ns) > 1:
            raise MalformedInput("permutations of different degrees")
        for i, p in enumerate(self.perms):
            if self.alphabet.is_order2(i) and not (p * p).is_identity():
                raise MalformedInput(f"order-2 symbol {self.alphabet.name(i)} acts by {p}, not an involution")

    @property
    def n(self) -> int:
        return self.perms[0].n


def coset_action(alphabet: Alphabet, gens: Sequence[Permutation], H: Iterable[Permutation], group: Sequence[Permutation] | None = None) -> PermAction:
    """Right action of ``gens`` on the right cosets of ``H``; coset ``H`` is point 1."""
    group = list(group) if group is not None else group_elements(gens)
    cosets = right_cosets(group, H)
    where = {}
    for i, c in enumerate(cosets):
        for g in c:
            where[g] = i
    reps = [min(c) for c in cosets]
    perms = [Permutation([where[r * x] for r in reps]) for x in gens]
    return PermAction(alphabet, perms)


def element_order(g: Permutation) -> int:
    return g.order()
