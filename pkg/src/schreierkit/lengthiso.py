"""Length-preserving bijections between free products and their graphs.

Pipeline on a pair of rooted Schreier graphs:

    rooted isomorphism beta  ->  alpha on subgroup generators
    alpha  ->  gamma, a length and prefix preserving bijection of word balls
    gamma  ->  beta', a vertex map between the balls of the two graphs

``gamma`` is defined on ``ball(A1, R)``.  Its values on prefixes of subgroup
elements are forced by alpha; everything else is filled one level at a
time by matching free continuations in lexicographic order.
"""

from __future__ import annotations

import json
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Optional

from .isoauto import IsoResult
from .lgraph import LabeledGraph, PreconditionError
from .schreier import Folder
from .words import Alphabet, MalformedInput, Word, extensions, invert, multiply, normalize, word_sort_key


class DegreeMismatch(ValueError):
    pass


class LengthViolation(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class IllDefinedMap(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


# -- alpha from beta -----------------------------------------------------------


def alpha_from_beta(beta: IsoResult, g1: LabeledGraph, g2: LabeledGraph, hgens, root1=None) -> dict:
    """Read each closed word through beta: ``h -> label in g2 of beta(path of h)``."""
    root1 = g1.root if root1 is None else root1
    out = {}
    for h in hgens:
        h = normalize(g1.alphabet, h)
        path = g1.path_edges(root1, h)
        if path is None or (path and g1.dst(path[-1]) != root1):
            raise MalformedInput(f"{g1.alphabet.format_word(h)} is not closed at the root")
        try:
            image = tuple(g2.label[beta.edge_map[e]] for e in path)
        except KeyError as exc:
            raise PreconditionError(f"beta has no image for edge {exc}") from exc
        out[h] = image
    return out


# -- gamma ---------------------------------------------------------------------


@dataclass
class PartialLengthBijection:
    A1: Alphabet
    A2: Alphabet
    radius: int
    forward: dict = field(default_factory=dict)
    backward: dict = field(default_factory=dict)
    C: set = field(default_factory=set)  # forced prefixes of subgroup elements, within the radius
    log: list = field(default_factory=list)  # (parent, E, F) per free-matching step
    sample_size: int = 0  # subgroup elements used to certify alpha
    folded: Optional[Folder] = None

    def __call__(self, w: Word) -> Word:
        return self.forward[normalize(self.A1, w)]

    def inverse(self, w: Word) -> Word:
        return self.backward[normalize(self.A2, w)]

    def alpha(self, h: Word) -> Word:
        """Image of a subgroup element (any length) via the folded graph."""
        return _alpha_via_fold(self.folded, self.A1, self.A2, normalize(self.A1, h))

    def to_json(self) -> dict:
        f1, f2 = self.A1.format_word, self.A2.format_word
        return {
            "radius": self.radius,
            "alphabets": [self.A1.to_json(), self.A2.to_json()],
            "pairs": [[f1(w), f2(v)] for w, v in sorted(self.forward.items(), key=lambda kv: word_sort_key(kv[0]))],
            "log": [[f1(p), [f1(e) for e in E], [f2(y) for y in F]] for p, E, F in self.log],
        }

    @classmethod
    def from_json(cls, data) -> "PartialLengthBijection":
        if isinstance(data, str):
            data = json.loads(data)
        A1, A2 = (Alphabet.from_json(a) for a in data["alphabets"])
        out = cls(A1, A2, int(data["radius"]))
        for w, v in data["pairs"]:
            w, v = A1.parse_word(w), A2.parse_word(v)
            out.forward[w] = v
            out.backward[v] = w
        for p, E, F in data.get("log", []):
            out.log.append((A1.parse_word(p), [A1.parse_word(e) for e in E], [A2.parse_word(y) for y in F]))
        return out


def _alpha_via_fold(fd: Folder, A1: Alphabet, A2: Alphabet, h: Word) -> Word:
    v, img = fd.root, ()
    for l in h:
        e = next((e for e in fd.stars[v] if fd.letter[e] == l), None)
        if e is None:
            raise MalformedInput(f"{A1.format_word(h)} is not in the subgroup")
        img = img + fd.lam[e]
        v = fd.dst[e]
    if v != fd.root:
        raise MalformedInput(f"{A1.format_word(h)} is not in the subgroup")
    return normalize(A2, img)


def _good_edges(fd: Folder) -> set:
    """Edges e from which a non-backtracking walk (starting with e) reaches the root."""
    good = {e for e in fd.src if fd.dst[e] == fd.root}
    into: dict = {}
    for e in fd.src:
        into.setdefault(fd.dst[e], []).append(e)
    q = deque(good)
    while q:
        f = q.popleft()
        # e can be followed by f unless f undoes e
        for e in into.get(fd.src[f], ()):
            if e not in good and fd.inv[e] != f:
                good.add(e)
                q.append(e)
    return good


def _closed_walks(fd: Folder, A2: Alphabet, max_len: int, limit: int):
    """Reduced subgroup elements with their images, by increasing length."""
    out = []
    level = [((), (), fd.root, None)]
    for _ in range(max_len):
        nxt = []
        for w, img, v, last in level:
            for e in sorted(fd.stars[v], key=lambda e: fd.letter[e].sort_key()):
                if last is not None and fd.inv[last] == e:
                    continue
                w2, img2 = w + (fd.letter[e],), normalize(A2, img + fd.lam[e])
                nxt.append((w2, img2, fd.dst[e], e))
                if fd.dst[e] == fd.root:
                    out.append((w2, img2))
                    if len(out) >= limit:
                        return out
        level = nxt
    return out


def _completion(fd: Folder, path_end: int, last_edge: Optional[int], good: set) -> list:
    """Shortest non-backtracking continuation from a vertex back to the root."""
    if path_end == fd.root:
        return []
    start = [(e, [e]) for e in fd.stars[path_end] if e in good and (last_edge is None or fd.inv[last_edge] != e)]
    seen = {e for e, _ in start}
    q = deque(sorted(start, key=lambda t: fd.letter[t[0]].sort_key()))
    while q:
        e, path = q.popleft()
        if fd.dst[e] == fd.root:
            return path
        for f in sorted(fd.stars[fd.dst[e]], key=lambda f: fd.letter[f].sort_key()):
            if f in good and fd.inv[e] != f and f not in seen:
                seen.add(f)
                q.append((f, path + [f]))
    raise RuntimeError("no completion for a good edge")


def gamma_extend(alpha: dict, A1: Alphabet, A2: Alphabet, R: int, sample_limit: int = 20000) -> PartialLengthBijection:
    """Extend alpha (on subgroup generators) to a bijection ``ball(A1,R) -> ball(A2,R)``."""
    if A1.degree != A2.degree:
        raise DegreeMismatch(f"degrees differ: {A1.degree} vs {A2.degree}")
    fd = Folder(A1, image_alphabet=A2)
    for h, img in sorted(alpha.items(), key=lambda kv: word_sort_key(normalize(A1, kv[0]))):
        fd.add_word(normalize(A1, h), normalize(A2, img))
    gamma = PartialLengthBijection(A1, A2, R, folded=fd)

    # forced part: prefixes of subgroup elements
    good = _good_edges(fd)
    frontier = [((), fd.root, None)]
    gamma.C.add(())
    gamma.forward[()] = ()
    for n in range(1, R + 1):
        nxt = []
        for c, v, last in frontier:
            for e in fd.stars[v]:
                if e not in good or (last is not None and fd.inv[last] == e):
                    continue
                c2 = c + (fd.letter[e],)
                tail = _completion(fd, fd.dst[e], e, good)
                h = c2 + tuple(fd.letter[f] for f in tail)
                img = normalize(A2, sum((fd.lam[f] for f in [*_path(fd, c), e, *tail]), ()))
                if len(img) != len(h):
                    raise LengthViolation(
                        f"alpha changes the length of {A1.format_word(h)}", witness=(h, img)
                    )
                if img[: n - 1] != gamma.forward[c]:
                    raise LengthViolation(
                        f"prefix images disagree at {A1.format_word(c2)}", witness=(h, img)
                    )
                gamma.C.add(c2)
                gamma.forward[c2] = img[:n]
                nxt.append((c2, fd.dst[e], e))
        frontier = nxt

    # certify alpha on the subgroup sample
    sample = _closed_walks(fd, A2, 2 * R, sample_limit)
    gamma.sample_size = len(sample)
    for h, img in sample:
        if len(img) != len(h):
            raise LengthViolation(f"alpha changes the length of {A1.format_word(h)}", witness=(h, img))
        for k in range(1, min(len(h), R) + 1):
            if gamma.forward[h[:k]] != img[:k]:
                raise LengthViolation(
                    f"prefix images disagree at {A1.format_word(h[:k])}", witness=(h, img)
                )
    seen_img: dict = {}
    for c, y in gamma.forward.items():
        if y in seen_img:
            raise LengthViolation("alpha-forced map is not injective", witness=(seen_img[y], c))
        seen_img[y] = c

    # free part, level by level; theta fixed as lexicographic matching
    level = [()]
    for _ in range(R):
        nxt = []
        for p in level:
            kids = [p + (l,) for l in extensions(A1, p)]
            forced_imgs = {gamma.forward[k][-1] for k in kids if k in gamma.C}
            E = [k for k in kids if k not in gamma.C]
            F = [y for y in extensions(A2, gamma.forward[p]) if y not in forced_imgs]
            if len(E) != len(F):
                raise LengthViolation("free continuation sets differ in size", witness=(p, E, F))
            if E:
                gamma.log.append((p, [k[-1:] for k in E], [(y,) for y in F]))
            for k, y in zip(E, F):
                gamma.forward[k] = gamma.forward[p] + (y,)
            nxt.extend(kids)
        level = nxt
    gamma.backward = {v: w for w, v in gamma.forward.items()}
    if len(gamma.backward) != len(gamma.forward):
        raise LengthViolation("gamma is not injective")
    return gamma


def _path(fd: Folder, c: Word) -> list:
    v, out = fd.root, []
    for l in c:
        e = next(e for e in fd.stars[v] if fd.letter[e] == l)
        out.append(e)
        v = fd.dst[e]
    return out


# -- beta from gamma -------------------------------------------------------------


@dataclass
class BetaResult:
    vertex_map: dict
    radius: int
    covers_all: bool


def beta_from_gamma(gamma: PartialLengthBijection, g1: LabeledGraph, g2: LabeledGraph, root1=None, root2=None) -> BetaResult:
    """``follow(root1, f) -> follow(root2, gamma(f))`` over the ball, with checks."""
    r1 = g1.root if root1 is None else root1
    r2 = g2.root if root2 is None else root2
    vmap: dict = {}
    back: dict = {}
    witness: dict = {}
    for f, y in sorted(gamma.forward.items(), key=lambda kv: word_sort_key(kv[0])):
        v, w = g1.follow(r1, f), g2.follow(r2, y)
        if v is None or w is None:
            # leaves a window; only a contradiction inside both graphs counts
            continue
        if vmap.setdefault(v, w) != w:
            raise IllDefinedMap("two words for one vertex have different images", witness=(witness[v], f))
        if back.setdefault(w, v) != v:
            raise IllDefinedMap("two vertices share an image", witness=(witness.get(back[w]), f))
        witness.setdefault(v, f)
    for v, w in vmap.items():
        if v in g1.boundary or w in g2.boundary:
            continue
        n1, n2 = set(g1.neighbors(v)), set(g2.neighbors(w))
        if not (n1 <= vmap.keys() and n2 <= back.keys()):
            continue
        if _star_profile(g1, v, vmap) != _star_profile(g2, w, None):
            raise IllDefinedMap("edge multiplicities differ", witness=(witness[v],))
    covers = len(vmap) == g1.n == g2.n
    return BetaResult(vmap, gamma.radius, covers)


def _star_profile(g: LabeledGraph, v: int, vmap: Optional[dict]) -> tuple:
    deg = sum(1 for e in g.star(v) if g.is_degenerate(e))
    loops = sum(1 for e in g.star(v) if not g.is_degenerate(e) and g.dst(e) == v)
    nbrs = Counter(g.dst(e) if vmap is None else vmap[g.dst(e)] for e in g.star(v) if g.dst(e) != v)
    return deg, loops, sorted(nbrs.items())


# -- property checks ---------------------------------------------------------------


@dataclass
class PropertiesReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def lemma_properties_check(gamma: PartialLengthBijection, sample: Optional[int] = None, seed: int = 0) -> PropertiesReport:
    """Length/prefix preservation of gamma and its inverse, plus
    ``gamma(f g^-1) = gamma(f) gamma(g)^-1`` on subgroup elements (both directions).

    ``sample=None`` checks every subgroup element in the ball.
    """
    A1, A2, R = gamma.A1, gamma.A2, gamma.radius
    rep = PropertiesReport()
    fwd, bwd = gamma.forward, gamma.backward

    def bad(kind, *w):
        rep.violations.append((kind, w))

    for name, m, A in (("gamma", fwd, A1), ("gamma^-1", bwd, A2)):
        for w, v in m.items():
            rep.checked += 1
            if len(v) != len(w):
                bad(f"{name} length", w, v)
            elif w and m.get(w[:-1]) != v[:-1]:
                bad(f"{name} prefix", w, v)
    if len(bwd) != len(fwd):
        bad("not injective")

    hs = [h for h, _ in _closed_walks(gamma.folded, A2, R, 10**6)] if gamma.folded else []
    if sample is not None and len(hs) > sample:
        hs = random.Random(seed).sample(hs, sample)
    for h in hs:
        if fwd.get(h) != gamma.alpha(h):
            bad("gamma differs from alpha", h)
        for k in range(len(h) + 1):
            f, g = h[:k], invert(A1, h[k:])
            rep.checked += 1
            if fwd.get(h) != multiply(A2, fwd[f], invert(A2, fwd[g])):
                bad("gamma(f g^-1)", f, g)
        hh = fwd.get(h)
        if hh is None:
            continue
        for k in range(len(hh) + 1):
            f, g = hh[:k], invert(A2, hh[k:])
            rep.checked += 1
            if bwd.get(hh) != multiply(A1, bwd[f], invert(A1, bwd[g])):
                bad("gamma^-1(f g^-1)", f, g)
    return rep


def corrupt(gamma: PartialLengthBijection, u: Word, v: Word) -> PartialLengthBijection:
    """Copy with the images of u and v swapped (for negative controls)."""
    out = PartialLengthBijection(gamma.A1, gamma.A2, gamma.radius, dict(gamma.forward), {}, set(gamma.C), list(gamma.log), gamma.sample_size, gamma.folded)
    out.forward[u], out.forward[v] = gamma.forward[v], gamma.forward[u]
    out.backward = {y: w for w, y in out.forward.items()}
    return out
