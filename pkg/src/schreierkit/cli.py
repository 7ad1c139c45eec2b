"""Command line front end; every command prints newline-delimited JSON.

Exit status 0 whenever a verdict was computed (including negative ones),
2 on unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import corpus
from .cover import ends_estimate, max_fiber_diameter, plain_cover_find, qi_certificate, x_cover_find
from .factorize import NotSchreier, PlainGraph, schreierize
from .isoauto import analyze_report, rooted_iso, rooted_x_iso
from .lgraph import LabeledGraph, PreconditionError, ball_truncate
from .perms import EnumerationBoundExceeded
from .schreier import DEFAULT_MAX_VERTICES, SubgroupPresentation, coset_closure
from .words import Alphabet, MalformedInput

INSTANCES = (
    "petersen", "fig2", "fig3-top", "fig3-base", "fig4-top", "fig4-base",
    "fig5-top", "fig5-base", "line", "an-hn", "an-hn-even", "circulant", "subgroup",
)


class InputError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _read_graph(path: str) -> LabeledGraph:
    g = LabeledGraph.from_json(_read_json(path))
    problems = g.check_wellformed()
    if problems:
        raise InputError(f"{path}: {problems[0]}")
    return g


def _parse_alphabet(spec: str) -> Alphabet:
    """``"x:inf,a:2"``."""
    try:
        return Alphabet(tuple(tuple(part.split(":")) for part in spec.split(",")))
    except ValueError as exc:
        raise InputError(f"bad alphabet {spec!r}: {exc}") from exc


def _build(args) -> LabeledGraph:
    W, name = args.window, args.instance
    if name == "petersen":
        return corpus.petersen_schreier()
    if name == "fig2":
        return corpus.fig2_window(W)
    if name == "line":
        return corpus.line_window(W)
    if name.startswith("fig"):
        fig, part = name.split("-")
        pair = {"fig3": corpus.fig3_pair, "fig4": corpus.fig4_pair, "fig5": corpus.fig5_pair}[fig](W)
        return pair.top if part == "top" else pair.base
    if name == "an-hn":
        return corpus.an_hn(args.n)[1]
    if name == "an-hn-even":
        return corpus.an_hn_even(args.n)[1]
    if name == "circulant":
        return corpus.circulant(args.n, args.jumps)
    if name == "subgroup":
        if not args.alphabet:
            raise InputError("subgroup needs --alphabet")
        A = _parse_alphabet(args.alphabet)
        H = SubgroupPresentation.parse(A, args.gens or [], args.conjugator or "")
        table = coset_closure(H, max_vertices=args.max_vertices)
        g = table.to_graph()
        if not table.complete:
            # infinite index: keep a ball, the rest of the partial table is noise
            g = ball_truncate(g, g.root, args.radius if args.radius is not None else 6)
        return g
    raise InputError(f"unknown instance {name!r}")


def cmd_build(args) -> None:
    _emit(_build(args).to_json())


def cmd_analyze(args) -> None:
    g = _read_graph(args.graph)
    if g.root is None:
        g.root = 0
    _emit(analyze_report(g))


def cmd_iso(args) -> None:
    g1, g2 = _read_graph(args.graph1), _read_graph(args.graph2)
    r1 = args.root1 if args.root1 is not None else (g1.root or 0)
    r2 = args.root2 if args.root2 is not None else (g2.root or 0)
    out = {}
    res = rooted_iso(g1, r1, g2, r2, radius=args.radius)
    out["iso"] = "false" if res is None else res.verdict.value
    out["vertex_map"] = None if res is None else {str(k): v for k, v in sorted(res.vertex_map.items())}
    if g1.labeled and g2.labeled and g1.alphabet == g2.alphabet:
        xr = rooted_x_iso(g1, r1, g2, r2)
        out["x_iso"] = "false" if xr is None else xr.verdict.value
    _emit(out)


def cmd_cover(args) -> None:
    g1, g2 = _read_graph(args.graph1), _read_graph(args.graph2)
    if args.plain:
        phi = plain_cover_find(g1, g2)
    else:
        if g1.root is None:
            g1.root = 0
        phi = x_cover_find(g1, g2)
    limited = bool(g1.boundary or g2.boundary)
    if phi is None:
        _emit({"found": False, "degree": None, "max_fiber_diameter": None, "qi": None, "radius_limited": limited})
        return
    cert = qi_certificate(phi, sample=args.sample, seed=args.seed)
    _emit(
        {
            "found": True,
            "degree": phi.degree,
            "max_fiber_diameter": max_fiber_diameter(phi),
            "qi": cert.to_json(),
            "qi_holds": cert.ok,
            "radius_limited": limited,
        }
    )


def cmd_ends(args) -> None:
    family = corpus.window_family(args.family)
    radii = args.radius_list or [2, 3, 4]
    est = ends_estimate(family, radii)
    out = est.to_json()
    out["family"] = args.family
    out["per_radius"] = {str(k): v for k, v in out["per_radius"].items()}
    _emit(out)


def cmd_schreierize(args) -> None:
    g = PlainGraph.from_json(_read_json(args.graph))
    try:
        _emit({"schreier": True, "graph": schreierize(g).to_json()})
    except NotSchreier as exc:
        _emit({"schreier": False, "reason": str(exc)})


def cmd_export(args) -> None:
    g = _read_graph(args.graph)
    if args.format == "dot":
        sys.stdout.write(g.to_dot() + "\n")
    else:
        _emit(g.to_json())


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schreierkit", description="Schreier graphs, length-isomorphisms and coverings.")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="emit a built-in graph as JSON")
    b.add_argument("instance", choices=INSTANCES)
    b.add_argument("--window", type=int, default=8)
    b.add_argument("--radius", type=int, default=None, help="truncate infinite coset graphs to this ball")
    b.add_argument("--max-vertices", type=int, default=DEFAULT_MAX_VERTICES)
    b.add_argument("--n", type=int, default=7)
    b.add_argument("--jumps", type=int, nargs="+", default=[1, 2])
    b.add_argument("--alphabet", help='e.g. "x:inf,a:2"')
    b.add_argument("--gens", nargs="*", help='subgroup generators, e.g. "x^2" "a x a"')
    b.add_argument("--conjugator", default="")
    b.set_defaults(func=cmd_build)

    a = sub.add_parser("analyze", help="transitivity report for a graph")
    a.add_argument("graph")
    a.set_defaults(func=cmd_analyze)

    i = sub.add_parser("iso", help="rooted isomorphism test")
    i.add_argument("graph1")
    i.add_argument("graph2")
    i.add_argument("--root1", type=int)
    i.add_argument("--root2", type=int)
    i.add_argument("--radius", type=int, default=None)
    i.set_defaults(func=cmd_iso)

    c = sub.add_parser("cover", help="find a covering graph1 -> graph2")
    c.add_argument("graph1")
    c.add_argument("graph2")
    c.add_argument("--plain", action="store_true", help="ignore labels")
    c.add_argument("--sample", type=int, default=None, help="sample this many pairs for the QI check")
    c.set_defaults(func=cmd_cover)

    e = sub.add_parser("ends", help="estimate the number of ends of a window family")
    e.add_argument("family")
    e.add_argument("--radius", dest="radius_list", type=int, action="append")
    e.set_defaults(func=cmd_ends)

    s = sub.add_parser("schreierize", help="label a plain regular graph")
    s.add_argument("graph")
    s.set_defaults(func=cmd_schreierize)

    x = sub.add_parser("export", help="re-emit a graph as dot or json")
    x.add_argument("graph")
    x.add_argument("--format", choices=["dot", "json"], default="json")
    x.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    random.seed(args.seed)
    try:
        args.func(args)
    except (InputError, MalformedInput, PreconditionError, EnumerationBoundExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
