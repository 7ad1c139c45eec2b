"""Schreier graphs of free products of Z and Z/2Z: construction, isomorphism,
length-preserving bijections, coverings and ends."""

from .words import Alphabet, Letter, MalformedInput, ball, normalize
from .lgraph import LabeledGraph, PreconditionError
from .schreier import CosetTable, SubgroupPresentation, coset_closure, reconstruct_subgroup
from .isoauto import Verdict, is_transitive, orbit_partition, rooted_iso, rooted_x_iso, x_orbits
from .cover import CoveringMap, plain_cover_find, x_cover_find

__all__ = [
    "Alphabet", "Letter", "MalformedInput", "ball", "normalize",
    "LabeledGraph", "PreconditionError",
    "CosetTable", "SubgroupPresentation", "coset_closure", "reconstruct_subgroup",
    "Verdict", "is_transitive", "orbit_partition", "rooted_iso", "rooted_x_iso", "x_orbits",
    "CoveringMap", "plain_cover_find", "x_cover_find",
]
