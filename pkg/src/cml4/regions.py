"""Candidate invariant regions: the polyhedra P0, P1, P2 and the unions A, S.

Every constant is an exact rational function of the coupling: eps/2,
1 - eps/2, the period-two point p* and the first two Lorenz iterates of the
domain endpoints.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .geometry import ConvexPolyhedron, Region, as_fraction, ge, le
from .lorenz import LorenzMap, above_eps1, p_star
from .symmetry import apply_to_polyhedron, word

HALF = Fraction(1, 2)

P, Q, R = (1, 0, 0), (0, 1, 0), (0, 0, 1)
PQ, QR, PR, PQR = (1, 1, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1)

A_WORDS = ("", "S3", "S4", "S3S4")
A_MEMBERS = (("P1", ""), ("P2", ""), ("P1", "S3"), ("P1", "S4"), ("P1", "S3S4"), ("P2", "S3"))
S_WORDS = ("", "S0", "S1", "S2", "S3", "S4", "S5", "S0S1", "S2S1", "S3S1", "S4S1", "S5S1")
# pairs of members forming one connected component of S
S_COMPONENTS = (
    ("P0", "S0S1(P0)"),
    ("S0(P0)", "S1(P0)"),
    ("S2(P0)", "S5S1(P0)"),
    ("S3(P0)", "S4S1(P0)"),
    ("S4(P0)", "S3S1(P0)"),
    ("S5(P0)", "S2S1(P0)"),
)

# subgroup generators whose action permutes the members of each region
STABILIZER_GENERATORS = {"A": ("S3", "S4"), "S": ("S0", "S1", "S2", "S3", "S4", "S5", "S6")}
GENERATING_MEMBERS = {"A": ("P1", "P2"), "S": ("P0",)}

NOT_TORUS_FAITHFUL = "representation not torus-faithful below 1 - sqrt(2)/2"


class NotBuildable(ValueError):
    pass


def _check(eps) -> Fraction:
    eps = as_fraction(eps)
    if not 0 < eps < HALF:
        raise NotBuildable(f"regions need 0 < eps < 1/2, got {eps}")
    return eps


def polyhedron_p1(eps) -> ConvexPolyhedron:
    eps = _check(eps)
    ps = p_star(eps)
    return ConvexPolyhedron((
        ge(Q, eps / 2),
        ge(R, 0),
        ge(PQ, 1 - ps),
        le(QR, ps),
        le(PQR, 1 - eps / 2),
    ))


def polyhedron_p2(eps) -> ConvexPolyhedron:
    eps = _check(eps)
    ps = p_star(eps)
    return ConvexPolyhedron((
        le(P, 1),
        ge(R, 0),
        ge(PQ, 1 + ps),
        le(QR, 1 - ps),
    ))


def polyhedron_p0(eps) -> ConvexPolyhedron:
    eps = _check(eps)
    L = LorenzMap(eps)
    lo, hi = eps / 2, 1 - eps / 2
    L_lo, L_hi, L2_hi = L(lo), L(hi), L.iterate(hi, 2)
    return ConvexPolyhedron((
        ge(P, L_lo), le(P, L_hi),
        ge(Q, lo), le(Q, L2_hi),
        ge(R, L_lo), le(R, L_hi),
        ge(PQR, 1 + lo), le(PQR, 1 + L2_hi),
    ))


BASE = {"P0": polyhedron_p0, "P1": polyhedron_p1, "P2": polyhedron_p2}


def _image_label(w: str, base: str) -> str:
    return f"{w}({base})" if w else base


def _members(eps, pairs) -> tuple[tuple[str, ConvexPolyhedron], ...]:
    cache = {}
    out = []
    for base, w in pairs:
        if base not in cache:
            cache[base] = BASE[base](eps)
        poly = apply_to_polyhedron(word(w), cache[base]) if w else cache[base]
        out.append((_image_label(w, base), poly))
    return tuple(out)


def build_region(name: str, eps) -> Region:
    """Region P0, P1, P2, A or S at the given rational coupling."""
    eps = _check(eps)
    if name in BASE:
        return Region(name, ((name, BASE[name](eps)),))
    if name == "A":
        return Region("A", _members(eps, A_MEMBERS))
    if name == "S":
        notes = () if above_eps1(eps) else (NOT_TORUS_FAITHFUL,)
        return Region("S", _members(eps, [("P0", w) for w in S_WORDS]), notes)
    raise NotBuildable(f"unknown region {name!r}")


REGION_NAMES = ("P0", "P1", "P2", "A", "S")


@dataclass(frozen=True)
class Constants:
    """The named rational constants shared by the region tables."""

    eps: Fraction
    half_eps: Fraction
    p_star: Fraction
    L_lo: Fraction
    L_hi: Fraction
    L2_lo: Fraction
    L2_hi: Fraction

    @classmethod
    def at(cls, eps) -> Constants:
        eps = as_fraction(eps)
        L = LorenzMap(eps)
        lo, hi = eps / 2, 1 - eps / 2
        return cls(eps, lo, p_star(eps), L(lo), L(hi), L.iterate(lo, 2), L.iterate(hi, 2))

    def to_json(self) -> dict:
        return {k: str(v) for k, v in self.__dict__.items()}


__all__ = [
    "build_region", "polyhedron_p0", "polyhedron_p1", "polyhedron_p2", "Constants",
    "A_MEMBERS", "S_WORDS", "S_COMPONENTS", "NotBuildable",
]
