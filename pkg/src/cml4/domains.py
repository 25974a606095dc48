"""Continuity domains of the reduced map and their affine offsets.

Each domain is listed by the inequalities bounding it inside one of the eight
half-unit cubes; the cube bounds are added so every domain is a bounded
polytope. Strict inequalities are read as non-strict (closures).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .geometry import ConvexPolyhedron, HalfSpace

# cube id -> (p, q, r) half: 0 means [0, 1/2], 1 means [1/2, 1]
CUBES = {
    1: (0, 0, 0),
    2: (0, 1, 0),
    3: (1, 1, 0),
    4: (1, 0, 0),
    5: (0, 0, 1),
    6: (0, 1, 1),
    7: (1, 1, 1),
    8: (1, 0, 1),
}

DOMAIN_TABLE = {
    "1a": (1, "p>0; q>0; r>0; p+q+r<1/2"),
    "1b": (1, "p<1/2; r>0; p+q>1/2; q+r<1/2"),
    "1c": (1, "p>0; r<1/2; p+q<1/2; q+r>1/2"),
    "1d": (1, "q>0; p+q<1/2; q+r<1/2; p+q+r>1/2"),
    "1e": (1, "p<1/2; q<1/2; r<1/2; p+q>1/2; q+r>1/2"),
    "2a": (2, "0<p<1/2; 1/2<q<1; 0<r<1/2; p+q+r<3/2"),
    "2b": (2, "p<1/2; q<1; r<1/2; p+q+r>3/2"),
    "3a": (3, "p<1; q<1; 0<r<1/2; p+q>3/2"),
    "3b": (3, "p>1/2; q>1/2; r<1/2; p+q<3/2; p+q+r>3/2"),
    "3c": (3, "p>1/2; q>1/2; r>0; p+q+r<3/2"),
    "4a": (4, "1/2<p<1; q>0; r>0; q+r<1/2"),
    "4b": (4, "p>1/2; q<1/2; r<1/2; q+r>1/2; p+q+r<3/2"),
    "4c": (4, "p<1; q<1/2; r<1/2; p+q+r>3/2"),
    "5a": (5, "p>0; q>0; 1/2<r<1; p+q<1/2"),
    "5b": (5, "p<1/2; q<1/2; r>1/2; p+q>1/2; p+q+r<3/2"),
    "5c": (5, "p<1/2; q<1/2; r<1; p+q+r>3/2"),
    "6a": (6, "0<p<1/2; q<1; r<1; q+r>3/2"),
    "6b": (6, "p<1/2; q>1/2; r>1/2; q+r<3/2; p+q+r>3/2"),
    "6c": (6, "p>0; q>1/2; r>1/2; p+q+r<3/2"),
    "7a": (7, "p<1; q<1; r<1; p+q+r>5/2"),
    "7b": (7, "p>1/2; r<1; p+q<3/2; q+r>3/2"),
    "7c": (7, "p<1; r>1/2; p+q>3/2; q+r<3/2"),
    "7d": (7, "q<1; p+q>3/2; q+r>3/2; p+q+r<5/2"),
    "7e": (7, "p>1/2; q>1/2; r>1/2; p+q<3/2; q+r<3/2"),
    "8a": (8, "1/2<p<1; 0<q<1; 1/2<r<1; p+q+r>3/2"),
    "8b": (8, "p>1/2; q>0; r>1/2; p+q+r<3/2"),
}

OFFSETS = {
    "1a": (0, 0, 0), "1b": (2, 1, 0), "1c": (0, 1, 2), "1d": (1, 0, 1), "1e": (1, 2, 1),
    "2a": (0, 4, 0), "2b": (1, 4, 1),
    "3a": (4, 4, 0), "3b": (3, 3, 1), "3c": (2, 3, 0),
    "4a": (4, 0, 0), "4b": (3, 1, 1), "4c": (4, 1, 2),
    "5a": (0, 0, 4), "5b": (1, 1, 3), "5c": (2, 1, 4),
    "6a": (0, 4, 4), "6b": (1, 3, 3), "6c": (0, 3, 2),
    "7a": (4, 4, 4), "7b": (2, 3, 4), "7c": (4, 3, 2), "7d": (3, 4, 3), "7e": (3, 2, 3),
    "8a": (4, 0, 4), "8b": (3, 0, 3),
}

# In cubes 3 and 6 each row carries the letter whose offset matches the
# closed-form map inside that domain. An alternative lettering rotates the
# three rows within each cube; this maps our letter to that one.
ROTATED_ROWS = {"3a": "3c", "3b": "3a", "3c": "3b", "6a": "6c", "6b": "6a", "6c": "6b"}

LABELS = tuple(DOMAIN_TABLE)

_VARS = {"p": (1, 0, 0), "q": (0, 1, 0), "r": (0, 0, 1)}
_TOKEN = re.compile(r"\s*([<>])\s*")


def linear_form(expr: str) -> tuple[int, ...]:
    """'p+q+r' -> (1, 1, 1)."""
    out = [0, 0, 0]
    for name in expr.strip().split("+"):
        for i, c in enumerate(_VARS[name.strip()]):
            out[i] += c
    return tuple(out)


def parse_inequalities(text: str) -> list[HalfSpace]:
    """Parse '0<p<1/2; p+q>1/2' style chains into closed half-spaces."""
    hs = []
    for clause in text.split(";"):
        parts = _TOKEN.split(clause.strip())
        # parts alternate operand, op, operand, ...
        for i in range(0, len(parts) - 2, 2):
            lhs, op, rhs = parts[i], parts[i + 1], parts[i + 2]
            if op == ">":
                lhs, rhs = rhs, lhs
            # lhs <= rhs; exactly one side is a variable expression
            if lhs[0] in _VARS:
                hs.append(HalfSpace(linear_form(lhs), Fraction(rhs)))
            else:
                hs.append(HalfSpace(tuple(-c for c in linear_form(rhs)), -Fraction(lhs)))
    return hs


def cube_halfspaces(cube: int) -> list[HalfSpace]:
    hs = []
    half = Fraction(1, 2)
    for i, side in enumerate(CUBES[cube]):
        e = [0, 0, 0]
        e[i] = 1
        lo, hi = (0, half) if side == 0 else (half, 1)
        hs.append(HalfSpace(tuple(-x for x in e), -lo))
        hs.append(HalfSpace(tuple(e), hi))
    return hs


@dataclass(frozen=True)
class Branch:
    label: str
    domain: ConvexPolyhedron
    offset: tuple[int, ...]
    # defining inequalities without the cube bounds, used by classify
    table: tuple[HalfSpace, ...] = ()

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "offset": list(self.offset),
            "inequalities": [h.to_json() for h in self.table],
            "domain": self.domain.to_json(self.label)["halfspaces"],
        }


def build_branches() -> tuple[Branch, ...]:
    out = []
    for label, (cube, text) in DOMAIN_TABLE.items():
        table = tuple(parse_inequalities(text))
        dom = ConvexPolyhedron(table + tuple(cube_halfspaces(cube)), 3).reduced()
        out.append(Branch(label, dom, OFFSETS[label], table))
    return tuple(out)


BRANCHES = build_branches()
BRANCH_BY_LABEL = {b.label: b for b in BRANCHES}
