"""Exact rational polytope calculus in dimension 2 and 3.

Polyhedra are stored in H-representation (``a . x <= b``) with
:class:`fractions.Fraction` coefficients. Vertex enumeration intersects every
``d``-subset of constraint hyperplanes, which is cheap for the dozen or so
constraints that appear here. Internally each half-space is rescaled to a
primitive integer row so the enumeration runs on Python ints.

Torus identification is handled by bounded integer-shift searches in
:func:`contains_in_region` and :func:`regions_disjoint`; every polyhedron is
kept in lifted (un-reduced) Euclidean coordinates.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Scalar = Fraction
Point = tuple[Fraction, ...]

DEFAULT_SHIFT_RANGE = 3
_BIG = 2**40


class GeometryError(ValueError):
    pass


class UnboundedError(GeometryError):
    pass


class EmptyPolyhedronError(GeometryError):
    pass


class ShiftRangeExhausted(GeometryError):
    """A lattice shift outside the search range would be needed."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # decimal reading keeps "0.41" as 41/100
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class HalfSpace:
    """Closed half-space ``normal . x <= bound``."""

    normal: tuple[Fraction, ...]
    bound: Fraction

    def __post_init__(self):
        normal = tuple(as_fraction(a) for a in self.normal)
        if not any(normal):
            raise GeometryError("half-space normal must be nonzero")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "bound", as_fraction(self.bound))

    @property
    def dim(self) -> int:
        return len(self.normal)

    @functools.cached_property
    def int_row(self) -> tuple[tuple[int, ...], int]:
        """Primitive integer form (a, b) describing the same half-space."""
        dens = [c.denominator for c in self.normal] + [self.bound.denominator]
        m = math.lcm(*dens)
        a = [int(c * m) for c in self.normal]
        b = int(self.bound * m)
        g = math.gcd(*a, b)
        return tuple(x // g for x in a), b // g

    def value(self, x: Sequence) -> Fraction:
        return sum((a * xi for a, xi in zip(self.normal, x)), Fraction(0))

    def contains(self, x: Sequence) -> bool:
        return self.value(x) <= self.bound

    def flipped(self) -> HalfSpace:
        """The complementary closed half-space ``normal . x >= bound``."""
        return HalfSpace(tuple(-a for a in self.normal), -self.bound)

    def to_json(self) -> dict:
        return {"a": [fraction_str(a) for a in self.normal], "b": fraction_str(self.bound)}

    @classmethod
    def from_json(cls, obj: dict) -> HalfSpace:
        return cls(tuple(parse_fraction(s) for s in obj["a"]), parse_fraction(obj["b"]))


def le(normal: Sequence, bound) -> HalfSpace:
    return HalfSpace(tuple(normal), bound)


def ge(normal: Sequence, bound) -> HalfSpace:
    return HalfSpace(tuple(-as_fraction(a) for a in normal), -as_fraction(bound))


def fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(s: str) -> Fraction:
    return Fraction(s.strip())


@dataclass(frozen=True)
class ConvexPolyhedron:
    halfspaces: tuple[HalfSpace, ...]
    dim: int = 3

    def __post_init__(self):
        hs = tuple(self.halfspaces)
        if self.dim not in (2, 3):
            raise GeometryError("only dimensions 2 and 3 are supported")
        for h in hs:
            if h.dim != self.dim:
                raise GeometryError("half-space dimension mismatch")
        object.__setattr__(self, "halfspaces", hs)

    @functools.cached_property
    def vertices(self) -> tuple[Point, ...]:
        return tuple(_enumerate_vertices(self))

    @functools.cached_property
    def affine_dim(self) -> int:
        """Dimension of the affine hull of the vertices (-1 if empty)."""
        return affine_rank(self.vertices)

    @property
    def full_dimensional(self) -> bool:
        return self.affine_dim == self.dim

    @functools.cached_property
    def bbox(self) -> tuple[Point, Point]:
        vs = self.vertices
        if not vs:
            raise EmptyPolyhedronError("empty polyhedron has no bounding box")
        lo = tuple(min(v[i] for v in vs) for i in range(self.dim))
        hi = tuple(max(v[i] for v in vs) for i in range(self.dim))
        return lo, hi

    def contains_point(self, x: Sequence) -> bool:
        return all(h.contains(x) for h in self.halfspaces)

    def centroid(self) -> Point:
        """Vertex average; an interior point when full-dimensional."""
        vs = self.vertices
        if not vs:
            raise EmptyPolyhedronError("empty polyhedron")
        n = len(vs)
        return tuple(sum((v[i] for v in vs), Fraction(0)) / n for i in range(self.dim))

    @functools.cached_property
    def facets(self) -> tuple[tuple[HalfSpace, tuple[Point, ...]], ...]:
        """Facet-defining half-spaces with the vertices lying on each facet.

        Only meaningful for full-dimensional polyhedra; one entry per distinct
        supporting hyperplane.
        """
        if not self.full_dimensional:
            return ()
        out = []
        seen = set()
        for h in self.halfspaces:
            key = h.int_row
            if key in seen:
                continue
            on = tuple(v for v in self.vertices if h.value(v) == h.bound)
            if affine_rank(on) == self.dim - 1:
                seen.add(key)
                out.append((h, on))
        return tuple(out)

    def reduced(self) -> ConvexPolyhedron:
        """Drop redundant constraints (full-dimensional case only)."""
        if not self.full_dimensional:
            return self
        red = ConvexPolyhedron(tuple(h for h, _ in self.facets), self.dim)
        red.__dict__["vertices"] = self.vertices
        return red

    def to_json(self, label: str = "") -> dict:
        return {"label": label, "halfspaces": [h.to_json() for h in self.halfspaces]}

    @classmethod
    def from_json(cls, obj: dict) -> ConvexPolyhedron:
        hs = tuple(HalfSpace.from_json(h) for h in obj["halfspaces"])
        if not hs:
            raise GeometryError("polyhedron needs at least one half-space")
        return cls(hs, hs[0].dim)


def box(lo: Sequence, hi: Sequence) -> ConvexPolyhedron:
    d = len(lo)
    hs = []
    for i in range(d):
        e = [0] * d
        e[i] = 1
        hs.append(ge(e, lo[i]))
        hs.append(le(e, hi[i]))
    return ConvexPolyhedron(tuple(hs), d)


def unit_cube(d: int = 3) -> ConvexPolyhedron:
    return box([0] * d, [1] * d)


# ---------------------------------------------------------------------------
# vertex enumeration


def _det3(a, b, c) -> int:
    return (a[0] * (b[1] * c[2] - b[2] * c[1])
            - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def _solve_int(rows) -> tuple[tuple[int, ...], int] | None:
    """Cramer solve of ``a_i . x = b_i``; returns (numerators, den>0) or None."""
    if len(rows) == 3:
        (a1, b1), (a2, b2), (a3, b3) = rows
        det = _det3(a1, a2, a3)
        if det == 0:
            return None
        xs = (
            _det3((b1, a1[1], a1[2]), (b2, a2[1], a2[2]), (b3, a3[1], a3[2])),
            _det3((a1[0], b1, a1[2]), (a2[0], b2, a2[2]), (a3[0], b3, a3[2])),
            _det3((a1[0], a1[1], b1), (a2[0], a2[1], b2), (a3[0], a3[1], b3)),
        )
    else:
        (a1, b1), (a2, b2) = rows
        det = a1[0] * a2[1] - a1[1] * a2[0]
        if det == 0:
            return None
        xs = (b1 * a2[1] - a1[1] * b2, a1[0] * b2 - b1 * a2[0])
    if det < 0:
        det = -det
        xs = tuple(-x for x in xs)
    g = math.gcd(det, *xs)
    return tuple(x // g for x in xs), det // g


def _raw_vertices(rows, d: int) -> list[tuple[tuple[int, ...], int]]:
    found = set()
    for combo in itertools.combinations(rows, d):
        sol = _solve_int(combo)
        if sol is None or sol in found:
            continue
        xs, den = sol
        if all(sum(ai * xi for ai, xi in zip(a, xs)) <= b * den for a, b in rows):
            found.add(sol)
    return sorted(found)


def _matrix_rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    rows = [list(map(Fraction, v)) for v in vectors]
    if not rows:
        return 0
    rank = 0
    ncols = len(rows[0])
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def affine_rank(points: Sequence[Sequence[Fraction]]) -> int:
    if not points:
        return -1
    p0 = points[0]
    return _matrix_rank([[a - b for a, b in zip(p, p0)] for p in points[1:]])


def _has_recession_direction(rows, d: int) -> bool:
    normals = [a for a, _ in rows]
    if _matrix_rank(normals) < d:
        return True
    if d == 3:
        cands = []
        for a, b in itertools.combinations(normals, 2):
            c = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
            if any(c):
                cands.append(c)
    else:
        cands = [(-a[1], a[0]) for a in normals]
    for c in cands:
        for y in (c, tuple(-x for x in c)):
            if all(sum(ai * yi for ai, yi in zip(a, y)) <= 0 for a in normals):
                return True
    return False


def _enumerate_vertices(P: ConvexPolyhedron) -> list[Point]:
    d = P.dim
    rows = list(dict.fromkeys(h.int_row for h in P.halfspaces))
    raw = _raw_vertices(rows, d) if len(rows) >= d else []
    if _has_recession_direction(rows, d):
        boxed = list(rows)
        for i in range(d):
            e = [0] * d
            e[i] = 1
            boxed.append((tuple(e), _BIG))
            boxed.append((tuple(-x for x in e), _BIG))
        if _raw_vertices(boxed, d):
            raise UnboundedError("polyhedron is unbounded")
        return []
    return [tuple(Fraction(x, den) for x in xs) for xs, den in raw]


def vertices(P: ConvexPolyhedron) -> list[Point]:
    """Extreme points of a bounded polyhedron (empty list iff P is empty)."""
    return list(P.vertices)


def is_empty(P: ConvexPolyhedron) -> bool:
    return not P.vertices


def is_full_dimensional(P: ConvexPolyhedron) -> bool:
    return P.full_dimensional


def optimize(P: ConvexPolyhedron, objective: Sequence, direction: str = "max") -> Fraction:
    """Exact optimum of ``objective . x`` over P, evaluated at the vertices."""
    vs = P.vertices
    if not vs:
        raise EmptyPolyhedronError("empty polyhedron")
    c = [as_fraction(x) for x in objective]
    vals = (sum((ci * vi for ci, vi in zip(c, v)), Fraction(0)) for v in vs)
    if direction == "max":
        return max(vals)
    if direction == "min":
        return min(vals)
    raise ValueError(f"direction must be 'min' or 'max', got {direction!r}")


def argopt(P: ConvexPolyhedron, objective: Sequence, direction: str = "max") -> tuple[Fraction, Point]:
    """Optimum value and the first optimal vertex in enumeration order."""
    best = optimize(P, objective, direction)
    c = [as_fraction(x) for x in objective]
    for v in P.vertices:
        if sum((ci * vi for ci, vi in zip(c, v)), Fraction(0)) == best:
            return best, v
    raise AssertionError("unreachable")


def intersect(P: ConvexPolyhedron, constraints: Iterable[HalfSpace] | ConvexPolyhedron) -> ConvexPolyhedron:
    if isinstance(constraints, ConvexPolyhedron):
        constraints = constraints.halfspaces
    return ConvexPolyhedron(P.halfspaces + tuple(constraints), P.dim)


def scalar_affine_image(P: ConvexPolyhedron, scale, translation: Sequence) -> ConvexPolyhedron:
    """Image of P under ``x -> scale * x + translation`` (lifted coordinates)."""
    scale = as_fraction(scale)
    if scale <= 0:
        raise GeometryError("scale must be positive")
    t = [as_fraction(x) for x in translation]
    hs = tuple(
        HalfSpace(h.normal, scale * h.bound + sum((a * ti for a, ti in zip(h.normal, t)), Fraction(0)))
        for h in P.halfspaces
    )
    out = ConvexPolyhedron(hs, P.dim)
    if "vertices" in P.__dict__:
        out.__dict__["vertices"] = tuple(
            tuple(scale * vi + ti for vi, ti in zip(v, t)) for v in P.vertices
        )
    return out


def translate(P: ConvexPolyhedron, shift: Sequence) -> ConvexPolyhedron:
    return scalar_affine_image(P, 1, shift)


def integer_matrix_inverse(M: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    n = len(M)
    if n == 2:
        det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
        adj = ((M[1][1], -M[0][1]), (-M[1][0], M[0][0]))
    else:
        det = _det3(*M)
        adj = tuple(
            tuple(
                (-1) ** (i + j) * _minor(M, j, i)
                for j in range(3)
            )
            for i in range(3)
        )
    if abs(det) != 1:
        raise GeometryError("matrix is not unimodular")
    return tuple(tuple(x * det for x in row) for row in adj)


def _minor(M, i, j) -> int:
    r = [[M[a][b] for b in range(3) if b != j] for a in range(3) if a != i]
    return r[0][0] * r[1][1] - r[0][1] * r[1][0]


def linear_image(P: ConvexPolyhedron, matrix: Sequence[Sequence[int]], translation: Sequence) -> ConvexPolyhedron:
    """Image of P under the unimodular map ``x -> M x + t``."""
    Minv = integer_matrix_inverse(matrix)
    t = [as_fraction(x) for x in translation]
    d = P.dim
    hs = []
    for h in P.halfspaces:
        a = tuple(sum((h.normal[k] * Minv[k][j] for k in range(d)), Fraction(0)) for j in range(d))
        hs.append(HalfSpace(a, h.bound + sum((ai * ti for ai, ti in zip(a, t)), Fraction(0))))
    out = ConvexPolyhedron(tuple(hs), d)
    if "vertices" in P.__dict__:
        out.__dict__["vertices"] = tuple(sorted(
            tuple(sum((matrix[i][k] * v[k] for k in range(d)), Fraction(0)) + t[i] for i in range(d))
            for v in P.vertices
        ))
    return out


# ---------------------------------------------------------------------------
# volume and face ordering


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def order_polygon(points: Sequence[Point], normal: Sequence | None = None) -> list[Point]:
    """Cyclic order of the vertices of a convex polygon.

    ``normal`` is required for polygons embedded in 3-space; the order is
    counter-clockwise when viewed from the side ``normal`` points to.
    """
    pts = sorted(set(points))
    if len(pts) < 3:
        return pts
    v0 = pts[0]
    if normal is None:
        def orient(u, w):
            a, b = _sub(u, v0), _sub(w, v0)
            return a[0] * b[1] - a[1] * b[0]
    else:
        def orient(u, w):
            return _dot(normal, _cross(_sub(u, v0), _sub(w, v0)))

    def cmp(u, w):
        s = orient(u, w)
        return -1 if s > 0 else (1 if s < 0 else 0)

    return [v0] + sorted(pts[1:], key=functools.cmp_to_key(cmp))


def polygon_area(points: Sequence[Point]) -> Fraction:
    ring = order_polygon(points)
    area = Fraction(0)
    for i in range(1, len(ring) - 1):
        a, b = _sub(ring[i], ring[0]), _sub(ring[i + 1], ring[0])
        area += a[0] * b[1] - a[1] * b[0]
    return abs(area) / 2


def volume(P: ConvexPolyhedron) -> Fraction:
    """Exact volume (area in d=2); 0 for empty or degenerate P."""
    if not P.full_dimensional:
        return Fraction(0)
    if P.dim == 2:
        return polygon_area(P.vertices)
    c = P.centroid()
    total = Fraction(0)
    for h, on in P.facets:
        ring = order_polygon(on, h.normal)
        for i in range(1, len(ring) - 1):
            total += abs(_dot(_sub(ring[0], c), _cross(_sub(ring[i], c), _sub(ring[i + 1], c))))
    return total / 6


def facet_polygons(P: ConvexPolyhedron) -> list[list[Point]]:
    """Facets as vertex rings, counter-clockwise seen from outside."""
    return [order_polygon(on, h.normal) for h, on in P.facets]


# ---------------------------------------------------------------------------
# lattice-aware region operations


@dataclass(frozen=True)
class Region:
    """Labeled finite union of lifted convex polyhedra on the torus."""

    label: str
    members: tuple[tuple[str, ConvexPolyhedron], ...]
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple((str(l), p) for l, p in self.members))

    @property
    def dim(self) -> int:
        return self.members[0][1].dim

    def member(self, label: str) -> ConvexPolyhedron:
        for l, p in self.members:
            if l == label:
                return p
        raise KeyError(label)

    @property
    def labels(self) -> list[str]:
        return [l for l, _ in self.members]

    def to_json(self) -> dict:
        out = {"label": self.label, "members": [p.to_json(l) for l, p in self.members]}
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> Region:
        members = tuple((m["label"], ConvexPolyhedron.from_json(m)) for m in obj["members"])
        return cls(obj["label"], members, tuple(obj.get("notes", ())))


def _shift_candidates(P: ConvexPolyhedron, Q: ConvexPolyhedron) -> list[tuple[int, ...]]:
    """Integer v for which the bounding boxes of P + v and Q overlap."""
    plo, phi = P.bbox
    qlo, qhi = Q.bbox
    ranges = [range(math.ceil(ql - ph), math.floor(qh - pl) + 1) for pl, ph, ql, qh in zip(plo, phi, qlo, qhi)]
    return list(itertools.product(*ranges))


def _check_range(shifts, shift_range: int):
    for v in shifts:
        if any(abs(x) > shift_range for x in v):
            raise ShiftRangeExhausted(f"lattice shift {v} exceeds range {shift_range}")


def difference(P: ConvexPolyhedron, Q: ConvexPolyhedron) -> list[ConvexPolyhedron]:
    """Full-dimensional pieces covering ``closure(P \\ Q)`` up to measure zero."""
    if not P.full_dimensional:
        return []
    Qr = Q.reduced() if Q.full_dimensional else Q
    if not intersect(P, Qr).full_dimensional:
        return [P]
    pieces = []
    kept: list[HalfSpace] = []
    for h in Qr.halfspaces:
        cand = ConvexPolyhedron(P.halfspaces + tuple(kept) + (h.flipped(),), P.dim)
        if cand.full_dimensional:
            pieces.append(cand.reduced())
        kept.append(h)
    return pieces


@dataclass(frozen=True)
class Containment:
    contained: bool
    member: str | None = None
    shift: tuple[int, ...] | None = None
    cover: tuple[tuple[str, tuple[int, ...]], ...] = ()
    witness: Point | None = None
    witness_vertex: Point | None = None

    def to_json(self) -> dict:
        out = {"contained": self.contained}
        if self.contained:
            out["member"] = self.member
            out["shift"] = list(self.shift) if self.shift is not None else None
            if self.cover:
                out["cover"] = [{"member": m, "shift": list(v)} for m, v in self.cover]
        else:
            out["witness"] = [fraction_str(x) for x in self.witness]
            out["witness_vertex"] = [fraction_str(x) for x in self.witness_vertex]
        return out


def max_over_shifted(P: ConvexPolyhedron, h: HalfSpace, shift: Sequence) -> Fraction:
    """max of ``h.normal . x`` over ``P + shift``."""
    return optimize(P, h.normal, "max") + _dot(h.normal, shift)


def _inside_member(P: ConvexPolyhedron, Q: ConvexPolyhedron, v) -> bool:
    verts = P.vertices
    for h in Q.halfspaces:
        a, b = h.normal, h.bound - _dot(h.normal, v)
        if any(_dot(a, x) > b for x in verts):
            return False
    return True


def contains_in_region(P: ConvexPolyhedron, R: Region, shift_range: int = DEFAULT_SHIFT_RANGE) -> Containment:
    """Decide whether P is contained (mod the integer lattice) in the union R.

    A single ``(member, shift)`` with ``P + shift`` inside the member is tried
    first. Otherwise P is reduced by exact set difference against every
    overlapping lattice translate of every member; containment holds iff no
    full-dimensional remainder is left. A failing answer carries an interior
    witness point of the remainder (outside every member under every shift)
    and one remainder vertex.
    """
    if not P.vertices:
        raise EmptyPolyhedronError("cannot test containment of an empty polyhedron")
    cands = []
    for label, Q in R.members:
        if not Q.vertices:
            continue
        shifts = _shift_candidates(P, Q)
        _check_range(shifts, shift_range)
        cands.extend((label, Q, v) for v in shifts)
    for label, Q, v in cands:
        if _inside_member(P, Q, v):
            return Containment(True, member=label, shift=tuple(v))
    remainder = [P] if P.full_dimensional else []
    if not remainder:
        # lower-dimensional P: fall back to its vertices and centroid only
        return _degenerate_containment(P, cands)
    cover = []
    for label, Q, v in cands:
        Qs = translate(Q, [-x for x in v])
        nxt = []
        hit = False
        for piece in remainder:
            parts = difference(piece, Qs)
            if len(parts) != 1 or parts[0] is not piece:
                hit = True
            nxt.extend(parts)
        if hit:
            cover.append((label, tuple(v)))
        remainder = nxt
        if not remainder:
            return Containment(True, cover=tuple(cover))
    piece = remainder[0]
    return Containment(False, witness=piece.centroid(), witness_vertex=piece.vertices[0])


def _degenerate_containment(P, cands) -> Containment:
    pts = list(P.vertices) + [P.centroid()]
    for x in pts:
        if not any(Q.contains_point([xi + vi for xi, vi in zip(x, v)]) for _, Q, v in cands):
            return Containment(False, witness=x, witness_vertex=x)
    return Containment(True, cover=tuple((l, tuple(v)) for l, _, v in cands))


def overlap_full_dimensional(P: ConvexPolyhedron, Q: ConvexPolyhedron, shift_range: int = DEFAULT_SHIFT_RANGE):
    """Lattice shifts v with ``(P + v) ∩ Q`` full-dimensional."""
    if not P.vertices or not Q.vertices:
        return []
    shifts = _shift_candidates(P, Q)
    _check_range(shifts, shift_range)
    out = []
    for v in shifts:
        if intersect(translate(P, v), Q).full_dimensional:
            out.append(tuple(v))
    return out


def regions_disjoint(R1: Region, R2: Region, shift_range: int = DEFAULT_SHIFT_RANGE) -> bool:
    """True iff no member pair overlaps in positive measure under any shift."""
    for _, P in R1.members:
        for _, Q in R2.members:
            if overlap_full_dimensional(P, Q, shift_range):
                return False
    return True


def canonical_vertices(P: ConvexPolyhedron) -> frozenset[Point]:
    """Vertex set translated by an integer vector fixed by P's lattice class."""
    vs = P.vertices
    if not vs:
        return frozenset()
    base = min(vs)
    off = [math.floor(x) for x in base]
    return frozenset(tuple(x - o for x, o in zip(v, off)) for v in vs)


def polyhedra_equal_mod_lattice(P: ConvexPolyhedron, Q: ConvexPolyhedron) -> bool:
    return canonical_vertices(P) == canonical_vertices(Q)


def region_fingerprint(R: Region) -> frozenset:
    return frozenset(canonical_vertices(P) for _, P in R.members)


def region_equal_mod_lattice(R1: Region, R2: Region, shift_range: int = DEFAULT_SHIFT_RANGE) -> bool:
    """Mutual containment of the two unions on the torus."""
    if region_fingerprint(R1) == region_fingerprint(R2):
        return True
    for A, B in ((R1, R2), (R2, R1)):
        for _, P in A.members:
            if P.full_dimensional and not contains_in_region(P, B, shift_range).contained:
                return False
    return True


def reduce_to_unit_cube(P: ConvexPolyhedron) -> list[tuple[tuple[int, ...], ConvexPolyhedron]]:
    """Split P into pieces ``(v, (P + v) ∩ [0,1]^d)`` of positive measure."""
    cube = unit_cube(P.dim)
    out = []
    for v in _shift_candidates(P, cube):
        piece = intersect(translate(P, v), cube)
        if piece.full_dimensional:
            out.append((tuple(v), piece.reduced()))
    return out
