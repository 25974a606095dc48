"""Affine symmetries of the reduced torus map.

Each symmetry is an integer matrix with an integer translation acting mod 1.
Elements are identified when their matrices agree and their translations
differ by an integer vector, which for integer translations means the matrix
alone decides equality on the torus. The lifted translation is still kept so
that images of lifted polyhedra land near the intended representative.
"""
from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import (
    DEFAULT_SHIFT_RANGE,
    ConvexPolyhedron,
    Region,
    as_fraction,
    linear_image,
    region_equal_mod_lattice,
    region_fingerprint,
    translate,
)

Matrix = tuple[tuple[int, ...], ...]

GROUP_CAP = 10_000


@dataclass(frozen=True)
class AffineSymmetry:
    matrix: Matrix
    translation: tuple[Fraction, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        M = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "translation", tuple(as_fraction(x) for x in self.translation))
        if abs(_det(M)) != 1:
            raise ValueError(f"matrix {M} is not invertible over the integers")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def key(self) -> tuple:
        """Torus identity: matrix and translation mod 1."""
        return self.matrix, tuple(t - math.floor(t) for t in self.translation)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AffineSymmetry):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __call__(self, pt: Sequence):
        return apply_to_point(self, pt)

    def __matmul__(self, other: AffineSymmetry) -> AffineSymmetry:
        return compose(self, other)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "matrix": [list(r) for r in self.matrix],
            "translation": [str(t) for t in self.translation],
        }


def _det(M) -> int:
    if len(M) == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    return (
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
    )


def identity(d: int = 3) -> AffineSymmetry:
    return AffineSymmetry(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)), (0,) * d, "id")


# Generators induced by inversion (S0) and the six transpositions (S1..S6)
# of the four sites, in the (p, q, r) difference coordinates.
S0 = AffineSymmetry(((-1, 0, 0), (0, -1, 0), (0, 0, -1)), (1, 1, 1), "S0")
S1 = AffineSymmetry(((-1, 0, 0), (1, 1, 0), (0, 0, 1)), (0, 0, 0), "S1")
S2 = AffineSymmetry(((0, -1, 0), (-1, 0, 0), (1, 1, 1)), (0, 0, 0), "S2")
S3 = AffineSymmetry(((0, -1, -1), (0, 1, 0), (-1, -1, 0)), (0, 0, 0), "S3")
S4 = AffineSymmetry(((1, 1, 0), (0, -1, 0), (0, 1, 1)), (0, 0, 0), "S4")
S5 = AffineSymmetry(((1, 1, 1), (0, 0, -1), (0, -1, 0)), (0, 0, 0), "S5")
S6 = AffineSymmetry(((1, 0, 0), (0, 1, 1), (0, 0, -1)), (0, 0, 0), "S6")

GENERATORS = (S0, S1, S2, S3, S4, S5, S6)
BY_NAME = {S.name: S for S in GENERATORS}

# the site transposition behind each permutation generator
TRANSPOSITIONS = {"S1": (0, 1), "S2": (0, 2), "S3": (0, 3), "S4": (1, 2), "S5": (1, 3), "S6": (2, 3)}


def compose(A: AffineSymmetry, B: AffineSymmetry) -> AffineSymmetry:
    """A after B: x -> A(B x)."""
    d = A.dim
    M = tuple(tuple(sum(A.matrix[i][k] * B.matrix[k][j] for k in range(d)) for j in range(d)) for i in range(d))
    t = tuple(
        sum((A.matrix[i][k] * B.translation[k] for k in range(d)), Fraction(0)) + A.translation[i]
        for i in range(d)
    )
    name = A.name + B.name if A.name != "id" and B.name != "id" else (B.name if A.name == "id" else A.name)
    return AffineSymmetry(M, t, name)


def inverse(A: AffineSymmetry) -> AffineSymmetry:
    from .geometry import integer_matrix_inverse

    Minv = integer_matrix_inverse(A.matrix)
    d = A.dim
    t = tuple(-sum((Minv[i][k] * A.translation[k] for k in range(d)), Fraction(0)) for i in range(d))
    return AffineSymmetry(Minv, t, A.name + "^-1" if A.name else "")


def word(names: str | Iterable[str]) -> AffineSymmetry:
    """'S3S4' -> S3 after S4. Also accepts a sequence of generator names."""
    if isinstance(names, str):
        names = ["S" + n for n in names.split("S") if n] if names not in ("", "id") else []
    out = identity()
    for n in names:
        out = compose(out, BY_NAME[n])
    if names:
        out = AffineSymmetry(out.matrix, out.translation, "".join(names))
    return out


def apply_to_point(S: AffineSymmetry, pt: Sequence) -> tuple:
    d = S.dim
    out = []
    for i in range(d):
        v = sum(S.matrix[i][k] * pt[k] for k in range(d)) + (
            S.translation[i] if isinstance(pt[0], (Fraction, int)) else float(S.translation[i])
        )
        out.append(v - math.floor(v))
    return tuple(out)


def apply_int(S: AffineSymmetry, X: Sequence[int], M: int) -> tuple[int, ...]:
    """Action on the point X/M, returning numerators in [0, M)."""
    d = S.dim
    out = []
    for i in range(d):
        t = S.translation[i]
        v = sum(S.matrix[i][k] * X[k] for k in range(d)) * t.denominator + t.numerator * M
        if t.denominator != 1:
            raise ValueError("integer action needs an integer translation")
        out.append(v % M)
    return tuple(out)


def canonical_shift(P: ConvexPolyhedron) -> tuple[int, ...]:
    """Integer v putting the vertex centroid of P + v in [0, 1)^d."""
    c = P.centroid()
    return tuple(-math.floor(x) for x in c)


def apply_to_polyhedron(S: AffineSymmetry, P: ConvexPolyhedron, canonical: bool = True) -> ConvexPolyhedron:
    img = linear_image(P, S.matrix, S.translation)
    if canonical and img.vertices:
        v = canonical_shift(img)
        if any(v):
            img = translate(img, v)
    return img


def _member_label(S: AffineSymmetry, label: str) -> str:
    if not S.name or S.name == "id":
        return label
    if "(" in label and label.endswith(")"):
        inner = label[: label.index("(")]
        if inner.startswith("S"):
            return S.name + label
    return f"{S.name}({label})"


def apply_to_region(S: AffineSymmetry, R: Region, canonical: bool = True) -> Region:
    members = tuple((_member_label(S, l), apply_to_polyhedron(S, P, canonical)) for l, P in R.members)
    return Region(_member_label(S, R.label), members, R.notes)


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class SymmetryGroup:
    elements: tuple[AffineSymmetry, ...]
    words: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, S: AffineSymmetry) -> bool:
        return S in self.elements

    @property
    def order(self) -> int:
        return len(self.elements)

    def word_of(self, S: AffineSymmetry) -> str:
        return self.words[self.elements.index(S)]

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "elements": [dict(S.to_json(), word=w) for S, w in zip(self.elements, self.words)],
        }


class GroupTooLarge(RuntimeError):
    pass


def generate_group(generators: Sequence[AffineSymmetry], cap: int = GROUP_CAP) -> SymmetryGroup:
    """Breadth-first closure; each element carries a shortest generator word."""
    e = identity(generators[0].dim if generators else 3)
    seen = {e: "id"}
    order = [e]
    queue = deque([e])
    while queue:
        A = queue.popleft()
        for G in generators:
            B = compose(G, A)
            if B in seen:
                continue
            w = G.name if seen[A] == "id" else G.name + seen[A]
            B = AffineSymmetry(B.matrix, B.translation, w)
            seen[B] = w
            order.append(B)
            queue.append(B)
            if len(order) > cap:
                raise GroupTooLarge(f"closure exceeds {cap} elements")
    return SymmetryGroup(tuple(order), tuple(seen[A] for A in order))


def full_group() -> SymmetryGroup:
    return generate_group(GENERATORS)


def commutes(A: AffineSymmetry, B: AffineSymmetry) -> bool:
    return compose(A, B) == compose(B, A)


# ---------------------------------------------------------------------------
# equivariance and orbits


@dataclass
class EquivarianceReport:
    symmetry: str
    eps: Fraction
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    counterexample: tuple | None = None

    @property
    def holds(self) -> bool:
        return self.failed == 0 and self.passed > 0

    def to_json(self) -> dict:
        out = {
            "symmetry": self.symmetry,
            "eps": str(self.eps),
            "passed": self.passed,
            "failed": self.failed,
            "skipped": self.skipped,
            "holds": self.holds,
        }
        if self.counterexample is not None:
            out["counterexample"] = [str(x) for x in self.counterexample]
        return out


def random_odd_points(n: int, rng: random.Random, max_den: int = 99_999) -> list[tuple[tuple[int, ...], int]]:
    """Random rational points X/M with odd M.

    Every linear form with integer coefficients takes values k/M at such a
    point, so no singular plane (half-odd-integer value) is ever hit.
    """
    out = []
    for _ in range(n):
        M = rng.randrange(101, max_den, 2)
        out.append((tuple(rng.randrange(M) for _ in range(3)), M))
    return out


def check_equivariance(S: AffineSymmetry, eps, samples: int = 1000, seed: int = 0,
                       points: Sequence[tuple[tuple[int, ...], int]] | None = None) -> EquivarianceReport:
    """Compare G(S x) with S(G x) exactly on random nonsingular rationals."""
    from .dynamics import SingularPointError, step_table_int

    eps = as_fraction(eps)
    a, b = eps.numerator, eps.denominator
    if points is None:
        points = random_odd_points(samples, random.Random(seed))
    rep = EquivarianceReport(S.name or "S", eps)
    for X, M in points:
        try:
            lhs = step_table_int(apply_int(S, X, M), M, a, b)
            rhs = apply_int(S, step_table_int(X, M, a, b), 2 * b * M)
        except SingularPointError:
            rep.skipped += 1
            continue
        if lhs == rhs:
            rep.passed += 1
        else:
            rep.failed += 1
            if rep.counterexample is None:
                rep.counterexample = tuple(Fraction(x, M) for x in X)
    return rep


def equivariance_suite(generators: Sequence[AffineSymmetry], eps,
                       points: Sequence[tuple[tuple[int, ...], int]]) -> tuple[dict[str, EquivarianceReport], int]:
    """check_equivariance for several symmetries on one sample set.

    G(x) is computed once per point and shared. The same samples also feed a
    formula-versus-table comparison; the second return value counts the
    points where the two paths disagree.
    """
    from .dynamics import SingularPointError, step_formula_int, step_table_int

    eps = as_fraction(eps)
    a, b = eps.numerator, eps.denominator
    reps = {S.name or f"S{i}": EquivarianceReport(S.name or f"S{i}", eps) for i, S in enumerate(generators)}
    path_mismatch = 0
    for X, M in points:
        try:
            GX = step_table_int(X, M, a, b)
        except SingularPointError:
            for r in reps.values():
                r.skipped += 1
            continue
        if step_formula_int(X, M, a, b) != GX:
            path_mismatch += 1
        for S, r in zip(generators, reps.values()):
            try:
                lhs = step_table_int(apply_int(S, X, M), M, a, b)
            except SingularPointError:
                r.skipped += 1
                continue
            if lhs == apply_int(S, GX, 2 * b * M):
                r.passed += 1
            else:
                r.failed += 1
                if r.counterexample is None:
                    r.counterexample = tuple(Fraction(x, M) for x in X)
    return reps, path_mismatch


@dataclass
class RegionOrbit:
    images: list[Region]
    words: list[str]
    stabilizer: list[str]
    group_order: int

    @property
    def stabilizer_order(self) -> int:
        return self.group_order // len(self.images)

    def to_json(self) -> dict:
        return {
            "distinct_images": len(self.images),
            "image_words": self.words,
            "stabilizer_order": self.stabilizer_order,
            "stabilizer": self.stabilizer,
            "group_order": self.group_order,
        }


def orbit_of_region(R: Region, G: SymmetryGroup, shift_range: int = DEFAULT_SHIFT_RANGE) -> RegionOrbit:
    """Distinct images of R under G, deduplicated up to the lattice."""
    images: list[Region] = []
    prints: list[frozenset] = []
    words: list[str] = []
    stab: list[str] = []
    for S, w in zip(G.elements, G.words):
        img = apply_to_region(S, R)
        fp = region_fingerprint(img)
        found = None
        for i, (J, f) in enumerate(zip(images, prints)):
            if f == fp or region_equal_mod_lattice(img, J, shift_range):
                found = i
                break
        if found is None:
            images.append(img)
            prints.append(fp)
            words.append(w)
            found = len(images) - 1
        if found == 0:
            stab.append(w)
    orb = RegionOrbit(images, words, stab, G.order)
    if len(stab) * len(images) != G.order:
        raise AssertionError("orbit-stabilizer count mismatch")
    return orb
