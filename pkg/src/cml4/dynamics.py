"""The coupled doubling maps, the coordinate reduction and the reduced torus map.

Exact evaluation works on :class:`~fractions.Fraction` inputs; internally the
point and coupling are put over one common denominator so the arithmetic is on
Python ints. Float inputs follow the same formulas in double precision, and
the ``*_array`` variants vectorize the table path with numpy for simulation.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import domains
from .domains import BRANCH_BY_LABEL, BRANCHES, Branch
from .geometry import ConvexPolyhedron, HalfSpace, as_fraction, intersect, scalar_affine_image, translate

HALF = Fraction(1, 2)

# linear forms whose values at half-odd-integers are the singularity planes
FORMS = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1), (1, 1, 1))
_KEY_SIZES = (2, 2, 2, 3, 3, 4)


class SingularPointError(ValueError):
    pass


def check_eps(eps):
    if not 0 <= eps < HALF:
        raise ValueError(f"coupling must satisfy 0 <= eps < 1/2, got {eps}")


def _is_exact(x) -> bool:
    return isinstance(x, (Fraction, int))


def g(u):
    """Periodic lift of the identity on (-1/2, 1/2), with value 0 at ±1/2."""
    if _is_exact(u):
        u = Fraction(u)
        f = u - math.floor(u)
        if f == HALF:
            return Fraction(0)
        return f if f < HALF else f - 1
    f = u - math.floor(u)
    if f == 0.5:
        return 0.0
    return f if f < 0.5 else f - 1.0


def g_array(u: np.ndarray) -> np.ndarray:
    f = u - np.floor(u)
    out = np.where(f < 0.5, f, f - 1.0)
    return np.where(f == 0.5, 0.0, out)


def mod1(x):
    if _is_exact(x):
        return Fraction(x) - math.floor(x)
    y = x - math.floor(x)
    return 0.0 if y >= 1.0 else y


def mod1_array(x: np.ndarray) -> np.ndarray:
    y = x - np.floor(x)
    y[y >= 1.0] = 0.0
    return y


# ---------------------------------------------------------------------------
# the full N-site system


def coupling_step(x: Sequence, eps, N: int | None = None) -> list:
    """Mean-field coupling x_i + (eps/N) sum_j g(x_j - x_i), mod 1."""
    N = len(x) if N is None else N
    return [mod1(xi + eps * sum(g(xj - xi) for xj in x) / N) for xi in x]


def full_step(x: Sequence, eps, N: int | None = None) -> list:
    """One step of the globally coupled doubling maps on the N-torus."""
    N = len(x) if N is None else N
    if len(x) != N:
        raise ValueError("configuration length does not match N")
    return [mod1(2 * (xi + eps * sum(g(xj - xi) for xj in x) / N)) for xi in x]


def reduce_coordinates(x: Sequence) -> tuple:
    """(s, (p, q, r)) for a four-site configuration."""
    if len(x) != 4:
        raise ValueError("coordinate reduction is defined for N = 4 only")
    x1, x2, x3, x4 = x
    return mod1(x1 + x2 + x3 + x4), (mod1(x1 - x2), mod1(x2 - x3), mod1(x3 - x4))


# ---------------------------------------------------------------------------
# reduced map: integer core


def _common(pt, eps):
    pt = [Fraction(mod1(as_fraction(v))) for v in pt]
    eps = as_fraction(eps)
    M = math.lcm(*(v.denominator for v in pt))
    X = [v.numerator * (M // v.denominator) for v in pt]
    return X, M, eps.numerator, eps.denominator


def _g_int(U: int, M: int) -> int:
    f = U % M
    if 2 * f == M:
        return 0
    return f if 2 * f < M else f - M


def _formula_sums(X: Sequence[int], M: int) -> tuple[int, int, int]:
    P, Q, R = X
    gp, gq, gr = _g_int(P, M), _g_int(Q, M), _g_int(R, M)
    gpq, gqr, gpqr = _g_int(P + Q, M), _g_int(Q + R, M), _g_int(P + Q + R, M)
    return (
        -2 * gp + gq + gqr - gpq - gpqr,
        -2 * gq + gp + gr - gqr - gpq,
        -2 * gr + gq + gpq - gqr - gpqr,
    )


def g3_step_formula(pt: Sequence, eps) -> tuple:
    """Reduced map evaluated from its closed-form expression, mod 1."""
    if not all(_is_exact(v) or isinstance(v, Fraction) for v in pt) or not _is_exact(eps):
        p, q, r = (float(v) for v in pt)
        e = float(eps)
        s = (
            -2 * g(p) + (g(q) - g(p + q)) + (g(q + r) - g(p + q + r)),
            -2 * g(q) + (g(p) - g(p + q)) + (g(r) - g(q + r)),
            -2 * g(r) + (g(q) - g(q + r)) + (g(p + q) - g(p + q + r)),
        )
        return tuple(mod1(2 * v + e / 2 * si) for v, si in zip((p, q, r), s))
    X, M, a, b = _common(pt, eps)
    return tuple(Fraction(y, 2 * b * M) for y in step_formula_int(X, M, a, b))


def step_formula_int(X: Sequence[int], M: int, a: int, b: int) -> tuple[int, ...]:
    """Integer core of the formula: point X/M, coupling a/b.

    Returns numerators over the denominator 2*b*M, reduced into [0, 2bM).
    """
    den = 2 * b * M
    sums = _formula_sums(X, M)
    return tuple((4 * b * x + a * s) % den for x, s in zip(X, sums))


def g3_step_formula_lifted(pt: Sequence, eps) -> tuple[Fraction, ...]:
    """Formula without the final reduction mod 1 (input taken as given)."""
    pt = [as_fraction(v) for v in pt]
    eps = as_fraction(eps)
    p, q, r = pt
    s = (
        -2 * g(p) + g(q) + g(q + r) - g(p + q) - g(p + q + r),
        -2 * g(q) + g(p) + g(r) - g(q + r) - g(p + q),
        -2 * g(r) + g(q) + g(p + q) - g(q + r) - g(p + q + r),
    )
    return tuple(2 * v + eps / 2 * si for v, si in zip(pt, s))


# ---------------------------------------------------------------------------
# classification


def _key_int(X: Sequence[int], M: int) -> tuple[int, ...]:
    vals = (X[0], X[1], X[2], X[0] + X[1], X[1] + X[2], X[0] + X[1] + X[2])
    return tuple((2 * v + M) // (2 * M) for v in vals)


def _key_index(key: Sequence[int]) -> int:
    idx = 0
    for k, n in zip(key, _KEY_SIZES):
        idx = idx * n + k
    return idx


def _cell(key: Sequence[int]) -> ConvexPolyhedron:
    hs = []
    for form, k in zip(FORMS, key):
        lo, hi = Fraction(2 * k - 1, 2), Fraction(2 * k + 1, 2)
        hs.append(HalfSpace(tuple(-c for c in form), -lo))
        hs.append(HalfSpace(form, hi))
    for i in range(3):
        e = [0, 0, 0]
        e[i] = 1
        hs.append(HalfSpace(tuple(-c for c in e), 0))
        hs.append(HalfSpace(tuple(e), 1))
    return ConvexPolyhedron(tuple(hs), 3)


@lru_cache(maxsize=None)
def cell_lookup() -> tuple[tuple[str | None, ...], np.ndarray]:
    """Branch label for every cell of the singular-plane arrangement.

    Returns a tuple indexed by the flattened cell key (None for empty cells)
    and the matching (n_keys, 3) integer offset array (-1 rows when empty).
    Each cell is asserted to lie inside exactly one domain closure.
    """
    n = math.prod(_KEY_SIZES)
    labels: list[str | None] = [None] * n
    offsets = np.full((n, 3), -1, dtype=np.int64)
    for key in itertools.product(*(range(s) for s in _KEY_SIZES)):
        cell = _cell(key)
        if not cell.full_dimensional:
            continue
        owners = [b.label for b in BRANCHES
                  if all(b.domain.contains_point(v) for v in cell.vertices)]
        if len(owners) != 1:
            raise AssertionError(f"cell {key} not inside a unique domain: {owners}")
        i = _key_index(key)
        labels[i] = owners[0]
        offsets[i] = BRANCH_BY_LABEL[owners[0]].offset
    return tuple(labels), offsets


def _on_singular_plane(X: Sequence[int], M: int) -> bool:
    vals = (X[0], X[1], X[2], X[0] + X[1], X[1] + X[2], X[0] + X[1] + X[2])
    # v/M is a half-odd integer iff 2v/M is an odd integer
    return any(2 * v % M == 0 and (2 * v // M) % 2 == 1 for v in vals)


def classify(pt: Sequence) -> str:
    """Label of the continuity domain containing ``pt`` (taken mod 1).

    Points on a singularity plane raise SingularPointError. A coordinate equal
    to 0 sits on the seam of the torus, where the map is continuous, and is
    classified with the cell on the inner side.
    """
    if not all(isinstance(v, (Fraction, int)) for v in pt):
        return _classify_float(pt)
    X, M, _, _ = _common(pt, 0)
    return classify_int(X, M)


def classify_int(X: Sequence[int], M: int) -> str:
    """classify() for the point X/M with 0 <= X_i < M."""
    if _on_singular_plane(X, M):
        raise SingularPointError(f"point {tuple(Fraction(x, M) for x in X)} lies on a singularity plane")
    labels, _ = cell_lookup()
    return labels[_key_index(_key_int(X, M))]


def _classify_float(pt: Sequence) -> str:
    x = np.array([[mod1(float(v)) for v in pt]])
    if singular_distance_array(x)[0] == 0.0:
        raise SingularPointError(f"point {tuple(pt)} lies on a singularity plane")
    labels, _ = cell_lookup()
    return labels[int(cell_key_array(x)[0])]


def g3_step_table(pt: Sequence, eps) -> tuple:
    """Reduced map via the branch table: 2(1-eps) x + c eps/2, mod 1."""
    label = classify(pt)
    c = BRANCH_BY_LABEL[label].offset
    if not all(isinstance(v, (Fraction, int)) for v in pt) or not _is_exact(eps):
        e = float(eps)
        return tuple(mod1(2 * (1 - e) * mod1(float(v)) + ci * e / 2) for v, ci in zip(pt, c))
    X, M, a, b = _common(pt, eps)
    return tuple(Fraction(y, 2 * b * M) for y in _affine_int(X, M, a, b, c))


def _affine_int(X, M, a, b, c):
    den = 2 * b * M
    return tuple((4 * (b - a) * x + ci * a * M) % den for x, ci in zip(X, c))


def step_table_int(X: Sequence[int], M: int, a: int, b: int) -> tuple[int, ...]:
    """Integer core of the table path; same output convention as step_formula_int."""
    return _affine_int(X, M, a, b, BRANCH_BY_LABEL[classify_int(X, M)].offset)


def g3_step(pt: Sequence, eps) -> tuple:
    return g3_step_table(pt, eps)


def orbit(pt: Sequence, eps, steps: int) -> list[tuple]:
    out = [tuple(pt)]
    for _ in range(steps):
        out.append(g3_step_table(out[-1], eps))
    return out


# ---------------------------------------------------------------------------
# vectorized double path


def cell_key_array(x: np.ndarray) -> np.ndarray:
    p, q, r = x[:, 0], x[:, 1], x[:, 2]
    vals = (p, q, r, p + q, q + r, p + q + r)
    idx = np.zeros(len(x), dtype=np.int64)
    for v, n in zip(vals, _KEY_SIZES):
        k = np.clip(np.floor(v + 0.5).astype(np.int64), 0, n - 1)
        idx = idx * n + k
    return idx


def singular_distance_array(x: np.ndarray) -> np.ndarray:
    """Distance (in form value) to the nearest singularity plane."""
    p, q, r = x[:, 0], x[:, 1], x[:, 2]
    best = np.full(len(x), np.inf)
    for v in (p, q, r, p + q, q + r, p + q + r):
        d = np.abs(v - 0.5 - np.round(v - 0.5))
        best = np.minimum(best, d)
    return best


_FORM_MATRIX = np.array(FORMS, dtype=float).T
_KEY_MAX = np.array(_KEY_SIZES) - 1
_KEY_WEIGHTS = np.array([math.prod(_KEY_SIZES[i + 1:]) for i in range(len(_KEY_SIZES))], dtype=np.int64)


def g3_step_table_array(x: np.ndarray, eps: float, margin: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized table path. Returns (images, singular flags)."""
    _, offsets = cell_lookup()
    v = x @ _FORM_MATRIX
    k = np.floor(v + 0.5)
    # distance of every form value to the nearest half-odd integer
    dist = np.abs(np.abs(v - k) - 0.5).min(axis=1)
    key = np.clip(k.astype(np.int64), 0, _KEY_MAX) @ _KEY_WEIGHTS
    c = offsets[key]
    singular = (dist < margin) | (c[:, 0] < 0)
    y = mod1_array(2.0 * (1.0 - eps) * x + c * (eps / 2.0))
    return y, singular


def g3_step_formula_array(x: np.ndarray, eps: float) -> np.ndarray:
    p, q, r = x[:, 0], x[:, 1], x[:, 2]
    gp, gq, gr = g_array(p), g_array(q), g_array(r)
    gpq, gqr, gpqr = g_array(p + q), g_array(q + r), g_array(p + q + r)
    # terms paired so each row cancels exactly on its own coordinate face
    s = np.stack([
        -2 * gp + (gq - gpq) + (gqr - gpqr),
        -2 * gq + (gp - gpq) + (gr - gqr),
        -2 * gr + (gq - gqr) + (gpq - gpqr),
    ], axis=1)
    return mod1_array(2.0 * x + eps / 2.0 * s)


# ---------------------------------------------------------------------------
# images of domains


def branch_map(eps) -> tuple[Fraction, Fraction]:
    eps = as_fraction(eps)
    return 2 * (1 - eps), eps / 2


def image_of_branch(branch: Branch, eps, restrict: ConvexPolyhedron | None = None,
                    shift: Sequence[int] = (0, 0, 0)) -> ConvexPolyhedron:
    """Lifted image of ``branch.domain + shift`` (optionally cut by ``restrict``).

    The branch acts on the translate ``domain + shift`` as
    ``x -> 2(1-eps)(x - shift) + c eps/2``.
    """
    scale, half = branch_map(eps)
    dom = translate(branch.domain, shift) if any(shift) else branch.domain
    piece = intersect(restrict, dom) if restrict is not None else dom
    t = [ci * half - scale * si for ci, si in zip(branch.offset, shift)]
    return scalar_affine_image(piece, scale, t)


def face_fixed_preserved(pt: Sequence, eps) -> bool:
    """Whether every zero coordinate of ``pt`` stays zero under the formula."""
    img = g3_step_formula(pt, eps)
    return all(img[i] == 0 for i in range(3) if pt[i] == 0)


__all__ = [
    "BRANCHES", "Branch", "SingularPointError", "g", "g_array", "full_step", "coupling_step",
    "reduce_coordinates", "g3_step_formula", "g3_step_table", "g3_step", "classify",
    "image_of_branch", "g3_step_table_array", "g3_step_formula_array", "cell_lookup",
    "domains", "classify_int", "step_table_int", "step_formula_int",
]
