"""Floating-point orbit simulation for exploratory, tolerance-based checks.

Orbits run on the vectorized table path. Iterates closer than the configured
margin to a singular plane are discarded and the orbit restarts from a fresh
start point. Region membership uses the same lifted polyhedra as the exact
code, tested against every lattice translate that meets the unit cube.

Each orbit draws from its own generator spawned from the master seed, so
results do not depend on how orbits are batched.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dynamics import g3_step_formula_array, g3_step_table_array
from .geometry import ConvexPolyhedron, HalfSpace, Region, as_fraction, contains_in_region, overlap_full_dimensional
from .geometry import _shift_candidates, translate, unit_cube
from .regions import build_region
from .symmetry import apply_to_region, full_group, word

CSV_COLUMNS = (
    "eps", "orbit_id", "start_p", "start_q", "start_r",
    "frac_A", "frac_A_images", "frac_S", "frac_other", "escape_step", "final_label",
)

# words of the five images of A distinct from A itself
A_IMAGE_WORDS = ("S0", "S1", "S2", "S5", "S6")


class ResampleBudgetExceeded(RuntimeError):
    pass


@dataclass
class SimulationConfig:
    eps: float
    steps: int = 10_000
    burn_in: int = 1_000
    orbit_count: int = 100
    rng_seed: int = 0
    singularity_margin: float = 1e-12
    tolerance: float = 1e-9
    start_region: str | None = None
    max_resamples: int = 100
    # "all" scores every tracked set; "S" only tests membership in S (faster)
    track: str = "all"

    def __post_init__(self):
        if self.track not in ("all", "S"):
            raise ValueError("track must be 'all' or 'S'")
        if not self.steps > self.burn_in >= 0:
            raise ValueError("need steps > burn_in >= 0")
        if self.singularity_margin <= 0 or self.tolerance <= 0:
            raise ValueError("tolerances must be positive")


# ---------------------------------------------------------------------------
# float membership


class RegionMask:
    """Vectorized membership test for a lifted region on [0,1)^3."""

    def __init__(self, region: Region, tolerance: float = 1e-9):
        self.label = region.label
        cube = unit_cube(region.dim)
        blocks = []
        for _, P in region.members:
            if not P.vertices:
                continue
            for v in _shift_candidates(cube, P):
                # x in P - v  <=>  a.(x + v) <= b
                A = np.array([[float(a) for a in h.normal] for h in P.halfspaces])
                b = np.array([float(h.bound - sum(a * vi for a, vi in zip(h.normal, v))) for h in P.halfspaces])
                blocks.append((A, b))
        m = max((len(b) for _, b in blocks), default=0)
        K = len(blocks)
        self.A = np.zeros((K, m, region.dim))
        self.b = np.full((K, m), np.inf)
        for k, (A, b) in enumerate(blocks):
            self.A[k, : len(b)] = A
            self.b[k, : len(b)] = b
        self.tolerance = tolerance

    def __call__(self, x: np.ndarray) -> np.ndarray:
        if len(self.A) == 0:
            return np.zeros(len(x), dtype=bool)
        vals = (x @ self.A.reshape(-1, self.A.shape[2]).T).reshape(len(x), *self.b.shape)
        inside = np.all(vals <= self.b[None] + self.tolerance, axis=2)
        return inside.any(axis=1)

    def strictly_inside(self, x: np.ndarray, margin: float) -> np.ndarray:
        if len(self.A) == 0:
            return np.zeros(len(x), dtype=bool)
        vals = np.einsum("kmd,nd->nkm", self.A, x)
        return np.all(vals <= self.b[None] - margin, axis=2).any(axis=1)


@dataclass
class TrackedRegions:
    A: RegionMask
    A_images: list[RegionMask]
    S: RegionMask

    def __post_init__(self):
        # all masks stacked into one matrix so labels() is one product
        masks = [self.A, *self.A_images, self.S]
        m = max(mk.A.shape[1] for mk in masks)
        rows, bounds, owner = [], [], []
        for i, mk in enumerate(masks):
            K = mk.A.shape[0]
            A = np.zeros((K, m, 3))
            b = np.full((K, m), np.inf)
            A[:, : mk.A.shape[1]] = mk.A
            b[:, : mk.b.shape[1]] = mk.b
            rows.append(A)
            bounds.append(b)
            owner.extend([i] * K)
        self._A = np.concatenate(rows).reshape(-1, 3).T
        self._b = np.concatenate(bounds)
        self._owner = np.array(owner)
        self._m = m
        self._tol = self.A.tolerance

    @classmethod
    def build(cls, eps, tolerance: float = 1e-9) -> TrackedRegions:
        e = as_fraction(eps)
        A = build_region("A", e)
        images = [RegionMask(apply_to_region(word(w), A), tolerance) for w in A_IMAGE_WORDS]
        return cls(RegionMask(A, tolerance), images, RegionMask(build_region("S", e), tolerance))

    def labels(self, x: np.ndarray) -> np.ndarray:
        """0 = A, 1..5 = images of A, 6 = S, 7 = other (first match wins)."""
        vals = (x @ self._A).reshape(len(x), -1, self._m)
        inside = np.all(vals <= self._b[None] + self._tol, axis=2)
        lab = np.where(inside, self._owner[None], 7).min(axis=1)
        return lab.astype(np.int8)


LABEL_NAMES = ("A",) + tuple(f"{w}(A)" for w in A_IMAGE_WORDS) + ("S", "other")


# ---------------------------------------------------------------------------
# orbits


@dataclass
class OccupancyRecord:
    orbit_id: int
    start: tuple[float, float, float]
    frac_A: float
    frac_A_images: float
    frac_S: float
    frac_other: float
    escape_step: int
    final_label: str
    resamples: int = 0

    @property
    def escaped(self) -> bool:
        return self.escape_step >= 0

    def row(self, eps: float) -> list:
        return [
            repr(float(eps)), self.orbit_id, repr(self.start[0]), repr(self.start[1]), repr(self.start[2]),
            repr(self.frac_A), repr(self.frac_A_images), repr(self.frac_S), repr(self.frac_other),
            self.escape_step, self.final_label,
        ]


def orbit_rngs(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def sample_start(rng: np.random.Generator, mask: RegionMask | None, margin: float = 1e-9,
                 max_tries: int = 100_000) -> np.ndarray:
    """Uniform point of the cube, rejection-sampled into ``mask`` if given."""
    for _ in range(max_tries // 1000 + 1):
        pts = rng.random((1000, 3))
        if mask is None:
            return pts[0]
        ok = mask.strictly_inside(pts, margin)
        if ok.any():
            return pts[np.argmax(ok)]
    raise ResampleBudgetExceeded("could not sample a start point inside the region")


# escape is measured against the invariant union containing the start set
ESCAPE_REGION = {"A": "A", "P1": "A", "P2": "A", "S": "S", "P0": "S"}


def _home_mask(cfg: SimulationConfig, tracked: TrackedRegions) -> RegionMask | None:
    if cfg.start_region is None:
        return None
    if cfg.start_region == "A":
        return tracked.A
    if cfg.start_region == "S":
        return tracked.S
    return RegionMask(build_region(cfg.start_region, as_fraction(cfg.eps)), cfg.tolerance)


def _escape_mask(cfg: SimulationConfig, tracked: TrackedRegions) -> RegionMask | None:
    if cfg.start_region is None:
        return None
    return tracked.A if ESCAPE_REGION[cfg.start_region] == "A" else tracked.S


def simulate_batch(cfg: SimulationConfig, starts: np.ndarray | None = None,
                   tracked: TrackedRegions | None = None, keep_trace: bool = False,
                   chunk: int = 512):
    """Run ``cfg.orbit_count`` orbits in lockstep.

    Iterates are buffered for ``chunk`` steps and scored in one pass. Returns
    the OccupancyRecords and final states (plus the traces when
    ``keep_trace``).
    """
    tracked = tracked or TrackedRegions.build(cfg.eps, cfg.tolerance)
    home = _home_mask(cfg, tracked)
    stay = _escape_mask(cfg, tracked)
    n = cfg.orbit_count if starts is None else len(starts)
    rngs = orbit_rngs(cfg.rng_seed, n)
    x0 = np.array([sample_start(r, home) for r in rngs]) if starts is None else np.asarray(starts, float).copy()
    x = x0.copy()
    t = np.zeros(n, dtype=np.int64)
    counts = np.zeros((n, 8), dtype=np.int64)
    escape = np.full(n, -1, dtype=np.int64)
    resamples = np.zeros(n, dtype=np.int64)
    last = np.full(n, 7, dtype=np.int8)
    trace = [x.copy()] if keep_trace else None
    buf = np.zeros((n, chunk, 3))
    step_of = np.zeros((n, chunk), dtype=np.int64)
    valid = np.zeros((n, chunk), dtype=bool)
    pos = 0

    def flush(upto):
        if upto == 0:
            return
        pts = buf[:, :upto].reshape(-1, 3)
        if cfg.track == "S":
            lab = np.where(tracked.S(pts), 6, 7).astype(np.int8).reshape(n, upto)
        else:
            lab = tracked.labels(pts).reshape(n, upto)
        ok = valid[:, :upto]
        st = step_of[:, :upto]
        tail = ok & (st > cfg.burn_in)
        for k in range(8):
            counts[:, k] += ((lab == k) & tail).sum(axis=1)
        has = ok.any(axis=1)
        lastpos = upto - 1 - np.argmax(ok[:, ::-1], axis=1)
        last[has] = lab[has, lastpos[has]]
        if stay is not None:
            out = ~stay(pts).reshape(n, upto) & ok
            first = np.where(out, st, np.iinfo(np.int64).max).min(axis=1)
            hit = (escape < 0) & out.any(axis=1)
            escape[hit] = first[hit]
        valid[:, :upto] = False

    active = t < cfg.steps
    while active.any():
        y, singular = g3_step_table_array(x, cfg.eps, cfg.singularity_margin)
        singular &= active
        if singular.any():
            for j in np.nonzero(singular)[0]:
                resamples[j] += 1
                if resamples[j] > cfg.max_resamples:
                    raise ResampleBudgetExceeded(f"orbit {j}: more than {cfg.max_resamples} discards")
                x0[j] = sample_start(rngs[j], home)
                y[j] = x0[j]
                t[j] = -1
                counts[j] = 0
                escape[j] = -1
                valid[j] = False
        stepping = active & ~singular
        x = np.where(active[:, None], y, x)
        t[active] += 1
        buf[:, pos] = x
        step_of[:, pos] = t
        valid[:, pos] = stepping
        pos += 1
        if keep_trace:
            trace.append(x.copy())
        if pos == chunk:
            flush(pos)
            pos = 0
        active = t < cfg.steps
    flush(pos)
    total = cfg.steps - cfg.burn_in
    records = []
    for i in range(n):
        c = counts[i] / total
        records.append(OccupancyRecord(
            i, tuple(float(v) for v in x0[i]),
            float(c[0]), float(c[1:6].sum()), float(c[6]), float(c[7]),
            int(escape[i]), LABEL_NAMES[last[i]], int(resamples[i]),
        ))
    if keep_trace:
        return records, x, np.stack(trace, axis=1)
    return records, x


def simulate_orbit(start: Sequence[float], cfg: SimulationConfig):
    """Single orbit: (trace array of shape (steps+1, 3), OccupancyRecord)."""
    one = SimulationConfig(**dict(asdict(cfg), orbit_count=1))
    recs, _, tr = simulate_batch(one, starts=np.array([start], float), keep_trace=True)
    return tr[0], recs[0]


def records_to_csv(eps: float, records: Sequence[OccupancyRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row(eps))
    return buf.getvalue()


@dataclass
class ScanRow:
    eps: float
    tail_in_S: float
    tail_in_A_family: float
    mean_escape: float | None
    records: list[OccupancyRecord] = field(repr=False, default_factory=list)

    def to_json(self) -> dict:
        return {"eps": self.eps, "tail_in_S": self.tail_in_S, "tail_in_A_family": self.tail_in_A_family,
                "mean_escape": self.mean_escape}


def summarize(eps: float, records: Sequence[OccupancyRecord]) -> ScanRow:
    n = len(records)
    in_S = sum(r.frac_S == 1.0 for r in records) / n
    in_A = sum(r.frac_A + r.frac_A_images == 1.0 for r in records) / n
    esc = [r.escape_step for r in records if r.escaped]
    return ScanRow(eps, in_S, in_A, float(np.mean(esc)) if esc else None, list(records))


def scan_eps(grid: Sequence[float], cfg: SimulationConfig, threads: int | None = None) -> tuple[list[ScanRow], str]:
    """Occupancy summary per eps and the concatenated CSV table."""

    def run(e):
        c = SimulationConfig(**dict(asdict(cfg), eps=float(e)))
        recs, _ = simulate_batch(c)
        return summarize(float(e), recs)

    if threads and threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(threads) as ex:
            rows = list(ex.map(run, grid))
    else:
        rows = [run(e) for e in grid]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        for r in row.records:
            w.writerow(r.row(row.eps))
    return rows, buf.getvalue()


# ---------------------------------------------------------------------------
# invariant faces

FACES = {"p0": 0, "q0": 1, "r0": 2}


def _face_index(face: str) -> int:
    key = face.replace("=", "").lower()
    if key not in FACES:
        raise ValueError(f"face must be one of {sorted(FACES)}")
    return FACES[key]


def face_step_array(y: np.ndarray, face: str, eps: float) -> np.ndarray:
    """Restriction of the reduced map to a coordinate face, in 2 variables."""
    k = _face_index(face)
    x = np.insert(y, k, 0.0, axis=1)
    out = g3_step_formula_array(x, eps)
    return np.delete(out, k, axis=1)


def face_forms(face: str) -> list[tuple[int, int]]:
    """The singular linear forms restricted to the face (duplicates removed)."""
    k = _face_index(face)
    forms = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1), (1, 1, 1))
    out = []
    for f in forms:
        g = tuple(c for i, c in enumerate(f) if i != k)
        if any(g) and g not in out:
            out.append(g)
    return out


@dataclass(frozen=True)
class FaceBranch:
    key: tuple[int, ...]
    cell: ConvexPolyhedron
    offset: tuple[int, int]


def face_branches(face: str) -> list[FaceBranch]:
    """Cells of the restricted singular-line arrangement with their offsets.

    On each cell the restricted map is ``y -> 2(1-eps) y + c eps/2``. The
    offset c is read off the closed-form map at the cell centroid, where the
    correction term equals ``c - 4y``.
    """
    from .dynamics import g3_step_formula_lifted

    k = _face_index(face)
    forms = face_forms(face)
    sizes = [sum(max(c, 0) for c in f) + 1 for f in forms]
    out = []
    for key in itertools.product(*(range(s) for s in sizes)):
        hs = []
        for f, j in zip(forms, key):
            hs.append(HalfSpace(tuple(-c for c in f), -Fraction(2 * j - 1, 2)))
            hs.append(HalfSpace(f, Fraction(2 * j + 1, 2)))
        for i in range(2):
            e = [0, 0]
            e[i] = 1
            hs.append(HalfSpace(tuple(-c for c in e), 0))
            hs.append(HalfSpace(tuple(e), 1))
        cell = ConvexPolyhedron(tuple(hs), 2)
        if not cell.full_dimensional:
            continue
        cell = cell.reduced()
        y = cell.centroid()
        x = list(y)
        x.insert(k, Fraction(0))
        # lifted formula with eps = 1: 2x + (c - 4x)/2 = c/2
        img = g3_step_formula_lifted(x, Fraction(1))
        c = [2 * v for i, v in enumerate(img) if i != k]
        if any(ci.denominator != 1 for ci in c):
            raise AssertionError("non-integer face offset")
        out.append(FaceBranch(tuple(key), cell, tuple(int(ci) for ci in c)))
    return out


def face_step_exact(y: Sequence, face: str, eps) -> tuple:
    from .dynamics import g3_step_formula

    k = _face_index(face)
    x = list(y)
    x.insert(k, Fraction(0))
    out = g3_step_formula(x, eps)
    return tuple(v for i, v in enumerate(out) if i != k)


def check_face_polygon_invariance(poly: Region, face: str, eps) -> dict:
    """Exact check that a lifted 2D region is forward invariant on a face."""
    from .geometry import intersect, scalar_affine_image

    eps = as_fraction(eps)
    scale, half = 2 * (1 - eps), eps / 2
    pieces, violations = [], []
    for br in face_branches(face):
        for label, P in poly.members:
            for v in overlap_full_dimensional(P, br.cell):
                piece = intersect(translate(P, v), br.cell)
                img = scalar_affine_image(piece, scale, [c * half for c in br.offset])
                res = contains_in_region(img, poly)
                rec = {"member": label, "cell": list(br.key), "shift": list(v), "contained": res.contained}
                (pieces if res.contained else violations).append(rec)
    return {"face": face, "eps": str(eps), "holds": not violations, "pieces": pieces, "violations": violations}


def face_symmetries(face: str):
    """Group elements mapping the face onto itself, as 2x2 integer matrices."""
    k = _face_index(face)
    keep = [i for i in range(3) if i != k]
    out = []
    for S in full_group():
        row = S.matrix[k]
        if all(row[i] == 0 for i in keep):
            M = tuple(tuple(S.matrix[i][j] for j in keep) for i in keep)
            t = tuple(float(S.translation[i]) for i in keep)
            out.append((S.name or "id", np.array(M, float), np.array(t)))
    return out


@dataclass
class FaceReport:
    """Tail supports of face orbits grouped by which face symmetries fix them.

    ``stabilizer_types`` maps a '/'-joined list of symmetry words (or
    "trivial") to the number of orbits whose tail support has exactly that
    stabilizer. Supports fixed by every face symmetry are "symmetric"; all
    others count as asymmetric candidates.
    """

    face: str
    eps: float
    fixed_coordinate_max: float
    orbits: int
    asymmetric_candidates: int
    stabilizer_types: dict = field(default_factory=dict)
    candidate_hulls: dict = field(default_factory=dict)
    grid: int = 32

    def to_json(self) -> dict:
        return asdict(self)


def _support(points: np.ndarray, n: int) -> set:
    cells = np.minimum(np.floor(points * n).astype(np.int64), n - 1)
    return set(map(tuple, cells))


def _image_support(s: set, M: np.ndarray, t: np.ndarray, n: int) -> set:
    c = (np.array(sorted(s), float) + 0.5) / n
    y = (c @ M.T + t) % 1.0
    return _support(y, n)


def _jaccard(a: set, b: set) -> float:
    return len(a & b) / len(a | b)


def face_dynamics(face: str, eps: float, cfg: SimulationConfig, grid: int = 32,
                  overlap: float = 0.5, hulls: bool = True) -> FaceReport:
    """Simulate the face map and classify tail supports by their symmetry.

    The orbit runs in three dimensions through the closed-form map (which
    keeps the fixed coordinate at exactly 0). A face symmetry fixes a tail
    support when the support and its image on a ``grid x grid`` mesh have
    Jaccard overlap above ``overlap``.
    """
    k = _face_index(face)
    rng = np.random.default_rng(cfg.rng_seed)
    x = rng.random((cfg.orbit_count, 3))
    x[:, k] = 0.0
    fixed_max = 0.0
    tails = []
    for step in range(cfg.steps):
        x = g3_step_formula_array(x, eps)
        fixed_max = max(fixed_max, float(np.abs(x[:, k]).max()))
        if step >= cfg.burn_in:
            tails.append(np.delete(x, k, axis=1))
    T = np.stack(tails, axis=1)
    syms = [s for s in face_symmetries(face) if s[0] != "id"]
    report = FaceReport(face, float(eps), fixed_max, cfg.orbit_count, 0, grid=grid)
    for i in range(cfg.orbit_count):
        s = _support(T[i], grid)
        fixing = [name for name, M, t in syms if _jaccard(s, _image_support(s, M, t, grid)) > overlap]
        key = "/".join(fixing) if fixing else "trivial"
        if len(fixing) < len(syms):
            report.asymmetric_candidates += 1
        report.stabilizer_types[key] = report.stabilizer_types.get(key, 0) + 1
        if hulls and key not in report.candidate_hulls:
            report.candidate_hulls[key] = _hull(T[i])
    return report


def emerging_face_types(face: str, lower: float, upper: float, cfg: SimulationConfig,
                        min_orbits: int = 2, **kw) -> dict:
    """Stabilizer types seen at ``upper`` but not at ``lower``.

    A type needs ``min_orbits`` orbits at ``upper`` to count, which screens
    out slow transients.
    """
    lo = face_dynamics(face, lower, cfg, hulls=False, **kw)
    hi = face_dynamics(face, upper, cfg, hulls=False, **kw)
    new = {t: n for t, n in hi.stabilizer_types.items()
           if n >= min_orbits and t not in lo.stabilizer_types}
    return {"face": face, "lower": lo.to_json(), "upper": hi.to_json(), "new_types": new}


def _hull(points: np.ndarray) -> list[list[float]]:
    from scipy.spatial import ConvexHull, QhullError

    try:
        h = ConvexHull(points)
        return points[h.vertices].tolist()
    except (QhullError, ValueError):
        return points[:3].tolist()


# ---------------------------------------------------------------------------
# float versus exact


def exact_orbit_distances(starts: Sequence[Sequence[Fraction]], eps: Fraction,
                          steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Per start: max torus distance between the float and exact orbits, and
    the smallest distance of the exact iterates' form values to a half-odd
    integer (the singular margin)."""
    from .dynamics import _common, step_table_int

    eps = as_fraction(eps)
    n = len(starts)
    exact = [_common(s, eps) for s in starts]
    xf = np.array([[float(v) for v in s] for s in starts])
    worst = np.zeros(n)
    margin = np.full(n, math.inf)
    ex = np.empty((n, 3))
    for _ in range(steps):
        xf, _ = g3_step_table_array(xf, float(eps))
        for i, (X, M, a, b) in enumerate(exact):
            X = step_table_int(X, M, a, b)
            M = 2 * b * M
            exact[i] = (X, M, a, b)
            # int / int is correctly rounded, so no Fractions are needed
            ex[i] = [x / M for x in X]
            forms = (X[0], X[1], X[2], X[0] + X[1], X[1] + X[2], X[0] + X[1] + X[2])
            margin[i] = min(margin[i], min(abs(2 * (v % M) - M) / (2 * M) for v in forms))
        d = np.abs(xf - ex)
        worst = np.maximum(worst, np.minimum(d, 1 - d).max(axis=1))
    return worst, margin


def exact_orbit_distance(start: Sequence[Fraction], eps: Fraction, steps: int) -> tuple[float, float]:
    w, m = exact_orbit_distances([start], eps, steps)
    return float(w[0]), float(m[0])


__all__ = [
    "SimulationConfig", "RegionMask", "TrackedRegions", "OccupancyRecord", "simulate_batch",
    "simulate_orbit", "scan_eps", "records_to_csv", "face_dynamics", "face_branches",
    "face_step_array", "face_step_exact", "check_face_polygon_invariance", "exact_orbit_distance",
    "exact_orbit_distances", "CSV_COLUMNS", "summarize", "ScanRow", "FaceReport", "emerging_face_types",
]
