"""Invariance, symmetry and asymmetry checks for the candidate regions.

Invariance of a region R is decided piece by piece. Each member is cut by
every continuity domain (and its lattice translates), the piece is pushed
through the affine branch in lifted coordinates, and the image is tested for
containment in R with :func:`~cml4.geometry.contains_in_region`. When a
subgroup H permutes the members of R, only one member per H-orbit needs to be
checked because ``G(h P) = h G(P)`` and ``h R = R``. The reduction is checked
before it is used.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from . import lorenz
from .domains import BRANCHES
from .dynamics import image_of_branch
from .geometry import (
    DEFAULT_SHIFT_RANGE,
    ConvexPolyhedron,
    HalfSpace,
    Region,
    as_fraction,
    box,
    contains_in_region,
    fraction_str,
    optimize,
    overlap_full_dimensional,
    polyhedra_equal_mod_lattice,
    reduce_to_unit_cube,
    region_equal_mod_lattice,
    regions_disjoint,
    translate,
)
from .lorenz import p_star
from .regions import GENERATING_MEMBERS, STABILIZER_GENERATORS, build_region
from .symmetry import BY_NAME, GENERATORS, apply_to_polyhedron, apply_to_region, generate_group, word

# where each generating piece is expected to land (member labels of the region)
EXPECTED_PATTERN = {
    "A": {"P1": ("1b", "4a"), "P2": ("3a", "3b", "3c", "4a", "4b", "4c")},
    "S": {"P0": ("1e", "4b", "5b", "8b")},
}
EXPECTED_ROUTING = {
    "A": {
        ("P1", "1b"): "P2",
        ("P1", "4a"): "P1",
        ("P2", "3a"): "P2",
        ("P2", "3b"): "S3(P1)",
        ("P2", "3c"): "P1",
        ("P2", "4a"): "P2",
        ("P2", "4b"): "S4(P1)",
        ("P2", "4c"): "S3S4(P1)",
    },
    "S": {
        ("P0", "1e"): "S3S1(P0)",
        ("P0", "4b"): "S5(P0)",
        ("P0", "5b"): "S2(P0)",
        ("P0", "8b"): "S4S1(P0)",
    },
}
EXPECTED_PROFILE = {
    "A": {"S0": "disjoint", "S1": "disjoint", "S2": "disjoint", "S3": "equal",
          "S4": "equal", "S5": "disjoint", "S6": "disjoint"},
    "S": {f"S{i}": "equal" for i in range(7)},
}


def _eps(eps) -> Fraction:
    return as_fraction(eps)


def _label_pt(x) -> list[str]:
    return [fraction_str(v) for v in x]


# ---------------------------------------------------------------------------
# invariance


@dataclass
class PieceRecord:
    member: str
    branch: str
    domain_shift: tuple[int, ...]
    target: str
    target_shift: tuple[int, ...] | None
    all_targets: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "member": self.member,
            "branch": self.branch,
            "domain_shift": list(self.domain_shift),
            "target": self.target,
            "target_shift": list(self.target_shift) if self.target_shift is not None else None,
            "all_targets": list(self.all_targets),
        }


@dataclass
class Violation:
    member: str
    branch: str
    domain_shift: tuple[int, ...]
    nearest_member: str | None
    nearest_shift: tuple[int, ...] | None
    # constraints of the nearest member broken by image + nearest_shift
    failed: tuple[HalfSpace, ...]
    # vertex of image + nearest_shift breaking the first failed constraint
    witness_vertex: tuple[Fraction, ...]
    # point of the image (lifted) outside every member translate
    witness: tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {
            "member": self.member,
            "branch": self.branch,
            "domain_shift": list(self.domain_shift),
            "nearest_member": self.nearest_member,
            "nearest_shift": list(self.nearest_shift) if self.nearest_shift is not None else None,
            "failed_halfspaces": [h.to_json() for h in self.failed],
            "witness_vertex": _label_pt(self.witness_vertex),
            "witness": _label_pt(self.witness),
        }


@dataclass
class InvarianceReport:
    eps: Fraction
    region: str
    checked_members: tuple[str, ...]
    pieces: list[PieceRecord] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)
    reduction: dict | None = None
    notes: tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        return not self.violations

    def routing(self) -> dict[tuple[str, str], str]:
        return {(p.member, p.branch): p.target for p in self.pieces}

    def to_json(self) -> dict:
        return {
            "eps": str(self.eps),
            "region": self.region,
            "holds": self.holds,
            "checked_members": list(self.checked_members),
            "reduction": self.reduction,
            "pieces": [p.to_json() for p in self.pieces],
            "violations": [v.to_json() for v in self.violations],
            "notes": list(self.notes),
        }


def branch_pieces(member: ConvexPolyhedron, shift_range: int = DEFAULT_SHIFT_RANGE):
    """(branch, v) with (member + v) meeting the branch domain in positive volume."""
    out = []
    for b in BRANCHES:
        for v in overlap_full_dimensional(member, b.domain, shift_range):
            out.append((b, v))
    return out


def _nearest_failure(img: ConvexPolyhedron, R: Region, shift_range: int):
    """Member translate that the image overlaps and violates the fewest bounds of."""
    best = None
    for label, Q in R.members:
        for v in overlap_full_dimensional(img, Q, shift_range):
            # img + v overlaps Q; list Q's own constraints that img + v breaks
            failed = []
            for h in Q.halfspaces:
                shifted = sum((a * x for a, x in zip(h.normal, v)), Fraction(0))
                if optimize(img, h.normal, "max") + shifted > h.bound:
                    failed.append(h)
            if best is None or len(failed) < len(best[2]):
                best = (label, v, failed)
    return best


def _violating_vertex(img: ConvexPolyhedron, h: HalfSpace):
    return max(img.vertices, key=lambda x: sum(a * xi for a, xi in zip(h.normal, x)))


def _check_piece(R: Region, label: str, member: ConvexPolyhedron, branch, v, eps, shift_range):
    img = image_of_branch(branch, eps, restrict=translate(member, v))
    res = contains_in_region(img, R, shift_range)
    if res.contained:
        targets = []
        for l, Q in R.members:
            sub = contains_in_region(img, Region(l, ((l, Q),)), shift_range)
            if sub.contained and sub.member is not None:
                targets.append(l)
        if res.member is not None:
            target, tshift = res.member, res.shift
        else:
            target, tshift = "+".join(m for m, _ in res.cover), None
        return PieceRecord(label, branch.label, v, target, tshift, tuple(targets))
    near = _nearest_failure(img, R, shift_range)
    if near is None:
        failed, nl, nv, wv = (), None, None, res.witness_vertex
    else:
        nl, nv, failed = near
        failed = tuple(failed)
        wv = _violating_vertex(img, failed[0]) if failed else res.witness_vertex
        wv = tuple(x + s for x, s in zip(wv, nv))
    return Violation(label, branch.label, v, nl, nv, failed, wv, res.witness)


def _group_of(names: Sequence[str]):
    return generate_group([BY_NAME[n] for n in names])


def check_reduction(name: str, R: Region, shift_range: int = DEFAULT_SHIFT_RANGE) -> dict:
    """Validity of checking only the generating members of R.

    Each subgroup generator must map R onto itself, and every member must be
    a subgroup image of a generating member.
    """
    gens = STABILIZER_GENERATORS[name]
    region_fixed = {g: region_equal_mod_lattice(apply_to_region(BY_NAME[g], R), R, shift_range) for g in gens}
    H = _group_of(gens)
    covered = {}
    for label, P in R.members:
        hit = None
        for base in GENERATING_MEMBERS[name]:
            B = R.member(base)
            for S, w in zip(H.elements, H.words):
                if polyhedra_equal_mod_lattice(apply_to_polyhedron(S, B), P):
                    hit = f"{w}({base})" if w != "id" else base
                    break
            if hit:
                break
        covered[label] = hit
    valid = all(region_fixed.values()) and all(covered.values())
    return {
        "subgroup": list(gens),
        "subgroup_order": H.order,
        "generators_fix_region": region_fixed,
        "member_cover": covered,
        "valid": valid,
    }


def check_invariance(name: str, eps, reduced: bool = True, shift_range: int = DEFAULT_SHIFT_RANGE,
                     threads: int | None = None, region: Region | None = None) -> InvarianceReport:
    """Decide whether G(R) is contained in R for the named region.

    With ``reduced=True`` only the generating members are mapped, provided
    the symmetry reduction checks out; otherwise every member is mapped.
    """
    eps = _eps(eps)
    R = region if region is not None else build_region(name, eps)
    reduction = None
    labels = R.labels
    if reduced and name in GENERATING_MEMBERS:
        reduction = check_reduction(name, R, shift_range)
        if reduction["valid"]:
            labels = list(GENERATING_MEMBERS[name])
    jobs = []
    for label in labels:
        member = R.member(label)
        for b, v in branch_pieces(member, shift_range):
            jobs.append((label, member, b, v))

    def run(job):
        label, member, b, v = job
        return _check_piece(R, label, member, b, v, eps, shift_range)

    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    rep = InvarianceReport(eps, name, tuple(labels), reduction=reduction, notes=R.notes)
    for r in results:
        (rep.pieces if isinstance(r, PieceRecord) else rep.violations).append(r)
    return rep


def check_intersection_pattern(name: str, eps, shift_range: int = DEFAULT_SHIFT_RANGE,
                               members: Sequence[str] | None = None) -> dict[str, list[str]]:
    """Branch labels meeting each member in positive volume (mod the lattice)."""
    R = build_region(name, eps)
    out = {}
    for label in members if members is not None else R.labels:
        found = []
        for b, _ in branch_pieces(R.member(label), shift_range):
            if b.label not in found:
                found.append(b.label)
        out[label] = sorted(found)
    return out


def symmetry_verdict(S, R: Region, shift_range: int = DEFAULT_SHIFT_RANGE) -> str:
    img = apply_to_region(S, R)
    if region_equal_mod_lattice(img, R, shift_range):
        return "equal"
    if regions_disjoint(img, R, shift_range):
        return "disjoint"
    return "neither"


def check_symmetry_profile(name: str | Region, eps=None, shift_range: int = DEFAULT_SHIFT_RANGE) -> dict[str, str]:
    """Per generator: 'equal', 'disjoint' or 'neither'."""
    R = name if isinstance(name, Region) else build_region(name, eps)
    return {S.name: symmetry_verdict(S, R, shift_range) for S in GENERATORS}


def torus_region() -> Region:
    return Region("T3", (("cube", box((0, 0, 0), (1, 1, 1))),))


# ---------------------------------------------------------------------------
# separating planes


@dataclass(frozen=True)
class SeparationCertificate:
    """``max f <= threshold`` on the lower side, ``>= threshold`` on the upper.

    Sides are lists of (base polyhedron, symmetry word) pairs, or the whole
    region 'A'. Values are taken on the pieces of each member reduced into
    the unit cube, so the functional is read on torus representatives.
    """

    name: str
    functional: tuple[int, int, int]
    threshold: Callable[[Fraction], Fraction]
    threshold_text: str
    lower: tuple
    upper: tuple

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "functional": list(self.functional),
            "threshold": self.threshold_text,
            "lower": [_side_label(s) for s in self.lower],
            "upper": [_side_label(s) for s in self.upper],
        }


def _side_label(s) -> str:
    if isinstance(s, str):
        return s
    base, w = s
    return f"{w}({base})" if w else base


def _side_polys(side, eps) -> list[ConvexPolyhedron]:
    out = []
    for s in side:
        if isinstance(s, str) and s.startswith("A"):
            R = build_region("A", eps)
            skip = s[2:].split(",") if s.startswith("A-") else []
            out.extend(P for l, P in R.members if l not in skip)
        else:
            base, w = s
            P = build_region(base, eps).members[0][1]
            out.append(apply_to_polyhedron(word(w), P) if w else P)
    return out


def side_range(side, functional, eps) -> tuple[Fraction, Fraction]:
    lo = hi = None
    for P in _side_polys(side, eps):
        for _, piece in reduce_to_unit_cube(P):
            a, b = optimize(piece, functional, "min"), optimize(piece, functional, "max")
            lo = a if lo is None else min(lo, a)
            hi = b if hi is None else max(hi, b)
    return lo, hi


@dataclass
class CertificateResult:
    certificate: SeparationCertificate
    threshold: Fraction
    lower_max: Fraction
    upper_min: Fraction

    @property
    def holds(self) -> bool:
        return self.lower_max <= self.threshold <= self.upper_min

    def to_json(self) -> dict:
        return dict(self.certificate.to_json(), threshold_value=str(self.threshold),
                    lower_max=str(self.lower_max), upper_min=str(self.upper_min), holds=self.holds)


S1_FAMILY = (("P1", "S1"), ("P1", "S1S3"), ("P1", "S1S4"), ("P1", "S1S3S4"))

CERTIFICATES = (
    SeparationCertificate("r-p above A: S0(P1)", (-1, 0, 1), lambda e: 1 - 2 * p_star(e), "1-2p*",
                          ("A",), (("P1", "S0"),)),
    SeparationCertificate("r-p above A: S0(P2)", (-1, 0, 1), lambda e: 1 - 2 * p_star(e), "1-2p*",
                          ("A",), (("P2", "S0"),)),
    SeparationCertificate("p+q+r: S1(P2) below A", (1, 1, 1), lambda e: 1 - p_star(e), "1-p*",
                          (("P2", "S1"),), ("A",)),
    SeparationCertificate("q+r: S1S3(P2) above A", (0, 1, 1), lambda e: 1 + p_star(e), "1+p*",
                          ("A",), (("P2", "S1S3"),)),
    SeparationCertificate("p+r: S1(P1) family below A minus P1", (1, 0, 1), lambda e: 2 * p_star(e), "2p*",
                          S1_FAMILY, ("A-P1",)),
    SeparationCertificate("p+q+r: P1 below S1(P1) family", (1, 1, 1), lambda e: Fraction(1), "1",
                          (("P1", ""),), S1_FAMILY),
)


def verify_certificate(cert: SeparationCertificate, eps) -> CertificateResult:
    eps = _eps(eps)
    _, lower_max = side_range(cert.lower, cert.functional, eps)
    upper_min, _ = side_range(cert.upper, cert.functional, eps)
    return CertificateResult(cert, cert.threshold(eps), lower_max, upper_min)


# ---------------------------------------------------------------------------
# critical couplings


def cubic(e: Fraction) -> Fraction:
    return 4 * e**3 - 14 * e**2 + 15 * e - 4


def bisect_eps_star(lo=Fraction(39, 100), hi=Fraction(40, 100), width=Fraction(1, 10**12)) -> tuple[Fraction, Fraction]:
    """Bracket the real root of the cubic by exact sign bisection."""
    slo, shi = cubic(lo), cubic(hi)
    if slo == 0:
        return lo, lo
    if shi == 0:
        return hi, hi
    if (slo < 0) == (shi < 0):
        raise ValueError("no sign change on the bracket")
    while hi - lo > width:
        mid = (lo + hi) / 2
        sm = cubic(mid)
        if sm == 0:
            return mid, mid
        if (sm < 0) == (slo < 0):
            lo = mid
        else:
            hi = mid
    return lo, hi


def eps_star_radical(dps: int = 40, printed: bool = False) -> mpmath.mpf:
    """Cardano form of the cubic's real root.

    ``printed=True`` evaluates the commonly quoted variant with ``1/u`` in
    place of ``2/u`` under the first cube root; that variant is not a root
    (it gives about 0.516) and is kept only for reporting.
    """
    with mpmath.workdps(dps):
        u = 43 - 3 * mpmath.sqrt(177)
        first = mpmath.cbrt((1 if printed else 2) / u)
        return +(7 - 4 * first - mpmath.cbrt(u / 2)) / 6


@dataclass
class CriticalValues:
    eps_star_bracket: tuple[Fraction, Fraction]
    eps_star: mpmath.mpf
    eps_star_radical: mpmath.mpf
    eps_star_radical_printed: mpmath.mpf
    eps_star2: mpmath.mpf
    eps_B: mpmath.mpf
    eps_n: list

    @property
    def eps_1(self):
        return self.eps_n[0]

    @property
    def eps_2(self):
        return self.eps_n[1]

    def ordering_holds(self) -> bool:
        return self.eps_1 < self.eps_B < self.eps_star < self.eps_2 < self.eps_star2 < mpmath.mpf(1) / 2

    def radical_agrees(self, tol: float = 1e-9) -> bool:
        return abs(self.eps_star - self.eps_star_radical) <= tol

    def to_json(self) -> dict:
        s = lambda x: mpmath.nstr(x, 20)
        return {
            "eps_star": s(self.eps_star),
            "eps_star_bracket": [str(self.eps_star_bracket[0]), str(self.eps_star_bracket[1])],
            "eps_star_radical": s(self.eps_star_radical),
            "eps_star_radical_printed_variant": s(self.eps_star_radical_printed),
            "eps_star2": s(self.eps_star2),
            "eps_B": s(self.eps_B),
            "eps_n": [s(x) for x in self.eps_n],
            "ordering_holds": self.ordering_holds(),
            "radical_agrees": self.radical_agrees(),
        }


def critical_values(tol: float = 1e-12, n_max: int = 5, dps: int = 40) -> CriticalValues:
    width = Fraction(tol).limit_denominator(10**18) if tol > 0 else Fraction(1, 10**12)
    lo, hi = bisect_eps_star(width=width)
    with mpmath.workdps(dps):
        mid = (mpmath.mpf(lo.numerator) / lo.denominator + mpmath.mpf(hi.numerator) / hi.denominator) / 2
        root17 = mpmath.sqrt(17)
        return CriticalValues(
            (lo, hi),
            mid,
            eps_star_radical(dps),
            eps_star_radical(dps, printed=True),
            (5 - root17) / 2,
            (7 - root17) / 8,
            [lorenz.critical_eps(n, dps) for n in range(1, n_max + 1)],
        )


# ---------------------------------------------------------------------------
# bundled reports


def subthreshold_pieces(eps, pieces=(("P2", "3a"), ("P2", "4a"))) -> dict[str, bool]:
    """Whether G(P2 ∩ d) lies in P2 alone, for the listed domains."""
    eps = _eps(eps)
    from .domains import BRANCH_BY_LABEL

    P2 = build_region("P2", eps)
    out = {}
    for base, label in pieces:
        member = build_region(base, eps).members[0][1]
        b = BRANCH_BY_LABEL[label]
        ok = True
        for v in overlap_full_dimensional(member, b.domain):
            img = image_of_branch(b, eps, restrict=translate(member, v))
            ok = ok and contains_in_region(img, P2).contained
        out[f"G({base}∩{label}) in {P2.label}"] = ok
    return out


def disjointness_A_S(eps, shift_range: int = DEFAULT_SHIFT_RANGE) -> bool:
    eps = _eps(eps)
    return regions_disjoint(build_region("A", eps), build_region("S", eps), shift_range)


@dataclass
class PropositionReport:
    which: int
    eps: Fraction
    checks: dict[str, bool]
    details: dict

    @property
    def verdict(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"proposition": self.which, "eps": str(self.eps), "verdict": self.verdict,
                "checks": self.checks, **self.details}


def _routing_matches(rep: InvarianceReport, name: str) -> bool:
    if not rep.holds:
        return False
    got = {(p.member, p.branch): p for p in rep.pieces}
    for key, target in EXPECTED_ROUTING[name].items():
        if key not in got or target not in got[key].all_targets:
            return False
    return True


def proposition_report(which: int, eps, threads: int | None = None) -> PropositionReport:
    """All sub-checks for the asymmetric set (1) or the symmetric set (2)."""
    eps = _eps(eps)
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    name = "A" if which == 1 else "S"
    R = build_region(name, eps)
    gen = GENERATING_MEMBERS[name]
    pattern = check_intersection_pattern(name, eps, members=gen)
    inv = check_invariance(name, eps, threads=threads, region=R)
    profile = check_symmetry_profile(R)
    checks = {
        "intersection_pattern": all(tuple(pattern[m]) == EXPECTED_PATTERN[name][m] for m in gen),
        "invariance": inv.holds,
        "routing": _routing_matches(inv, name),
        "symmetry_profile": profile == EXPECTED_PROFILE[name],
    }
    details = {
        "intersection_pattern": pattern,
        "invariance": inv.to_json(),
        "symmetry_profile": profile,
    }
    if which == 1:
        certs = [verify_certificate(c, eps) for c in CERTIFICATES]
        checks["certificates"] = all(c.holds for c in certs)
        details["certificates"] = [c.to_json() for c in certs]
    else:
        checks["third_iterate_condition"] = lorenz.third_iterate_condition(eps)
        if R.notes:
            details["advisory"] = list(R.notes)
    return PropositionReport(which, eps, checks, details)


__all__ = [
    "check_invariance", "check_intersection_pattern", "check_symmetry_profile", "check_reduction",
    "SeparationCertificate", "CERTIFICATES", "verify_certificate", "critical_values", "CriticalValues",
    "proposition_report", "disjointness_A_S", "subthreshold_pieces", "InvarianceReport",
    "bisect_eps_star", "eps_star_radical", "torus_region",
]
