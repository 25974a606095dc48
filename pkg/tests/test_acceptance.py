"""The nine acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line (collected into
the terminal summary) and asserts both the outcome and its runtime budget.
"""
import itertools
import random
import time
from contextlib import contextmanager
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest

from cml4 import lorenz
from cml4.domains import BRANCH_BY_LABEL, BRANCHES
from cml4.explore import SimulationConfig, simulate_batch
from cml4.geometry import translate, volume
from cml4.lorenz import Interval, LorenzMap, p_star
from cml4.regions import build_region
from cml4.symmetry import (
    BY_NAME, GENERATORS, commutes, compose, equivariance_suite, full_group, identity, orbit_of_region,
    random_odd_points, word,
)
from cml4.verify import (
    EXPECTED_PATTERN, EXPECTED_PROFILE, EXPECTED_ROUTING, critical_values, cubic, disjointness_A_S,
    proposition_report, subthreshold_pieces,
)


@contextmanager
def criterion(request, n: int, title: str, budget: float):
    """Record PASS/FAIL and elapsed time, then enforce the budget."""
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        dt = time.perf_counter() - t0
        within = dt < budget
        line = f"criterion {n}: {'PASS' if ok and within else 'FAIL'}  {title}  ({dt:.1f}s, budget {budget:g}s)"
        print(line)
        request.config.acceptance_lines.append(line)
    assert within, line


def _witness_is_genuine(v, eps) -> bool:
    """Preimage of the witness lies in the piece; witness avoids every member translate."""
    R = build_region("A", eps)
    b = BRANCH_BY_LABEL[v.branch]
    x = tuple((w - c * eps / 2) / (2 * (1 - eps)) for w, c in zip(v.witness, b.offset))
    in_piece = b.domain.contains_point(x) and translate(R.member(v.member), v.domain_shift).contains_point(x)
    outside = not any(
        P.contains_point(tuple(w - s for w, s in zip(v.witness, sh)))
        for _, P in R.members for sh in itertools.product(range(-3, 4), repeat=3)
    )
    return in_piece and outside


def test_criterion_1_asymmetric_set(request):
    with criterion(request, 1, "asymmetric region invariant at 41/100, exact witness at 39/100", 20):
        t = time.perf_counter()
        rep = proposition_report(1, F(41, 100))
        assert time.perf_counter() - t < 10
        assert rep.verdict, rep.checks
        assert set(rep.checks) == {"intersection_pattern", "invariance", "routing", "symmetry_profile", "certificates"}
        pattern = rep.details["intersection_pattern"]
        assert tuple(pattern["P1"]) == ("1b", "4a")
        assert tuple(pattern["P2"]) == ("3a", "3b", "3c", "4a", "4b", "4c")
        assert rep.details["symmetry_profile"] == EXPECTED_PROFILE["A"]

        t = time.perf_counter()
        low = proposition_report(1, F(39, 100))
        assert time.perf_counter() - t < 10
        assert not low.verdict and not low.checks["invariance"]
        from cml4.verify import check_invariance

        inv = check_invariance("A", F(39, 100))
        assert inv.violations and all(_witness_is_genuine(v, F(39, 100)) for v in inv.violations)


def test_criterion_2_critical_values(request):
    with criterion(request, 2, "eps* bracket and radical, eps**, eps_B, eps_1", 1):
        cv = critical_values(tol=1e-12, n_max=2, dps=40)
        lo, hi = cv.eps_star_bracket
        assert F(397, 1000) <= lo < hi <= F(398, 1000)
        assert cubic(lo) * cubic(hi) <= 0
        assert cv.radical_agrees(1e-9)
        with mpmath.workdps(40):
            # oracles: each value is the right root of its defining polynomial
            e2, eB, e1 = cv.eps_star2, cv.eps_B, cv.eps_1
            assert abs(e2 * e2 - 5 * e2 + 2) < 1e-30 and 0 < e2 < 0.5
            assert abs(4 * eB * eB - 7 * eB + 2) < 1e-30 and 0 < eB < 0.5
            assert abs(2 * (1 - e1) ** 2 - 1) < 1e-30 and 0 < e1 < 0.5
            assert abs(e2 - mpmath.mpf("0.43844718719")) < 1e-9
            assert abs(eB - mpmath.mpf("0.35961179679")) < 1e-9
            assert abs(e1 - mpmath.mpf("0.29289321881")) < 1e-9
        assert (round(float(e2), 3), round(float(eB), 3)) == (0.438, 0.360)
        assert cv.ordering_holds()


def test_criterion_3_subthreshold_routing(request):
    with criterion(request, 3, "P2 pieces through 3a, 4a stay in P2 at 36/100, not at 35/100", 5):
        assert all(subthreshold_pieces(F(36, 100)).values())
        assert not all(subthreshold_pieces(F(35, 100)).values())
        eB = (7 - mpmath.sqrt(17)) / 8
        assert 0.35 < eB < 0.36


def test_criterion_4_symmetric_set(request):
    with criterion(request, 4, "symmetric region invariant at 32/100, fails at 28/100", 20):
        t = time.perf_counter()
        rep = proposition_report(2, F(32, 100))
        assert time.perf_counter() - t < 10
        assert rep.verdict, rep.checks
        assert tuple(rep.details["intersection_pattern"]["P0"]) == EXPECTED_PATTERN["S"]["P0"]
        pieces = {(p["member"], p["branch"]): p["all_targets"] for p in rep.details["invariance"]["pieces"]}
        for key, target in EXPECTED_ROUTING["S"].items():
            assert target in pieces[key]
        assert rep.details["symmetry_profile"] == {f"S{i}": "equal" for i in range(7)}

        t = time.perf_counter()
        low = proposition_report(2, F(28, 100))
        assert time.perf_counter() - t < 10
        assert not low.verdict
        assert lorenz.above_eps1(F(32, 100)) and not lorenz.above_eps1(F(28, 100))


def test_criterion_5_disjointness(request):
    with criterion(request, 5, "A and S disjoint at 41/100 and 45/100", 5):
        for eps in (F(41, 100), F(45, 100)):
            assert disjointness_A_S(eps)
        # sampled cross-check: no odd-denominator point lies in both
        A, S = build_region("A", F(41, 100)), build_region("S", F(41, 100))

        def member_of(R, x):
            return any(P.contains_point(tuple(c + s for c, s in zip(x, sh)))
                       for _, P in R.members for sh in itertools.product((-1, 0, 1), repeat=3))

        for X, M in random_odd_points(300, random.Random(5)):
            x = tuple(F(c, M) for c in X)
            assert not (member_of(A, x) and member_of(S, x))


def _closure_by_matrices():
    """Independent closure oracle: BFS on matrices only (translations are integral)."""
    mats = [S.matrix for S in GENERATORS]
    mul = lambda A, B: tuple(tuple(sum(A[i][k] * B[k][j] for k in range(3)) for j in range(3)) for i in range(3))
    seen = {identity().matrix}
    frontier = list(seen)
    while frontier:
        nxt = []
        for A in frontier:
            for B in mats:
                C = mul(A, B)
                if C not in seen:
                    seen.add(C)
                    nxt.append(C)
        frontier = nxt
    return seen


def test_criterion_6_group_structure(request):
    with criterion(request, 6, "group of order 48, relations, orbit of A has 6 images", 10):
        G = full_group()
        assert G.order == 48 == len(_closure_by_matrices())
        S = BY_NAME
        assert word("S2S1S2") == S["S4"]
        assert word("S3S1S3") == S["S5"]
        assert word("S3S2S3") == S["S6"]
        assert all(commutes(S["S0"], T) for T in G)
        assert all(compose(T, T) == identity() for T in GENERATORS)
        orb = orbit_of_region(build_region("A", F(41, 100)), G)
        assert len(orb.images) == 6
        assert orb.stabilizer_order == 8


def test_criterion_7_equivariance_and_two_paths(request):
    with criterion(request, 7, "10^4 points per generator at 1/10 and 41/100, two paths, volumes", 30):
        points = random_odd_points(10_000, random.Random(2024))
        for eps in (F(1, 10), F(41, 100)):
            reps, mismatch = equivariance_suite(GENERATORS, eps, points)
            assert mismatch == 0
            for name, r in reps.items():
                assert r.failed == 0 and r.passed == 10_000, r.to_json()
        assert sum(volume(b.domain) for b in BRANCHES) == 1


def test_criterion_8_lorenz(request):
    with criterion(request, 8, "p* is 2-periodic, component cycle at 2/5, third-iterate condition", 5):
        rng = random.Random(8)
        for _ in range(20):
            eps = F(rng.randrange(1, 10_000), 20_000)
            L = LorenzMap(eps)
            ps = p_star(eps)
            assert L(ps) == 1 - ps and L(1 - ps) == ps
        eps = F(2, 5)
        C1, C2 = lorenz.mixing_components(eps)
        assert C1 == (Interval(F(1, 5), F(34, 125)), Interval(F(91, 125), F(4, 5)))
        assert C2 == (Interval(F(11, 25), F(14, 25)),)
        assert [float(x) for I in C1 for x in (I.lo, I.hi)] == [0.2, 0.272, 0.728, 0.8]
        assert all(lorenz.component_cycle(eps).values())
        assert lorenz.third_iterate_condition(F(32, 100))
        assert not lorenz.third_iterate_condition(F(28, 100))


@pytest.mark.slow
def test_criterion_9_simulation(request):
    with criterion(request, 9, "A holds its orbits at 0.41; S captures tails at 0.32 but not 0.25", 120):
        recs, _ = simulate_batch(SimulationConfig(
            eps=0.41, steps=10_000, burn_in=1_000, orbit_count=100, rng_seed=42, start_region="A"))
        assert all(r.frac_A == 1.0 for r in recs)

        def tail_fraction(eps):
            recs, _ = simulate_batch(SimulationConfig(
                eps=eps, steps=100_000, burn_in=10_000, orbit_count=100, rng_seed=42, track="S"))
            return float(np.mean([r.frac_S == 1.0 for r in recs]))

        assert tail_fraction(0.32) >= 0.99
        assert tail_fraction(0.25) < 0.99


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
