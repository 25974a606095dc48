"""The centrally symmetric Lorenz map on [eps/2, 1 - eps/2].

``L(v) = 2(1-eps) v + eps/2`` for v < 1/2 and ``2(1-eps) v + 3 eps/2 - 1``
for v > 1/2. Everything here is exact on rationals except
:func:`critical_eps`, which works in mpmath at configurable precision.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .geometry import as_fraction

HALF = Fraction(1, 2)


class LorenzError(ValueError):
    pass


class CriticalPointError(LorenzError):
    pass


class OutsideDomainError(LorenzError):
    pass


class OutsideWindowError(LorenzError):
    pass


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_fraction(self.lo))
        object.__setattr__(self, "hi", as_fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    def __contains__(self, v) -> bool:
        return self.lo <= v <= self.hi

    def issubset(self, other: Interval) -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def to_json(self) -> list[str]:
        return [str(self.lo), str(self.hi)]


IntervalUnion = tuple[Interval, ...]


@dataclass(frozen=True)
class LorenzMap:
    eps: Fraction

    def __post_init__(self):
        eps = as_fraction(self.eps)
        if not 0 <= eps < HALF:
            raise ValueError("coupling must satisfy 0 <= eps < 1/2")
        object.__setattr__(self, "eps", eps)

    @property
    def slope(self) -> Fraction:
        return 2 * (1 - self.eps)

    @property
    def domain(self) -> Interval:
        return Interval(self.eps / 2, 1 - self.eps / 2)

    def intercept(self, upper: bool) -> Fraction:
        return 3 * self.eps / 2 - 1 if upper else self.eps / 2

    def __call__(self, v) -> Fraction:
        return lorenz_eval(self, v)

    def iterate(self, v, n: int) -> Fraction:
        for _ in range(n):
            v = lorenz_eval(self, v)
        return v


def lorenz_eval(L: LorenzMap, v) -> Fraction:
    """Evaluate L on its closed domain minus the critical point."""
    v = as_fraction(v)
    if v == HALF:
        raise CriticalPointError("L is undefined at the critical point 1/2")
    if v not in L.domain:
        raise OutsideDomainError(f"{v} outside [{L.domain.lo}, {L.domain.hi}]")
    return L.slope * v + L.intercept(v > HALF)


def p_star(eps) -> Fraction:
    """Left point of the period-two orbit p* <-> 1 - p*."""
    eps = as_fraction(eps)
    return (eps - 2) / (4 * eps - 6)


def interval_image(L: LorenzMap, I: Interval) -> Interval:
    """Image of an interval lying on one side of 1/2 (endpoint 1/2 allowed)."""
    if I.lo < HALF < I.hi:
        raise LorenzError(f"interval ({I.lo}, {I.hi}) straddles the critical point")
    if I.lo not in L.domain or I.hi not in L.domain:
        raise OutsideDomainError("interval leaves the domain")
    upper = I.lo >= HALF and I.hi > HALF
    b = L.intercept(upper)
    return Interval(L.slope * I.lo + b, L.slope * I.hi + b)


def union_image(L: LorenzMap, U: Sequence[Interval]) -> IntervalUnion:
    """Image of a union, splitting pieces at 1/2."""
    out = []
    for I in U:
        if I.lo < HALF < I.hi:
            out.append(interval_image(L, Interval(I.lo, HALF)))
            out.append(interval_image(L, Interval(HALF, I.hi)))
        else:
            out.append(interval_image(L, I))
    return tuple(out)


def union_subset(U: Sequence[Interval], V: Sequence[Interval]) -> bool:
    """Each piece of U lies inside a single piece of V."""
    return all(any(I.issubset(J) for J in V) for I in U)


# ---------------------------------------------------------------------------
# parameter windows


def above_eps1(eps) -> bool:
    """eps >= 1 - sqrt(2)/2, decided as 2 (1 - eps)^2 <= 1."""
    eps = as_fraction(eps)
    return 2 * (1 - eps) ** 2 <= 1


def below_eps2(eps) -> bool:
    """eps < 1 - 2^(1/4)/2, decided as 8 (1 - eps)^4 > 1."""
    eps = as_fraction(eps)
    return 8 * (1 - eps) ** 4 > 1


def in_two_component_window(eps) -> bool:
    return above_eps1(eps) and below_eps2(eps)


def mixing_components(eps, check: bool = True) -> tuple[IntervalUnion, IntervalUnion]:
    """The two cyclically permuted unions of intervals (C1, C2)."""
    eps = as_fraction(eps)
    if check and not in_two_component_window(eps):
        raise OutsideWindowError(f"eps = {eps} outside [1 - sqrt(2)/2, 1 - 2^(1/4)/2)")
    L = LorenzMap(eps)
    lo, hi = eps / 2, 1 - eps / 2
    C1 = (Interval(lo, L.iterate(hi, 2)), Interval(L.iterate(lo, 2), hi))
    C2 = (Interval(L(lo), L(hi)),)
    return C1, C2


def component_cycle(eps) -> dict:
    """Check L(C1) in C2 and L(C2) in C1 exactly."""
    L = LorenzMap(eps)
    C1, C2 = mixing_components(eps)
    return {
        "L(C1) in C2": union_subset(union_image(L, C1), C2),
        "L(C2) in C1": union_subset(union_image(L, C2), C1),
    }


def third_iterate_condition(eps) -> bool:
    """L^3(1 - eps/2) <= L(1 - eps/2)."""
    L = LorenzMap(eps)
    top = 1 - L.eps / 2
    return L.iterate(top, 3) <= L(top)


def critical_eps(n: int, dps: int = 40) -> mpmath.mpf:
    """eps_n = 1 - 2^(1/2^n)/2 at ``dps`` decimal digits."""
    if n < 1:
        raise ValueError("n must be positive")
    with mpmath.workdps(dps):
        return +(1 - mpmath.power(2, mpmath.mpf(1) / 2**n) / 2)
