import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from cml4.geometry import (
    ConvexPolyhedron, EmptyPolyhedronError, HalfSpace, Region, ShiftRangeExhausted, UnboundedError, argopt, box,
    contains_in_region, difference, ge, integer_matrix_inverse, intersect, le, linear_image, optimize,
    polyhedra_equal_mod_lattice, reduce_to_unit_cube, region_equal_mod_lattice, regions_disjoint,
    scalar_affine_image, translate, unit_cube, volume,
)

fracs = st.fractions(min_value=-3, max_value=3, max_denominator=50)
unit = st.fractions(min_value=0, max_value=1, max_denominator=40)


@st.composite
def boxes(draw, d=3):
    lo = [draw(unit) for _ in range(d)]
    hi = [l + draw(st.fractions(min_value=F(1, 40), max_value=1, max_denominator=40)) for l in lo]
    return box(lo, hi)


def test_unit_cube_vertices_and_volume():
    C = unit_cube()
    assert len(C.vertices) == 8
    assert volume(C) == 1
    assert C.full_dimensional


def test_simplex_volume_and_optimum():
    S = ConvexPolyhedron((ge((1, 0, 0), 0), ge((0, 1, 0), 0), ge((0, 0, 1), 0), le((1, 1, 1), 1)))
    assert volume(S) == F(1, 6)
    assert optimize(S, (1, 2, 3)) == 3
    assert optimize(S, (1, 2, 3), "min") == 0
    val, pt = argopt(S, (1, 1, 0))
    assert val == 1 and sum(pt[:2]) == 1


def test_empty_and_unbounded():
    E = ConvexPolyhedron((le((1, 0, 0), 0), ge((1, 0, 0), 1)))
    assert E.vertices == () or not E.full_dimensional
    with pytest.raises((EmptyPolyhedronError, UnboundedError)):
        optimize(E, (1, 0, 0))
    H = ConvexPolyhedron((ge((1, 0, 0), 0), ge((0, 1, 0), 0), ge((0, 0, 1), 0)))
    with pytest.raises(UnboundedError):
        optimize(H, (1, 1, 1))


@given(boxes(), st.tuples(fracs, fracs, fracs))
def test_translate_preserves_volume(B, v):
    assert volume(translate(B, v)) == volume(B)


@given(boxes(), st.fractions(min_value=F(1, 10), max_value=3, max_denominator=20))
def test_scalar_image_scales_volume(B, s):
    assert volume(scalar_affine_image(B, s, (1, 0, F(1, 2)))) == s**3 * volume(B)


@given(boxes())
def test_unimodular_image_preserves_volume(B):
    M = ((1, 1, 0), (0, -1, 0), (0, 1, 1))
    img = linear_image(B, M, (0, 0, 0))
    assert volume(img) == volume(B)
    inv = integer_matrix_inverse(M)
    assert polyhedra_equal_mod_lattice(linear_image(img, inv, (0, 0, 0)), B)


@given(boxes(), boxes())
def test_difference_partitions_volume(P, Q):
    pieces = difference(P, Q)
    inter = intersect(P, Q)
    v_int = volume(inter) if inter.full_dimensional else 0
    assert volume(P) == v_int + sum(volume(x) for x in pieces)


@given(boxes(), st.tuples(*[st.integers(-2, 2)] * 3))
def test_lattice_translate_is_equal_mod_lattice(B, v):
    assert polyhedra_equal_mod_lattice(B, translate(B, v))


@given(boxes())
def test_reduce_to_unit_cube_conserves_volume(B):
    pieces = reduce_to_unit_cube(translate(B, (F(1, 2), F(3, 4), 0)))
    assert sum(volume(P) for _, P in pieces) == volume(B)
    for _, P in pieces:
        lo, hi = P.bbox
        assert all(0 <= l and h <= 1 for l, h in zip(lo, hi))


def test_containment_uses_lattice_shifts():
    R = Region("R", (("B", box((0, 0, 0), (F(1, 2), F(1, 2), F(1, 2)))),))
    inside = box((1, 0, 2), (F(5, 4), F(1, 4), F(9, 4)))
    res = contains_in_region(inside, R)
    assert res.contained and res.shift == (-1, 0, -2)
    outside = box((F(1, 4), 0, 0), (F(3, 4), F(1, 4), F(1, 4)))
    res = contains_in_region(outside, R)
    assert not res.contained and res.witness is not None


def test_containment_across_two_members_needs_union():
    R = Region("R", (("L", box((0, 0, 0), (F(1, 2), 1, 1))), ("U", box((F(1, 2), 0, 0), (1, 1, 1)))))
    P = box((F(1, 4), 0, 0), (F(3, 4), 1, 1))
    assert contains_in_region(P, R).contained


def test_shift_range_is_enforced():
    R = Region("R", (("B", unit_cube()),))
    far = box((5, 0, 0), (F(11, 2), F(1, 2), F(1, 2)))
    with pytest.raises(ShiftRangeExhausted):
        contains_in_region(far, R, shift_range=3)


def test_regions_disjoint_mod_lattice():
    A = Region("A", (("a", box((0, 0, 0), (F(1, 2), F(1, 2), F(1, 2)))),))
    B = Region("B", (("b", box((F(1, 2), 0, 0), (1, F(1, 2), F(1, 2)))),))
    C = Region("C", (("c", box((F(5, 4), F(1, 4), 0), (F(3, 2), F(1, 2), F(1, 4)))),))
    assert regions_disjoint(A, B)
    assert not regions_disjoint(A, C)


def test_region_equality_ignores_member_order_and_shift():
    a = box((0, 0, 0), (F(1, 2), F(1, 2), F(1, 2)))
    b = box((F(1, 2), 0, 0), (1, F(1, 2), F(1, 2)))
    R1 = Region("R1", (("a", a), ("b", b)))
    R2 = Region("R2", (("b", translate(b, (0, 1, 0))), ("a", a)))
    assert region_equal_mod_lattice(R1, R2)


def test_two_dimensional_polygons():
    T = ConvexPolyhedron((ge((1, 0), 0), ge((0, 1), 0), le((1, 1), 1)), 2)
    assert len(T.vertices) == 3
    assert volume(T) == F(1, 2)


@given(st.lists(fracs, min_size=3, max_size=3).filter(any), fracs)
def test_halfspace_json_round_trip(a, b):
    h = HalfSpace(tuple(a), b)
    assert HalfSpace.from_json(json.loads(json.dumps(h.to_json()))) == h
    assert all("/" in s for s in h.to_json()["a"])


def test_zero_normal_rejected():
    from cml4.geometry import GeometryError

    with pytest.raises(GeometryError):
        HalfSpace((0, 0, 0), 1)
