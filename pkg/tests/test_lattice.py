from fractions import Fraction
from math import gcd

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qtorsion.errors import LatticeError
from qtorsion.lattice import (
    complement_basis,
    det_exact,
    group_order,
    is_saturated,
    matmul,
    primitive,
    project_coordinates,
    rank,
    saturation_basis,
    smith_normal_form,
    solve_rational,
)

small = st.integers(-6, 6)


def matrices(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


square = st.integers(1, 4).flatmap(lambda n: matrices(n, n))
rect = st.tuples(st.integers(1, 4), st.integers(1, 4)).flatmap(lambda rc: matrices(*rc))


def test_primitive():
    assert primitive((4, -6, 0)) == (2, -3, 0)
    assert primitive((-7,)) == (-1,)
    with pytest.raises(LatticeError):
        primitive((0, 0))


def test_snf_regression_two_by_three():
    snf = smith_normal_form([[1, 1, 2], [1, 0, 1]])
    assert snf.invariant_factors == (1, 1)
    assert [list(r) for r in matmul(matmul(snf.U, [[1, 1, 2], [1, 0, 1]]), snf.V)] == \
        [list(r) for r in snf.D]


def test_snf_torsion_example():
    snf = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert snf.invariant_factors == (2, 6, 12)
    assert group_order(snf.invariant_factors) == 144


def test_group_order_infinite():
    assert group_order((1, 0)) == 0


@given(square)
def test_det_matches_sympy(M):
    assert det_exact(M) == sympy.Matrix(M).det()


@given(rect)
@settings(max_examples=150)
def test_snf_decomposition(M):
    snf = smith_normal_form(M)
    assert [list(r) for r in matmul(matmul(snf.U, M), snf.V)] == [list(r) for r in snf.D]
    assert abs(det_exact(snf.U)) == 1 and abs(det_exact(snf.V)) == 1
    d = snf.invariant_factors
    assert all(x >= 0 for x in d)
    nz = [x for x in d if x]
    assert d[:len(nz)] == tuple(nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert snf.rank == rank(M) == sympy.Matrix(M).rank()


@given(square)
def test_snf_product_is_abs_det(M):
    assert group_order(smith_normal_form(M).invariant_factors) == abs(det_exact(M))


def test_saturation_of_unsaturated_pair():
    vs = [(2, 0, 0), (0, 2, 2)]
    assert not is_saturated(vs)
    sat = saturation_basis(vs)
    assert is_saturated(sat)
    # same real span: each original vector is an integer combination of sat
    for v in vs:
        c = solve_rational(sat, v)
        assert c is not None and all(x.denominator == 1 for x in c)


def test_saturation_rejects_dependent():
    with pytest.raises(LatticeError):
        saturation_basis([(1, 2), (2, 4)])


@given(st.lists(st.tuples(small, small, small), min_size=1, max_size=2))
@settings(max_examples=150)
def test_complement_completes_basis(vs):
    if rank(vs) < len(vs):
        return
    sat = saturation_basis(vs)
    comp = complement_basis(sat)
    assert abs(det_exact(list(sat) + list(comp))) == 1


def test_explicit_complement_checked():
    sat = [(1, 0, 0)]
    assert complement_basis(sat, [(0, 1, 0), (3, 2, 1)]) == [(0, 1, 0), (3, 2, 1)]
    with pytest.raises(LatticeError):
        complement_basis(sat, [(0, 2, 0), (0, 0, 1)])
    with pytest.raises(LatticeError):
        complement_basis([(2, 0, 0)])


@given(st.tuples(small, small, small), st.tuples(small, small, small))
def test_projection_independent_of_complement_up_to_unimodular(v, shift):
    sat = [(1, 1, 0)]
    comp = complement_basis(sat)
    x = project_coordinates(v, sat, comp)
    # shifting the complement by multiples of sat leaves coordinates unchanged
    comp2 = [tuple(c + shift[i] * s for c, s in zip(row, sat[0])) for i, row in enumerate(comp)]
    assert project_coordinates(v, sat, comp2) == x
    # reordering the complement permutes coordinates; the gcd is invariant
    x3 = project_coordinates(v, sat, [comp[1], comp[0]])
    assert x3 == (x[1], x[0])
    assert gcd(*x3) == gcd(*x)


def test_projection_kills_sat():
    sat = [(1, 2, 3)]
    comp = complement_basis(sat)
    assert project_coordinates((2, 4, 6), sat, comp) == (0, 0)


def test_solve_rational():
    assert solve_rational([(2, 0), (0, 3)], (1, 1)) == (Fraction(1, 2), Fraction(1, 3))
    assert solve_rational([(1, 0, 0)], (0, 1, 0)) is None
    assert solve_rational([], (0, 0)) == ()
    with pytest.raises(LatticeError):
        solve_rational([(1, 1), (2, 2)], (1, 1))
