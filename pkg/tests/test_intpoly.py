import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from partmaxent.errors import BoxCapExceeded, DegreeCapExceeded
from partmaxent.intpoly import (enumerate_QJ, is_n_feasible, nt_density, reduce_half,
                                stirling1_row)


def brute_QJ(J):
    """All t in ((-1/2, 1/2] cap (1/d!) Z)^J whose polynomial is integer on 0..d.

    Integer-valued polynomials of degree <= d have coefficients in (1/d!) Z,
    and integrality on d+1 consecutive integers gives integrality everywhere.
    """
    d = max(J)
    L = math.factorial(d)
    grid = [Fraction(k, L) for k in range(-L // 2 + 1, L // 2 + 1)]
    out = set()
    for t in itertools.product(grid, repeat=len(J)):
        if all(sum(c * Fraction(x) ** j for c, j in zip(t, J)).denominator == 1 for x in range(d + 1)):
            out.add(t)
    return out


def test_stirling_rows():
    assert stirling1_row(3) == (0, 2, -3, 1)
    assert stirling1_row(4) == (0, -6, 11, -6, 1)


def test_reduce_half():
    assert reduce_half(Fraction(1, 2)) == Fraction(1, 2)
    assert reduce_half(Fraction(-1, 2)) == Fraction(1, 2)
    assert reduce_half(Fraction(7, 3)) == Fraction(1, 3)
    assert reduce_half(Fraction(5, 3)) == Fraction(-1, 3)


@pytest.mark.parametrize("d,size", [(1, 1), (2, 2), (3, 12), (4, 288)])
def test_full_cardinalities(d, size):
    assert enumerate_QJ(tuple(range(1, d + 1))).cardinality == size


@pytest.mark.parametrize("J", [(1,), (2,), (1, 2), (2, 3), (1, 3), (1, 2, 3), (0, 1), (0, 2), (3,)])
def test_matches_brute_force(J):
    assert {q.coeffs for q in enumerate_QJ(J)} == brute_QJ(J)


def test_q12_and_zero_first():
    Q = enumerate_QJ((1, 2))
    assert Q.polys[0].is_zero()
    assert Q.polys[1].coeffs == (Fraction(1, 2), Fraction(1, 2))
    assert all(Q.polys[1](m).denominator == 1 for m in range(-5, 6))


def test_degree_cap():
    with pytest.raises(DegreeCapExceeded):
        enumerate_QJ((9,))


def test_parity_feasibility():
    Q = enumerate_QJ((1, 2))
    assert is_n_feasible((4, 10), Q)
    assert not is_n_feasible((3, 4), Q)


def test_density():
    assert nt_density(enumerate_QJ((1, 2)), 50) == Fraction(1, 2)
    assert nt_density(enumerate_QJ((1,)), 20) == 1
    Q = enumerate_QJ((1, 2, 3))
    box = 12
    hits = sum(is_n_feasible(N, Q) for N in itertools.product(range(box), repeat=3))
    assert nt_density(Q, box) == Fraction(hits, box ** 3)
    with pytest.raises(BoxCapExceeded):
        nt_density(Q, 10 ** 3)


Q123 = enumerate_QJ((1, 2, 3))
vec = st.tuples(*[st.integers(-200, 200)] * 3)


@given(vec, vec)
def test_nt_closed_under_addition(a, b):
    if is_n_feasible(a, Q123) and is_n_feasible(b, Q123):
        assert is_n_feasible(tuple(x + y for x, y in zip(a, b)), Q123)


@given(st.lists(st.integers(1, 30), max_size=10))
def test_actual_partitions_are_feasible(parts):
    N = tuple(sum(p ** j for p in parts) for j in (1, 2, 3))
    assert is_n_feasible(N, Q123)
