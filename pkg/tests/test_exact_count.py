from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from partmaxent.domain import Partition, Profile, profile_of
from partmaxent.errors import CapExceeded, MemoryCapExceeded
from partmaxent.exact_count import count_exact, count_pn, enumerate_profile_partitions, integer_root
from partmaxent.intpoly import enumerate_QJ, is_n_feasible

# p(0..19)
KNOWN = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176, 231, 297, 385, 490]


def partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield []
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield [k] + rest


def brute_counts(J, n_max):
    c = Counter()
    for n in range(n_max + 1):
        for lam in partitions(n):
            c[profile_of(Partition.from_parts(lam), J)] += 1
    return c


def test_pentagonal_small():
    assert [count_pn(n) for n in range(20)] == KNOWN
    assert count_pn(100) == 190569292


def test_hand_values():
    assert count_exact(Profile((1,), (4,))) == 5
    assert count_exact(Profile((1, 2), (4, 10))) == 1
    assert count_exact(Profile((1, 2), (3, 4))) == 0
    assert count_exact(Profile((1, 2), (0, 0))) == 1
    assert count_exact(Profile((1, 2), (0, 3))) == 0


def test_dp_matches_pentagonal():
    for n in range(0, 121):
        assert count_exact(Profile((1,), (n,))) == count_pn(n)


@pytest.mark.parametrize("J", [(1, 2), (0, 1, 3), (2, 3), (0, 2)])
def test_dp_matches_brute_force(J):
    n_max = 16
    for N, c in brute_counts(J, n_max).items():
        if 1 in J and N[J.index(1)] > n_max:
            continue
        if 1 not in J and sum(N) > n_max:
            continue
        assert count_exact(Profile(J, N)) == c, N


def test_enumeration():
    assert len(enumerate_profile_partitions(Profile((1,), (4,)))) == 5
    assert enumerate_profile_partitions(Profile((1, 2), (4, 10))) == [Partition.from_parts([3, 1])]
    assert enumerate_profile_partitions(Profile((1,), (1,))) == [Partition.from_parts([1])]
    N = Profile((1, 2), (20, 60))
    lams = enumerate_profile_partitions(N)
    assert len(lams) == count_exact(N) == len(set(lams))
    assert all(profile_of(lam, N.J) == N.values for lam in lams)
    with pytest.raises(CapExceeded):
        enumerate_profile_partitions(Profile((1,), (20,)), cap=10)


def test_memory_cap():
    with pytest.raises(MemoryCapExceeded) as info:
        count_exact(Profile((1, 2), (40, 200)), memory_cap=5)
    assert info.value.states > 5


def test_integer_root():
    assert integer_root(26, 3) == 2 and integer_root(27, 3) == 3
    assert integer_root(10 ** 30, 2) == 10 ** 15
    assert integer_root(10 ** 30 - 1, 2) == 10 ** 15 - 1


Q12 = enumerate_QJ((1, 2))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 25), st.integers(1, 625))
def test_positive_count_implies_feasible(n, m):
    if count_exact(Profile((1, 2), (n, m))) > 0:
        assert is_n_feasible((n, m), Q12)
