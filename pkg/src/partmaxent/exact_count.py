"""Exact counts p(N) by a sparse residual-lattice DP, plus small oracles.

Parts are processed from the largest admissible value downwards.  After
part x has been handled every remaining part is at most y = x - 1, which
gives cheap necessary conditions on a residual r: for consecutive powers
j < k in J, r_j <= r_k <= y^{k-j} r_j, and either every coordinate is zero
or none is.  States failing them are dropped before they multiply.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .domain import Partition, Profile, ProfileSet, profile_of
from .errors import CapExceeded, MemoryCapExceeded

DEFAULT_MEMORY_CAP = 10 ** 8


def integer_root(value: int, j: int) -> int:
    """floor(value^{1/j}) for value >= 0, exact."""
    if j == 1 or value < 2:
        return value
    x = int(round(value ** (1.0 / j)))
    while x ** j > value:
        x -= 1
    while (x + 1) ** j <= value:
        x += 1
    return x


def max_part(N: Profile) -> int:
    return min(integer_root(v, j) for j, v in zip(N.J, N.values) if j > 0)


def _admissible(J: ProfileSet):
    """Build the pruning predicate for residuals whose parts are all <= y."""
    pairs = [(a, b, k - j) for a, (j, k) in enumerate(zip(J.powers, J.powers[1:])) for b in [a + 1]]

    def ok(r, y):
        if not any(r):
            return True
        if y == 0 or not all(r):
            return False
        for a, b, gap in pairs:
            if r[a] > r[b] or r[b] > y ** gap * r[a]:
                return False
        return True

    return ok


@dataclass
class CountTable:
    """Residual profile -> number of ways, after parts > ``parts_processed`` - 1 are fixed."""

    J: ProfileSet
    table: dict = field(default_factory=dict)
    parts_processed: int = 0

    def zero_entry(self) -> int:
        return self.table.get((0,) * len(self.J), 0)


def count_table(N: Profile, memory_cap: int = DEFAULT_MEMORY_CAP) -> CountTable:
    J = N.J
    ok = _admissible(J)
    x_top = max_part(N)
    start = tuple(N.values)
    states = {start: 1} if ok(start, x_top) else {}
    for x in range(x_top, 0, -1):
        w = tuple(x ** j for j in J)
        nxt = {}
        for r, c in states.items():
            cur = r
            while True:
                if ok(cur, x - 1):
                    nxt[cur] = nxt.get(cur, 0) + c
                cur = tuple(a - b for a, b in zip(cur, w))
                if min(cur) < 0:
                    break
        if len(nxt) > memory_cap:
            raise MemoryCapExceeded(f"{len(nxt)} residual states exceed cap {memory_cap}", states=len(nxt))
        states = nxt
        if not states:
            break
    return CountTable(J, states, 1)


def count_exact(N: Profile, memory_cap: int = DEFAULT_MEMORY_CAP) -> int:
    """|P(N)|: the number of partitions whose j-th power sums equal N_j for j in J."""
    if not any(N.values):
        return 1
    if not all(N.values):
        return 0
    return count_table(N, memory_cap).zero_entry()


def count_pn(n: int) -> int:
    """p(n) through Euler's pentagonal-number recurrence."""
    if n < 0:
        return 0
    p = [1] + [0] * n
    for m in range(1, n + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return p[n]


def enumerate_profile_partitions(N: Profile, cap: int = 10 ** 5) -> list:
    """Every partition with profile exactly N, largest parts first."""
    J = N.J
    ok = _admissible(J)
    out = []
    if not any(N.values):
        return [Partition({})]
    if not all(N.values):
        return out

    def walk(r, x, mult):
        if not any(r):
            if len(out) >= cap:
                raise CapExceeded(f"more than {cap} partitions with profile {N.values}")
            out.append(Partition(dict(mult)))
            return
        if x == 0:
            return
        w = tuple(x ** j for j in J)
        m = 0
        cur = r
        while min(cur) >= 0:
            if ok(cur, x - 1):
                if m:
                    mult[x] = m
                walk(cur, x - 1, mult)
                mult.pop(x, None)
            cur = tuple(a - b for a, b in zip(cur, w))
            m += 1

    walk(tuple(N.values), max_part(N), {})
    for lam in out:
        assert profile_of(lam, J) == N.values
    return out
