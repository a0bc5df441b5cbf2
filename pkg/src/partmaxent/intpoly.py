"""Integer-valued polynomials supported on J, and the lattice NT they cut out.

Q_J is enumerated through the binomial basis: every integer-valued
polynomial of degree <= d is sum_i s_i binom(x, i) with integer s_i, and
s_i only matters modulo i!.  Expanding in monomials (Stirling numbers of the
first kind) and keeping the candidates whose coefficients outside J are
integers gives Q_J after reducing the in-J coefficients into (-1/2, 1/2].
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce

import numpy as np

from .domain import Profile, ProfileSet
from .errors import BoxCapExceeded, DegreeCapExceeded

DEFAULT_DEGREE_CAP = 8
DEFAULT_BOX_CAP = 10 ** 7


def reduce_half(t: Fraction) -> Fraction:
    """Representative of t mod 1 in (-1/2, 1/2]."""
    return t - math.ceil(t - Fraction(1, 2))


@lru_cache(maxsize=None)
def stirling1_row(i: int) -> tuple:
    """Signed Stirling numbers s(i, k), k = 0..i, so that x(x-1)...(x-i+1) = sum_k s(i,k) x^k."""
    row = [1]
    for m in range(i):
        nxt = [0] * (len(row) + 1)
        for k, c in enumerate(row):
            nxt[k + 1] += c
            nxt[k] -= m * c
        row = nxt
    return tuple(row)


def binomial_monomials(i: int) -> tuple:
    """Monomial coefficients of binom(x, i) as Fractions (index = power)."""
    fact = math.factorial(i)
    return tuple(Fraction(c, fact) for c in stirling1_row(i))


@dataclass(frozen=True)
class IntValuedPoly:
    """sum_{j in J} t_j x^j with t_j in (-1/2, 1/2] and integer values on Z."""

    J: ProfileSet
    coeffs: tuple  # Fractions aligned with J.powers

    def __call__(self, m) -> Fraction:
        return sum((t * Fraction(m) ** j for j, t in zip(self.J, self.coeffs)), Fraction(0))

    def is_zero(self) -> bool:
        return all(t == 0 for t in self.coeffs)

    def to_json(self):
        return {str(j): f"{t.numerator}/{t.denominator}" for j, t in zip(self.J, self.coeffs)}

    def __repr__(self):
        terms = [f"({t})x^{j}" for j, t in zip(self.J, self.coeffs) if t]
        return "IntValuedPoly(" + (" + ".join(terms) or "0") + ")"


@dataclass(frozen=True)
class FeasibilityLattice:
    J: ProfileSet
    polys: tuple

    @property
    def cardinality(self) -> int:
        return len(self.polys)

    def __len__(self):
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def denominators_lcm(self) -> int:
        dens = [t.denominator for q in self.polys for t in q.coeffs]
        return reduce(math.lcm, dens, 1)

    def add(self, p: IntValuedPoly, q: IntValuedPoly) -> IntValuedPoly:
        """Sum reduced back into the fundamental domain."""
        return IntValuedPoly(self.J, tuple(reduce_half(a + b) for a, b in zip(p.coeffs, q.coeffs)))

    def to_json(self):
        return {
            "J": self.J.to_json(),
            "cardinality": self.cardinality,
            "polys": [q.to_json() for q in self.polys],
        }


def enumerate_QJ(J, degree_cap: int = DEFAULT_DEGREE_CAP) -> FeasibilityLattice:
    J = ProfileSet.of(J)
    d = J.j_max
    if d > degree_cap:
        raise DegreeCapExceeded(f"j_max={d} exceeds degree cap {degree_cap}")
    basis = [binomial_monomials(i) for i in range(1, d + 1)]
    outside = [j for j in range(1, d + 1) if j not in J]
    seen = {}
    for residues in itertools.product(*(range(math.factorial(i)) for i in range(1, d + 1))):
        coeffs = [Fraction(0)] * (d + 1)
        for s, mono in zip(residues, basis):
            if s:
                for k, c in enumerate(mono):
                    coeffs[k] += s * c
        if any(coeffs[j].denominator != 1 for j in outside):
            continue
        key = tuple(reduce_half(coeffs[j]) for j in J)
        seen.setdefault(key, IntValuedPoly(J, key))
    polys = sorted(seen.values(), key=lambda q: (not q.is_zero(), q.coeffs))
    return FeasibilityLattice(J, tuple(polys))


def is_n_feasible(N, lattice: FeasibilityLattice) -> bool:
    """True iff sum_j t_j N_j is an integer for every polynomial in Q_J."""
    values = N.values if isinstance(N, Profile) else tuple(N)
    for q in lattice.polys:
        total = sum((t * v for t, v in zip(q.coeffs, values)), Fraction(0))
        if total.denominator != 1:
            return False
    return True


def nt_density(lattice: FeasibilityLattice, box_side: int, box_cap: int = DEFAULT_BOX_CAP) -> Fraction:
    """Exact fraction of {0..box_side-1}^J lying in NT."""
    dim = len(lattice.J)
    total = box_side ** dim
    if total > box_cap:
        raise BoxCapExceeded(f"box of {total} points exceeds cap {box_cap}")
    L = lattice.denominators_lcm()
    # t_j N_j summed is an integer  <=>  sum_j (t_j L) N_j = 0 mod L
    weights = np.array([[int(t * L) % L for t in q.coeffs] for q in lattice.polys], dtype=np.int64)
    grid = np.arange(box_side, dtype=np.int64)
    passed = 0
    for head in range(box_side):
        if dim == 1:
            pts = np.array([[head]], dtype=np.int64)
        else:
            tail = np.stack(np.meshgrid(*([grid] * (dim - 1)), indexing="ij"), axis=-1).reshape(-1, dim - 1)
            pts = np.concatenate([np.full((tail.shape[0], 1), head, dtype=np.int64), tail], axis=1)
        ok = np.all((pts % L) @ weights.T % L == 0, axis=1)
        passed += int(np.count_nonzero(ok))
    return Fraction(passed, total)
