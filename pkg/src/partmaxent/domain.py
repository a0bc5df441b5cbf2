"""Value types: profile sets, profiles, moment vectors and partitions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InvalidInput, ZeroEntry


def _parse_list(text, cast):
    if isinstance(text, str):
        items = [t for t in text.replace(" ", "").split(",") if t]
        return tuple(cast(t) for t in items)
    return tuple(cast(t) for t in text)


@dataclass(frozen=True)
class ProfileSet:
    """The finite set J of constrained powers, stored in increasing order."""

    powers: tuple

    def __post_init__(self):
        powers = tuple(int(j) for j in self.powers)
        if not powers:
            raise InvalidInput("profile set must be non-empty")
        if any(j < 0 for j in powers):
            raise InvalidInput(f"powers must be non-negative, got {powers}")
        if len(set(powers)) != len(powers):
            raise InvalidInput(f"duplicate powers in {powers}")
        if max(powers) <= 0:
            raise InvalidInput("profile set needs at least one positive power")
        object.__setattr__(self, "powers", tuple(sorted(powers)))

    @classmethod
    def of(cls, J) -> "ProfileSet":
        if isinstance(J, ProfileSet):
            return J
        if isinstance(J, int):
            return cls((J,))
        return cls(_parse_list(J, int))

    @property
    def j_star(self) -> int:
        return self.powers[0]

    @property
    def j_max(self) -> int:
        return self.powers[-1]

    def __len__(self):
        return len(self.powers)

    def __iter__(self):
        return iter(self.powers)

    def __contains__(self, j):
        return j in self.powers

    def index(self, j) -> int:
        return self.powers.index(j)

    def to_json(self):
        return list(self.powers)


@dataclass(frozen=True)
class Profile:
    """Integer power sums N_j, aligned with ``J.powers``."""

    J: ProfileSet
    values: tuple

    def __post_init__(self):
        J = ProfileSet.of(self.J)
        vals = tuple(int(v) for v in self.values)
        if len(vals) != len(J):
            raise InvalidInput(f"profile has {len(vals)} entries for |J|={len(J)}")
        if any(v < 0 for v in vals):
            raise InvalidInput(f"profile entries must be >= 0, got {vals}")
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "values", vals)

    def __getitem__(self, j):
        return self.values[self.J.index(j)]

    def __iter__(self):
        return iter(self.values)

    def to_json(self):
        return {str(j): v for j, v in zip(self.J, self.values)}


@dataclass(frozen=True)
class MomentVector:
    """Scaled moments alpha_j > 0, aligned with ``J.powers``."""

    J: ProfileSet
    values: tuple

    def __post_init__(self):
        J = ProfileSet.of(self.J)
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(J):
            raise InvalidInput(f"moment vector has {len(vals)} entries for |J|={len(J)}")
        if any(not (v > 0 and math.isfinite(v)) for v in vals):
            raise InvalidInput(f"moments must be positive and finite, got {vals}")
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "values", vals)

    def __getitem__(self, j):
        return self.values[self.J.index(j)]

    def to_json(self):
        return {str(j): v for j, v in zip(self.J, self.values)}


@dataclass(frozen=True)
class Partition:
    """A finite multiset of positive integers, kept as part -> multiplicity."""

    multiplicities: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for part, mult in dict(self.multiplicities).items():
            part, mult = int(part), int(mult)
            if part < 1 or mult < 0:
                raise InvalidInput(f"bad entry {part}:{mult}")
            if mult:
                clean[part] = mult
        object.__setattr__(self, "multiplicities", dict(sorted(clean.items())))

    @classmethod
    def from_parts(cls, parts: Iterable[int]) -> "Partition":
        mult = {}
        for x in parts:
            mult[int(x)] = mult.get(int(x), 0) + 1
        return cls(mult)

    def parts(self):
        """Parts in non-increasing order."""
        out = []
        for part in sorted(self.multiplicities, reverse=True):
            out.extend([part] * self.multiplicities[part])
        return out

    def num_parts(self) -> int:
        return sum(self.multiplicities.values())

    def __add__(self, other: "Partition") -> "Partition":
        merged = dict(self.multiplicities)
        for k, m in other.multiplicities.items():
            merged[k] = merged.get(k, 0) + m
        return Partition(merged)

    def __hash__(self):
        return hash(tuple(self.multiplicities.items()))

    def __eq__(self, other):
        return isinstance(other, Partition) and self.multiplicities == other.multiplicities

    def __repr__(self):
        return "Partition({" + ",".join(map(str, self.parts())) + "})"

    def to_json(self):
        return {str(k): m for k, m in self.multiplicities.items()}


def profile_of(lam: Partition, J) -> tuple:
    """Exact power sums ``(sum_k a_k k^j)_{j in J}``; zeros for the empty partition."""
    J = ProfileSet.of(J)
    return tuple(sum(m * k ** j for k, m in lam.multiplicities.items()) for j in J)


def scaled_profile(alpha: MomentVector, n: int) -> Profile:
    """N_j = floor(alpha_j n^{(j+1)/2}).

    Integer powers of n are taken exactly; the half-integer ones via
    ``isqrt`` so that e.g. 4^{3/2} is exactly 8.
    """
    if n < 1:
        raise InvalidInput("n must be >= 1")
    vals = []
    for j, a in zip(alpha.J, alpha.values):
        vals.append(_floor_scaled(a, n, j))
    if any(v == 0 for v in vals):
        raise ZeroEntry(f"N(alpha, {n}) has a zero entry: {vals}")
    return Profile(alpha.J, tuple(vals))


def _floor_scaled(a: float, n: int, j: int) -> int:
    a = Fraction(a)
    if (j + 1) % 2 == 0:
        return math.floor(a * n ** ((j + 1) // 2))
    # n^{(j+1)/2} = n^{j/2} * sqrt(n); exact when n is a perfect square
    r = math.isqrt(n)
    base = Fraction(n ** (j // 2))
    if r * r == n:
        return math.floor(a * base * r)
    # floor(a * base * sqrt(n)) via integer square root of the squared value
    val = a * base
    if val <= 0:
        return 0
    sq = val * val * n
    num, den = sq.numerator, sq.denominator
    lo = math.isqrt(num // den)
    while (lo + 1) * (lo + 1) * den <= num:
        lo += 1
    while lo * lo * den > num:
        lo -= 1
    return lo
