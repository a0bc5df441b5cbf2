"""Sampling from mu_n, exact-uniform sampling on P(N), and limit shapes.

Random draws come from a seeded counter-based Philox stream.  A geometric
multiplicity with P(Y >= m) = e^{-m p} is drawn as floor(-log U / p) with
U uniform on (0, 1]; parts with p >= -log(1e-15) are never drawn.  Draws are
made only for k <= K (the dual's certified truncation point, extended to
the largest admissible part of N when sampling on P(N)); the mass lost to
the truncation is at most the dual's tail bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import _kernels, quadrature
from .domain import Partition, Profile
from .errors import InvalidInput, MaxTriesExceeded, QuadratureFailure, WindowUncovered
from .exact_count import max_part
from .maxent_continuous import DualVector, _breakpoints, _moment_integrand, check_positive
from .maxent_discrete import DiscreteDual, exact_mu_probability  # noqa: F401  (re-export)

FIRST_BLOCK = 64
MAX_BLOCK = 8192
MC_BLOCK = 4096


def make_rng(seed=0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _uniforms(rng, rows, cols):
    # (0, 1] so that -log U is finite
    return 1.0 - rng.random((rows, cols))


def _rates(dual: DiscreteDual, upto: int) -> np.ndarray:
    if upto <= dual.truncation_K:
        return dual.rates
    k = np.arange(1, upto + 1, dtype=np.float64)
    out = np.zeros_like(k)
    for j, b in zip(dual.J, dual.beta_hat):
        out += b * k ** j
    return out


def _power_table(J, K) -> np.ndarray:
    k = np.arange(1, K + 1, dtype=np.int64)
    return np.stack([k ** j for j in J], axis=1)


def _partition_from_row(y) -> Partition:
    nz = np.flatnonzero(y)
    return Partition({int(k) + 1: int(y[k]) for k in nz})


def sample_mu(dual: DiscreteDual, rng: np.random.Generator) -> Partition:
    """One draw from mu_n: independent geometric multiplicities for k = 1..K."""
    u = _uniforms(rng, 1, dual.truncation_K)
    y = _kernels.draw_multiplicities(u, dual.rates)[0]
    return _partition_from_row(y)


def sample_mu_profiles(dual: DiscreteDual, rng: np.random.Generator, size: int) -> np.ndarray:
    """Profiles of ``size`` independent mu_n draws, shape (size, |J|)."""
    powers = _power_table(dual.J, dual.truncation_K)
    out = []
    done = 0
    while done < size:
        rows = min(MC_BLOCK, size - done)
        y = _kernels.draw_multiplicities(_uniforms(rng, rows, dual.truncation_K), dual.rates)
        out.append(y @ powers)
        done += rows
    return np.concatenate(out, axis=0)


class _Rejector:
    """Blocked rejection sampler for the event {profile = N}."""

    def __init__(self, N: Profile, dual: DiscreteDual):
        if N.J != dual.J:
            raise InvalidInput("profile and dual use different J")
        self.K = max(dual.truncation_K, max_part(N) if all(N.values) else 1)
        self.rates = _rates(dual, self.K)
        self.powers = _power_table(N.J, self.K)
        self.target = np.array(N.values, dtype=np.int64)

    def block(self, rng, rows):
        u = _uniforms(rng, rows, self.K)
        mask = _kernels.match_mask(u, self.rates, self.powers, self.target)
        return u, mask

    def partition(self, u_row) -> Partition:
        y = _kernels.draw_multiplicities(u_row, self.rates)[0]
        return _partition_from_row(y)


def sample_uniform_exact(N: Profile, dual: DiscreteDual, rng: np.random.Generator,
                         max_tries: int = 10 ** 7):
    """A uniform element of P(N) by rejection from mu_n; returns (partition, tries).

    mu_n is constant on P(N), so a draw conditioned on hitting N exactly is
    uniform there.  Expected tries are about 1/mu_n(P(N)).
    """
    rej = _Rejector(N, dual)
    tries = 0
    rows = FIRST_BLOCK
    while tries < max_tries:
        rows = min(rows, max_tries - tries)
        u, mask = rej.block(rng, rows)
        hits = np.flatnonzero(mask)
        if hits.size:
            r = int(hits[0])
            return rej.partition(u[r:r + 1]), tries + r + 1
        tries += rows
        rows = min(2 * rows, MAX_BLOCK)
    raise MaxTriesExceeded(f"no partition with profile {N.values} in {max_tries} tries", tries=tries)


def sample_uniform_many(N: Profile, dual: DiscreteDual, rng: np.random.Generator, size: int,
                        max_tries: int = 10 ** 9):
    """``size`` independent uniform elements of P(N); returns (partitions, tries)."""
    rej = _Rejector(N, dual)
    out = []
    tries = 0
    rows = FIRST_BLOCK
    while len(out) < size:
        if tries >= max_tries:
            raise MaxTriesExceeded(f"{len(out)} of {size} samples after {tries} tries", tries=tries)
        rows = min(rows, max_tries - tries)
        u, mask = rej.block(rng, rows)
        for r in np.flatnonzero(mask):
            if len(out) == size:
                break
            out.append(rej.partition(u[r:r + 1]))
            last = r
        tries += rows if len(out) < size else int(last) + 1
        rows = min(2 * rows, MAX_BLOCK)
    return out, tries


def mc_profile_probability(dual: DiscreteDual, N: Profile, samples: int, rng: np.random.Generator):
    """Monte Carlo mu_n(P(N)): (estimate, standard error, hits)."""
    if samples < 1:
        raise InvalidInput("samples must be positive")
    rej = _Rejector(N, dual)
    hits = 0
    done = 0
    while done < samples:
        rows = min(MC_BLOCK, samples - done)
        u = _uniforms(rng, rows, rej.K)
        hits += _kernels.count_matches(u, rej.rates, rej.powers, rej.target)
        done += rows
    p = hits / samples
    return p, math.sqrt(p * (1.0 - p) / samples), hits


# --------------------------------------------------------------------------
# shapes
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ShapeCurve:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape:
            raise InvalidInput("grid and values must be matching 1-d arrays")
        if g.size and (g[0] <= 0 or np.any(np.diff(g) <= 0)):
            raise InvalidInput("grid must be increasing and positive")
        if not np.all(np.isfinite(v)):
            raise InvalidInput("shape values must be finite")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def to_csv(self) -> str:
        rows = ["t,phi"]
        rows.extend(f"{t:.12g},{p:.12g}" for t, p in zip(self.grid, self.values))
        return "\n".join(rows) + "\n"


def parse_grid(spec: str) -> np.ndarray:
    """'a:b:m' -> m evenly spaced points from a to b inclusive."""
    try:
        a, b, m = spec.split(":")
        a, b, m = float(a), float(b), int(m)
    except ValueError as exc:
        raise InvalidInput(f"grid must look like a:b:m, got {spec!r}") from exc
    if m < 1 or not 0 < a <= b:
        raise InvalidInput(f"bad grid {spec!r}")
    return np.linspace(a, b, m)


def limit_shape(beta: DualVector, grid, rel_tol: float = 1e-10) -> ShapeCurve:
    """phi(t) = int_t^inf f*(s) ds on ``grid``.

    The tail beyond the last grid point is one half-line integral; the rest
    accumulates right to left over consecutive grid intervals.
    """
    check_positive(beta)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or grid[0] <= 0:
        raise InvalidInput("grid must be non-empty with positive entries")
    fun = _moment_integrand(beta, 0)
    bps = _breakpoints(beta)
    values = np.empty_like(grid)
    acc = quadrature.half_line(fun, lower=float(grid[-1]), breakpoints=bps, rel_tol=rel_tol)[0]
    values[-1] = acc
    for i in range(grid.size - 2, -1, -1):
        a, b = float(grid[i]), float(grid[i + 1])
        pts = [x for x in bps if a < x < b]
        piece, err = integrate.quad(fun, a, b, points=pts or None, epsabs=1e-14,
                                    epsrel=rel_tol * 0.1, limit=200)
        if not math.isfinite(piece) or err > max(1e-13, rel_tol * abs(piece)):
            raise QuadratureFailure(f"shape integral on [{a:.6g}, {b:.6g}] error {err:.3g}")
        acc += piece
        values[i] = acc
    return ShapeCurve(grid, values)


def empirical_shape(lam: Partition, n: int, grid) -> ShapeCurve:
    """phi_{lambda,n}(t) = n^{-1/2} #{parts a >= t sqrt(n)}, counted with multiplicity."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    grid = np.asarray(grid, dtype=float)
    parts = np.sort(np.array(lam.parts(), dtype=float))
    root = math.sqrt(n)
    below = np.searchsorted(parts, grid * root, side="left")
    return ShapeCurve(grid, (parts.size - below) / root)


def shape_distance(a: ShapeCurve, b: ShapeCurve, window) -> float:
    """max |a - b| over the grid points the two curves share inside [t1, t2]."""
    t1, t2 = window
    for c in (a, b):
        if c.grid.size == 0 or c.grid[0] > t1 or c.grid[-1] < t2:
            raise WindowUncovered(f"curve does not cover [{t1}, {t2}]")
    shared, ia, ib = np.intersect1d(a.grid, b.grid, return_indices=True)
    keep = (shared >= t1) & (shared <= t2)
    if not np.any(keep):
        raise WindowUncovered(f"no shared grid points in [{t1}, {t2}]")
    return float(np.max(np.abs(a.values[ia[keep]] - b.values[ib[keep]])))
