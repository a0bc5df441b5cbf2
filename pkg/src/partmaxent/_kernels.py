"""Hot inner loops, compiled with numba when available.

Set ``PARTMAXENT_DISABLE_NUMBA=1`` to force the pure-numpy implementations.
Both paths consume the same uniform variates, so sampling results agree
between backends (up to last-ulp differences between numpy's and libm's log,
which only matter when -log(u)/rate lands exactly on an integer).
"""
import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba = None

# Above this rate P(Y_k > 0) = e^{-rate} < 1e-15; such parts are never drawn.
RATE_CUTOFF = -math.log(1e-15)


def numba_enabled():
    flag = os.environ.get("PARTMAXENT_DISABLE_NUMBA", "").strip().lower()
    return numba is not None and flag in ("", "0", "false", "no")


USE_NUMBA = numba_enabled()


# --------------------------------------------------------------------------
# numpy reference implementations
# --------------------------------------------------------------------------

def _compensated_sum_np(values):
    return math.fsum(np.asarray(values, dtype=np.float64).tolist())


def _draw_multiplicities_np(u, rates):
    """Inverse-CDF geometric draws; ``u`` has shape (..., K) with entries in (0, 1]."""
    with np.errstate(divide="ignore"):
        y = np.floor(-np.log(u) / rates)
    y[..., rates >= RATE_CUTOFF] = 0.0
    return y.astype(np.int64)


def _block_profiles_np(u, rates, powers):
    y = _draw_multiplicities_np(u, rates)
    return y @ powers


def _count_matches_np(u, rates, powers, target):
    prof = _block_profiles_np(u, rates, powers)
    return int(np.count_nonzero(np.all(prof == target, axis=1)))


def _match_mask_np(u, rates, powers, target):
    return np.all(_block_profiles_np(u, rates, powers) == target, axis=1)


def _first_match_np(u, rates, powers, target):
    prof = _block_profiles_np(u, rates, powers)
    hits = np.flatnonzero(np.all(prof == target, axis=1))
    return int(hits[0]) if hits.size else -1


# --------------------------------------------------------------------------
# numba kernels
# --------------------------------------------------------------------------

def _compensated_sum_py(values):
    # Neumaier's variant of Kahan summation
    s = 0.0
    c = 0.0
    for i in range(values.shape[0]):
        v = values[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


def _draw_multiplicities_py(u, rates):
    n_rows, n_parts = u.shape
    out = np.zeros((n_rows, n_parts), dtype=np.int64)
    for r in range(n_rows):
        for k in range(n_parts):
            if rates[k] < RATE_CUTOFF:
                out[r, k] = np.int64(math.floor(-math.log(u[r, k]) / rates[k]))
    return out


def _try_profile(u_row, rates, powers, target):
    """True iff the draw encoded by ``u_row`` hits ``target`` exactly.

    Power sums only grow along k, so the try is abandoned as soon as any
    coordinate overshoots.
    """
    n_parts = rates.shape[0]
    n_pow = powers.shape[1]
    acc = np.zeros(n_pow, dtype=np.int64)
    for k in range(n_parts):
        if rates[k] >= RATE_CUTOFF:
            continue
        y = math.floor(-math.log(u_row[k]) / rates[k])
        if y == 0:
            continue
        for j in range(n_pow):
            acc[j] += np.int64(y) * powers[k, j]
            if acc[j] > target[j]:
                return False
    for j in range(n_pow):
        if acc[j] != target[j]:
            return False
    return True


def _count_matches_py(u, rates, powers, target):
    hits = 0
    for r in range(u.shape[0]):
        if _try_profile_jit(u[r], rates, powers, target):
            hits += 1
    return hits


def _match_mask_py(u, rates, powers, target):
    out = np.zeros(u.shape[0], dtype=np.bool_)
    for r in range(u.shape[0]):
        out[r] = _try_profile_jit(u[r], rates, powers, target)
    return out


def _first_match_py(u, rates, powers, target):
    for r in range(u.shape[0]):
        if _try_profile_jit(u[r], rates, powers, target):
            return r
    return -1


if numba is not None:
    _jit = numba.njit(cache=False, nogil=True)
    _compensated_sum_jit = _jit(_compensated_sum_py)
    _draw_multiplicities_jit = _jit(_draw_multiplicities_py)
    _try_profile_jit = _jit(_try_profile)
    _count_matches_jit = _jit(_count_matches_py)
    _first_match_jit = _jit(_first_match_py)
    _match_mask_jit = _jit(_match_mask_py)
else:  # pragma: no cover
    _try_profile_jit = _try_profile


# --------------------------------------------------------------------------
# public dispatch
# --------------------------------------------------------------------------

def _use_numba(flag):
    if flag is None:
        return USE_NUMBA
    return bool(flag) and numba is not None


def compensated_sum(values, use_numba=None):
    values = np.ascontiguousarray(values, dtype=np.float64)
    if _use_numba(use_numba):
        return float(_compensated_sum_jit(values))
    return _compensated_sum_np(values)


def draw_multiplicities(u, rates, use_numba=None):
    u = np.ascontiguousarray(np.atleast_2d(u), dtype=np.float64)
    rates = np.ascontiguousarray(rates, dtype=np.float64)
    if _use_numba(use_numba):
        return _draw_multiplicities_jit(u, rates)
    return _draw_multiplicities_np(u, rates)


def _prep(u, rates, powers, target):
    return (np.ascontiguousarray(u, dtype=np.float64),
            np.ascontiguousarray(rates, dtype=np.float64),
            np.ascontiguousarray(powers, dtype=np.int64),
            np.ascontiguousarray(target, dtype=np.int64))


def count_matches(u, rates, powers, target, use_numba=None):
    """Number of rows of ``u`` whose geometric draw has profile ``target``."""
    args = _prep(u, rates, powers, target)
    if _use_numba(use_numba):
        return int(_count_matches_jit(*args))
    return _count_matches_np(*args)


def match_mask(u, rates, powers, target, use_numba=None):
    """Boolean mask of the rows of ``u`` hitting ``target``."""
    args = _prep(u, rates, powers, target)
    if _use_numba(use_numba):
        return np.asarray(_match_mask_jit(*args))
    return _match_mask_np(*args)


def first_match(u, rates, powers, target, use_numba=None):
    """Index of the first row of ``u`` hitting ``target``, or -1."""
    args = _prep(u, rates, powers, target)
    if _use_numba(use_numba):
        return int(_first_match_jit(*args))
    return _first_match_np(*args)
