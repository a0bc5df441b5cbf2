"""The discrete maximum-entropy measure mu_n on partitions.

Under mu_n the multiplicity of part k is geometric with
P(Y_k >= m) = exp(-m p(k)), where p(k) = sum_j beta_hat_j k^j.  Every
series here (means, log Z, entropy, covariance) is summed over
k = 1..K with a certified bound on the neglected tail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._kernels import compensated_sum
from .domain import Profile, ProfileSet
from .errors import DomainViolation, InvalidInput, NoConvergence, TailBoundFailure
from .maxent_continuous import DualVector, MomentVector, solve_beta

RATE_FLOOR = 45.0
TAIL_TOL = 1e-13
MAX_K = 5 * 10 ** 7
RESIDUAL_TOL = 1e-9


def _monotone_from(coeffs) -> float:
    """Point beyond which p is increasing and convex (largest positive root of p', p'')."""
    c = np.asarray(coeffs, dtype=float)
    x0 = 0.0
    for order in (1, 2):
        d = np.polynomial.polynomial.polyder(c, order)
        if d.size == 0 or not np.any(d):
            continue
        if d.size == 1:
            continue
        for r in np.polynomial.polynomial.polyroots(d):
            if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real > x0:
                x0 = float(r.real)
    return x0


def truncation_point(J: ProfileSet, beta_hat, tail_tol=TAIL_TOL, max_k=MAX_K):
    """Smallest K with p(K) >= 45 and a certified tail below ``tail_tol``.

    Returns (K, tail_bound).  Beyond K, p is increasing and convex, and the
    dominating series s_k = k^m (1 + p(k)) e^{-p(k)} (m = 2 j_max) has
    consecutive ratios at most r = exp(m/K - (45/46) p'(K)); its tail is then
    at most s_K r / (1 - r).  s_k bounds the tails of every series in this
    module (means, log Z, entropy, covariance) up to a 1 + 1e-19 factor.
    """
    coeffs = [0.0] * (J.j_max + 1)
    for j, b in zip(J, beta_hat):
        coeffs[j] = b
    if coeffs[-1] <= 0:
        raise DomainViolation("leading coefficient of beta_hat must be positive")
    poly = np.polynomial.Polynomial(coeffs)
    dpoly = poly.deriv()
    m = 2 * J.j_max
    K = max(1, int(math.floor(_monotone_from(coeffs))) + 1)
    while poly(K) < RATE_FLOOR:
        K = K * 2 if K < 64 else int(K * 1.25)
        if K > max_k:
            raise TailBoundFailure(f"p(k) < {RATE_FLOOR} up to k = {max_k}")
    # back off to the smallest qualifying K above the monotone point
    lo = max(1, int(math.floor(_monotone_from(coeffs))) + 1)
    hi = K
    while lo < hi:
        mid = (lo + hi) // 2
        if poly(mid) >= RATE_FLOOR:
            hi = mid
        else:
            lo = mid + 1
    K = hi
    while True:
        rho = m / K - (RATE_FLOOR / (RATE_FLOOR + 1.0)) * dpoly(K)
        if rho < 0:
            r = math.exp(rho)
            pK = poly(K)
            s_K = math.exp(m * math.log(K) + math.log1p(pK) - pK)
            bound = s_K * r / (1.0 - r) * (1.0 + 1e-12)
            if bound <= tail_tol:
                return K, bound
        K = K + max(1, K // 20)
        if K > max_k:
            raise TailBoundFailure(f"tail bound not reached below k = {max_k}")


@dataclass(frozen=True)
class DiscreteDual:
    J: ProfileSet
    beta_hat: tuple
    n: int
    truncation_K: int
    tail_bound: float

    @classmethod
    def build(cls, J, beta_hat, n=1):
        J = ProfileSet.of(J)
        beta_hat = tuple(float(b) for b in beta_hat)
        if len(beta_hat) != len(J):
            raise InvalidInput("beta_hat length does not match J")
        K, bound = truncation_point(J, beta_hat)
        dual = cls(J, beta_hat, int(n), K, bound)
        if np.any(dual.rates <= 0):
            k = int(np.argmax(dual.rates <= 0)) + 1
            raise DomainViolation(f"sum_j beta_hat_j k^j <= 0 at k = {k}")
        return dual

    def __getitem__(self, j):
        return self.beta_hat[self.J.index(j)]

    @cached_property
    def parts(self):
        return np.arange(1, self.truncation_K + 1, dtype=np.float64)

    @cached_property
    def rates(self):
        """p(k) for k = 1..K."""
        k = self.parts
        out = np.zeros_like(k)
        for j, b in zip(self.J, self.beta_hat):
            out += b * k ** j
        return out

    @cached_property
    def means(self):
        """E Y_k = 1/(e^{p(k)} - 1)."""
        p = self.rates
        return np.exp(-p) / -np.expm1(-p)

    @cached_property
    def variances(self):
        """Var Y_k = e^{p(k)} / (e^{p(k)} - 1)^2."""
        p = self.rates
        d = -np.expm1(-p)
        return np.exp(-p) / (d * d)

    def scaled(self):
        """beta_hat_j n^{j/2}, which tends to the continuous beta."""
        return tuple(b * self.n ** (j / 2.0) for j, b in zip(self.J, self.beta_hat))

    def to_json(self):
        return {
            "beta_hat": {str(j): b for j, b in zip(self.J, self.beta_hat)},
            "n": self.n,
            "truncation_K": self.truncation_K,
            "tail_bound": self.tail_bound,
        }


def discrete_moment(dual: DiscreteDual, j: int) -> float:
    """sum_{k>=1} k^j / (exp(p(k)) - 1)."""
    return compensated_sum(dual.parts ** j * dual.means)


def discrete_moments(dual: DiscreteDual) -> np.ndarray:
    return np.array([discrete_moment(dual, j) for j in dual.J])


def log_partition(dual: DiscreteDual) -> float:
    """log Z = -sum_k log(1 - e^{-p(k)})."""
    return compensated_sum(-np.log(-np.expm1(-dual.rates)))


def entropy_mu(dual: DiscreteDual) -> float:
    """H(mu_n) = sum_k G(f_hat(k)), summed as p f - log(1 - e^{-p}) termwise."""
    p = dual.rates
    return compensated_sum(p * dual.means - np.log(-np.expm1(-p)))


def covariance_s(dual: DiscreteDual) -> np.ndarray:
    """S_ij = sum_k k^{i+j} e^{p(k)} / (e^{p(k)} - 1)^2."""
    J = dual.J
    S = np.empty((len(J), len(J)))
    for a, i in enumerate(J):
        for b, j in enumerate(J):
            if b < a:
                S[a, b] = S[b, a]
            else:
                S[a, b] = compensated_sum(dual.parts ** (i + j) * dual.variances)
    return S


def _dual_objective(dual, target):
    return float(np.dot(target, dual.beta_hat)) + log_partition(dual)


def solve_beta_hat(N: Profile, beta_continuous: DualVector = None, n: int = None,
                   tol: float = RESIDUAL_TOL, max_iter: int = 200) -> DiscreteDual:
    """Solve sum_k k^j / (exp(p(k)) - 1) = N_j for beta_hat.

    Starts from beta_hat_j = beta_j n^{-j/2} and takes damped Newton steps
    S d = m(beta_hat) - N, with Armijo backtracking on the convex dual
    N . beta_hat + log Z.
    """
    J = N.J
    target = np.array(N.values, dtype=float)
    if np.any(target <= 0):
        raise InvalidInput("discrete solve needs positive profile entries")
    if n is None:
        n = default_scale(N)
    if beta_continuous is None:
        alpha = MomentVector(J, tuple(v / n ** ((j + 1) / 2.0) for j, v in zip(J, N.values)))
        beta_continuous = solve_beta(alpha).beta
    start = [b * n ** (-j / 2.0) for j, b in zip(J, beta_continuous.beta)]
    dual = DiscreteDual.build(J, start, n)
    vals = discrete_moments(dual)
    value = _dual_objective(dual, target)
    for it in range(max_iter):
        rr = (vals - target) / target
        if np.max(np.abs(rr)) <= tol:
            return dual
        S = covariance_s(dual)
        grad = vals - target
        step = np.linalg.solve(S, grad)
        slope = -float(np.dot(grad, step))
        t = 1.0
        for _ in range(60):
            try:
                cand = DiscreteDual.build(J, np.array(dual.beta_hat) + t * step, n)
            except (DomainViolation, TailBoundFailure):
                cand = None
            if cand is not None:
                cvalue = _dual_objective(cand, target)
                if cvalue <= value + 1e-4 * t * slope or abs(cvalue - value) <= 1e-15 * abs(value):
                    break
            t *= 0.5
        else:
            break
        dual, value = cand, cvalue
        vals = discrete_moments(dual)
    rr = (vals - target) / target
    if np.max(np.abs(rr)) <= tol:
        return dual
    raise NoConvergence(f"discrete dual for N={N.values} stalled at residual {np.max(np.abs(rr)):.3g}",
                        best=dual)


def default_scale(N: Profile) -> int:
    """A natural n for a bare profile: N_1 when 1 in J, else matched to the top power."""
    if 1 in N.J:
        return max(1, N[1])
    j = N.J.j_max
    return max(1, round(N[j] ** (2.0 / (j + 1))))


def exact_mu_probability(count: int, dual: DiscreteDual, N: Profile) -> float:
    """mu_n(P(N)) = p(N) exp(-beta_hat . N) / Z, in floating point."""
    if count == 0:
        return 0.0
    log_p = math.log(count) - float(np.dot(dual.beta_hat, N.values)) - log_partition(dual)
    return math.exp(log_p)
