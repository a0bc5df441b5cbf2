"""Constants and estimates for the number of partitions with a given profile.

Two independent routes to p(N) for N = N(alpha, n):

* leading:  log p ~ sqrt(n) M + log c - b log n, using only continuous
  quantities (beta, Sigma, M) and the lattice size |Q_J|;
* refined:  log p ~ H(mu_n) + log(|Q_J| / ((2 pi)^{|J|/2} det(S)^{1/2})),
  using the discrete entropy and covariance at finite n.

Everything is carried in log space; the linear value is filled in only when
it is representable as a float.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .domain import MomentVector, ProfileSet, scaled_profile
from .errors import InvalidInput, SingularSigma
from .intpoly import FeasibilityLattice, enumerate_QJ, is_n_feasible
from .maxent_continuous import (DualVector, SigmaMatrix, _g_of_rate, check_positive,
                                m_alpha, sigma_matrix, solve_beta)
from .maxent_discrete import DiscreteDual, covariance_s, entropy_mu, solve_beta_hat

LOG_2PI = math.log(2.0 * math.pi)


def exponent_b(J) -> Fraction:
    """b(J) = (j_* + |J|)/4 + (1/2) sum_{j in J} j."""
    J = ProfileSet.of(J)
    return Fraction(J.j_star + len(J), 4) + Fraction(sum(J), 2)


def b1(J) -> Fraction:
    return Fraction(-ProfileSet.of(J).j_star, 4)


def _zero_power_term(beta0: float) -> float:
    """beta_0/(e^{beta_0} - 1) - G(1/(e^{beta_0} - 1))."""
    return beta0 * math.exp(-beta0) / -math.expm1(-beta0) - _g_of_rate(beta0)


def c1(beta: DualVector) -> float:
    js = beta.J.j_star
    out = -0.5 * js * LOG_2PI
    if js == 0:
        out += 0.5 * _zero_power_term(beta[0])
    else:
        out += 0.5 * math.log(beta[js])
    return out


def _log_det(matrix) -> float:
    entries = matrix.entries if isinstance(matrix, SigmaMatrix) else np.asarray(matrix, dtype=float)
    try:
        L = np.linalg.cholesky(entries)
    except np.linalg.LinAlgError as exc:
        raise SingularSigma(f"matrix is not positive definite: {exc}") from exc
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def log_prefactor_c(beta: DualVector, sigma: SigmaMatrix, lattice: FeasibilityLattice) -> float:
    J = beta.J
    js = J.j_star
    out = math.log(lattice.cardinality) - 0.5 * (js + len(J)) * LOG_2PI - 0.5 * _log_det(sigma)
    if js >= 1:
        out += 0.5 * math.log(beta[js])
    else:
        out += 0.5 * _zero_power_term(beta[0])
    return out


def prefactor_c(beta: DualVector, sigma: SigmaMatrix, lattice: FeasibilityLattice) -> float:
    """c(alpha) = |Q_J| (2 pi)^{-(j_*+|J|)/2} det(Sigma)^{-1/2} times the j_* correction."""
    return math.exp(log_prefactor_c(beta, sigma, lattice))


def entropy_expansion(beta: DualVector, M: float, n) -> float:
    """sqrt(n) M + b_1 log n + c_1, the large-n form of H(mu_n)."""
    return math.sqrt(n) * M + float(b1(beta.J)) * math.log(n) + c1(beta)


def log_lclt_factor(s, lattice: FeasibilityLattice) -> float:
    return math.log(lattice.cardinality) - 0.5 * len(lattice.J) * LOG_2PI - 0.5 * _log_det(s)


def lclt_factor(s, lattice: FeasibilityLattice) -> float:
    """|Q_J| / ((2 pi)^{|J|/2} det(S)^{1/2})."""
    return math.exp(log_lclt_factor(s, lattice))


def _safe_exp(x: float) -> Optional[float]:
    if x == -math.inf:
        return 0.0
    if x > 709.0:
        return None
    return math.exp(x)


@dataclass(frozen=True)
class EstimateBreakdown:
    mode: str
    J: ProfileSet
    n: int
    N: tuple
    M: float
    b: Fraction
    c: float
    b1: Fraction
    c1: float
    H: Optional[float]
    lclt_factor: Optional[float]
    log_estimate: float
    feasible: bool

    @property
    def estimate(self) -> Optional[float]:
        """Linear value, or None when it overflows a float."""
        return _safe_exp(self.log_estimate)

    def to_json(self):
        return {
            "mode": self.mode,
            "J": self.J.to_json(),
            "n": self.n,
            "N": [str(v) for v in self.N],
            "M": self.M,
            "b": str(self.b),
            "c": self.c,
            "b1": str(self.b1),
            "c1": self.c1,
            "H": self.H,
            "lclt_factor": self.lclt_factor,
            "log_estimate": None if self.log_estimate == -math.inf else self.log_estimate,
            "estimate": self.estimate,
            "feasible": self.feasible,
        }


def estimate_p(alpha: MomentVector, n: int, mode: str = "leading",
               lattice: FeasibilityLattice = None) -> EstimateBreakdown:
    """Estimate p(N(alpha, n)); 0 when N(alpha, n) is not n-feasible."""
    if mode not in ("leading", "refined"):
        raise InvalidInput(f"mode must be 'leading' or 'refined', got {mode!r}")
    J = alpha.J
    N = scaled_profile(alpha, n)
    lattice = lattice or enumerate_QJ(J)
    beta = solve_beta(alpha).beta
    sigma = sigma_matrix(beta)
    M = m_alpha(beta)
    b = exponent_b(J)
    log_c = log_prefactor_c(beta, sigma, lattice)
    feasible = is_n_feasible(N, lattice)
    H = lf = None
    if not feasible:
        log_est = -math.inf
    elif mode == "leading":
        log_est = math.sqrt(n) * M + log_c - float(b) * math.log(n)
    else:
        dual = solve_beta_hat(N, beta, n)
        H = entropy_mu(dual)
        log_lf = log_lclt_factor(covariance_s(dual), lattice)
        lf = math.exp(log_lf)
        log_est = H + log_lf
    return EstimateBreakdown(mode, J, n, N.values, M, b, math.exp(log_c), b1(J), c1(beta),
                             H, lf, log_est, feasible)


def em_sum_check(gamma: DualVector, t: float):
    """(direct, asymptotic) for sum_{k>=1} G(1/(e^{p(tk)} - 1)) as t -> 0+.

    asymptotic = M(gamma)/t - (j_*/2) log(2 pi/t)
                 - [j_*=0] G(1/(e^{gamma_0}-1))/2 + [j_*>=1] (log gamma_{j_*} - 1)/2
    """
    if not 0 < t <= 0.5:
        raise InvalidInput(f"t must lie in (0, 0.5], got {t}")
    check_positive(gamma)
    J = gamma.J
    scaled = [g * t ** j for j, g in zip(J, gamma.beta)]
    direct = entropy_mu(DiscreteDual.build(J, scaled))
    js = J.j_star
    asym = m_alpha(gamma) / t - 0.5 * js * math.log(2.0 * math.pi / t)
    if js == 0:
        asym -= 0.5 * _g_of_rate(gamma[0])
    else:
        asym += 0.5 * (math.log(gamma[js]) - 1.0)
    return direct, asym
