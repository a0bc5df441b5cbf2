"""The acceptance suite as named checks.

Each check returns a ``CheckResult`` holding pass/fail, the measured
quantities, and the wall time, which is part of the pass condition.
``run_checks`` runs any subset in a fixed order; the CLI ``validate``
subcommand and ``tests/test_acceptance.py`` both go through here.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import stats

from .asymptotics import (c1, em_sum_check, entropy_expansion, estimate_p, exponent_b,
                          lclt_factor, prefactor_c)
from .domain import MomentVector, Profile, scaled_profile
from .exact_count import count_exact, count_pn, enumerate_profile_partitions
from .intpoly import enumerate_QJ, is_n_feasible, nt_density
from .maxent_continuous import DualVector, forward_map, m_alpha, sigma_matrix, solve_beta
from .maxent_discrete import (covariance_s, entropy_mu, exact_mu_probability, solve_beta_hat)
from .sampler import (empirical_shape, limit_shape, make_rng, mc_profile_probability,
                      sample_uniform_many, shape_distance)

SQRT6 = math.sqrt(6.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    seconds: float = 0.0
    limit: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<28s} {self.seconds:8.2f}s (limit {self.limit:g}s)"

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "seconds": self.seconds,
                "limit": self.limit, "details": self.details}


def _decreasing(seq) -> bool:
    return all(b < a for a, b in zip(seq, seq[1:]))


def _decreasing_above_floor(seq, floors) -> bool:
    """Strictly decreasing, except that values under their rounding floor count as zero."""
    eff = [0.0 if v <= f else v for v, f in zip(seq, floors)]
    return all(b < a or b == 0.0 for a, b in zip(eff, eff[1:]))


# --------------------------------------------------------------------------
# the twelve checks
# --------------------------------------------------------------------------

def check_hardy_ramanujan():
    alpha = MomentVector((1,), (1.0,))
    beta = solve_beta(alpha).beta
    M = m_alpha(beta)
    c = prefactor_c(beta, sigma_matrix(beta), enumerate_QJ((1,)))
    d = {
        "beta_err": abs(beta[1] - math.pi / SQRT6),
        "M_err": abs(M - math.pi * math.sqrt(2.0 / 3.0)),
        "b": str(exponent_b((1,))),
        "c_err": abs(c - 1.0 / (4.0 * math.sqrt(3.0))),
    }
    ok = d["beta_err"] <= 1e-8 and d["M_err"] <= 1e-8 and exponent_b((1,)) == 1 and d["c_err"] <= 1e-6
    return ok, d


def check_exact_vs_asymptotic():
    alpha = MomentVector((1,), (1.0,))
    ladder = (25, 100, 400)
    ratios, log_errs = [], []
    for n in ladder:
        est = estimate_p(alpha, n, "refined")
        exact = count_pn(n)
        log_errs.append(abs(est.log_estimate - math.log(exact)))
        ratios.append(math.exp(est.log_estimate - math.log(exact)))
    cross = count_pn(100) == count_exact(Profile((1,), (100,)))
    d = {"n": list(ladder), "ratio": ratios, "abs_log_error": log_errs, "p100_cross_check": cross}
    ok = 0.9 <= ratios[1] <= 1.1 and _decreasing(log_errs) and cross
    return ok, d


def check_qj_cardinalities():
    sizes = [enumerate_QJ(tuple(range(1, d + 1))).cardinality for d in range(1, 5)]
    q12 = {q.coeffs for q in enumerate_QJ((1, 2))}
    expected = {(Fraction(0), Fraction(0)), (Fraction(1, 2), Fraction(1, 2))}
    d = {"cardinalities": sizes, "Q_12": sorted([[str(t) for t in c] for c in q12])}
    return sizes == [1, 2, 12, 288] and q12 == expected, d


SHAPE_EXAMPLES = (
    ((0, 1, 2, 3, 4), (0.95, -10.1, 36.5, -49.5, 22.4), (12.8748, 6.698, 4.66192, 3.72617, 3.15877)),
    ((1, 2, 3), (4.0, -8.5, 4.6), (4.31168, 3.86652, 3.65774)),
)


def check_shape_examples():
    d = {}
    ok = True
    for J, beta, alpha in SHAPE_EXAMPLES:
        fwd = np.array(forward_map(DualVector(J, beta)).values)
        back = np.array(solve_beta(MomentVector(J, alpha)).beta.beta)
        fwd_rel = float(np.max(np.abs(fwd / np.array(alpha) - 1.0)))
        back_rel = float(np.max(np.abs(back / np.array(beta) - 1.0)))
        d[",".join(map(str, J))] = {"forward_rel": fwd_rel, "solve_rel": back_rel,
                                    "beta": back.tolist()}
        ok = ok and fwd_rel <= 2e-2 and back_rel <= 2e-2
    return ok, d


@lru_cache(maxsize=1)
def _square_sum_sweep(n_max=30):
    """count_exact((n, N2)) for J = {1,2}, all n <= n_max and n <= N2 <= n^2."""
    table = {}
    for n in range(1, n_max + 1):
        for m in range(n, n * n + 1):
            table[(n, m)] = count_exact(Profile((1, 2), (n, m)))
    return table


def check_two_constraint_counting():
    hand = {
        "J=1,N=4": count_exact(Profile((1,), (4,))) == 5,
        "J=1,2,N=4,10": count_exact(Profile((1, 2), (4, 10))) == 1,
        "J=1,2,N=3,4": count_exact(Profile((1, 2), (3, 4))) == 0,
    }
    sweep = _square_sum_sweep()
    bad = [n for n in range(1, 31)
           if sum(c for (k, _), c in sweep.items() if k == n) != count_pn(n)]
    d = {"hand": hand, "marginal_mismatches": bad}
    return all(hand.values()) and not bad, d


def check_lclt_convergence():
    alpha = MomentVector((1, 2), (1.0, 1.0))
    beta = solve_beta(alpha).beta
    lattice = enumerate_QJ((1, 2))
    ratios = []
    for n in (16, 36, 64):
        N = scaled_profile(alpha, n)
        dual = solve_beta_hat(N, beta, n)
        mu = exact_mu_probability(count_exact(N), dual, N)
        ratios.append(mu / lclt_factor(covariance_s(dual), lattice))
    gaps = [abs(r - 1.0) for r in ratios]
    return _decreasing(gaps), {"n": [16, 36, 64], "ratio": ratios}


def check_entropy_expansion():
    d = {}
    ok = True
    for J, a in (((1,), (1.0,)), ((1, 2), (1.0, 1.0))):
        alpha = MomentVector(J, a)
        beta = solve_beta(alpha).beta
        M = m_alpha(beta)
        gaps = []
        for n in (10 ** 2, 10 ** 3, 10 ** 4):
            dual = solve_beta_hat(scaled_profile(alpha, n), beta, n)
            gaps.append(abs(entropy_mu(dual) - entropy_expansion(beta, M, n)))
        d[",".join(map(str, J))] = gaps
        ok = ok and _decreasing(gaps) and gaps[-1] <= 0.05
    return ok, d


EM_FLOOR_ULPS = 64


def check_euler_maclaurin():
    d = {}
    ok = True
    for J, g in (((1,), (1.0,)), ((0, 1), (1.0, 1.0))):
        gaps, floors = [], []
        for t in (1e-1, 1e-2, 1e-3):
            direct, asym = em_sum_check(DualVector(J, g), t)
            gaps.append(abs(direct - asym))
            # below this the two sides agree to rounding and the gap carries no trend
            floors.append(EM_FLOOR_ULPS * np.finfo(float).eps * abs(asym))
        d[",".join(map(str, J))] = {"gap": gaps, "rounding_floor": floors}
        ok = ok and _decreasing_above_floor(gaps, floors) and gaps[-1] <= 1e-2
    return ok, d


def check_uniform_sampling(seed=0):
    N = Profile((1,), (6,))
    dual = solve_beta_hat(N, n=6)
    parts, tries = sample_uniform_many(N, dual, make_rng(seed), 11000)
    classes = enumerate_profile_partitions(N)
    index = {lam: i for i, lam in enumerate(classes)}
    counts = np.bincount([index[lam] for lam in parts], minlength=len(classes))
    pvalue = float(stats.chisquare(counts).pvalue)

    N30 = Profile((1,), (30,))
    dual30 = solve_beta_hat(N30, n=30)
    rate, se, hits = mc_profile_probability(dual30, N30, 10 ** 6, make_rng(seed))
    rel = abs(math.exp(entropy_mu(dual30)) * rate / count_pn(30) - 1.0)
    d = {"classes": len(classes), "counts": counts.tolist(), "pvalue": pvalue,
         "acceptance_rate": rate, "identity_rel_error": rel}
    return pvalue > 1e-3 and len(classes) == 11 and rel <= 0.1, d


def check_limit_shape(seed=0, samples=50):
    beta = DualVector((1,), (math.pi / SQRT6,))
    grid = np.linspace(0.01, 5.0, 500)
    phi = limit_shape(beta, grid).values
    closed = -(SQRT6 / math.pi) * np.log(-np.expm1(-math.pi * grid / SQRT6))
    closed_err = float(np.max(np.abs(phi - closed)))

    window = (0.5, 2.0)
    wgrid = np.linspace(*window, 301)
    target = limit_shape(beta, wgrid)
    alpha = MomentVector((1,), (1.0,))
    medians = []
    rng = make_rng(seed)
    for n in (10 ** 2, 10 ** 3):
        N = scaled_profile(alpha, n)
        dual = solve_beta_hat(N, beta, n)
        lams, _ = sample_uniform_many(N, dual, rng, samples)
        dist = [shape_distance(empirical_shape(lam, n, wgrid), target, window) for lam in lams]
        medians.append(float(np.median(dist)))
    d = {"closed_form_err": closed_err, "median_distance": medians}
    return closed_err <= 1e-8 and _decreasing(medians), d


def check_lattice_density():
    lattice = enumerate_QJ((1, 2))
    dens = nt_density(lattice, 50)
    violations = [N for N, c in _square_sum_sweep().items()
                  if c > 0 and not is_n_feasible(N, lattice)]
    d = {"density": str(dens), "violations": violations}
    return dens == Fraction(1, 2) and not violations, d


def check_internal_consistency():
    d = {}
    ok = True
    for J, a in (((1,), (1.0,)), ((1, 2), (1.0, 1.0)), ((0, 1), (1.0, 1.0))):
        beta = solve_beta(MomentVector(J, a)).beta
        sigma = sigma_matrix(beta)
        lattice = enumerate_QJ(J)
        c = prefactor_c(beta, sigma, lattice)
        alt = (math.exp(c1(beta)) * lattice.cardinality * (2 * math.pi) ** (-len(J) / 2)
               * math.exp(-0.5 * sigma.log_det()))
        rel = abs(c / alt - 1.0)
        d[",".join(map(str, J))] = rel
        ok = ok and rel <= 1e-10
    return ok, d


CHECKS = (
    ("hardy_ramanujan", check_hardy_ramanujan, 1.0),
    ("exact_vs_asymptotic", check_exact_vs_asymptotic, 30.0),
    ("qj_cardinalities", check_qj_cardinalities, 5.0),
    ("shape_examples", check_shape_examples, 10.0),
    ("two_constraint_counting", check_two_constraint_counting, 60.0),
    ("lclt_convergence", check_lclt_convergence, 600.0),
    ("entropy_expansion", check_entropy_expansion, 120.0),
    ("euler_maclaurin", check_euler_maclaurin, 60.0),
    ("uniform_sampling", check_uniform_sampling, 300.0),
    ("limit_shape", check_limit_shape, 600.0),
    ("lattice_density", check_lattice_density, 60.0),
    ("internal_consistency", check_internal_consistency, 10.0),
)

CHECK_NAMES = tuple(name for name, _, _ in CHECKS)


def run_check(name: str) -> CheckResult:
    for cname, fun, limit in CHECKS:
        if cname == name:
            t0 = time.perf_counter()
            try:
                ok, details = fun()
            except Exception as exc:  # a crash is a failed criterion, reported as such
                ok, details = False, {"error": f"{type(exc).__name__}: {exc}"}
            dt = time.perf_counter() - t0
            if dt > limit:
                details["runtime_exceeded"] = True
            return CheckResult(name, bool(ok) and dt <= limit, dt, limit, details)
    raise KeyError(f"unknown check {name!r}; choose from {', '.join(CHECK_NAMES)}")


def run_checks(names=None):
    return [run_check(n) for n in (names or CHECK_NAMES)]
