"""Continuous maximum geometric-entropy problem.

For a dual vector beta the optimiser is f*(x) = 1 / (exp(p(x)) - 1) with
p(x) = sum_j beta_j x^j.  Its moments, the Gram matrix Sigma of the power
functions under the weight e^p / (e^p - 1)^2, and the optimum
M = int G(f*) are computed by adaptive quadrature.  ``solve_beta`` inverts
the moment map by damped Newton steps using the exact Jacobian -Sigma.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.special import gamma, zeta

from . import quadrature
from .domain import MomentVector, ProfileSet
from .errors import DomainViolation, InvalidInput, NoConvergence, QuadratureFailure, SingularSigma

RESIDUAL_TOL = 1e-9
MAX_ITER = 200


def geometric_entropy(eta):
    """G(eta) = (eta+1) log(eta+1) - eta log eta, with G(0) = 0."""
    eta = np.asarray(eta, dtype=float)
    out = np.zeros_like(eta)
    pos = eta > 0
    e = eta[pos]
    out[pos] = (e + 1.0) * np.log1p(e) - e * np.log(e)
    return out if out.ndim else float(out)


def _g_of_rate(p):
    """G(1/(e^p - 1)) = p/(e^p - 1) - log(1 - e^{-p}) for p > 0."""
    q = math.exp(-p)
    return p * q / (-math.expm1(-p)) - math.log(-math.expm1(-p))


# --------------------------------------------------------------------------
# dual vectors and the positivity check
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DualVector:
    J: ProfileSet
    beta: tuple

    def __post_init__(self):
        J = ProfileSet.of(self.J)
        beta = tuple(float(b) for b in self.beta)
        if len(beta) != len(J):
            raise InvalidInput(f"dual vector has {len(beta)} entries for |J|={len(J)}")
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "beta", beta)

    def __getitem__(self, j):
        return self.beta[self.J.index(j)]

    def as_array(self):
        return np.array(self.beta)

    def coefficients(self):
        """Dense coefficient list, index = power."""
        c = [0.0] * (self.J.j_max + 1)
        for j, b in zip(self.J, self.beta):
            c[j] = b
        return c

    def poly(self, x):
        """p(x) = sum_j beta_j x^j (scalar or array)."""
        c = self.coefficients()
        if np.ndim(x) == 0:
            acc = 0.0
            for coef in reversed(c):
                acc = acc * x + coef
            return acc
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), c)

    def to_json(self):
        return {str(j): b for j, b in zip(self.J, self.beta)}


def _trim(coeffs):
    lo = next((i for i, c in enumerate(coeffs) if c != 0), None)
    if lo is None:
        return None, []
    hi = max(i for i, c in enumerate(coeffs) if c != 0)
    return lo, coeffs[lo:hi + 1]


def _poly_rem(num, den):
    num = list(num)
    while len(num) >= len(den) and any(num):
        shift = len(num) - len(den)
        factor = num[-1] / den[-1]
        for i, c in enumerate(den):
            num[shift + i] -= factor * c
        num.pop()
    while num and num[-1] == 0:
        num.pop()
    return num


def _sign_changes(values):
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def positive_root_count(coeffs) -> int:
    """Distinct real roots in (0, inf) of a polynomial with q(0) != 0 (Sturm's theorem).

    ``coeffs`` are exact rationals, lowest degree first.
    """
    q = [Fraction(c) for c in coeffs]
    while q and q[-1] == 0:
        q.pop()
    if len(q) <= 1:
        return 0
    dq = [i * c for i, c in enumerate(q)][1:]
    seq = [q, dq]
    while True:
        r = _poly_rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    at_zero = [p[0] for p in seq]
    at_inf = [p[-1] for p in seq]
    return _sign_changes(at_zero) - _sign_changes(at_inf)


def positivity_violation(beta: DualVector) -> Optional[str]:
    """None if p_beta > 0 on (0, inf) with integrable f*, else the reason."""
    lo, core = _trim(beta.coefficients())
    if lo is None:
        return "beta is identically zero"
    if core[0] <= 0:
        return f"lowest nonzero coefficient (power {lo}) must be positive"
    if core[-1] <= 0:
        return "leading coefficient must be positive"
    if lo > beta.J.j_star:
        return f"coefficient of x^{beta.J.j_star} vanishes; moment {beta.J.j_star} diverges"
    if positive_root_count([Fraction(c) for c in core]) > 0:
        return "polynomial has a root in (0, inf)"
    return None


def check_positive(beta: DualVector) -> None:
    reason = positivity_violation(beta)
    if reason is not None:
        raise DomainViolation(f"invalid dual vector {beta.beta}: {reason}")


def _level_crossing(beta: DualVector, level: float) -> float:
    """Largest positive x with p(x) = level (0 if none)."""
    c = np.array(beta.coefficients(), dtype=float)
    c[0] -= level
    roots = [r.real for r in np.polynomial.polynomial.polyroots(c)
             if abs(r.imag) < 1e-9 * max(1.0, abs(r)) and r.real > 0]
    return float(max(roots)) if roots else 0.0


def _breakpoints(beta: DualVector):
    """x-locations worth splitting at: interior minima of p and its decay onset."""
    c = np.array(beta.coefficients())
    pts = []
    if len(c) > 2:
        dc = np.polynomial.polynomial.polyder(c)
        for r in np.polynomial.polynomial.polyroots(dc):
            if abs(r.imag) < 1e-12 and r.real > 0:
                pts.append(float(r.real))
    for level in (1.0, 40.0):
        x = _level_crossing(beta, level)
        if x > 0:
            pts.append(x)
    return tuple(p for p in pts if math.isfinite(p))


# --------------------------------------------------------------------------
# integrals of f*
# --------------------------------------------------------------------------

def f_star(beta: DualVector, x):
    """The optimiser 1/(exp(p(x)) - 1)."""
    p = np.asarray(beta.poly(x), dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.exp(-p) / -np.expm1(-p)


def _integrate(beta, integrand, lower=0.0, rel_tol=quadrature.REL_TOL):
    return quadrature.half_line(integrand, lower=lower, breakpoints=_breakpoints(beta),
                                rel_tol=rel_tol)[0]


def _moment_integrand(beta, j):
    c = beta.coefficients()[::-1]

    def fun(x):
        p = 0.0
        for coef in c:
            p = p * x + coef
        if p <= 0.0:
            return 0.0
        return x ** j * math.exp(-p) / -math.expm1(-p)
    return fun


def boltzmann_moment(beta: DualVector, j: int, check=True) -> float:
    """int_0^inf x^j / (exp(p(x)) - 1) dx."""
    if check:
        check_positive(beta)
    if j < beta.J.j_star:
        raise InvalidInput(f"moment {j} diverges for j_* = {beta.J.j_star}")
    return _integrate(beta, _moment_integrand(beta, j))


def forward_map(beta: DualVector) -> MomentVector:
    """beta -> alpha."""
    check_positive(beta)
    return MomentVector(beta.J, tuple(boltzmann_moment(beta, j, check=False) for j in beta.J))


@dataclass(frozen=True)
class SigmaMatrix:
    J: ProfileSet
    entries: np.ndarray = field(repr=False)

    def cholesky(self):
        try:
            return np.linalg.cholesky(self.entries)
        except np.linalg.LinAlgError as exc:
            raise SingularSigma(f"Sigma is not positive definite: {exc}") from exc

    def log_det(self) -> float:
        L = self.cholesky()
        return 2.0 * float(np.sum(np.log(np.diag(L))))

    def det(self) -> float:
        return math.exp(self.log_det())


def _sigma_integrand(beta, power):
    c = beta.coefficients()[::-1]

    def fun(x):
        p = 0.0
        for coef in c:
            p = p * x + coef
        if p <= 0.0:
            return 0.0
        q = math.exp(-p)
        d = -math.expm1(-p)
        return x ** power * q / (d * d)
    return fun


def sigma_matrix(beta: DualVector, check=True) -> SigmaMatrix:
    """Sigma_ij = int x^{i+j} e^p / (e^p - 1)^2 dx for i, j in J."""
    if check:
        check_positive(beta)
    J = beta.J
    m = len(J)
    cache = {}
    S = np.empty((m, m))
    for a, i in enumerate(J):
        for b, j in enumerate(J):
            if b < a:
                S[a, b] = S[b, a]
                continue
            key = i + j
            if key not in cache:
                if key < 2 * J.j_star:  # pragma: no cover - excluded by J ordering
                    raise InvalidInput("Sigma entry diverges")
                cache[key] = _integrate(beta, _sigma_integrand(beta, key))
            S[a, b] = cache[key]
    return SigmaMatrix(J, S)


def m_alpha(beta: DualVector) -> float:
    """M = int_0^inf G(f*(x)) dx."""
    check_positive(beta)
    c = beta.coefficients()[::-1]

    def fun(x):
        p = 0.0
        for coef in c:
            p = p * x + coef
        if p <= 0.0:
            return 0.0
        return _g_of_rate(p)
    return _integrate(beta, fun)


def log_partition_integral(beta: DualVector) -> float:
    """int_0^inf -log(1 - e^{-p(x)}) dx."""
    check_positive(beta)
    c = beta.coefficients()[::-1]

    def fun(x):
        p = 0.0
        for coef in c:
            p = p * x + coef
        if p <= 0.0:
            return 0.0
        return -math.log(-math.expm1(-p))
    return _integrate(beta, fun)


def lagrangian_value(beta: DualVector, alpha: MomentVector) -> float:
    """alpha . beta + int -log(1 - e^{-p}); equals M at the solution."""
    return float(np.dot(alpha.values, beta.beta)) + log_partition_integral(beta)


# --------------------------------------------------------------------------
# Newton solve
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SolveReport:
    beta: DualVector
    iterations: int
    residual_norm: float
    converged: bool

    def to_json(self):
        return {
            "beta": self.beta.to_json(),
            "iterations": self.iterations,
            "residual_norm": self.residual_norm,
            "converged": self.converged,
        }


def single_power_beta(j: int, alpha_j: float) -> float:
    """Closed-form beta for J = {j}: int x^j/(e^{b x^j}-1) = Gamma(1+1/j) zeta(1+1/j) / (j b^{(j+1)/j})."""
    if j < 1:
        raise InvalidInput("single-power closed form needs j >= 1")
    s = 1.0 + 1.0 / j
    return float((gamma(s) * zeta(s) / (j * alpha_j)) ** (j / (j + 1.0)))


def _moments_and_sigma(beta):
    vals = np.array([boltzmann_moment(beta, j, check=False) for j in beta.J])
    return vals, sigma_matrix(beta, check=False)


def _relres(vals, target):
    return (vals - target) / target


def _newton(J, target, beta0, tol, max_iter, iter_offset=0, merit="residual"):
    """Damped Newton on m(beta) = target.

    The step solves Sigma d = m(beta) - target.  With ``merit="residual"`` a
    step is halved until the relative residual norm drops; with
    ``merit="dual"`` until the convex dual target.beta + int -log(1-e^{-p})
    satisfies an Armijo decrease, which is globally convergent whenever a
    solution exists.  Returns (beta, iterations, residual, converged).
    """
    beta = DualVector(J, tuple(beta0))
    if positivity_violation(beta) is not None:
        raise DomainViolation(f"starting point {beta.beta} is not a valid dual vector")

    def evaluate(b):
        try:
            vals, sigma = _moments_and_sigma(b)
            rr = _relres(vals, target)
            if merit == "dual":
                value = float(np.dot(target, b.beta)) + log_partition_integral(b)
            else:
                value = float(np.linalg.norm(rr))
        except QuadratureFailure:
            return None
        return vals, sigma, rr, value

    state = evaluate(beta)
    if state is None:
        return beta, iter_offset, math.inf, False
    vals, sigma, rr, value = state
    ends = [0, len(J) - 1]

    def line_search(step, value, grad):
        slope = -float(np.dot(grad, step))  # directional derivative of the dual
        t = 1.0
        for _ in range(60):
            cand = DualVector(J, tuple(np.array(beta.beta) + t * step))
            if positivity_violation(cand) is None:
                cstate = evaluate(cand)
                if cstate is not None:
                    cvalue = cstate[3]
                    if merit == "dual":
                        ok = cvalue <= value + 1e-4 * t * slope
                    else:
                        ok = cvalue < value
                    if ok:
                        return t, cand, cstate
            t *= 0.5
        return 0.0, None, None

    it = 0
    stalled = 0
    for it in range(1, max_iter + 1):
        if np.max(np.abs(rr)) <= tol:
            return beta, iter_offset + it - 1, float(np.max(np.abs(rr))), True
        grad = vals - target
        try:
            step = np.linalg.solve(sigma.entries, grad)
        except np.linalg.LinAlgError:
            break
        t, cand, cstate = line_search(step, value, grad)
        if t < 1.0 / 64:
            # jammed against the boundary: freeze end coefficients that the
            # step drives towards zero and take a reduced Newton step instead
            frozen = [k for k in ends if beta.beta[k] + step[k] <= 0.0]
            free = [k for k in range(len(J)) if k not in frozen]
            if frozen and free:
                reduced = np.zeros(len(J))
                reduced[free] = np.linalg.solve(sigma.entries[np.ix_(free, free)], grad[free])
                t2, cand2, cstate2 = line_search(reduced, value, grad)
                if cand2 is not None and (cand is None or cstate2[3] < cstate[3]):
                    t, cand, cstate = t2, cand2, cstate2
        if cand is None:
            break
        progress = value - cstate[3]
        beta = cand
        vals, sigma, rr, value = cstate
        stalled = stalled + 1 if progress <= 1e-12 * max(1.0, abs(value)) else 0
        if stalled >= 8:
            break
    res = float(np.max(np.abs(rr)))
    return beta, iter_offset + it, res, res <= tol


def _continuation(J, target, beta_start, tol, max_iter):
    """Track the solution along alpha(tau) = (1 - tau) alpha_start + tau target."""
    start_vals = np.array([boltzmann_moment(DualVector(J, beta_start), j, check=False) for j in J])
    beta = np.array(beta_start, dtype=float)
    tau, dtau = 0.0, 1.0
    iters = 0
    res = math.inf
    while tau < 1.0:
        nxt = min(1.0, tau + dtau)
        goal = (1.0 - nxt) * start_vals + nxt * target
        cand, k, res, ok = _newton(J, goal, beta, tol if nxt == 1.0 else 1e-7, 20)
        iters += k
        if ok:
            beta = np.array(cand.beta)
            tau = nxt
            dtau = min(1.0, dtau * 2.0)
        else:
            dtau *= 0.25
            if dtau < 1e-4 or iters > max_iter:
                return DualVector(J, tuple(beta)), iters, res, False
    return DualVector(J, tuple(beta)), iters, 0.0, True


def _homotopy_start(alpha: MomentVector, tol, max_iter):
    """Warm start: positive powers in increasing order, then j = 0.

    Each new leading coefficient enters small and positive (the constant
    term enters at 1, which keeps f* integrable at the origin) and the enlarged system is tracked by
    continuation.  A failed intermediate stage keeps its last valid iterate.
    """
    J = alpha.J
    order = [j for j in J if j > 0] + ([0] if 0 in J else [])
    first = order[0]
    active = [first]
    iters = 0
    beta = {first: single_power_beta(first, alpha[first])}
    for j in order[1:]:
        if j == 0:
            beta[j] = 1.0
        else:
            # a zero leading coefficient sits on the domain boundary; start just inside
            cur = DualVector(tuple(active), tuple(beta[i] for i in active))
            scale = max(_level_crossing(cur, 1.0), 1e-3)
            beta[j] = 0.01 / scale ** j
        active = sorted(active + [j])
        sub = ProfileSet(tuple(active))
        target = np.array([alpha[i] for i in sub])
        start = tuple(beta[i] for i in sub)
        dual, k, _, _ = _continuation(sub, target, start, tol if sub == J else 1e-8,
                                      max_iter // len(J))
        iters += k
        beta.update({i: b for i, b in zip(sub, dual.beta)})
    return tuple(beta[j] for j in J), iters


def neutral_start(alpha: MomentVector) -> tuple:
    """Scale-matched interior starting point: p(s) = 1 at the natural scale s."""
    J = alpha.J
    first = next(j for j in J if j > 0)
    s = single_power_beta(first, alpha[first]) ** (-1.0 / first)
    return tuple(1.0 / (len(J) * s ** j) for j in J)


def solve_beta(alpha: MomentVector, beta0=None, tol: float = RESIDUAL_TOL,
               max_iter: int = MAX_ITER) -> SolveReport:
    """Find beta with int x^j f*(x) dx = alpha_j for all j in J.

    Without ``beta0`` the solve starts from the closed form when |J| = 1 and
    from ``neutral_start`` otherwise, using the dual-merit Newton iteration;
    the power-by-power homotopy is the fallback.  Raises NoConvergence
    (carrying the best iterate) when the tolerance is not met, which is
    expected for alpha outside the solvable region.
    """
    J = alpha.J
    target = np.array(alpha.values)
    if beta0 is not None:
        start = tuple(beta0.beta if isinstance(beta0, DualVector) else beta0)
    elif len(J) == 1:
        start = (single_power_beta(J.j_star, alpha.values[0]),)
    else:
        start = neutral_start(alpha)
    dual, iters, res, ok = _newton(J, target, start, tol, max_iter, merit="dual")
    b = np.abs(dual.as_array())
    on_boundary = min(b[0], b[-1]) <= 1e-8 * b.max()
    # the dual minimiser escaping to the boundary means no interior solution
    if not ok and not on_boundary and beta0 is None and len(J) > 1:
        warm_start, warm = _homotopy_start(alpha, tol, max_iter)
        dual2, iters2, res2, ok2 = _newton(J, target, warm_start, tol, max_iter,
                                           iter_offset=iters + warm)
        if ok2 or res2 < res:
            dual, iters, res, ok = dual2, iters2, res2, ok2
    report = SolveReport(dual, iters, res, ok)
    if not ok:
        raise NoConvergence(
            f"no beta found for alpha={alpha.values} (residual {res:.3g}); "
            "alpha may violate the solvability assumption", best=report)
    return report


# --------------------------------------------------------------------------
# Stieltjes / Hankel diagnostic
# --------------------------------------------------------------------------

def hankel_feasibility(moments, d=None, tol: float = 1e-12) -> str:
    """Classify (1, a_1, ..., a_d) for the truncated Stieltjes problem.

    Uses all leading principal minors of the Hankel matrices built from
    (a_0, a_1, ...) and from (a_1, a_2, ...).  Returns "feasible",
    "boundary" or "infeasible".
    """
    m = [float(v) for v in moments]
    if d is not None:
        m = m[:d + 1]
    if not m or abs(m[0] - 1.0) > 1e-12:
        raise InvalidInput("moment sequence must start with alpha_0 = 1")
    dets = []
    for seq in (m, m[1:]):
        size = (len(seq) + 1) // 2
        for k in range(1, size + 1):
            H = np.array([[seq[a + b] for b in range(k)] for a in range(k)])
            dets.append(float(np.linalg.det(H)))
    if any(x < -tol for x in dets):
        return "infeasible"
    if any(abs(x) <= tol for x in dets):
        return "boundary"
    return "feasible"
