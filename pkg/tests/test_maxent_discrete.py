import math

import numpy as np
import pytest
from scipy import optimize

from partmaxent.domain import MomentVector, Profile, scaled_profile
from partmaxent.errors import DomainViolation, TailBoundFailure
from partmaxent.exact_count import count_exact
from partmaxent.maxent_continuous import sigma_matrix, solve_beta
from partmaxent.maxent_discrete import (DiscreteDual, covariance_s, discrete_moment, entropy_mu,
                                        exact_mu_probability, log_partition, solve_beta_hat,
                                        truncation_point)


def test_first_term_dominates():
    d = DiscreteDual.build((1,), (10.0,))
    assert discrete_moment(d, 1) == pytest.approx(math.exp(-10), rel=1e-3)


def test_double_series_resummation():
    b = 0.5
    d = DiscreteDual.build((1,), (b,))
    m = np.arange(1, 400)
    q = np.exp(-b * m)
    oracle = math.fsum(q / (1 - q) ** 2)
    assert discrete_moment(d, 1) == pytest.approx(oracle, rel=1e-10)


def test_s11_resummation():
    # S_11 = -d/db sum_m q/(1-q)^2 = sum_m m q (1+q)/(1-q)^3, q = e^{-bm}
    b = 0.3
    m = np.arange(1, 800)
    q = np.exp(-b * m)
    oracle = math.fsum(m * q * (1 + q) / (1 - q) ** 3)
    assert covariance_s(DiscreteDual.build((1,), (b,)))[0, 0] == pytest.approx(oracle, rel=1e-10)


def test_tail_is_certified():
    d = DiscreteDual.build((1, 2), (0.05, 1e-4))
    assert d.tail_bound <= 1e-13
    assert d.rates[-1] >= 45
    longer = DiscreteDual(d.J, d.beta_hat, 1, 3 * d.truncation_K, 0.0)
    assert discrete_moment(longer, 2) - discrete_moment(d, 2) <= 1e-12


def test_tail_failure_and_domain():
    with pytest.raises(TailBoundFailure):
        truncation_point(DiscreteDual.build((1,), (1.0,)).J, (1e-3,), max_k=100)
    with pytest.raises(DomainViolation):
        DiscreteDual.build((1, 2), (-5.0, 1.0))   # p(1) < 0


def test_solve_matches_bisection():
    N = Profile((1,), (100,))
    d = solve_beta_hat(N, n=100)
    oracle = optimize.brentq(lambda b: discrete_moment(DiscreteDual.build((1,), (b,)), 1) - 100,
                             0.01, 1.0, xtol=1e-15)
    assert d.beta_hat[0] == pytest.approx(oracle, rel=1e-8)
    assert abs(d.beta_hat[0] * 10 - math.pi / math.sqrt(6)) < 0.15


def test_exact_match_postcondition():
    N = Profile((1,), (10,))
    d = solve_beta_hat(N, n=10)
    assert abs(discrete_moment(d, 1) - 10) <= 1e-9 * 10


def test_entropy_identity():
    N = scaled_profile(MomentVector((1, 2), (1.0, 1.0)), 100)
    d = solve_beta_hat(N)
    lhs = entropy_mu(d)
    rhs = log_partition(d) + sum(b * discrete_moment(d, j) for j, b in zip(d.J, d.beta_hat))
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_entropy_negligible_when_rates_large():
    assert entropy_mu(DiscreteDual.build((1,), (40.0,))) <= 1e-15


def test_monotone_in_beta():
    d = DiscreteDual.build((1, 2), (0.1, 0.01))
    e = DiscreteDual.build((1, 2), (0.1, 0.0101))
    for j in (1, 2):
        assert discrete_moment(e, j) < discrete_moment(d, j)
    assert np.all(covariance_s(e) < covariance_s(d))


def test_covariance_positive_definite():
    S = covariance_s(DiscreteDual.build((0, 1, 2), (0.3, 0.1, 0.01)))
    assert np.allclose(S, S.T)
    assert np.all(np.linalg.eigvalsh(S) > 0)


def test_scaling_limits():
    """beta_hat n^{j/2} -> beta and S_ij / (n^{(i+j+1)/2} Sigma_ij) -> 1."""
    alpha = MomentVector((1, 2), (1.0, 1.0))
    beta = solve_beta(alpha).beta
    Sigma = sigma_matrix(beta).entries
    beta_err, s_err = [], []
    for n in (10 ** 2, 10 ** 3, 10 ** 4):
        d = solve_beta_hat(scaled_profile(alpha, n), beta, n)
        beta_err.append(max(abs(x - y) for x, y in zip(d.scaled(), beta.beta)))
        S = covariance_s(d)
        ratio = [S[a, b] / (n ** ((i + j + 1) / 2) * Sigma[a, b])
                 for a, i in enumerate((1, 2)) for b, j in enumerate((1, 2))]
        s_err.append(max(abs(r - 1) for r in ratio))
        # moments rescale to alpha as well
        assert [discrete_moment(d, j) / n ** ((j + 1) / 2) for j in (1, 2)] == \
            pytest.approx(alpha.values, rel=2 / math.sqrt(n))
    assert beta_err[0] > beta_err[1] > beta_err[2]
    assert s_err[0] > s_err[1] > s_err[2]


def test_mu_probability_shadow():
    """exp(H) * mu_n(P(N)) reproduces p(N)."""
    N = Profile((1, 2), (20, 60))
    d = solve_beta_hat(N, n=20)
    count = count_exact(N)
    assert math.exp(entropy_mu(d)) * exact_mu_probability(count, d, N) == pytest.approx(count, rel=1e-6)
