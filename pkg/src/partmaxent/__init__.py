"""Counting and sampling integer partitions with prescribed power sums.

The continuous maximum-entropy problem gives the growth rate M(alpha) and
the limit shape; its discrete counterpart mu_n, a product of geometric
multiplicities, gives finite-n estimates, exact-uniform samplers, and the
local limit factor.  Exact dynamic-programming counts serve as ground truth.
"""
from .asymptotics import (EstimateBreakdown, b1, c1, em_sum_check, entropy_expansion,
                          estimate_p, exponent_b, lclt_factor, prefactor_c)
from .domain import MomentVector, Partition, Profile, ProfileSet, profile_of, scaled_profile
from .errors import (BoxCapExceeded, CapExceeded, DegreeCapExceeded, DomainViolation,
                     InvalidInput, MaxTriesExceeded, MemoryCapExceeded, NoConvergence,
                     PartMaxEntError, QuadratureFailure, SingularSigma, TailBoundFailure,
                     WindowUncovered, ZeroEntry)
from .exact_count import count_exact, count_pn, enumerate_profile_partitions
from .intpoly import (FeasibilityLattice, IntValuedPoly, enumerate_QJ, is_n_feasible,
                      nt_density)
from .maxent_continuous import (DualVector, SigmaMatrix, SolveReport, boltzmann_moment,
                                check_positive, forward_map, geometric_entropy,
                                hankel_feasibility, m_alpha, sigma_matrix, solve_beta)
from .maxent_discrete import (DiscreteDual, covariance_s, discrete_moment, entropy_mu,
                              exact_mu_probability, log_partition, solve_beta_hat)
from .sampler import (ShapeCurve, empirical_shape, limit_shape, make_rng,
                      mc_profile_probability, sample_mu, sample_uniform_exact,
                      sample_uniform_many, shape_distance)

__version__ = "0.1.0"
