"""Merge-ratio decomposition and its dimension limits.

For a partition psi and the partition psi' obtained by merging clusters
h1 and h2, the posterior ratio Pi(psi|Y) / Pi(psi'|Y) factors into the
EPPF ratio and a marginal-likelihood ratio.  The likelihood ratio in
turn splits into four log terms:

  term_gamma      the four-Gamma_p factor (sizes and nu0 only)
  term_kappa      the (kappa0/(kappa0+n))^{p/2} factor (sizes, kappa0, p)
  term_det_kappa  the ratio of the dual-form scalar factors
  term_det_gram   the ratio of |I_n + G| powers

The last two carry all the data dependence.  Under the robust prior
(kappa0 = c1 sqrt(p), nu0 = c2 p, Lambda0 = p^2 I) each term tends to a
finite constant as p grows, and those constants are what
:func:`analytic_limits` returns.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gammafn import gamma_term_log, gamma_term_log_limit
from .linalg import cholesky, spectral_norm
from .niw import ClusterView, NiwPrior, RobustPriorSpec, _dual_det_parts, transform_data
from .partition import CrpPrior, Partition, eppf_log_ratio

__all__ = [
    "MergeRatioBreakdown",
    "TermLimits",
    "merge_log_ratio",
    "kappa_term_log",
    "det_kappa_term_log",
    "analytic_limits",
    "det_gram_term_log",
    "trace_approx_log",
    "projector_residual",
]


@dataclass(frozen=True)
class MergeRatioBreakdown:
    """Log-scale decomposition of one merge ratio.

    total_likelihood is the sum of the four terms and equals the direct
    difference of cluster log marginals; total_posterior adds the EPPF
    ratio.
    """

    term_gamma: float
    term_kappa: float
    term_det_kappa: float
    term_det_gram: float
    total_likelihood: float
    eppf: float
    total_posterior: float


@dataclass(frozen=True)
class TermLimits:
    """p -> infinity limits of the four terms under the robust prior."""

    gamma_limit: float
    kappa_limit: float
    det_kappa_limit: float
    det_gram_limit: float
    total_limit: float


def kappa_term_log(p: int, kappa0: float, n1: int, n2: int) -> float:
    """-(p/2) * log(1 + n1 n2 / (kappa0^2 + (n1+n2) kappa0)).

    This is the log of the precision-scale factor of the merge ratio.
    With kappa0 = c1 sqrt(p) it tends to -n1 n2 / (2 c1^2).
    """
    if not kappa0 > 0:
        raise DomainError(f"kappa0 must be positive, got {kappa0}")
    if n1 < 0 or n2 < 0:
        raise DomainError("cluster sizes must be nonnegative")
    if n1 == 0 or n2 == 0:
        return 0.0
    return float(-p / 2.0 * np.log1p(n1 * n2 / (kappa0**2 + (n1 + n2) * kappa0)))


def det_kappa_term_log(p: int, kappa0: float, nu0: float, n1: int, n2: int) -> float:
    """Closed asymptotic form of the scalar-factor ratio across a merge.

    Exact log of

        { (1 + n2/(kappa0+n1))^{-n1} (1 + n1/(kappa0+n2))^{-n2}
          (1 + n1 n2/(kappa0^2 + kappa0 (n1+n2)))^{nu0} }^{1/2}

    which is the limit of the data-dependent scalar factors once the
    projector residual of the transformed rows vanishes.  p enters only
    through kappa0(p) and nu0(p); the display itself is p-free.
    """
    if not kappa0 > 0 or not nu0 > 0:
        raise DomainError("kappa0 and nu0 must be positive")
    if n1 < 0 or n2 < 0:
        raise DomainError("cluster sizes must be nonnegative")
    if n1 == 0 or n2 == 0:
        return 0.0
    return float(
        0.5
        * (
            -n1 * np.log1p(n2 / (kappa0 + n1))
            - n2 * np.log1p(n1 / (kappa0 + n2))
            + nu0 * np.log1p(n1 * n2 / (kappa0**2 + kappa0 * (n1 + n2)))
        )
    )


def analytic_limits(spec: RobustPriorSpec, n1: int, n2: int) -> TermLimits:
    """Term-by-term p -> infinity limits under the robust prior.

    gamma:     (n1 n2 / 2) log(1 - 1/c2)
    kappa:     -n1 n2 / (2 c1^2)
    det_kappa: c2 n1 n2 / (2 c1^2)
    det_gram:  0, valid for row-standardized data with independent rows
    """
    if not spec.c2 > 1:
        raise DomainError(f"limits require c2 > 1, got {spec.c2}")
    if n1 < 0 or n2 < 0:
        raise DomainError("cluster sizes must be nonnegative")
    gamma = gamma_term_log_limit(spec.c2, n1, n2)
    kappa = -n1 * n2 / (2.0 * spec.c1**2)
    det_kappa = spec.c2 * n1 * n2 / (2.0 * spec.c1**2)
    det_gram = 0.0
    return TermLimits(
        gamma_limit=gamma,
        kappa_limit=kappa,
        det_kappa_limit=det_kappa,
        det_gram_limit=det_gram,
        total_limit=gamma + kappa + det_kappa + det_gram,
    )


def merge_log_ratio(
    data,
    part: Partition,
    h1: int,
    h2: int,
    prior: NiwPrior,
    crp: CrpPrior,
) -> MergeRatioBreakdown:
    """Evaluate the merge ratio for clusters h1, h2 of a partition.

    Parameters
    ----------
    data : (n, p) array_like
        All observations; the partition indexes its rows.
    part : Partition
    h1, h2 : int
        Labels of the clusters whose merge is evaluated.
    prior : NiwPrior
    crp : CrpPrior

    Returns
    -------
    MergeRatioBreakdown
        Exact decomposition; total_likelihood always equals the direct
        difference log_marginal(h1) + log_marginal(h2) -
        log_marginal(merged).
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError(f"data must be 2-d, got shape {data.shape}")
    if data.shape[0] != part.n:
        raise ValueError(
            f"data has {data.shape[0]} rows but partition covers {part.n}"
        )
    p = data.shape[1]
    if p != prior.p:
        raise ValueError(f"data width {p} does not match prior p={prior.p}")
    idx1 = part.members(h1)
    idx2 = part.members(h2)
    n1, n2 = idx1.size, idx2.size

    term_gamma = gamma_term_log(p, prior.nu0, n1, n2)
    term_kappa = kappa_term_log(p, prior.kappa0, n1, n2)

    yt1 = transform_data(data[idx1], prior)
    yt2 = transform_data(data[idx2], prior)
    sf1, ld1 = _dual_det_parts(yt1, prior.kappa0)
    sf2, ld2 = _dual_det_parts(yt2, prior.kappa0)
    sfm, ldm = _dual_det_parts(np.vstack([yt1, yt2]), prior.kappa0)

    def half(nh):
        return (prior.nu0 + nh) / 2.0

    term_det_kappa = half(n1 + n2) * sfm - half(n1) * sf1 - half(n2) * sf2
    term_det_gram = half(n1 + n2) * ldm - half(n1) * ld1 - half(n2) * ld2

    total_likelihood = term_gamma + term_kappa + term_det_kappa + term_det_gram
    eppf = eppf_log_ratio(part, h1, h2, crp)
    return MergeRatioBreakdown(
        term_gamma=term_gamma,
        term_kappa=term_kappa,
        term_det_kappa=term_det_kappa,
        term_det_gram=term_det_gram,
        total_likelihood=total_likelihood,
        eppf=eppf,
        total_posterior=eppf + total_likelihood,
    )


def det_gram_term_log(c1: ClusterView, c2: ClusterView, prior: NiwPrior) -> float:
    """Exact log-ratio of the |I_n + G| powers across merging two clusters.

    Computed entirely in n x n space from the transformed rows.
    Requires a scalar Lambda0.
    """
    if not prior.scalar_lambda0:
        raise DomainError("gram term requires a scalar lambda0")
    if c1.n == 0 and c2.n == 0:
        return 0.0

    def gram_log_det(rows):
        if rows.shape[0] == 0:
            return 0.0
        _, ld = _dual_det_parts(transform_data(rows, prior), prior.kappa0)
        return ld

    def half(nh):
        return (prior.nu0 + nh) / 2.0

    ld1 = gram_log_det(c1.rows)
    ld2 = gram_log_det(c2.rows)
    ldm = gram_log_det(np.vstack([c1.rows, c2.rows]))
    return half(c1.n + c2.n) * ldm - half(c1.n) * ld1 - half(c2.n) * ld2


def trace_approx_log(c: ClusterView, prior: NiwPrior) -> float:
    """Trace approximation of the cluster's gram determinant power.

    ((nu0 + n)/2) * log(1 + trace((Y - mu0)^T (Y - mu0)) / lam) for a
    scalar Lambda0 = lam * I.  For row-standardized data with mu0 = 0
    the trace is (p - 1) * n.  Approximates the exact
    ((nu0 + n)/2) * log|I_n + G| by dropping the off-diagonal mass of G.
    """
    if not prior.scalar_lambda0:
        raise DomainError("trace approximation requires a scalar lambda0")
    if c.n == 0:
        return 0.0
    centered = c.rows - prior.mu0
    trace = float((centered**2).sum())
    return (prior.nu0 + c.n) / 2.0 * float(np.log1p(trace / prior.lambda0))


def projector_residual(y) -> float:
    """Spectral norm of Y (I_p + Y^T Y)^{-1} Y^T - I_n.

    By the Woodbury identity the residual matrix equals
    -(I_n + Y Y^T)^{-1}, so the norm is computed in n x n space.  The
    value always lies in (0, 1] and vanishes as the smallest eigenvalue
    of Y Y^T grows.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[None, :]
    n = y.shape[0]
    if n < 1:
        raise ValueError("need at least one row")
    a = y @ y.T
    a[np.arange(n), np.arange(n)] += 1.0
    inv = cholesky(a).solve(np.eye(n))
    return float(spectral_norm(inv))
