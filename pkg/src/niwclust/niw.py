"""Normal-Inverse-Wishart priors and cluster marginal likelihoods.

A cluster of rows y_1..y_n with NIW prior (mu0, kappa0, nu0, Lambda0)
has the closed-form marginal likelihood

    pi^{-np/2} * Gamma_p((nu0+n)/2) / Gamma_p(nu0/2)
    * (kappa0 / (kappa0 + n))^{p/2}
    * |Lambda0|^{nu0/2} / |Lambda0 + S + (n kappa0/(n+kappa0)) d d^T|^{(nu0+n)/2}

with S the centered scatter and d = ybar - mu0 (see e.g. Murphy [1]).
The primal evaluation factorizes the p x p matrix directly.  For p much
larger than n the same value is computed in n x n space: after the
transformation ytilde = Lambda0^{-1/2}(y - mu0) the determinant splits
into |I_n + G| for the Gram matrix G = Ytilde Ytilde^T and a scalar
factor obtained from the Woodbury identity, so the cost is
O(p n^2 + n^3) instead of O(p^3).

References
----------
.. [1] K. P. Murphy, "Conjugate Bayesian analysis of the Gaussian
   distribution", technical note, 2007.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import solve_triangular

from .errors import ConstantRow, DomainError, NotPositiveDefinite
from .gammafn import LOG_PI, GammaRatioSpec, log_multigamma_ratio
from .linalg import cholesky

__all__ = [
    "NiwPrior",
    "RobustPriorSpec",
    "ClusterView",
    "robust_prior",
    "transform_data",
    "cluster_log_marginal",
    "cluster_log_marginal_dual",
    "row_standardize",
]

# Dual evaluation pays off once the Gram side is decisively smaller.
_DUAL_RATIO = 4


@dataclass(frozen=True, eq=False)
class NiwPrior:
    """Normal-Inverse-Wishart prior (mu0, kappa0, nu0, Lambda0).

    Parameters
    ----------
    mu0 : (p,) ndarray
        Prior mean.
    kappa0 : float
        Prior precision scale, > 0.
    nu0 : float
        Inverse-Wishart degrees of freedom, > p - 1.
    lambda0 : float or (p, p) ndarray
        Inverse-Wishart scale.  A float lam means the scalar matrix
        lam * I_p; a full matrix must be symmetric positive definite.
    """

    mu0: NDArray[np.float64]
    kappa0: float
    nu0: float
    lambda0: Union[float, NDArray[np.float64]]

    def __post_init__(self):
        mu0 = np.asarray(self.mu0, dtype=float)
        if mu0.ndim != 1 or mu0.size < 1:
            raise DomainError(f"mu0 must be a vector, got shape {mu0.shape}")
        object.__setattr__(self, "mu0", mu0)
        p = mu0.size
        if not self.kappa0 > 0:
            raise DomainError(f"kappa0 must be positive, got {self.kappa0}")
        if not self.nu0 > p - 1:
            raise DomainError(f"nu0 must exceed p-1={p - 1}, got {self.nu0}")
        if np.isscalar(self.lambda0) or np.ndim(self.lambda0) == 0:
            lam = float(self.lambda0)
            if not lam > 0:
                raise DomainError(f"scalar lambda0 must be positive, got {lam}")
            object.__setattr__(self, "lambda0", lam)
        else:
            lam = np.asarray(self.lambda0, dtype=float)
            if lam.shape != (p, p):
                raise DomainError(
                    f"lambda0 shape {lam.shape} does not match p={p}"
                )
            object.__setattr__(self, "lambda0", lam)
            cholesky(lam)  # raises NotPositiveDefinite when invalid

    @property
    def p(self) -> int:
        return self.mu0.size

    @property
    def scalar_lambda0(self) -> bool:
        return isinstance(self.lambda0, float)

    @cached_property
    def lambda0_log_det(self) -> float:
        if self.scalar_lambda0:
            return self.p * float(np.log(self.lambda0))
        return cholesky(self.lambda0).log_det()

    def lambda0_matrix(self) -> NDArray[np.float64]:
        """Lambda0 as an explicit p x p matrix (primal evaluation only)."""
        if self.scalar_lambda0:
            return self.lambda0 * np.eye(self.p)
        return np.asarray(self.lambda0)


@dataclass(frozen=True)
class RobustPriorSpec:
    """Constants of the dimension-robust prior family.

    The family sets kappa0 = c1 * sqrt(p), nu0 = c2 * p and
    Lambda0 = p^2 * I with mu0 = 0.  c2 must exceed 1 so that the
    degrees of freedom keep a linear excess over the dimension;
    at c2 = 1 the gamma-term limit degenerates.
    """

    c1: float
    c2: float
    lambda_scale_mode: str = field(default="p_squared_identity")

    def __post_init__(self):
        if not self.c1 > 0:
            raise DomainError(f"c1 must be positive, got {self.c1}")
        if not self.c2 > 1:
            raise DomainError(f"c2 must exceed 1, got {self.c2}")
        if self.lambda_scale_mode != "p_squared_identity":
            raise DomainError(
                f"unsupported lambda_scale_mode {self.lambda_scale_mode!r}"
            )


def robust_prior(p: int, spec: RobustPriorSpec) -> NiwPrior:
    """Instantiate the robust prior at dimension p.

    kappa0 = c1 * sqrt(p), nu0 = c2 * p, Lambda0 = p^2 * I, mu0 = 0.
    """
    if p < 2:
        raise DomainError(f"robust prior needs p >= 2, got {p}")
    return NiwPrior(
        mu0=np.zeros(p),
        kappa0=spec.c1 * float(np.sqrt(p)),
        nu0=spec.c2 * float(p),
        lambda0=float(p) ** 2,
    )


class ClusterView:
    """One cluster's observations with lazily cached summaries.

    Parameters
    ----------
    rows : (n, p) array_like
        The cluster's observations, one per row.  An empty cluster is
        an array of shape (0, p).

    The mean, the centered scatter (p x p) and the raw Gram matrix
    (n x n) are each computed on first use and cached; which of the two
    quadratic caches materializes depends on whether the primal or the
    dual marginal form consumes the view.
    """

    def __init__(self, rows):
        rows = np.asarray(rows, dtype=float)
        if rows.ndim == 1:
            rows = rows[None, :]
        if rows.ndim != 2:
            raise ValueError(f"rows must be 2-d, got shape {rows.shape}")
        if rows.shape[1] < 1:
            raise ValueError("rows must have at least one column")
        self.rows = rows

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def p(self) -> int:
        return self.rows.shape[1]

    @cached_property
    def mean(self) -> NDArray[np.float64]:
        if self.n == 0:
            return np.zeros(self.p)
        return self.rows.mean(axis=0)

    @cached_property
    def scatter(self) -> NDArray[np.float64]:
        """Centered scatter S = sum (y - ybar)(y - ybar)^T, p x p PSD."""
        if self.n == 0:
            return np.zeros((self.p, self.p))
        centered = self.rows - self.mean
        return centered.T @ centered

    @cached_property
    def gram(self) -> NDArray[np.float64]:
        """Raw Gram matrix rows @ rows.T, n x n."""
        return self.rows @ self.rows.T

    def check_cache(self, tol: float = 1e-10) -> None:
        """Verify cached summaries against fresh recomputation."""
        fresh = ClusterView(self.rows)
        for name in ("mean", "scatter", "gram"):
            if name in self.__dict__:
                a = self.__dict__[name]
                b = getattr(fresh, name)
                if not np.allclose(a, b, rtol=tol, atol=tol):
                    raise AssertionError(f"stale {name} cache")


def transform_data(y, prior: NiwPrior) -> NDArray[np.float64]:
    """Apply ytilde_i = Lambda0^{-1/2} (y_i - mu0) row-wise.

    Uses the symmetric square root for a full Lambda0; for a scalar
    Lambda0 = lam * I this is just (y - mu0) / sqrt(lam).  Under the
    transformed data the prior has mu0 = 0 and Lambda0 = I.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[None, :]
    if y.shape[1] != prior.p:
        raise ValueError(f"data width {y.shape[1]} does not match prior p={prior.p}")
    centered = y - prior.mu0
    if prior.scalar_lambda0:
        return centered / np.sqrt(prior.lambda0)
    w, v = np.linalg.eigh(prior.lambda0)
    if np.min(w) <= 0 or np.min(w) < 1e-12 * np.max(w):
        raise NotPositiveDefinite("lambda0 eigenvalue not positive")
    inv_sqrt = (v * (1.0 / np.sqrt(w))) @ v.T
    return centered @ inv_sqrt


def _gamma_ratio(p: int, nu0: float, n: int) -> float:
    return log_multigamma_ratio(GammaRatioSpec(p=p, nu0=nu0, l=n, m=0))


def _dual_det_parts(ytilde: NDArray[np.float64], kappa0: float):
    """(log scalar factor, log|I_n + G|) for transformed cluster rows.

    The determinant |I_p + Ytilde^T Ytilde - (1/(n+kappa0)) Ytilde^T 1 1^T Ytilde|
    equals sf * |I_n + G| with G = Ytilde Ytilde^T and, by Woodbury,
    sf = (kappa0 + 1^T (I_n + G)^{-1} 1) / (n + kappa0).
    """
    n = ytilde.shape[0]
    if n == 0:
        return 0.0, 0.0
    a = ytilde @ ytilde.T
    a[np.arange(n), np.arange(n)] += 1.0
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - G is PSD
        raise NotPositiveDefinite(str(exc)) from None
    log_det_gram = float(2.0 * np.log(np.diag(lower)).sum())
    z = solve_triangular(lower, np.ones(n), lower=True, check_finite=False)
    quad = float(z @ z)  # = 1^T (I + G)^{-1} 1
    log_sf = float(np.log((kappa0 + quad) / (n + kappa0)))
    return log_sf, log_det_gram


def cluster_log_marginal(c: ClusterView, prior: NiwPrior, form: str = "auto") -> float:
    """Log marginal likelihood of a cluster under the NIW prior.

    Parameters
    ----------
    c : ClusterView
    prior : NiwPrior
    form : {"auto", "primal", "dual"}
        "primal" factorizes the p x p posterior scale matrix, "dual"
        works in n x n space (scalar Lambda0 only).  "auto" picks the
        dual route when Lambda0 is scalar and p > 4 * n.

    Returns
    -------
    float
        log of the integral of the Gaussian likelihood of the rows
        against the prior.  An empty cluster integrates an empty
        product, so the result is 0.

    Raises
    ------
    NotPositiveDefinite
        If the inner p x p matrix is numerically singular.
    """
    if c.n == 0:
        return 0.0
    if c.p != prior.p:
        raise ValueError(f"cluster width {c.p} does not match prior p={prior.p}")
    if form not in ("auto", "primal", "dual"):
        raise ValueError(f"unknown form {form!r}")
    if form == "dual" or (
        form == "auto" and prior.scalar_lambda0 and c.p > _DUAL_RATIO * c.n
    ):
        return cluster_log_marginal_dual(c, prior)

    n, p = c.n, c.p
    d = c.mean - prior.mu0
    inner = prior.lambda0_matrix() + c.scatter
    inner += (n * prior.kappa0 / (n + prior.kappa0)) * np.outer(d, d)
    log_det_inner = cholesky(inner).log_det()
    return (
        -n * p / 2.0 * LOG_PI
        + _gamma_ratio(p, prior.nu0, n)
        + p / 2.0 * float(np.log(prior.kappa0 / (prior.kappa0 + n)))
        + prior.nu0 / 2.0 * prior.lambda0_log_det
        - (prior.nu0 + n) / 2.0 * log_det_inner
    )


def cluster_log_marginal_dual(c: ClusterView, prior: NiwPrior) -> float:
    """Same value as :func:`cluster_log_marginal`, computed in n x n space.

    Requires a scalar Lambda0.  Cost O(p n^2 + n^3), independent of p^3,
    which is what makes dimension sweeps up to p = 1e5 feasible.
    """
    if c.n == 0:
        return 0.0
    if c.p != prior.p:
        raise ValueError(f"cluster width {c.p} does not match prior p={prior.p}")
    if not prior.scalar_lambda0:
        raise DomainError("dual form requires a scalar lambda0")
    n, p = c.n, c.p
    ytilde = transform_data(c.rows, prior)
    log_sf, log_det_gram = _dual_det_parts(ytilde, prior.kappa0)
    return (
        -n * p / 2.0 * LOG_PI
        + _gamma_ratio(p, prior.nu0, n)
        + p / 2.0 * float(np.log(prior.kappa0 / (prior.kappa0 + n)))
        - n / 2.0 * prior.lambda0_log_det
        - (prior.nu0 + n) / 2.0 * (log_sf + log_det_gram)
    )


def row_standardize(y) -> NDArray[np.float64]:
    """Center and scale each row to mean 0 and sample variance 1.

    The variance divisor is p - 1, so every output row satisfies
    sum_j y_ij^2 = p - 1.

    Raises
    ------
    ConstantRow
        If some row has zero sample variance.
    DomainError
        If p < 2 (sample variance needs two entries).
    """
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[None, :]
    if y.shape[1] < 2:
        raise DomainError("row standardization needs p >= 2")
    centered = y - y.mean(axis=1, keepdims=True)
    sd = np.sqrt((centered**2).sum(axis=1) / (y.shape[1] - 1))
    bad = np.flatnonzero(~(sd > 0))
    if bad.size:
        raise ConstantRow(f"row {bad[0]} has zero sample variance")
    return centered / sd[:, None]
