"""Log-gamma machinery for marginal-likelihood ratios.

The multivariate gamma function enters every cluster marginal as a
ratio Gamma_p((nu0 + l) / 2) / Gamma_p((nu0 + m) / 2).  Forming either
side overflows long before the dimensions of interest, but the ratio
telescopes into a short product of univariate gamma ratios whose length
depends only on l - m, not on p.  Everything here works with that
product in log space.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

__all__ = [
    "GammaRatioSpec",
    "log_gamma",
    "log_multigamma",
    "log_multigamma_ratio",
    "gamma_term_log",
    "gamma_term_log_limit",
]

LOG_PI = float(np.log(np.pi))

# Arguments this small never occur for the priors of interest
# (every argument is at least (nu0 + 1 - p) / 2 with nu0 >= p), so they
# are rejected instead of silently extending the domain.
_MIN_ARG = 0.5


def log_gamma(x: float) -> float:
    """log Gamma(x) for x >= 0.5.

    Raises
    ------
    DomainError
        If x < 0.5.
    """
    if not x >= _MIN_ARG:
        raise DomainError(f"log_gamma argument {x} below {_MIN_ARG}")
    return float(gammaln(x))


def _log_gamma_vec(x: np.ndarray) -> np.ndarray:
    if x.size and not np.min(x) >= _MIN_ARG:
        raise DomainError(f"log_gamma argument {np.min(x)} below {_MIN_ARG}")
    return gammaln(x)


def log_multigamma(p: int, a: float) -> float:
    """log Gamma_p(a) = p(p-1)/4 * log pi + sum_j log Gamma(a - (j-1)/2).

    Parameters
    ----------
    p : int
        Dimension, p >= 1.
    a : float
        Argument; must satisfy a > (p - 1) / 2.

    Raises
    ------
    DomainError
        If a <= (p - 1) / 2 (the function pole region) or the smallest
        shifted argument falls below 0.5.
    """
    if p < 1:
        raise DomainError(f"dimension must be >= 1, got {p}")
    if not a > (p - 1) / 2.0:
        raise DomainError(f"log_multigamma needs a > (p-1)/2, got a={a}, p={p}")
    shifts = a - 0.5 * np.arange(p)
    return float(p * (p - 1) / 4.0 * LOG_PI + _log_gamma_vec(shifts).sum())


@dataclass(frozen=True)
class GammaRatioSpec:
    """Arguments of the ratio Gamma_p((nu0+l)/2) / Gamma_p((nu0+m)/2).

    The product form turns the ratio into l - m univariate gamma ratios;
    its smallest argument is (nu0 + m + 1 - p) / 2, which must stay
    positive for the ratio to be finite.
    """

    p: int
    nu0: float
    l: int
    m: int

    def __post_init__(self):
        if self.p < 1:
            raise DomainError(f"dimension must be >= 1, got {self.p}")
        if self.l < 0 or self.m < 0:
            raise DomainError("l and m must be nonnegative")
        if not self.nu0 > self.p - 1:
            raise DomainError(f"nu0 must exceed p-1, got nu0={self.nu0}, p={self.p}")
        if not self.nu0 + self.m + 1 - self.p > 0:
            raise DomainError(
                "product form needs nu0 + m + 1 - p > 0, got "
                f"nu0={self.nu0}, m={self.m}, p={self.p}"
            )


def log_multigamma_ratio(spec: GammaRatioSpec) -> float:
    """log[Gamma_p((nu0+l)/2) / Gamma_p((nu0+m)/2)] without forming Gamma_p.

    Computed as sum_{j=m+1..l} [log Gamma((nu0+j)/2) - log Gamma((nu0+j-p)/2)],
    a sum whose length is l - m regardless of p.
    """
    if spec.l < spec.m:
        raise DomainError(f"need l >= m, got l={spec.l}, m={spec.m}")
    if spec.l == spec.m:
        return 0.0
    j = np.arange(spec.m + 1, spec.l + 1, dtype=float)
    hi = _log_gamma_vec((spec.nu0 + j) / 2.0)
    lo = _log_gamma_vec((spec.nu0 + j - spec.p) / 2.0)
    return float((hi - lo).sum())


def gamma_term_log(p: int, nu0: float, n1: int, n2: int) -> float:
    """Exact log of the four-Gamma_p factor of the merge ratio.

    The factor Gamma_p((nu0+n1)/2) Gamma_p((nu0+n2)/2) /
    [Gamma_p((nu0+n1+n2)/2) Gamma_p(nu0/2)] reduces to a product over
    j = 1..n2 of two univariate gamma ratios, i.e. a sum of 2*n2
    log-gamma differences.

    Either count may be 0, giving the empty product (0 in log space).
    """
    if n1 < 0 or n2 < 0:
        raise DomainError("cluster sizes must be nonnegative")
    if n1 == 0 or n2 == 0:
        return 0.0
    if not nu0 + 1 - p > 0:
        raise DomainError(f"need nu0 + 1 - p > 0, got nu0={nu0}, p={p}")
    j = np.arange(1, n2 + 1, dtype=float)
    up = _log_gamma_vec((nu0 + j) / 2.0) - _log_gamma_vec((nu0 + j - p) / 2.0)
    down = _log_gamma_vec((nu0 + j + n1 - p) / 2.0) - _log_gamma_vec(
        (nu0 + j + n1) / 2.0
    )
    return float((up + down).sum())


def gamma_term_log_limit(c2: float, n1: int, n2: int) -> float:
    """p -> infinity limit of gamma_term_log under nu0 = c2 * p.

    Equals (n1 * n2 / 2) * log(1 - 1/c2).  The limit degenerates to
    -infinity as c2 -> 1, hence the strict requirement c2 > 1.
    """
    if n1 < 0 or n2 < 0:
        raise DomainError("cluster sizes must be nonnegative")
    if not c2 > 1.0:
        raise DomainError(f"limit requires c2 > 1, got {c2}")
    if n1 == 0 or n2 == 0:
        return 0.0
    return float(n1 * n2 / 2.0 * np.log1p(-1.0 / c2))
