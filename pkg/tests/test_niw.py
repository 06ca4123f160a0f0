"""Cluster marginal likelihood: primal and dual forms, priors, transforms."""

import time
from math import lgamma, log, pi

import numpy as np
import pytest

from niwclust.errors import ConstantRow, DomainError, NotPositiveDefinite
from niwclust.niw import (
    ClusterView,
    NiwPrior,
    RobustPriorSpec,
    cluster_log_marginal,
    cluster_log_marginal_dual,
    robust_prior,
    row_standardize,
    transform_data,
)
import oracles


def random_prior(rng, p, scalar=False):
    nu0 = p + 0.5 + 6.0 * rng.random()
    kappa0 = float(np.exp(rng.normal()))
    mu0 = rng.standard_normal(p)
    if scalar:
        lam0 = float(np.exp(rng.normal()))
    else:
        b = rng.standard_normal((p, p))
        lam0 = b @ b.T + (0.5 + p / 4.0) * np.eye(p)
    return NiwPrior(mu0, kappa0, nu0, lam0)


# ------------------------------------------------------ pinned values

def test_single_point_matches_student_t_closed_form():
    # df nu0-p+1 = 3, scale^2 = 2/3, evaluated at the prior mean
    prior = NiwPrior(np.zeros(1), 1.0, 3.0, 1.0)
    mine = cluster_log_marginal(ClusterView([[0.0]]), prior)
    scale2 = 2.0 / 3.0
    exact = lgamma(2.0) - lgamma(1.5) - 0.5 * log(3.0 * pi * scale2)
    assert abs(mine - exact) < 1e-12
    assert mine == pytest.approx(-0.79815, abs=1e-5)


def test_p1_marginal_matches_quadrature():
    prior = NiwPrior(np.full(1, 0.2), 2.0, 4.5, 1.7)
    ys = [[0.3], [-1.1]]
    mine = cluster_log_marginal(ClusterView(ys), prior)
    ref = oracles.niw_marginal_quad_p1([0.3, -1.1], 0.2, 2.0, 4.5, 1.7)
    assert abs(mine - ref) / abs(ref) < 1e-6


def test_p2_marginal_matches_frozen_quadrature():
    prior = NiwPrior(np.array(oracles.QUAD_P2_MU0), oracles.QUAD_P2_KAPPA0,
                     oracles.QUAD_P2_NU0, np.array(oracles.QUAD_P2_LAMBDA0))
    mine = cluster_log_marginal(ClusterView([oracles.QUAD_P2_Y]), prior)
    assert abs(mine - oracles.QUAD_P2_LOG) / abs(oracles.QUAD_P2_LOG) < 1e-6


def test_marginal_matches_predictive_chain_small_p():
    rng = np.random.default_rng(7)
    for p in (1, 2, 3):
        for n in (1, 2, 5, 9):
            prior = random_prior(rng, p, scalar=bool(n % 2))
            ys = rng.standard_normal((n, p)) + rng.normal(scale=2.0)
            mine = cluster_log_marginal(ClusterView(ys), prior)
            ref = oracles.t_chain_log_marginal(ys, prior.mu0, prior.kappa0,
                                               prior.nu0, prior.lambda0)
            assert abs(mine - ref) / max(1.0, abs(ref)) < 1e-9, (p, n)


# ------------------------------------------------- primal/dual bridge

def test_primal_and_dual_agree():
    rng = np.random.default_rng(8)
    for _ in range(40):
        n = int(rng.integers(1, 13))
        p = int(rng.integers(2, 60))
        # the dual route factors |I_n + G| and needs Lambda0 = lam * I
        prior = random_prior(rng, p, scalar=True)
        ys = rng.standard_normal((n, p)) * (0.3 + rng.random())
        c = ClusterView(ys)
        primal = cluster_log_marginal(c, prior, form="primal")
        dual = cluster_log_marginal_dual(ClusterView(ys), prior)
        assert abs(primal - dual) < 1e-8 * max(1.0, abs(primal))


def test_dual_rejects_matrix_scale():
    rng = np.random.default_rng(14)
    prior = random_prior(rng, 4, scalar=False)
    with pytest.raises(DomainError):
        cluster_log_marginal_dual(ClusterView(np.ones((2, 4))), prior)


def test_auto_form_picks_dual_for_wide_data():
    rng = np.random.default_rng(9)
    ys = rng.standard_normal((3, 500))
    prior = robust_prior(500, RobustPriorSpec(1.0, 2.0))
    auto = cluster_log_marginal(ClusterView(ys), prior)
    dual = cluster_log_marginal_dual(ClusterView(ys), prior)
    assert auto == dual


def test_dual_is_fast_and_finite_at_p_10000():
    rng = np.random.default_rng(10)
    ys = row_standardize(rng.standard_normal((2, 10 ** 4)))
    prior = robust_prior(10 ** 4, RobustPriorSpec(1.0, 2.0))
    t0 = time.time()
    val = cluster_log_marginal_dual(ClusterView(ys), prior)
    assert time.time() - t0 < 0.1
    assert np.isfinite(val)


def test_empty_cluster_marginal_is_zero():
    prior = NiwPrior(np.zeros(3), 1.0, 5.0, 1.0)
    empty = ClusterView(np.empty((0, 3)))
    assert cluster_log_marginal(empty, prior) == 0.0
    assert cluster_log_marginal_dual(ClusterView(np.empty((0, 3))), prior) == 0.0


def test_unknown_form_rejected():
    prior = NiwPrior(np.zeros(2), 1.0, 4.0, 1.0)
    with pytest.raises(ValueError):
        cluster_log_marginal(ClusterView([[0.0, 1.0]]), prior, form="banana")


# ------------------------------------------------------------ priors

def test_robust_prior_fields():
    prior = robust_prior(400, RobustPriorSpec(1.5, 3.0))
    assert prior.kappa0 == pytest.approx(1.5 * 20.0)
    assert prior.nu0 == pytest.approx(1200.0)
    assert prior.lambda0 == pytest.approx(160000.0)
    assert prior.scalar_lambda0
    assert np.all(prior.mu0 == 0.0)
    assert prior.lambda0_log_det == pytest.approx(400 * np.log(160000.0))


def test_robust_prior_spec_validation():
    with pytest.raises(DomainError):
        RobustPriorSpec(0.0, 2.0)
    with pytest.raises(DomainError):
        RobustPriorSpec(1.0, 1.0)  # nu0 would not dominate p
    with pytest.raises(DomainError):
        robust_prior(1, RobustPriorSpec(1.0, 2.0))


def test_prior_validation():
    with pytest.raises(DomainError):
        NiwPrior(np.zeros(3), 0.0, 5.0, 1.0)
    with pytest.raises(DomainError):
        NiwPrior(np.zeros(3), 1.0, 1.5, 1.0)  # nu0 <= p-1
    with pytest.raises(DomainError):
        NiwPrior(np.zeros(3), 1.0, 5.0, -2.0)
    with pytest.raises(DomainError):
        NiwPrior(np.zeros(3), 1.0, 5.0, np.eye(2))
    with pytest.raises(NotPositiveDefinite):
        NiwPrior(np.zeros(2), 1.0, 5.0, np.array([[1.0, 3.0], [3.0, 1.0]]))


def test_scalar_and_matrix_lambda0_agree():
    rng = np.random.default_rng(11)
    ys = rng.standard_normal((4, 6))
    a = NiwPrior(np.zeros(6), 1.2, 9.0, 2.5)
    b = NiwPrior(np.zeros(6), 1.2, 9.0, 2.5 * np.eye(6))
    va = cluster_log_marginal(ClusterView(ys), a)
    vb = cluster_log_marginal(ClusterView(ys), b)
    assert va == pytest.approx(vb, rel=1e-12)
    assert np.allclose(transform_data(ys, a), transform_data(ys, b))


def test_transform_data_whitens():
    rng = np.random.default_rng(12)
    p = 5
    prior = random_prior(rng, p, scalar=False)
    ys = rng.standard_normal((7, p))
    yt = transform_data(ys, prior)
    lam = np.asarray(prior.lambda0)
    # undo: yt @ lam^{1/2} + mu0 recovers the rows
    w, v = np.linalg.eigh(lam)
    sqrt = (v * np.sqrt(w)) @ v.T
    assert np.allclose(yt @ sqrt + prior.mu0, ys, rtol=1e-9, atol=1e-9)


# ----------------------------------------------------- standardizing

def test_row_standardize_example():
    out = row_standardize(np.array([[1.0, 2.0, 3.0]]))
    assert np.allclose(out, [[-1.0, 0.0, 1.0]])


def test_row_standardize_identity_and_idempotence():
    rng = np.random.default_rng(13)
    y = rng.standard_normal((5, 100))
    z = row_standardize(y)
    assert np.allclose((z ** 2).sum(axis=1), 99.0, atol=1e-9)
    assert np.allclose(z.mean(axis=1), 0.0, atol=1e-12)
    assert np.allclose(row_standardize(z), z, atol=1e-12)


def test_row_standardize_rejects_constant_rows():
    with pytest.raises(ConstantRow):
        row_standardize(np.array([[1.0, 1.0, 1.0], [0.0, 1.0, 2.0]]))


def test_cluster_view_caches_consistent():
    rng = np.random.default_rng(14)
    c = ClusterView(rng.standard_normal((6, 4)))
    _ = c.mean, c.scatter, c.gram
    c.check_cache()
