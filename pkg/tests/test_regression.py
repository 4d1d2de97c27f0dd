import numpy as np
import pytest
import scipy.linalg as sla

from splinerf.features import approx_kernel, sample_fourier_ensemble, sample_nn_ensemble
from splinerf.kernels import KernelSpec, kernel_matrix
from splinerf.regression import (
    DegenerateDesignError,
    FitConfig,
    fit_constrained_spline,
    fit_dual,
    fit_primal,
    monomial_exponents,
    monomial_matrix,
    predict,
)
from splinerf.sampling import RngStream


def test_single_point_interpolation():
    spec = KernelSpec(0, 1, 1.0)
    model = fit_dual(np.array([[0.0]]), np.array([1.0]), spec)
    assert abs(model.dual_coeffs[0] - 2.0) < 1e-9
    assert abs(predict(model, np.array([[0.0]]))[0] - 1.0) < 1e-9


def test_interpolation_residual_contract():
    rng = np.random.default_rng(0)
    spec = KernelSpec(0, 1, 1.0)
    X = np.linspace(-1, 1, 20)[:, None]
    y = rng.standard_normal(20)
    model = fit_dual(X, y, spec)
    assert np.max(np.abs(predict(model, X) - y)) <= 1e-8 * np.max(np.abs(y))
    assert model.residual <= 1e-8 * np.max(np.abs(y))


def test_ridge_large_mu_shrinks_to_zero():
    rng = np.random.default_rng(1)
    spec = KernelSpec(1, 1, 1.0)
    X = rng.uniform(-1, 1, (15, 1))
    y = rng.standard_normal(15)
    model = fit_dual(X, y, spec, FitConfig(mode="ridge", mu=1e12))
    assert np.linalg.norm(model.dual_coeffs) < 1e-10
    assert np.max(np.abs(predict(model, X))) < 1e-9


@pytest.mark.parametrize("family,alpha,cfg", [
    ("nn", 1, FitConfig(jitter=1e-10)),
    ("fourier", 0, FitConfig(jitter=1e-10)),
    # step features can coincide on two points, so the alpha = 0 nn map is
    # exercised in ridge mode where the system is uniformly well posed
    ("nn", 0, FitConfig(mode="ridge", mu=1e-6)),
    ("fourier", 0, FitConfig(mode="ridge", mu=1e-4)),
])
def test_primal_matches_dual_on_approx_kernel(family, alpha, cfg):
    spec = KernelSpec(alpha, 1, 1.0)
    sampler = sample_nn_ensemble if family == "nn" else sample_fourier_ensemble
    ens = sampler(spec, 64, RngStream(7))
    rng = np.random.default_rng(2)
    n = 12
    X = rng.uniform(-1, 1, (n, 1))
    y = rng.standard_normal(n)
    model = fit_primal(X, y, ens, cfg)
    # oracle: dual Cholesky solve on the approximate kernel with the same terms
    ridge = n * cfg.mu if cfg.mode == "ridge" else 0.0
    K_hat = approx_kernel(X, X, ens)
    K_hat = 0.5 * (K_hat + K_hat.T) + (ridge + model.jitter_used) * np.eye(n)
    lam = sla.cho_solve(sla.cho_factor(K_hat, lower=True), y)
    Xt = rng.uniform(-1, 1, (40, 1))
    dual_preds = approx_kernel(Xt, X, ens) @ lam
    primal_preds = predict(model, Xt)
    scale = np.max(np.abs(dual_preds))
    assert np.max(np.abs(primal_preds - dual_preds)) <= 1e-8 * scale


def test_primal_single_feature():
    spec = KernelSpec(1, 1, 1.0)
    ens = sample_nn_ensemble(spec, 1, RngStream(9))
    X = np.array([[0.6]])
    y = np.array([2.0])
    from splinerf.features import nn_features

    phi = nn_features(X, ens).values[0, 0]
    if phi != 0.0:
        model = fit_primal(X, y, ens)
        assert abs(model.feature_weights[0] - y[0] / phi) < 1e-6


def test_primal_zero_targets():
    spec = KernelSpec(0, 1, 1.0)
    ens = sample_nn_ensemble(spec, 16, RngStream(10))
    X = np.linspace(-0.9, 0.9, 8)[:, None]
    model = fit_primal(X, np.zeros(8), ens)
    assert np.all(model.feature_weights == 0.0)


def test_constrained_polynomial_reproduction():
    rng = np.random.default_rng(3)
    for d, alpha in [(1, 0), (1, 2), (2, 1), (3, 1)]:
        spec = KernelSpec(alpha, d, 1.0)
        exps = monomial_exponents(d, alpha)
        X = rng.uniform(-0.7, 0.7, (25, d))
        coef = rng.standard_normal(len(exps))
        y = monomial_matrix(X, exps) @ coef
        model = fit_constrained_spline(X, y, spec)
        assert model.residual <= 1e-8 * max(np.max(np.abs(y)), 1.0)
        # lambda vanishes up to saddle-system conditioning
        assert np.max(np.abs(model.dual_coeffs)) < 1e-5
        Xfar = rng.uniform(-2.0, 2.0, (5, d))
        assert np.allclose(predict(model, Xfar), monomial_matrix(Xfar, exps) @ coef,
                           atol=1e-7)


def test_constrained_two_points_piecewise_linear():
    spec = KernelSpec(0, 1, 1.0)
    X = np.array([[-0.5], [0.7]])
    y = np.array([1.0, -2.0])
    model = fit_constrained_spline(X, y, spec)
    # explicit 2x2 solve: f linear between the nodes
    for t in np.linspace(-0.5, 0.7, 7):
        frac = (t + 0.5) / 1.2
        expected = (1 - frac) * 1.0 + frac * (-2.0)
        assert abs(predict(model, np.array([[t]]))[0] - expected) < 1e-10


def test_constrained_constraint_satisfied():
    rng = np.random.default_rng(4)
    spec = KernelSpec(1, 2, 1.0)
    X = rng.uniform(-0.7, 0.7, (30, 2))
    y = rng.standard_normal(30)
    model = fit_constrained_spline(X, y, spec)
    Phi = monomial_matrix(X, monomial_exponents(2, 1))
    lam = model.dual_coeffs
    assert np.linalg.norm(Phi.T @ lam) <= 1e-8 * np.linalg.norm(lam) * np.linalg.norm(Phi)


@pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")
def test_constrained_large_mu_is_polynomial_least_squares():
    # mu = 1e8 makes the saddle blocks differ by ~9 orders; scipy warns but
    # the solution still matches the least-squares limit
    rng = np.random.default_rng(5)
    spec = KernelSpec(1, 1, 1.0)
    X = rng.uniform(-1, 1, (40, 1))
    y = rng.standard_normal(40)
    model = fit_constrained_spline(X, y, spec, FitConfig(mode="constrained_spline", mu=1e8))
    exps = monomial_exponents(1, 1)
    Phi = monomial_matrix(X, exps)
    ls_coef, *_ = np.linalg.lstsq(Phi, y, rcond=None)
    preds = predict(model, X)
    assert np.max(np.abs(preds - Phi @ ls_coef)) < 1e-5


def test_constrained_pol_part_irrelevant_under_constraint():
    # adding the kernel's polynomial block to K leaves predictions unchanged
    rng = np.random.default_rng(6)
    spec = KernelSpec(1, 2, 1.0)
    n = 25
    X = rng.uniform(-0.7, 0.7, (n, 2))
    y = rng.standard_normal(n)
    base = fit_constrained_spline(X, y, spec)
    from splinerf.kernels import distance_kernel_matrix

    exps = monomial_exponents(2, 1)
    Phi = monomial_matrix(X, exps)
    K = distance_kernel_matrix(X, X, spec) + kernel_matrix(X, X, spec, kind="pol_only")
    A = np.zeros((n + len(exps), n + len(exps)))
    A[:n, :n] = K
    A[:n, n:] = Phi
    A[n:, :n] = Phi.T
    sol = sla.solve(A, np.concatenate([y, np.zeros(len(exps))]), assume_a="sym")
    Xt = rng.uniform(-0.7, 0.7, (10, 2))
    Kt = distance_kernel_matrix(Xt, X, spec) + kernel_matrix(Xt, X, spec, kind="pol_only")
    alt_preds = Kt @ sol[:n] + monomial_matrix(Xt, exps) @ sol[n:]
    scale = max(np.max(np.abs(alt_preds)), 1.0)
    assert np.max(np.abs(predict(base, Xt) - alt_preds)) <= 1e-8 * scale


def test_constrained_degenerate_design():
    spec = KernelSpec(1, 2, 1.0)
    with pytest.raises(DegenerateDesignError):
        fit_constrained_spline(np.zeros((2, 2)), np.zeros(2), spec)  # n < poly dim
    X = np.array([[0.1, 0.2]] * 5)  # repeated point: monomials rank deficient
    with pytest.raises(DegenerateDesignError):
        fit_constrained_spline(X, np.zeros(5), spec)


def test_predict_trivial_cases():
    spec = KernelSpec(0, 1, 1.0)
    rng = np.random.default_rng(8)
    X = rng.uniform(-1, 1, (6, 1))
    y = rng.standard_normal(6)
    model = fit_dual(X, y, spec)
    assert np.max(np.abs(predict(model, X) - y)) <= 1e-8 * np.max(np.abs(y))
    assert predict(model, np.empty((0, 1))).size == 0


def test_monomial_basis():
    exps = monomial_exponents(2, 2)
    assert len(exps) == 6
    assert exps[0] == (0, 0)
    M = monomial_matrix(np.array([[2.0, 3.0]]), exps)
    assert set(np.round(M.ravel(), 9)) == {1.0, 2.0, 3.0, 4.0, 6.0, 9.0}


def test_fit_config_validation():
    with pytest.raises(ValueError):
        FitConfig(mode="banana")
    with pytest.raises(ValueError):
        FitConfig(mu=-1.0)
