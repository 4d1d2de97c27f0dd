"""Interpolation, ridge regression and the constrained polyharmonic spline solve."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb

import numpy as np
import scipy.linalg as sla

from .features import FeatureEnsemble, features
from .kernels import KernelSpec, distance_kernel_matrix, kernel_matrix

__all__ = [
    "IllConditionedError",
    "DegenerateDesignError",
    "FitConfig",
    "RegressionModel",
    "monomial_exponents",
    "monomial_matrix",
    "fit_dual",
    "fit_primal",
    "fit_constrained_spline",
    "predict",
]

# Escalation ladder applied on factorization failure, three decades from 1e-12.
JITTER_LADDER = (1e-12, 1e-9, 1e-6)


class IllConditionedError(np.linalg.LinAlgError):
    """The linear system stayed numerically singular after jitter escalation."""


class DegenerateDesignError(ValueError):
    """The polynomial design matrix does not have full column rank."""


@dataclass(frozen=True)
class FitConfig:
    """Solver mode plus regularization knobs.

    mode: "interpolate", "ridge" (uses mu) or "constrained_spline".
    jitter is added to the system diagonal before factorization.
    """

    mode: str = "interpolate"
    mu: float = 0.0
    jitter: float = 0.0

    def __post_init__(self):
        if self.mode not in ("interpolate", "ridge", "constrained_spline"):
            raise ValueError(f"unknown fit mode {self.mode!r}")
        if self.mu < 0 or self.jitter < 0:
            raise ValueError("mu and jitter must be non-negative")


@dataclass
class RegressionModel:
    """Fitted model; exactly one of the representations is populated.

    kind "dual": f(x) = sum_i dual_coeffs[i] k(x, x_i)
    kind "primal": f(x) = phi(x) . feature_weights (raw feature row)
    kind "constrained_spline": f(x) = sum_i dual_coeffs[i] E(x - x_i)
                               + monomials(x) . poly_coeffs
    """

    kind: str
    X: np.ndarray
    spec: KernelSpec | None = None
    ensemble: FeatureEnsemble | None = None
    dual_coeffs: np.ndarray | None = None
    poly_coeffs: np.ndarray = field(default_factory=lambda: np.empty(0))
    feature_weights: np.ndarray | None = None
    jitter_used: float = 0.0
    residual: float = 0.0
    mu: float = 0.0


def _solve_spd(K: np.ndarray, y: np.ndarray, base_jitter: float):
    """Cholesky solve with the escalation ladder; returns (coeffs, jitter_used)."""
    n = K.shape[0]
    eye = np.eye(n)
    for extra in (0.0,) + JITTER_LADDER:
        jitter = base_jitter + extra
        try:
            cf = sla.cho_factor(K + jitter * eye, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            continue
        return sla.cho_solve(cf, y, check_finite=False), jitter
    cond = float(np.linalg.cond(K + (base_jitter + JITTER_LADDER[-1]) * eye))
    raise IllConditionedError(
        f"system singular after jitter escalation to {base_jitter + JITTER_LADDER[-1]:g} "
        f"(condition estimate {cond:.3e})")


def _as_points(X, d: int) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] and X.shape[1] != d:
        raise ValueError(f"points have dimension {X.shape[1]}, expected {d}")
    return X.reshape(-1, d) if X.size else X.reshape(0, d)


def fit_dual(X, y, spec: KernelSpec, cfg: FitConfig = FitConfig()) -> RegressionModel:
    """Kernel-space solve: lambda = (K + (n mu + jitter) I)^{-1} y."""
    X = _as_points(X, spec.d)
    y = np.asarray(y, dtype=float).ravel()
    n = X.shape[0]
    if n < 1 or y.size != n:
        raise ValueError("need n >= 1 points with matching targets")
    K = kernel_matrix(X, X, spec)
    K = 0.5 * (K + K.T)
    ridge = n * cfg.mu if cfg.mode == "ridge" else 0.0
    coeffs, jitter_used = _solve_spd(K + ridge * np.eye(n), y, cfg.jitter)
    residual = float(np.max(np.abs(K @ coeffs - y)))
    return RegressionModel(kind="dual", X=X, spec=spec, dual_coeffs=coeffs,
                           jitter_used=jitter_used, residual=residual, mu=cfg.mu)


def fit_primal(X, y, ensemble: FeatureEnsemble, cfg: FitConfig = FitConfig()) -> RegressionModel:
    """Feature-space solve returning per-feature weights.

    The weights are eta = scaling * F^T lambda with lambda solving the n x n
    system on K_hat, so predictions coincide with a dual solve on the
    approximate kernel.
    """
    X = _as_points(X, ensemble.spec.d)
    y = np.asarray(y, dtype=float).ravel()
    n = X.shape[0]
    if n < 1 or y.size != n:
        raise ValueError("need n >= 1 points with matching targets")
    F = features(X, ensemble)
    K_hat = F.scaling * (F.values @ F.values.T)
    K_hat = 0.5 * (K_hat + K_hat.T)
    ridge = n * cfg.mu if cfg.mode == "ridge" else 0.0
    coeffs, jitter_used = _solve_spd(K_hat + ridge * np.eye(n), y, cfg.jitter)
    eta = F.scaling * (F.values.T @ coeffs)
    residual = float(np.max(np.abs(F.values @ eta - y)))
    return RegressionModel(kind="primal", X=X, ensemble=ensemble, feature_weights=eta,
                           jitter_used=jitter_used, residual=residual, mu=cfg.mu)


def monomial_exponents(d: int, max_degree: int):
    """Multi-indices of total degree <= max_degree, graded lexicographic order."""
    exps = []
    for degree in range(max_degree + 1):
        for combo in combinations_with_replacement(range(d), degree):
            e = [0] * d
            for idx in combo:
                e[idx] += 1
            exps.append(tuple(e))
    return exps


def monomial_matrix(X, exponents) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    cols = [np.prod(X ** np.asarray(e)[None, :], axis=1) for e in exponents]
    return np.stack(cols, axis=1) if cols else np.empty((X.shape[0], 0))


def fit_constrained_spline(X, y, spec: KernelSpec, cfg: FitConfig = FitConfig(mode="constrained_spline")) -> RegressionModel:
    """Distance-kernel spline with the polynomial constraint Phi^T lambda = 0.

    Solves the saddle system [[K + n mu I, Phi], [Phi^T, 0]] [lambda; nu] = [y; 0]
    where K holds only the conditionally positive distance kernel.
    """
    X = _as_points(X, spec.d)
    y = np.asarray(y, dtype=float).ravel()
    n = X.shape[0]
    n_poly = comb(spec.d + spec.alpha, spec.alpha)
    if n < n_poly:
        raise DegenerateDesignError(
            f"need at least {n_poly} points to pin the degree-{spec.alpha} polynomial block")
    if y.size != n:
        raise ValueError("targets must match the number of points")
    exps = monomial_exponents(spec.d, spec.alpha)
    Phi = monomial_matrix(X, exps)
    if np.linalg.matrix_rank(Phi) < n_poly:
        raise DegenerateDesignError("monomial design matrix is rank deficient")
    K = distance_kernel_matrix(X, X, spec)
    K = 0.5 * (K + K.T)
    ridge = n * cfg.mu
    A = np.zeros((n + n_poly, n + n_poly))
    A[:n, :n] = K + (ridge + cfg.jitter) * np.eye(n)
    A[:n, n:] = Phi
    A[n:, :n] = Phi.T
    rhs = np.concatenate([y, np.zeros(n_poly)])
    try:
        sol = sla.solve(A, rhs, assume_a="sym", check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(f"saddle system singular: {exc}") from exc
    if not np.all(np.isfinite(sol)):
        raise IllConditionedError("saddle system produced non-finite coefficients")
    lam, nu = sol[:n], sol[n:]
    residual = float(np.max(np.abs(K @ lam + Phi @ nu - y)))
    return RegressionModel(kind="constrained_spline", X=X, spec=spec, dual_coeffs=lam,
                           poly_coeffs=nu, jitter_used=cfg.jitter, residual=residual,
                           mu=cfg.mu)


def predict(model: RegressionModel, Xtest) -> np.ndarray:
    """Evaluate a fitted model at test points."""
    if model.kind == "dual":
        X = _as_points(Xtest, model.spec.d)
        if X.shape[0] == 0:
            return np.empty(0)
        return kernel_matrix(X, model.X, model.spec) @ model.dual_coeffs
    if model.kind == "primal":
        X = _as_points(Xtest, model.ensemble.spec.d)
        if X.shape[0] == 0:
            return np.empty(0)
        return features(X, model.ensemble).values @ model.feature_weights
    if model.kind == "constrained_spline":
        X = _as_points(Xtest, model.spec.d)
        if X.shape[0] == 0:
            return np.empty(0)
        E = distance_kernel_matrix(X, model.X, model.spec)
        Phi = monomial_matrix(X, monomial_exponents(model.spec.d, model.spec.alpha))
        return E @ model.dual_coeffs + Phi @ model.poly_coeffs
    raise ValueError(f"unknown model kind {model.kind!r}")
