"""Leverage scores of the two random-feature families for d = 1, alpha = 0, R = 1.

A feature g scores <g, (S + lam I)^{-1} g> in L2 of the uniform measure on
[-1, 1], where S is the integral operator of the step-activation kernel,
S f(x) = 1/4 int f - 1/8 int |x - y| f(y) dy.  Closed forms come from solving
g'' = lam f'' - f/4 with the boundary relations tying f to g; everything here
is cross-validated against a dense discretization of S (``oracle_leverage``)
and against the grid estimator of ``empirical_leverage``.

General radii are handled by callers rescaling inputs to [-1, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .kernels import KernelSpec, kernel_matrix

__all__ = [
    "nn_leverage",
    "fourier_leverage",
    "GridLeverageEstimator",
    "empirical_leverage",
    "GridFunction",
    "solve_regularized_operator",
    "oracle_leverage",
    "LeverageProfile",
    "nn_profile",
    "fourier_profiles",
]


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not lam > 0:
        raise ValueError(f"regularization lambda must be positive, got {lam}")
    return lam


def nn_leverage(b, lam: float):
    """Leverage score of the step feature 1_{x > b}, |b| <= 1.

    Exp-scaled evaluation: with c = 1/(2 sqrt(lam)) the raw solution involves
    cosh(c(1-b)) ~ exp(2c), so the closed form is rewritten in q+ = exp(-c(1-b))
    and q- = exp(-c(1+b)), which keeps every term finite down to lam ~ 1e-12.
    The maximal score grows like 1/(2 sqrt(lam)).
    """
    lam = _check_lambda(lam)
    b = np.asarray(b, dtype=float)
    if np.any(np.abs(b) > 1 + 1e-12):
        raise ValueError("bias must lie in [-1, 1] (R = 1 normalization)")
    c = 1.0 / (2.0 * np.sqrt(lam))
    qp = np.exp(-c * (1.0 - b))
    qm = np.exp(-c * (1.0 + b))
    p2 = qp * qm
    theta = 1.0 + p2
    delta = c * (1.0 - p2) + theta
    singular = (2.0 * c * qm + c * (c + 1.0) - 2.0 * c * c * qm * qm / theta) / delta \
        + c / theta
    regular = (-2.0 * c * qp
               + (2.0 * c + c * (c - 1.0) * qp) * ((1.0 - p2) - qp + qm) / delta
               + c * qp * (theta - qp - qm) / theta)
    score = 0.5 * (singular + regular)
    return float(score) if score.ndim == 0 else score


def _sinc2(omega):
    # sin(2w) / (2w) with a 4th-order series below the cutoff.
    omega = np.asarray(omega, dtype=float)
    small = np.abs(omega) < 1e-4
    safe = np.where(small, 1.0, omega)
    out = np.where(small,
                   1.0 - (2.0 * omega) ** 2 / 6.0 + (2.0 * omega) ** 4 / 120.0,
                   np.sin(2.0 * safe) / (2.0 * safe))
    return out


def fourier_leverage(omega, lam: float):
    """Leverage scores (cos, sin) of the features cos(omega x), sin(omega x).

    Hyperbolic ratios are folded into tanh(c) so nothing overflows for small
    lam; both scores tend to 1/(2 lam) as omega grows.
    """
    lam = _check_lambda(lam)
    omega = np.asarray(omega, dtype=float)
    c = 1.0 / (2.0 * np.sqrt(lam))
    t = np.tanh(c)
    sl = np.sqrt(lam)
    r = omega ** 2 / (lam * omega ** 2 + 0.25)
    ratio = _sinc2(omega)
    q = 4.0 * lam * omega ** 2 + 1.0
    cos_w, sin_w = np.cos(omega), np.sin(omega)
    a_term = (16.0 * lam * (cos_w - omega * sin_w)
              * (c * cos_w * t + omega * sin_w) / (q ** 2 * (sl * t + 2.0 * lam)))
    b_term = (16.0 * lam * omega * cos_w
              * (c * sin_w - omega * cos_w * t) / (q ** 2 * sl))
    cos_score = 0.5 * (r * (1.0 + ratio) + a_term)
    sin_score = 0.5 * (r * (1.0 - ratio) + b_term)
    if cos_score.ndim == 0:
        return float(cos_score), float(sin_score)
    return cos_score, sin_score


class GridLeverageEstimator:
    """Grid estimator phi^T (K + n lam I)^{-1} phi, with K factorized once."""

    def __init__(self, grid, lam: float, spec: KernelSpec | None = None):
        lam = _check_lambda(lam)
        self.grid = np.asarray(grid, dtype=float).ravel()
        n = self.grid.size
        if n < 2:
            raise ValueError("grid estimator needs at least two points")
        self.lam = lam
        self.spec = spec if spec is not None else KernelSpec(0, 1, 1.0)
        K = kernel_matrix(self.grid[:, None], self.grid[:, None], self.spec)
        K = 0.5 * (K + K.T)
        self._factor = sla.cho_factor(K + n * lam * np.eye(n), lower=True,
                                      check_finite=False)

    def score_values(self, phi) -> float:
        phi = np.asarray(phi, dtype=float).ravel()
        if phi.size != self.grid.size:
            raise ValueError("feature values must match the grid size")
        return float(phi @ sla.cho_solve(self._factor, phi, check_finite=False))

    def score(self, feature, param) -> float:
        return self.score_values(feature(self.grid, param))


def empirical_leverage(feature, param, lam: float, grid, spec: KernelSpec | None = None) -> float:
    """One-shot grid estimate of the leverage score of feature(x, param)."""
    return GridLeverageEstimator(grid, lam, spec).score(feature, param)


@dataclass(frozen=True)
class GridFunction:
    """Function sampled on a grid; calling it interpolates linearly."""

    x: np.ndarray
    values: np.ndarray

    def __call__(self, t):
        return np.interp(t, self.x, self.values)


def solve_regularized_operator(g, lam: float, n: int = 4096) -> GridFunction:
    """Solve (S + lam I) f = g on [-1, 1] by trapezoid discretization of S.

    Independent of the closed forms above: S is materialized as the dense
    matrix K_ij w_j / 2 and the system solved directly.
    """
    lam = _check_lambda(lam)
    if n < 16:
        raise ValueError(f"operator grid needs n >= 16 points, got {n}")
    x = np.linspace(-1.0, 1.0, n)
    w = np.full(n, 2.0 / (n - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    K = 0.5 - 0.25 * np.abs(x[:, None] - x[None, :])
    M = K * (w[None, :] / 2.0) + lam * np.eye(n)
    gv = np.asarray(g(x), dtype=float)
    f = sla.solve(M, gv, check_finite=False)
    return GridFunction(x=x, values=f)


def oracle_leverage(g, lam: float, n: int = 4096) -> float:
    """Leverage score <g, (S + lam I)^{-1} g> / |measure| via the operator solve."""
    sol = solve_regularized_operator(g, lam, n)
    w = np.full(n, 2.0 / (n - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    gv = np.asarray(g(sol.x), dtype=float)
    return float(0.5 * np.sum(w * gv * sol.values))


@dataclass(frozen=True)
class LeverageProfile:
    """Analytic and empirical scores over a parameter grid at fixed lambda."""

    method: str
    params: np.ndarray
    analytic: np.ndarray
    empirical: np.ndarray
    lam: float
    n: int


def nn_profile(lam: float, n: int = 4096, n_params: int = 201,
               estimator: GridLeverageEstimator | None = None) -> LeverageProfile:
    """NN leverage profile over b in [-1, 1]."""
    if estimator is None:
        estimator = GridLeverageEstimator(np.linspace(-1, 1, n), lam)
    params = np.linspace(-1.0, 1.0, n_params)
    analytic = nn_leverage(params, lam)
    step = lambda x, b: (x > b).astype(float)
    empirical = np.array([estimator.score(step, b) for b in params])
    return LeverageProfile(method="nn", params=params, analytic=analytic,
                           empirical=empirical, lam=lam, n=estimator.grid.size)


def fourier_profiles(lam: float, n: int = 4096, n_params: int = 201,
                     omega_max: float = 50.0,
                     estimator: GridLeverageEstimator | None = None):
    """Fourier cos/sin leverage profiles over omega in [0, omega_max]."""
    if estimator is None:
        estimator = GridLeverageEstimator(np.linspace(-1, 1, n), lam)
    params = np.linspace(0.0, omega_max, n_params)
    cos_scores, sin_scores = fourier_leverage(params, lam)
    emp_cos = np.array([estimator.score(lambda x, o: np.cos(o * x), o) for o in params])
    emp_sin = np.array([estimator.score(lambda x, o: np.sin(o * x), o) for o in params])
    ngrid = estimator.grid.size
    return (
        LeverageProfile("fourier-cos", params, cos_scores, emp_cos, lam, ngrid),
        LeverageProfile("fourier-sin", params, sin_scores, emp_sin, lam, ngrid),
    )
