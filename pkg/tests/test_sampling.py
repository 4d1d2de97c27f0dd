import numpy as np
import pytest

from splinerf.sampling import (
    RngStream,
    SamplerError,
    sample_fourier_frequencies,
    sample_fourier_tau,
    sample_fourier_taus,
    sample_nn_params,
    sample_sphere,
    sphere_moment,
    tau_density,
    tau_rejection_stats,
)


def test_sphere_determinism():
    s = RngStream(seed=42, draw_index=0)
    a = sample_sphere(2, s).direction
    b = sample_sphere(2, s).direction
    assert np.array_equal(a, b)
    c = sample_sphere(2, s.at(1)).direction
    assert not np.array_equal(a, c)


def test_sphere_unit_norm():
    for d in (1, 2, 5, 8):
        v = sample_sphere(d, RngStream(3, d)).direction
        assert abs(np.linalg.norm(v) - 1.0) < 1e-12


def test_sphere_d1_is_two_points():
    dirs = sample_nn_params(1, 1.0, 1_000_000, RngStream(11)).directions.ravel()
    assert set(np.unique(dirs)) == {-1.0, 1.0}
    frac = np.mean(dirs == 1.0)
    stderr = 0.5 / np.sqrt(dirs.size)
    assert abs(frac - 0.5) < 3 * stderr


def test_sphere_quadratic_moment_d3():
    # E[(w . e1)^2] = 1/3 on the 2-sphere
    dirs = sample_nn_params(3, 1.0, 1_000_000, RngStream(12)).directions
    w1sq = dirs[:, 0] ** 2
    stderr = w1sq.std(ddof=1) / np.sqrt(w1sq.size)
    assert abs(w1sq.mean() - 1.0 / 3.0) < 3 * stderr


def test_sphere_invalid_dimension():
    with pytest.raises(ValueError):
        sample_sphere(0, RngStream(0))


def test_nn_params_bias_moments():
    biases = sample_nn_params(1, 1.0, 100_000, RngStream(13)).biases
    stderr = biases.std(ddof=1) / np.sqrt(biases.size)
    assert abs(biases.mean()) < 3 * stderr
    assert abs(biases.var() - 1.0 / 3.0) < 0.01


def test_nn_params_bias_support():
    params = sample_nn_params(2, 2.0, 10, RngStream(14))
    assert np.all(np.abs(params.biases) <= 2.0)
    assert np.allclose(np.linalg.norm(params.directions, axis=1), 1.0, atol=1e-12)


def test_nn_params_invalid_radius():
    with pytest.raises(ValueError):
        sample_nn_params(2, 0.0, 5, RngStream(0))
    with pytest.raises(ValueError):
        sample_nn_params(2, -1.0, 5, RngStream(0))


def test_tau_scalar_deterministic():
    assert sample_fourier_tau(1.0, RngStream(9)) == sample_fourier_tau(1.0, RngStream(9))
    with pytest.raises(ValueError):
        sample_fourier_tau(-1.0, RngStream(9))


def test_tau_sign_symmetry():
    taus = sample_fourier_taus(1.0, 1_000_000, RngStream(15))
    stderr = 1.0 / np.sqrt(taus.size)
    assert abs(np.mean(np.sign(taus))) < 4 * stderr


def test_tau_acceptance_rate_quick():
    _, n_acc = tau_rejection_stats(2.0, 200_000, RngStream(16))
    assert abs(n_acc / 200_000 - 0.5) < 0.02


def test_rejection_envelope_bound():
    # p / (M q) <= 1 on a fine grid of [-100R, 100R]
    for R in (0.5, 1.0, 2.0):
        tau = np.linspace(-100 * R, 100 * R, 1_000_001)
        q = (R / np.pi) / (1.0 + (R * tau) ** 2)
        ratio = tau_density(tau, R) / (2.0 * q)
        assert ratio.max() <= 1.0 + 1e-12


def test_tau_density_normalization_and_origin():
    from oracles import adaptive_gauss_legendre

    for R in (0.5, 1.0, 2.0):
        assert abs(tau_density(0.0, R) - R / np.pi) < 1e-14
        mass = adaptive_gauss_legendre(lambda t: tau_density(t, R), -2000.0 * R, 2000.0 * R,
                                       tol=1e-9)
        assert abs(mass - 1.0) < 1e-3  # remaining mass sits in the 1/t^2 tails


def test_fourier_frequency_factorization():
    freqs = sample_fourier_frequencies(3, 1.5, 200, RngStream(17))
    assert np.allclose(np.linalg.norm(freqs.omegas, axis=1), np.abs(freqs.taus), atol=1e-12)


def test_fourier_frequency_d1_symmetry():
    freqs = sample_fourier_frequencies(1, 1.0, 200_000, RngStream(18))
    omg = freqs.omegas.ravel()
    stderr = 1.0 / np.sqrt(omg.size)
    assert abs(np.mean(np.sign(omg))) < 4 * stderr


def test_fourier_frequency_empty():
    freqs = sample_fourier_frequencies(4, 1.0, 0, RngStream(19))
    assert len(freqs) == 0
    assert freqs.omegas.shape == (0, 4)


def test_sphere_moment_closed_values():
    e1 = np.zeros(5); e1[0] = 1.0
    assert abs(sphere_moment("even_power", e1, 2) - 1.0 / 5.0) < 1e-14
    e1 = np.zeros(3); e1[0] = 1.0
    assert abs(sphere_moment("abs_odd", e1, 0) - 0.5) < 1e-14
    e1 = np.zeros(4); e1[0] = 1.0
    assert abs(sphere_moment("bilinear", e1, t=e1) - 0.25) < 1e-14


def test_sphere_moment_abs_odd_mc_oracle():
    from oracles import mc_sphere_projection_moment

    e1 = np.zeros(3); e1[0] = 1.0
    rng = np.random.default_rng(100)
    mean, se = mc_sphere_projection_moment(lambda w: np.abs(w[:, 0]), 3, 10_000_000, rng)
    assert abs(sphere_moment("abs_odd", e1, 0) - mean) < 4 * se


def test_sphere_moment_errors():
    with pytest.raises(ValueError):
        sphere_moment("bilinear", [1.0, 0.0])
    with pytest.raises(ValueError):
        sphere_moment("no_such_kind", [1.0])
    with pytest.raises(ValueError):
        sphere_moment("even_power", [1.0, 0.0], 3)


def test_sphere_moments_match_monte_carlo():
    # Every closed form vs a shared 1e7-draw Monte Carlo, 20 random configs.
    rng = np.random.default_rng(1234)
    n_samples = 10_000_000
    chunk = 1_000_000
    for _ in range(20):
        d = int(rng.integers(1, 9))
        alpha = int(rng.integers(0, 4))
        z = rng.normal(size=d)
        t = rng.normal(size=d)
        sums = np.zeros(5)
        sums_sq = np.zeros(5)
        done = 0
        while done < n_samples:
            k = min(chunk, n_samples - done)
            g = rng.standard_normal((k, d))
            w = g / np.linalg.norm(g, axis=1, keepdims=True)
            wz = w @ z
            wt = w @ t
            stats = np.stack([
                np.abs(wz) ** (2 * alpha + 1),
                wz ** (2 * alpha),
                wz ** 2,
                wz * wt,
                (wz * wt) ** 2,
            ])
            sums += stats.sum(axis=1)
            sums_sq += (stats ** 2).sum(axis=1)
            done += k
        means = sums / n_samples
        ses = np.sqrt(np.maximum(sums_sq / n_samples - means ** 2, 0.0) / n_samples)
        closed = np.array([
            sphere_moment("abs_odd", z, alpha),
            sphere_moment("even_power", z, 2 * alpha),
            sphere_moment("quadratic", z),
            sphere_moment("bilinear", z, t=t),
            sphere_moment("bilinear_squared", z, t=t),
        ])
        assert np.all(np.abs(closed - means) < 4 * ses + 1e-12), (d, alpha)


def test_stream_validation():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(0, -2)
    assert isinstance(SamplerError("x"), RuntimeError)
