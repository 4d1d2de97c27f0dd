"""Seeded sampling of sphere directions, network parameters and Fourier frequencies.

All samplers are pure functions of their parameters and an :class:`RngStream`;
identical ``(seed, draw_index)`` pairs reproduce identical output regardless of
call order, which keeps parallel Gram/feature assembly reproducible.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "SamplerError",
    "RngStream",
    "derive_seed",
    "SphereSample",
    "NNParams",
    "FourierFrequencies",
    "sample_sphere",
    "sample_nn_params",
    "tau_density",
    "sample_fourier_tau",
    "sample_fourier_taus",
    "tau_rejection_stats",
    "sample_fourier_frequencies",
    "sphere_moment",
]

# Cauchy-envelope rejection bound: p/q = sin^2(Rt) + sin^2(Rt)/(Rt)^2 <= 2.
REJECTION_ENVELOPE = 2.0
_MAX_PROPOSALS = 1_000_000


class SamplerError(RuntimeError):
    """A rejection loop exceeded its proposal budget."""


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream addressed by (seed, draw_index).

    Distinct draw indices are 2**64 Philox blocks apart, so streams at
    different indices never overlap.
    """

    seed: int
    draw_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit natural, got {self.seed}")
        if int(self.draw_index) < 0:
            raise ValueError(f"draw_index must be non-negative, got {self.draw_index}")

    def generator(self) -> np.random.Generator:
        bitgen = np.random.Philox(key=int(self.seed), counter=int(self.draw_index) << 64)
        return np.random.Generator(bitgen)

    def at(self, draw_index: int) -> "RngStream":
        return RngStream(self.seed, draw_index)

    def next(self, step: int = 1) -> "RngStream":
        return RngStream(self.seed, self.draw_index + step)


def derive_seed(seed: int, *parts) -> int:
    """Derive a deterministic 64-bit sub-seed from a seed and a label tuple.

    Used to give every experiment cell (method, m, rep, ...) its own stream.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<Q", int(seed) & (2 ** 64 - 1)))
    for part in parts:
        if isinstance(part, str):
            h.update(b"s"); h.update(part.encode())
        else:
            h.update(b"i"); h.update(struct.pack("<q", int(part)))
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class SphereSample:
    """A single direction drawn uniformly from the unit sphere."""

    direction: np.ndarray


@dataclass(frozen=True)
class NNParams:
    """An ensemble of (direction, bias) pairs: unit rows and biases in [-R, R]."""

    directions: np.ndarray  # (m, d), unit rows
    biases: np.ndarray      # (m,)

    def __len__(self) -> int:
        return self.biases.shape[0]


@dataclass(frozen=True)
class FourierFrequencies:
    """An ensemble of frequencies omega = tau * w with w on the unit sphere."""

    taus: np.ndarray        # (m,)
    directions: np.ndarray  # (m, d), unit rows

    @property
    def omegas(self) -> np.ndarray:
        return self.taus[:, None] * self.directions

    def __len__(self) -> int:
        return self.taus.shape[0]


def _unit_rows(rng: np.random.Generator, m: int, d: int) -> np.ndarray:
    g = rng.standard_normal((m, d))
    norms = np.linalg.norm(g, axis=1)
    # A zero Gaussian vector has probability zero; redraw defensively anyway.
    while np.any(norms < 1e-300):
        bad = norms < 1e-300
        g[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


def sample_sphere(d: int, stream: RngStream) -> SphereSample:
    """Draw one direction uniformly on the unit sphere in R^d."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    rng = stream.generator()
    return SphereSample(direction=_unit_rows(rng, 1, d)[0])


def sample_nn_params(d: int, R: float, m: int, stream: RngStream) -> NNParams:
    """Draw m i.i.d. pairs: direction uniform on the sphere, bias uniform on [-R, R]."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if R <= 0:
        raise ValueError(f"radius must be positive, got {R}")
    if m < 0:
        raise ValueError(f"ensemble size must be non-negative, got {m}")
    rng = stream.generator()
    directions = _unit_rows(rng, m, d)
    biases = rng.uniform(-R, R, size=m)
    return NNParams(directions=directions, biases=biases)


def tau_density(tau, R: float):
    """Frequency magnitude density sin^2(R tau) / (pi R tau^2), R/pi at tau = 0."""
    tau = np.asarray(tau, dtype=float)
    out = np.full(tau.shape, R / np.pi)
    nz = np.abs(tau) >= 1e-8
    out[nz] = np.sin(R * tau[nz]) ** 2 / (np.pi * R * tau[nz] ** 2)
    return out


def _cauchy_density(tau: np.ndarray, R: float) -> np.ndarray:
    # Cauchy proposal with location 0 and scale 1/R.
    return (R / np.pi) / (1.0 + (R * tau) ** 2)


def _rejection_round(R: float, k: int, rng: np.random.Generator):
    proposals = rng.standard_cauchy(k) / R
    accept_prob = tau_density(proposals, R) / (REJECTION_ENVELOPE * _cauchy_density(proposals, R))
    accepted = rng.uniform(size=k) < accept_prob
    return proposals[accepted]


def sample_fourier_tau(R: float, stream: RngStream) -> float:
    """Draw one frequency magnitude by Cauchy rejection sampling."""
    if R <= 0:
        raise ValueError(f"radius must be positive, got {R}")
    rng = stream.generator()
    proposals_used = 0
    while proposals_used < _MAX_PROPOSALS:
        k = min(64, _MAX_PROPOSALS - proposals_used)
        got = _rejection_round(R, k, rng)
        proposals_used += k
        if got.size:
            return float(got[0])
    raise SamplerError(f"rejection sampler exhausted {_MAX_PROPOSALS} proposals")


def sample_fourier_taus(R: float, m: int, stream: RngStream) -> np.ndarray:
    """Draw m frequency magnitudes (vectorised rejection rounds)."""
    if R <= 0:
        raise ValueError(f"radius must be positive, got {R}")
    if m < 0:
        raise ValueError(f"sample count must be non-negative, got {m}")
    rng = stream.generator()
    chunks = []
    have = 0
    proposals_used = 0
    budget = _MAX_PROPOSALS + 8 * m
    while have < m:
        if proposals_used >= budget:
            raise SamplerError(f"rejection sampler exhausted {budget} proposals")
        k = max(int(2.2 * (m - have)), 256)
        k = min(k, budget - proposals_used)
        got = _rejection_round(R, k, rng)
        proposals_used += k
        chunks.append(got)
        have += got.size
    return np.concatenate(chunks)[:m] if chunks else np.empty(0)


def tau_rejection_stats(R: float, n_proposals: int, stream: RngStream):
    """Run exactly n_proposals through the accept/reject step.

    Returns (accepted_samples, n_accepted); the expected acceptance rate is
    1 / REJECTION_ENVELOPE = 0.5.
    """
    if R <= 0:
        raise ValueError(f"radius must be positive, got {R}")
    rng = stream.generator()
    accepted = _rejection_round(R, int(n_proposals), rng)
    return accepted, accepted.size


def sample_fourier_frequencies(d: int, R: float, m: int, stream: RngStream) -> FourierFrequencies:
    """Draw m frequencies omega = tau * w, tau from the sin^2 density, w on the sphere."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if m == 0:
        return FourierFrequencies(taus=np.empty(0), directions=np.empty((0, d)))
    taus = sample_fourier_taus(R, m, stream)
    directions = _unit_rows(stream.next().generator(), m, d)
    return FourierFrequencies(taus=taus, directions=directions)


_MOMENT_KINDS = frozenset(
    {"abs_odd", "even_power", "quadratic", "bilinear", "bilinear_squared"}
)


def sphere_moment(kind: str, z, order: int = 0, t=None) -> float:
    """Closed-form moments of w uniform on the unit sphere in R^d (d = len(z)).

    kind:
      - "abs_odd":          E|w.z|^(2*order+1)
      - "even_power":       E[(w.z)^order] for even order
      - "quadratic":        E[(w.z)^2] = |z|^2 / d
      - "bilinear":         E[z.w w.t] = z.t / d
      - "bilinear_squared": E[(z.w w.t)^2] = (2 (z.t)^2 + |z|^2 |t|^2) / (d (d+2))
    """
    if kind not in _MOMENT_KINDS:
        raise ValueError(f"unknown moment kind {kind!r}")
    z = np.asarray(z, dtype=float)
    d = z.size
    if d < 1:
        raise ValueError("z must be a non-empty vector")
    if kind in ("bilinear", "bilinear_squared"):
        if t is None:
            raise ValueError(f"moment kind {kind!r} requires the second vector t")
        t = np.asarray(t, dtype=float)
        if t.size != d:
            raise ValueError("z and t must have the same dimension")
    nz = float(np.linalg.norm(z))
    if kind == "abs_odd":
        alpha = int(order)
        lg = gammaln(1 + alpha) + gammaln(d / 2.0) - gammaln(0.5) - gammaln(d / 2.0 + 0.5 + alpha)
        return nz ** (2 * alpha + 1) * float(np.exp(lg))
    if kind == "even_power":
        power = int(order)
        if power % 2 != 0 or power < 0:
            raise ValueError(f"even_power requires a non-negative even power, got {power}")
        alpha = power // 2
        lg = gammaln(0.5 + alpha) + gammaln(d / 2.0) - gammaln(0.5) - gammaln(d / 2.0 + alpha)
        return nz ** power * float(np.exp(lg))
    if kind == "quadratic":
        return nz ** 2 / d
    if kind == "bilinear":
        return float(z @ t) / d
    # bilinear_squared
    zt = float(z @ t)
    return (2.0 * zt ** 2 + nz ** 2 * float(t @ t)) / (d * (d + 2))
