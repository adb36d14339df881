"""Gaussian states described by a mean vector and a Schrödinger covariance matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symplectic import (
    AffineMap,
    DimensionError,
    PhasePoint,
    _vec,
    coupling_rotation,
    skew_product,
    symplectic_form,
)

PHYSICAL_TOL = 1e-10


@dataclass(frozen=True)
class GaussianState:
    """Mean ``m`` and covariance ``K`` of second central (symmetrized) moments.

    ``K`` must be symmetric positive definite and satisfy ``K + i hbar J / 2 >= 0``.
    """

    mean: np.ndarray
    cov: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        n = cov.shape[0]
        if cov.ndim != 2 or cov.shape != (n, n) or n % 2:
            raise DimensionError(f"covariance must be 2L x 2L, got {cov.shape}")
        mean = np.zeros(n) if self.mean is None else np.array(_vec(self.mean), dtype=float)
        if mean.shape != (n,):
            raise DimensionError(f"mean has {mean.size} components, covariance is {n} x {n}")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        if np.max(np.abs(cov - cov.T)) > 1e-12 * max(1.0, np.max(np.abs(cov))):
            raise ValueError("covariance matrix is not symmetric")
        cov = 0.5 * (cov + cov.T)
        if np.linalg.eigvalsh(cov).min() <= 0:
            raise ValueError("covariance matrix is not positive definite")
        herm = cov + 0.5j * self.hbar * symplectic_form(n // 2)
        scale = max(1.0, np.max(np.abs(cov)))
        if np.linalg.eigvalsh(herm).min() < -PHYSICAL_TOL * scale:
            raise ValueError("covariance violates the uncertainty principle (K + i hbar J/2 not PSD)")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dims(self) -> int:
        return self.cov.shape[0] // 2

    @property
    def purity(self) -> float:
        return float((self.hbar / 2) ** self.dims / np.sqrt(np.linalg.det(self.cov)))

    @property
    def is_pure(self) -> bool:
        return abs(self.purity - 1.0) < 1e-9

    def wigner(self, x):
        """Normalized Gaussian ``[(2 pi)^L sqrt(det K)]^-1 exp(-(x-m) K^-1 (x-m) / 2)``."""
        d = _vec(x, self.dims) - self.mean
        kinv = np.linalg.inv(self.cov)
        quad = np.einsum("...i,ij,...j->...", d, kinv, d)
        norm = (2 * np.pi) ** self.dims * np.sqrt(np.linalg.det(self.cov))
        return np.exp(-0.5 * quad) / norm

    def chord(self, xi):
        """Chord function; ``(2 pi hbar)^L chi = exp(i m^xi/hbar - xi J^T K J xi / 2 hbar^2)``."""
        xi = _vec(xi, self.dims)
        J = symplectic_form(self.dims)
        kc = J.T @ self.cov @ J
        quad = np.einsum("...i,ij,...j->...", xi, kc, xi)
        phase = skew_product(self.mean, xi)
        val = np.exp(1j * phase / self.hbar - quad / (2 * self.hbar**2))
        return val / (2 * np.pi * self.hbar) ** self.dims

    def wavefunction(self, q):
        """Position amplitude of a pure Gaussian state."""
        if not self.is_pure:
            raise ValueError("wavefunction requested for a mixed Gaussian state")
        L = self.dims
        q = np.asarray(q, dtype=float)
        if q.shape[-1] != L:
            raise DimensionError(f"expected {L} position components, got {q.shape[-1]}")
        kqq = self.cov[1::2, 1::2]
        kpq = self.cov[0::2, 1::2]
        kqq_inv = np.linalg.inv(kqq)
        a = 0.5 * self.hbar * kqq_inv
        b = -kpq @ kqq_inv
        b = 0.5 * (b + b.T)
        z = a + 1j * b
        mq, mp = self.mean[1::2], self.mean[0::2]
        d = q - mq
        quad = np.einsum("...i,ij,...j->...", d, z, d)
        norm = np.linalg.det(a / (np.pi * self.hbar)) ** 0.25
        phase = (d + 0.5 * mq) @ mp
        return norm * np.exp(-quad / (2 * self.hbar) + 1j * phase / self.hbar)


def gaussian_from_ground(omegas, hbar: float = 1.0) -> GaussianState:
    """Product of oscillator ground states with frequencies ``omegas``."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if np.any(omegas <= 0):
        raise ValueError("all frequencies must be positive")
    diag = np.empty(2 * omegas.size)
    diag[0::2] = hbar * omegas / 2
    diag[1::2] = hbar / (2 * omegas)
    return GaussianState(np.zeros_like(diag), np.diag(diag), hbar)


def coherent_gaussian(center, omega: float = 1.0, hbar: float = 1.0) -> GaussianState:
    g = gaussian_from_ground([omega] * (len(_vec(center)) // 2), hbar)
    return GaussianState(_vec(center), g.cov, hbar)


def propagate(g: GaussianState, amap: AffineMap) -> GaussianState:
    if amap.dims != g.dims:
        raise DimensionError(f"map acts on {amap.dims} modes, state has {g.dims}")
    C = amap.matrix
    return GaussianState(C @ g.mean + amap.shift, C @ g.cov @ C.T, g.hbar)


def partial_trace(g: GaussianState, keep) -> GaussianState:
    """Keep the listed modes; tracing a Gaussian deletes rows and columns."""
    keep = sorted({int(k) for k in np.atleast_1d(keep)})
    if not keep:
        raise ValueError("keep set is empty")
    if keep[0] < 0 or keep[-1] >= g.dims:
        raise ValueError(f"mode indices {keep} out of range for {g.dims} modes")
    idx = np.ravel([[2 * k, 2 * k + 1] for k in keep])
    return GaussianState(g.mean[idx], g.cov[np.ix_(idx, idx)], g.hbar)


def uncertainty_delta(g: GaussianState) -> float:
    return float(np.sqrt(np.linalg.det(g.cov)))


def epr_state(omega1: float, omega2: float, hbar: float = 1.0) -> GaussianState:
    """Rotated pair of ground states whose Wigner function pairs ``omega1`` with ``q1 + q2``.

    ``W'(x) = (pi hbar)^-2 exp[-w1 (q1+q2)^2/2hbar - (p1+p2)^2/(2 hbar w1)]
    exp[-w2 (q1-q2)^2/2hbar - (p1-p2)^2/(2 hbar w2)]``.
    """
    ground = gaussian_from_ground([omega1, omega2], hbar)
    return propagate(ground, coupling_rotation(-np.pi / 4))


def reduced_epr_purity(omega1: float, omega2: float) -> float:
    return 2 * np.sqrt(omega1 * omega2) / (omega1 + omega2)


__all__ = [
    "GaussianState",
    "PhasePoint",
    "coherent_gaussian",
    "epr_state",
    "gaussian_from_ground",
    "partial_trace",
    "propagate",
    "reduced_epr_purity",
    "uncertainty_delta",
]
