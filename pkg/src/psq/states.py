"""Closed-form pure states with exact Wigner, chord and wavefunction evaluators.

All evaluators are vectorized: the last axis of the argument holds the ``2L``
phase-space coordinates (or the ``L`` positions for wavefunctions).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import j0

from .gaussian import GaussianState
from .symplectic import AffineMap, DimensionError, PhasePoint, _vec, skew_product


def laguerre(n: int, z):
    """Laguerre polynomial ``L_n(z)`` by the three-term recurrence."""
    if n < 0:
        raise ValueError("Laguerre degree must be nonnegative")
    z = np.asarray(z, dtype=float)
    prev = np.ones_like(z)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 - z
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - z) * cur - k * prev) / (k + 1)
    return cur if np.ndim(cur) else float(cur)


def hermite_function(n: int, u):
    """Normalized Hermite function ``phi_n(u)`` (unit-frequency oscillator eigenfunction)."""
    u = np.asarray(u, dtype=float)
    prev = np.pi**-0.25 * np.exp(-0.5 * u * u)
    if n == 0:
        return prev
    cur = np.sqrt(2.0) * u * prev
    for k in range(2, n + 1):
        prev, cur = cur, np.sqrt(2.0 / k) * u * cur - np.sqrt((k - 1) / k) * prev
    return cur


def _pq(x, L):
    x = _vec(x, L)
    return x[..., 0], x[..., 1]


class AnalyticState:
    """Base class for the closed-form pure state family."""

    hbar: float
    is_pure = True

    @property
    def dims(self) -> int:
        raise NotImplementedError

    def wigner(self, x):
        raise NotImplementedError

    def chord(self, xi):
        raise NotImplementedError

    def wavefunction(self, q):
        raise NotImplementedError(f"{type(self).__name__} has no position wavefunction")

    def __mul__(self, other: "AnalyticState") -> "Product":
        return Product((self, other))


def _check_single(omega, hbar):
    if omega <= 0:
        raise ValueError("omega must be positive")
    if hbar <= 0:
        raise ValueError("hbar must be positive")


@dataclass(frozen=True)
class Coherent(AnalyticState):
    """Translated oscillator ground state of frequency ``omega``."""

    center: PhasePoint = PhasePoint([0.0, 0.0])
    omega: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", PhasePoint(self.center))
        if self.center.dims != 1:
            raise DimensionError("Coherent is single-mode; build products for more modes")
        _check_single(self.omega, self.hbar)

    @property
    def dims(self):
        return 1

    def wigner(self, x):
        p, q = _pq(x, 1)
        ep, eq = self.center.coords
        h, w = self.hbar, self.omega
        return np.exp(-w * (q - eq) ** 2 / h - (p - ep) ** 2 / (h * w)) / (np.pi * h)

    def chord(self, xi):
        xp, xq = _pq(xi, 1)
        h, w = self.hbar, self.omega
        phase = skew_product(self.center.coords, _vec(xi, 1)) / h
        env = np.exp(-w / h * (xq / 2) ** 2 - (xp / 2) ** 2 / (h * w))
        return np.exp(1j * phase) * env / (2 * np.pi * h)

    def wavefunction(self, q):
        q = np.asarray(q, dtype=float)[..., 0]
        ep, eq = self.center.coords
        h, w = self.hbar, self.omega
        amp = (w / (np.pi * h)) ** 0.25 * np.exp(-w * (q - eq) ** 2 / (2 * h))
        return amp * np.exp(1j * ep * (q - eq / 2) / h)


def _scaled(x, omega):
    """Map ``(p, q) -> (p / sqrt(w), sqrt(w) q)`` that turns frequency ``w`` into 1."""
    x = np.array(_vec(x, 1), dtype=float)
    r = np.sqrt(omega)
    x[..., 0] /= r
    x[..., 1] *= r
    return x


@dataclass(frozen=True)
class Cat(AnalyticState):
    """Superposition ``|eta> + sign |-eta>`` of two coherent states."""

    center: PhasePoint = PhasePoint([0.0, 0.0])
    parity_sign: int = 1
    omega: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", PhasePoint(self.center))
        if self.center.dims != 1:
            raise DimensionError("Cat is single-mode")
        if self.parity_sign not in (1, -1):
            raise ValueError("parity_sign must be +1 or -1")
        _check_single(self.omega, self.hbar)
        if self.parity_sign < 0 and not np.any(self.center.coords):
            raise ValueError("odd cat with eta = 0 is the zero vector")

    @property
    def dims(self):
        return 1

    @cached_property
    def _eta(self):
        return _scaled(self.center.coords, self.omega)

    @cached_property
    def _overlap(self):
        return np.exp(-np.dot(self._eta, self._eta) / self.hbar)

    def wigner(self, x):
        h, s, eta = self.hbar, self.parity_sign, self._eta
        y = _scaled(x, self.omega)
        g_plus = np.exp(-np.sum((y - eta) ** 2, axis=-1) / h)
        g_minus = np.exp(-np.sum((y + eta) ** 2, axis=-1) / h)
        fringe = 2 * np.exp(-np.sum(y * y, axis=-1) / h) * np.cos(2 * skew_product(y, eta) / h)
        return (g_plus + g_minus + s * fringe) / (2 * np.pi * h * (1 + s * self._overlap))

    def chord(self, xi):
        h, s, eta = self.hbar, self.parity_sign, self._eta
        y = _scaled(xi, self.omega)
        g_plus = np.exp(-np.sum((y / 2 - eta) ** 2, axis=-1) / h)
        g_minus = np.exp(-np.sum((y / 2 + eta) ** 2, axis=-1) / h)
        central = np.exp(-np.sum(y * y, axis=-1) / (4 * h)) * np.cos(skew_product(y, eta) / h)
        # interference (cross) terms carry the parity sign; the diagonal terms sit at the origin
        ratio = (0.5 * s * (g_plus + g_minus) + central) / (1 + s * self._overlap)
        return (ratio / (2 * np.pi * h)).astype(complex)

    def wavefunction(self, q):
        a = Coherent(self.center, self.omega, self.hbar)
        b = Coherent(-self.center, self.omega, self.hbar)
        norm = np.sqrt(2 * (1 + self.parity_sign * self._overlap))
        return (a.wavefunction(q) + self.parity_sign * b.wavefunction(q)) / norm


@dataclass(frozen=True)
class Fock(AnalyticState):
    """Oscillator eigenstate ``|n>`` of frequency ``omega``."""

    n: int = 0
    omega: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError("Fock index must be a nonnegative integer")
        object.__setattr__(self, "n", int(self.n))
        _check_single(self.omega, self.hbar)

    @property
    def dims(self):
        return 1

    def wigner(self, x):
        h = self.hbar
        r2 = np.sum(_scaled(x, self.omega) ** 2, axis=-1)
        return (-1) ** self.n / (np.pi * h) * np.exp(-r2 / h) * laguerre(self.n, 2 * r2 / h)

    def chord(self, xi):
        h = self.hbar
        r2 = np.sum(_scaled(xi, self.omega) ** 2, axis=-1)
        val = np.exp(-r2 / (4 * h)) * laguerre(self.n, r2 / (2 * h)) / (2 * np.pi * h)
        return np.asarray(val, dtype=complex)

    def wavefunction(self, q):
        q = np.asarray(q, dtype=float)[..., 0]
        scale = np.sqrt(self.omega / self.hbar)
        return (hermite_function(self.n, scale * q) * np.sqrt(scale)).astype(complex)


@dataclass(frozen=True)
class GaussianPure(AnalyticState):
    """A pure Gaussian state carried by its mean and covariance."""

    gaussian: GaussianState

    def __post_init__(self):
        if not self.gaussian.is_pure:
            raise ValueError("GaussianPure requires purity 1")

    @property
    def hbar(self):
        return self.gaussian.hbar

    @property
    def dims(self):
        return self.gaussian.dims

    def wigner(self, x):
        return self.gaussian.wigner(x)

    def chord(self, xi):
        return self.gaussian.chord(xi)

    def wavefunction(self, q):
        return self.gaussian.wavefunction(q)


@dataclass(frozen=True)
class Product(AnalyticState):
    """Tensor product; factor coordinates are concatenated in order."""

    factors: tuple

    def __post_init__(self):
        flat = []
        for f in self.factors:
            flat.extend(f.factors if isinstance(f, Product) else [f])
        if not flat:
            raise ValueError("product of no factors")
        hbars = {f.hbar for f in flat}
        if len(hbars) != 1:
            raise ValueError(f"factors disagree on hbar: {sorted(hbars)}")
        object.__setattr__(self, "factors", tuple(flat))

    @property
    def hbar(self):
        return self.factors[0].hbar

    @property
    def dims(self):
        return sum(f.dims for f in self.factors)

    def _split(self, x, width):
        x = np.asarray(x)
        if x.shape[-1] != width * self.dims:
            raise DimensionError(f"expected {width * self.dims} components, got {x.shape[-1]}")
        start = 0
        for f in self.factors:
            yield f, x[..., start:start + width * f.dims]
            start += width * f.dims

    def wigner(self, x):
        out = 1.0
        for f, part in self._split(x, 2):
            out = out * f.wigner(part)
        return out

    def chord(self, xi):
        out = 1.0
        for f, part in self._split(xi, 2):
            out = out * f.chord(part)
        return out

    def wavefunction(self, q):
        out = 1.0
        for f, part in self._split(q, 1):
            out = out * f.wavefunction(part)
        return out


@dataclass(frozen=True)
class Transformed(AnalyticState):
    """Image of ``base`` under the metaplectic counterpart of an affine map.

    ``W'(x) = W(C^-1 (x - shift))`` and ``chi'(xi) = exp(i shift^xi/hbar) chi(C^-1 xi)``.
    """

    base: AnalyticState
    map: AffineMap

    def __post_init__(self):
        if self.map.dims != self.base.dims:
            raise DimensionError(f"map acts on {self.map.dims} modes, state has {self.base.dims}")

    @property
    def hbar(self):
        return self.base.hbar

    @property
    def dims(self):
        return self.base.dims

    @cached_property
    def _inverse(self):
        return np.linalg.inv(self.map.matrix)

    def wigner(self, x):
        x = _vec(x, self.dims)
        return self.base.wigner((x - self.map.shift) @ self._inverse.T)

    def chord(self, xi):
        xi = _vec(xi, self.dims)
        val = self.base.chord(xi @ self._inverse.T)
        if np.any(self.map.shift):
            val = val * np.exp(1j * skew_product(self.map.shift, xi) / self.hbar)
        return val

    def wavefunction(self, q):
        R = self.map.point_transformation()
        if R is None:
            raise ValueError("wavefunction only available for configuration-space point maps")
        q = np.asarray(q, dtype=float)
        sp, sq = self.map.shift[0::2], self.map.shift[1::2]
        base_q = (q - sq) @ np.linalg.inv(R).T
        val = self.base.wavefunction(base_q) / np.sqrt(abs(np.linalg.det(R)))
        if np.any(sp):
            val = val * np.exp(1j * ((q - sq / 2) @ sp) / self.hbar)
        return val


def eval_wigner(s: AnalyticState, x):
    return s.wigner(x)


def eval_chord(s: AnalyticState, xi):
    return s.chord(xi)


def eval_position_wavefunction(s: AnalyticState, q):
    return s.wavefunction(q)


LOW_ACCURACY_N = 5


def fock_wigner_asymptotic(n: int, x, hbar: float = 1.0, cosine: bool = False):
    """Bessel approximation to the Fock Wigner function for large ``n``.

    ``L_n(z^2 / 2n) ~ J0(sqrt(2) z)`` with ``z^2 / 2n = 2 x^2 / hbar``. With
    ``cosine=True`` the Bessel function is replaced by its large-argument form
    ``sqrt(2 / pi y) cos(y - pi / 4)``, which diverges at the origin.
    For ``n < LOW_ACCURACY_N`` the result is not expected to be accurate.
    """
    if n < 1:
        raise ValueError("asymptotic form needs n >= 1")
    if n < LOW_ACCURACY_N:
        warnings.warn(f"Bessel asymptotics are low-accuracy for n={n}", RuntimeWarning, stacklevel=2)
    r2 = np.sum(_vec(x, 1) ** 2, axis=-1)
    y = np.sqrt(2.0) * np.sqrt(4 * n * r2 / hbar)
    if cosine:
        with np.errstate(divide="ignore"):
            bessel = np.sqrt(2 / (np.pi * y)) * np.cos(y - np.pi / 4)
    else:
        bessel = j0(y)
    return (-1) ** n / (np.pi * hbar) * np.exp(-r2 / hbar) * bessel


def fock_asymptotic_is_reliable(n: int) -> bool:
    return n >= LOW_ACCURACY_N
