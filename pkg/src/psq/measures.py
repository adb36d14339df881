"""Scalar and field diagnostics of sampled states: purity, correlations, parity, entropies."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .grid import (
    GridAccuracyWarning,
    PhaseGrid,
    _axes_match,
    integrate,
    reciprocal_axes,
    symplectic_fourier,
)
from .symplectic import DimensionError


def mixture(grids, weights) -> PhaseGrid:
    """Convex combination of grids sharing axes and representation."""
    grids = list(grids)
    weights = np.asarray(weights, dtype=float)
    if not grids or len(grids) != weights.size:
        raise ValueError("need one weight per grid")
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise ValueError("mixture weights must be nonnegative and sum to 1")
    first = grids[0]
    for g in grids[1:]:
        if g.rep != first.rep or not _axes_match(g.axes, first.axes) or g.hbar != first.hbar:
            raise ValueError("mixture components must share representation, axes and hbar")
    vals = sum(w * g.values for w, g in zip(weights, grids))
    return first.with_values(vals)


def purity(g: PhaseGrid) -> float:
    """``tr rho^2 = (2 pi hbar)^L int W^2 = (2 pi hbar)^L int |chi|^2``."""
    if g.rep == "wigner":
        dens = g.values.real ** 2
    elif g.rep == "chord":
        dens = np.abs(g.values) ** 2
    else:
        raise ValueError(f"purity needs a wigner or chord grid, got {g.rep}")
    return float(np.real(integrate(g.with_values(dens))) * (2 * np.pi * g.hbar) ** g.dims)


@dataclass(frozen=True)
class CorrelationField:
    """Phase-space correlations ``C(xi)`` sampled over chord variables."""

    grid: PhaseGrid

    @property
    def values(self) -> np.ndarray:
        return self.grid.values.real

    def at_origin(self) -> float:
        return float(self.values[self.grid.origin_index()])


def correlations(g: PhaseGrid, method: str = "fourier") -> CorrelationField:
    """``C(xi) = (2 pi hbar)^L int d eta exp(i eta^xi / hbar) |chi(eta)|^2``.

    ``method="pure"`` uses ``C = (2 pi hbar)^2L |chi|^2``, valid only for pure states;
    the Fourier route holds for any density operator and lands on the reciprocal axes.
    """
    if g.rep != "chord":
        raise ValueError(f"correlations are computed from chord grids, got {g.rep}")
    scale = (2 * np.pi * g.hbar) ** g.dims
    if method == "pure":
        return CorrelationField(g.with_values(scale**2 * np.abs(g.values) ** 2))
    if method != "fourier":
        raise ValueError(f"unknown method {method!r}")
    intensity = g.with_values(np.abs(g.values) ** 2)
    inv = symplectic_fourier(intensity, "chord->wigner")
    return CorrelationField(PhaseGrid("chord", inv.axes, scale**2 * inv.values.real, g.hbar, g.labels))


def fourier_invariance_residual(c: CorrelationField) -> float:
    """Sup norm of ``C(xi) - (2 pi hbar)^-L int d eta exp(i eta^xi/hbar) C(eta)``.

    Needs a self-reciprocal grid so both sides live on the same nodes.
    """
    g = c.grid
    if not _axes_match(reciprocal_axes(g.axes, g.hbar), g.axes, rtol=1e-9):
        raise ValueError("Fourier invariance needs a self-reciprocal grid (spacing sqrt(2 pi hbar / n))")
    field = PhaseGrid("chord", g.axes, c.values, g.hbar, g.labels)
    transformed = symplectic_fourier(field, "chord->wigner")
    return float(np.max(np.abs(c.values - transformed.values)))


def _wigner_at(source, center):
    center = np.asarray(center, dtype=float)
    if isinstance(source, PhaseGrid):
        if source.rep != "wigner":
            raise ValueError(f"expected a wigner grid, got {source.rep}")
        return source.value_at(center).real
    return float(np.real(source.wigner(center)))


def parity_probabilities(source, center) -> tuple:
    """Probabilities of the eigenvalues +1 and -1 of the reflection through ``center``."""
    w = _wigner_at(source, center)
    L = len(np.atleast_1d(center)) // 2
    scaled = (np.pi * source.hbar) ** L * w
    if abs(scaled) > 1 + 1e-6:
        raise ValueError(f"(pi hbar)^L W = {scaled:.6g} exceeds 1; not a valid Wigner function")
    scaled = float(np.clip(scaled, -1.0, 1.0))
    return (1 + scaled) / 2, (1 - scaled) / 2


def _coherent_kernel(axes, omega, hbar, L):
    """Vacuum Wigner function of frequency ``omega`` sampled with the grid spacing."""
    coords = []
    for i, a in enumerate(axes):
        m = a.n // 2
        coords.append(np.arange(-m, m + 1) * a.spacing)
    mesh = np.meshgrid(*coords, indexing="ij")
    expo = 0.0
    for k in range(L):
        p, q = mesh[2 * k], mesh[2 * k + 1]
        expo = expo + omega * q**2 / hbar + p**2 / (hbar * omega)
    return np.exp(-expo) / (np.pi * hbar) ** L


def husimi(g: PhaseGrid, omega: float = 1.0) -> PhaseGrid:
    """Smooth a Wigner grid with the coherent-state Wigner function.

    ``h(eta) = int dx W_eta(x) W(x) = <eta|rho|eta> / (2 pi hbar)^L`` so that ``int h = 1``.
    """
    if g.rep != "wigner":
        raise ValueError(f"Husimi smoothing needs a wigner grid, got {g.rep}")
    L, h = g.dims, g.hbar
    for k in range(L):
        ap, aq = g.axes[2 * k], g.axes[2 * k + 1]
        # the kernel must fit well inside the box: 6 standard deviations each way
        if 6 * np.sqrt(h * omega / 2) > (ap.hi - ap.lo) / 2 or 6 * np.sqrt(h / (2 * omega)) > (aq.hi - aq.lo) / 2:
            raise ValueError("coherent-state kernel is wider than the grid")
    kernel = _coherent_kernel(g.axes, omega, h, L)
    sm = fftconvolve(g.values.real, kernel, mode="same") * g.cell
    return PhaseGrid("husimi", g.axes, sm, h, g.labels)


def wehrl_entropy(h: PhaseGrid) -> float:
    """``-int h ln[(2 pi hbar)^L h]`` in nats."""
    if h.rep != "husimi":
        raise ValueError(f"Wehrl entropy needs a husimi grid, got {h.rep}")
    vals = h.values.real
    if vals.min() < -1e-9 * vals.max():
        raise ValueError("Husimi grid has significant negative values")
    scale = (2 * np.pi * h.hbar) ** h.dims
    vals = np.clip(vals, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = np.where(vals > 0, -vals * np.log(scale * vals), 0.0)
    return float(np.real(integrate(h.with_values(dens))))


def wigner_entropy(g: PhaseGrid, rel_tol: float = 1e-12) -> float:
    """``-int W ln[(2 pi hbar)^L W]``; defined only for nonnegative Wigner grids."""
    if g.rep != "wigner":
        raise ValueError(f"Wigner entropy needs a wigner grid, got {g.rep}")
    vals = g.values.real
    if vals.min() < -rel_tol * np.abs(vals).max():
        raise ValueError("Wigner function has negative regions; the Wigner entropy is undefined")
    scale = (2 * np.pi * g.hbar) ** g.dims
    vals = np.clip(vals, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = np.where(vals > 0, -vals * np.log(scale * vals), 0.0)
    return float(np.real(integrate(g.with_values(dens))))


def normalization(g: PhaseGrid) -> float:
    if g.rep not in ("wigner", "husimi", "marginal"):
        raise ValueError(f"normalization is an integral of a density grid, got {g.rep}")
    return float(np.real(integrate(g)))


def check_wigner_bound(g: PhaseGrid, tol: float = 1e-9) -> bool:
    """``|W| <= (pi hbar)^-L`` everywhere on the grid."""
    bound = (np.pi * g.hbar) ** -g.dims
    return bool(np.max(np.abs(g.values.real)) <= bound + tol)


def imag_fraction(g: PhaseGrid) -> float:
    peak = np.max(np.abs(g.values.real))
    return float(np.max(np.abs(g.values.imag)) / peak) if peak else 0.0


def warn_if_complex(g: PhaseGrid, tol: float = 1e-9) -> None:
    if g.rep == "wigner" and imag_fraction(g) > tol:
        warnings.warn("Wigner grid carries a significant imaginary part", GridAccuracyWarning, stacklevel=2)


__all__ = [
    "CorrelationField",
    "DimensionError",
    "check_wigner_bound",
    "correlations",
    "fourier_invariance_residual",
    "husimi",
    "mixture",
    "normalization",
    "parity_probabilities",
    "purity",
    "wehrl_entropy",
    "wigner_entropy",
]
