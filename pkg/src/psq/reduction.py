"""Partial traces of sampled bipartite states and entanglement quantifiers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Axis, PhaseGrid, chord_section, integrate
from .measures import CorrelationField, purity
from .symplectic import DimensionError


def _mode_subset(g: PhaseGrid, keep) -> list:
    L = g.dims
    keep = sorted({int(k) for k in np.atleast_1d(keep)})
    if not keep or keep[0] < 0 or keep[-1] >= L:
        raise ValueError(f"invalid mode subset {keep} for {L} modes")
    if keep != list(range(keep[0], keep[-1] + 1)):
        raise ValueError(f"mode subset {keep} is not contiguous; reorder with mode_permutation first")
    return keep


def _axes_of(modes) -> list:
    return [a for k in modes for a in (2 * k, 2 * k + 1)]


def reduce_wigner(g: PhaseGrid, keep) -> PhaseGrid:
    """``W_1(x_1) = int dx_2 W(x_1, x_2)`` by trapezoid quadrature."""
    if g.rep != "wigner":
        raise ValueError(f"reduce_wigner needs a wigner grid, got {g.rep}")
    keep = _mode_subset(g, keep)
    traced = [a for a in range(g.ndim) if a not in _axes_of(keep)]
    if not traced:
        return g
    vals = integrate(g, traced)
    kept = _axes_of(keep)
    return PhaseGrid("wigner", tuple(g.axes[a] for a in kept), vals, g.hbar, tuple(g.labels[a] for a in kept))


def reduce_chord(g: PhaseGrid, keep) -> PhaseGrid:
    """``chi_1(xi_1) = (2 pi hbar)^L2 chi(xi_1, xi_2 = 0)``: a section through the chord origin."""
    if g.rep != "chord":
        raise ValueError(f"reduce_chord needs a chord grid, got {g.rep}")
    keep = _mode_subset(g, keep)
    traced = [a for a in range(g.ndim) if a not in _axes_of(keep)]
    if not traced:
        return g
    for a in traced:
        if g.axes[a].node(0.0) is None:
            raise ValueError(f"chord origin is off-grid on axis {a}")
    sec = chord_section(g, {a: 0.0 for a in traced})
    L2 = len(traced) // 2
    return sec.with_values(sec.values * (2 * np.pi * g.hbar) ** L2)


def reduce(g: PhaseGrid, keep) -> PhaseGrid:
    return reduce_wigner(g, keep) if g.rep == "wigner" else reduce_chord(g, keep)


def concurrence_squared(g: PhaseGrid, keep=0, purity_tol: float = 1e-4) -> float:
    """Linear entropy ``1 - tr rho_1^2`` of a reduced pure bipartite state."""
    full = purity(g)
    if abs(full - 1) > purity_tol:
        raise ValueError(f"input purity {full:.6g} is not 1; concurrence is defined for pure states")
    return 1.0 - purity(reduce(g, keep))


@dataclass(frozen=True)
class SchmidtSpectrum:
    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.sort(np.asarray(self.lambdas, dtype=float))[::-1]
        if np.any(lam < 0):
            raise ValueError("Schmidt coefficients must be nonnegative")
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)

    @property
    def probabilities(self) -> np.ndarray:
        return self.lambdas**2

    def norm(self) -> float:
        return float(np.sum(self.lambdas**2))

    def reduced_purity(self) -> float:
        return float(np.sum(self.lambdas**4))

    def concurrence_squared(self) -> float:
        return 1.0 - self.reduced_purity()


def schmidt_decompose(state, q_axes) -> SchmidtSpectrum:
    """Singular values of the sampled two-mode wavefunction ``psi(q1, q2)``.

    The matrix is weighted by ``sqrt(dq1 dq2)`` so its Frobenius norm is the
    quadrature of ``|psi|^2``; no renormalization is applied.
    """
    if state.dims != 2:
        raise DimensionError("Schmidt decomposition implemented for two modes")
    a1, a2 = (Axis(*a) for a in q_axes)
    q1, q2 = np.meshgrid(a1.coords(), a2.coords(), indexing="ij")
    try:
        psi = state.wavefunction(np.stack([q1, q2], axis=-1))
    except (NotImplementedError, ValueError) as exc:
        raise ValueError(f"state has no position wavefunction: {exc}") from exc
    mat = psi * np.sqrt(a1.spacing * a2.spacing)
    return SchmidtSpectrum(np.linalg.svd(mat, compute_uv=False))


def reduced_correlations(c: CorrelationField, keep) -> CorrelationField:
    """``C_1(xi_1) = int dxi_2 / (2 pi hbar)^L2 C(xi_1, xi_2)``."""
    g = c.grid
    keep = _mode_subset(g, keep)
    traced = [a for a in range(g.ndim) if a not in _axes_of(keep)]
    if not traced:
        return c
    vals = integrate(PhaseGrid("chord", g.axes, c.values, g.hbar, g.labels), traced)
    vals = np.real(vals) / (2 * np.pi * g.hbar) ** (len(traced) // 2)
    kept = _axes_of(keep)
    return CorrelationField(PhaseGrid("chord", tuple(g.axes[a] for a in kept), vals, g.hbar, tuple(g.labels[a] for a in kept)))
