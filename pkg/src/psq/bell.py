"""CHSH combinations for reflection (displaced parity) and commuting interval observables."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .gaussian import GaussianState
from .grid import Axis, GridAccuracyWarning, PhaseGrid, interpolate, project_marginal
from .symplectic import AffineMap, DimensionError, direct_sum, lagrangian_rotation

# roundoff margin for declaring a violation of the classical bound 2
VIOLATION_TOL = 1e-9


@dataclass(frozen=True)
class ChshPointSet:
    """Reflection centres: ``a1, b1`` on subsystem 1 and ``a2, b2`` on subsystem 2."""

    a1: np.ndarray
    b1: np.ndarray
    a2: np.ndarray
    b2: np.ndarray

    def __post_init__(self):
        for name in ("a1", "b1", "a2", "b2"):
            v = np.asarray(getattr(self, name), dtype=float).reshape(-1)
            if v.size != 2:
                raise DimensionError(f"centre {name} must be a single-mode point (p, q)")
            object.__setattr__(self, name, v)

    @classmethod
    def origin_and(cls, b1, b2) -> "ChshPointSet":
        return cls(np.zeros(2), b1, np.zeros(2), b2)

    def as_dict(self) -> dict:
        return {k: getattr(self, k).tolist() for k in ("a1", "b1", "a2", "b2")}


def _hbar(source) -> float:
    return source.hbar


def _wigner_many(source, pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if pts.shape[-1] != 4:
        raise DimensionError("reflection correlations need a two-mode (L1 = L2 = 1) state")
    if isinstance(source, PhaseGrid):
        if source.rep != "wigner" or source.ndim != 4:
            raise ValueError("expected a two-mode wigner grid")
        flat = pts.reshape(-1, 4)
        on_grid = all(
            np.all(np.abs((flat[:, i] - a.lo) / a.spacing - np.round((flat[:, i] - a.lo) / a.spacing)) < 1e-9)
            for i, a in enumerate(source.axes)
        )
        if not on_grid:
            warnings.warn("reflection centres off-grid; using linear interpolation", GridAccuracyWarning, stacklevel=3)
        return interpolate(source, pts, order=1).real
    return np.real(source.wigner(pts))


def reflection_correlation(source, x1, x2) -> float:
    """``<R_x1 R_x2> = (pi hbar)^2 W(x1, x2)`` for a two-mode state or Wigner grid."""
    pt = np.concatenate([np.asarray(x1, dtype=float).reshape(-1), np.asarray(x2, dtype=float).reshape(-1)])
    return float((np.pi * _hbar(source)) ** 2 * _wigner_many(source, pt[None, :])[0])


def _chsh_many(source, a1, b1, a2, b2) -> np.ndarray:
    """Vectorized CHSH over broadcast arrays of centres (last axis = 2)."""
    a1, b1, a2, b2 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a1, b1, a2, b2)))
    scale = (np.pi * _hbar(source)) ** 2

    def E(x, y):
        return scale * _wigner_many(source, np.concatenate([x, y], axis=-1))

    return E(a1, a2) + E(a1, b2) + E(b1, a2) - E(b1, b2)


def chsh_value(source, pts: ChshPointSet) -> float:
    """``E(a1,a2) + E(a1,b2) + E(b1,a2) - E(b1,b2)`` with reflection correlations."""
    return float(_chsh_many(source, pts.a1, pts.b1, pts.a2, pts.b2))


@dataclass(frozen=True)
class ChshScanResult:
    max_value: float
    argmax: ChshPointSet
    coarse_max: float

    @property
    def violation(self) -> bool:
        return self.max_value > 2.0 + VIOLATION_TOL


def chsh_scan(source, search_box: float, n_steps: int, refine: bool = True, chunk: int = 1 << 18) -> ChshScanResult:
    """Maximize the CHSH value with ``a1 = a2 = 0`` over ``b1, b2`` in ``[-box, box]^4``.

    A coarse lattice search is followed by Nelder-Mead refinement inside the box.
    """
    if search_box <= 0 or n_steps < 1:
        raise ValueError("search box must have positive size and at least one step")
    axis = np.linspace(-search_box, search_box, n_steps) if n_steps > 1 else np.zeros(1)
    grids = np.meshgrid(axis, axis, axis, axis, indexing="ij")
    cand = np.stack([g.reshape(-1) for g in grids], axis=-1)
    zero = np.zeros(2)
    best_val, best = -np.inf, None
    for start in range(0, cand.shape[0], chunk):
        c = cand[start:start + chunk]
        vals = _chsh_many(source, zero, c[:, :2], zero, c[:, 2:])
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val, best = float(vals[k]), c[k].copy()
    coarse = best_val
    if refine:
        def neg(v):
            v = np.clip(v, -search_box, search_box)
            return -float(_chsh_many(source, zero, v[:2], zero, v[2:]))

        step = 2 * search_box / max(n_steps - 1, 1)
        simplex = np.vstack([best] + [best + step * e for e in np.eye(4)])
        res = minimize(neg, best, method="Nelder-Mead", options={"initial_simplex": simplex, "xatol": 1e-8, "fatol": 1e-12, "maxiter": 4000})
        cand_best = np.clip(res.x, -search_box, search_box)
        if -neg(cand_best) > best_val:
            best_val, best = -neg(cand_best), cand_best
    return ChshScanResult(best_val, ChshPointSet.origin_and(best[:2], best[2:]), coarse)


# ------------------------------------------------------- commuting observables


def _plane_map(plane) -> AffineMap:
    if isinstance(plane, AffineMap):
        if plane.dims != 1:
            raise DimensionError("each subsystem plane is a single-mode map")
        return plane
    alpha, beta = plane
    return lagrangian_rotation(float(alpha), float(beta))


def _interval_sign(u, interval):
    lo, hi = interval
    return np.where((u >= lo) & (u <= hi), 1.0, -1.0)


def joint_density(source, plane1, plane2, n: int = 401, width: float = 8.0) -> PhaseGrid:
    """Probability density of the commuting pair ``(q1', q2')``, one coordinate per subsystem."""
    m1, m2 = _plane_map(plane1), _plane_map(plane2)
    if isinstance(source, PhaseGrid):
        if source.rep != "wigner" or source.ndim != 4:
            raise ValueError("expected a two-mode wigner grid")
        return project_marginal(source, direct_sum(m1, m2), axis_selection=(1, 3))
    if not isinstance(source, GaussianState):
        raise TypeError("joint densities are computed from Wigner grids or Gaussian states")
    A = np.zeros((2, 4))
    A[0, :2] = m1.matrix[1]
    A[1, 2:] = m2.matrix[1]
    mean = A @ source.mean + np.array([m1.shift[1], m2.shift[1]])
    cov = A @ source.cov @ A.T
    sd = np.sqrt(np.diag(cov))
    axes = tuple(Axis(mean[i] - width * sd[i], mean[i] + width * sd[i], n) for i in range(2))
    u, v = np.meshgrid(axes[0].coords(), axes[1].coords(), indexing="ij")
    d = np.stack([u - mean[0], v - mean[1]], axis=-1)
    quad = np.einsum("...i,ij,...j->...", d, np.linalg.inv(cov), d)
    f = np.exp(-0.5 * quad) / (2 * np.pi * np.sqrt(np.linalg.det(cov)))
    return PhaseGrid("marginal", axes, f, source.hbar, ("q0'", "q1'"))


def chsh_from_density(f: PhaseGrid, intervals) -> float:
    """CHSH combination of interval observables read from one joint density."""
    (i1a, i1b, i2a, i2b) = intervals
    u, v = np.meshgrid(*f.coords(), indexing="ij")
    o1a, o1b = _interval_sign(u, i1a), _interval_sign(u, i1b)
    o2a, o2b = _interval_sign(v, i2a), _interval_sign(v, i2b)
    comb = o1a * o2a + o1a * o2b + o1b * o2a - o1b * o2b
    w = f.values.real * f.cell
    return float(np.sum(comb * w))


def commuting_chsh_check(source, plane1, plane2, intervals, n: int = 401) -> float:
    """CHSH value for +-1 interval observables on a single Lagrangian plane.

    All four observables are functions of ``(q1', q2')`` with ``q_j' = alpha_j p_j + beta_j q_j``,
    so the correlations come from one true probability density and cannot exceed 2.
    """
    f = joint_density(source, plane1, plane2, n=n)
    return chsh_from_density(f, intervals)


def hidden_variable_chsh(g: GaussianState, settings, n_samples: int = 200_000, seed: int = 0) -> float:
    """Monte-Carlo CHSH with the (positive) Gaussian Wigner function as hidden-variable density.

    ``settings`` gives ``(plane, interval)`` for the observables 1a, 1b, 2a, 2b; each may use its
    own plane. Deterministic +-1 responses bound every sample, hence the estimate, by 2.
    """
    if not isinstance(g, GaussianState) or g.dims != 2:
        raise TypeError("hidden-variable sampling needs a two-mode Gaussian state")
    rng = np.random.default_rng(seed)
    x = rng.multivariate_normal(g.mean, g.cov, size=n_samples)
    outs = []
    for k, (plane, interval) in enumerate(settings):
        m = _plane_map(plane)
        part = x[:, :2] if k < 2 else x[:, 2:]
        u = part @ m.matrix[1] + m.shift[1]
        outs.append(_interval_sign(u, interval))
    o1a, o1b, o2a, o2b = outs
    return float(np.mean(o1a * o2a + o1a * o2b + o1b * o2a - o1b * o2b))


def quantum_gap(scan: ChshScanResult) -> float:
    """Excess of the reflection CHSH maximum over the local bound 2."""
    return max(0.0, scan.max_value - 2.0)
