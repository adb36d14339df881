"""Markovian evolution of chord functions and the centre-of-mass central limit construction.

With a quadratic Hamiltonian ``H = x.Hx/2`` and Hermitian Lindblad operators
``l_j.x`` the chord function obeys

    d chi/dt = -(J H xi).grad chi - (1/2 hbar) sum_j (l_j.xi)^2 chi,

which is solved along the classical characteristics ``xi(t) = R_t xi(0)``:

    chi(xi, t) = chi0(R_{-t} xi) exp(-xi.M(t) xi / 2 hbar),
    M(t) = int_0^t R_{-s}^T (sum_j l_j l_j^T) R_{-s} ds.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from .grid import (
    Axis,
    GridAccuracyWarning,
    PhaseGrid,
    centred_axes,
    interpolate,
    reciprocal_axes,
    symplectic_fourier,
)
from .measures import purity
from .symplectic import DimensionError, symplectic_form

# Orientation of the characteristics: chi(xi, t) = chi0(R_{FLOW_SIGN * t} xi).
# Fixed by the PDE residual (see ``orientation_residuals``).
FLOW_SIGN = -1
GL_NODES_PER_UNIT_TIME = 32


@dataclass(frozen=True)
class LindbladSpec:
    """Quadratic Hamiltonian Hessian and linear Lindblad coefficient vectors."""

    hessian: np.ndarray
    lindblad_vectors: tuple = field(default_factory=tuple)
    hbar: float = 1.0

    def __post_init__(self):
        if callable(self.hessian):
            raise ValueError("only quadratic Hamiltonians (a constant Hessian) are supported")
        H = np.array(self.hessian, dtype=float)
        if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] % 2:
            raise DimensionError(f"Hessian must be 2L x 2L, got shape {H.shape}")
        if not np.allclose(H, H.T, atol=1e-12):
            raise ValueError("Hessian must be symmetric")
        vecs = []
        for v in self.lindblad_vectors:
            arr = np.asarray(v)
            if np.iscomplexobj(arr) and np.any(arr.imag):
                raise ValueError("Lindblad vectors must be real (Hermitian Lindblad operators)")
            arr = np.asarray(arr.real if np.iscomplexobj(arr) else arr, dtype=float).reshape(-1)
            if arr.size != H.shape[0]:
                raise DimensionError(f"Lindblad vector of length {arr.size} for a {H.shape[0]}-dim phase space")
            arr.setflags(write=False)
            vecs.append(arr)
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        H.setflags(write=False)
        object.__setattr__(self, "hessian", H)
        object.__setattr__(self, "lindblad_vectors", tuple(vecs))

    @property
    def dims(self) -> int:
        return self.hessian.shape[0] // 2

    @property
    def generator(self) -> np.ndarray:
        """``J H``: the linear Hamiltonian vector field."""
        return symplectic_form(self.dims) @ self.hessian

    @property
    def diffusion(self) -> np.ndarray:
        """``sum_j l_j l_j^T``."""
        n = 2 * self.dims
        out = np.zeros((n, n))
        for v in self.lindblad_vectors:
            out += np.outer(v, v)
        return out

    @classmethod
    def harmonic(cls, gamma: float = 0.0, omega: float = 1.0, hbar: float = 1.0, channels: str = "q") -> "LindbladSpec":
        """``H = (p^2 + omega^2 q^2)/2`` with dephasing ``sqrt(2 gamma)`` along the chosen coordinates."""
        H = np.diag([1.0, omega**2])
        vecs = []
        if gamma > 0:
            if "p" in channels:
                vecs.append((np.sqrt(2 * gamma), 0.0))
            if "q" in channels:
                vecs.append((0.0, np.sqrt(2 * gamma)))
        return cls(H, tuple(vecs), hbar)


def flow(spec: LindbladSpec, t: float) -> np.ndarray:
    """``R_t = exp(t J H)``."""
    return expm(t * spec.generator)


def decay_matrix(spec: LindbladSpec, t: float, nodes_per_unit: int = GL_NODES_PER_UNIT_TIME) -> np.ndarray:
    """``M(t) = int_0^t R_{-s}^T D R_{-s} ds`` by composite Gauss-Legendre quadrature."""
    n = 2 * spec.dims
    D = spec.diffusion
    if t == 0 or not np.any(D):
        return np.zeros((n, n))
    panels = max(1, int(np.ceil(abs(t))))
    x, w = np.polynomial.legendre.leggauss(nodes_per_unit)
    edges = np.linspace(0.0, t, panels + 1)
    M = np.zeros((n, n))
    G = spec.generator
    for a, b in zip(edges[:-1], edges[1:]):
        s = 0.5 * (b - a) * x + 0.5 * (a + b)
        for sk, wk in zip(s, w):
            R = expm(-sk * G)
            M += 0.5 * (b - a) * wk * (R.T @ D @ R)
    return 0.5 * (M + M.T)


def _chord_points(axes) -> np.ndarray:
    mesh = np.meshgrid(*(Axis(*a).coords() for a in axes), indexing="ij")
    return np.stack(mesh, axis=-1)


def _evaluate_chi0(chi0, pts):
    if isinstance(chi0, PhaseGrid):
        return interpolate(chi0, pts, order=3)
    fn = chi0.chord if hasattr(chi0, "chord") else chi0
    return np.asarray(fn(pts), dtype=complex)


def characteristic_solution(chi0, spec: LindbladSpec, t: float, pts, flow_sign: int = FLOW_SIGN) -> np.ndarray:
    """``chi0(R_{sign t} xi) exp(-xi.M xi / 2 hbar)`` at arbitrary chord points."""
    pts = np.asarray(pts, dtype=float)
    if pts.shape[-1] != 2 * spec.dims:
        raise DimensionError("chord points do not match the LindbladSpec dimension")
    R = flow(spec, flow_sign * t)
    back = pts @ R.T
    M = decay_matrix(spec, t)
    damp = np.exp(-np.einsum("...i,ij,...j->...", pts, M, pts) / (2 * spec.hbar))
    return _evaluate_chi0(chi0, back) * damp


def lindblad_propagate(chi0, spec: LindbladSpec, t: float, axes=None) -> PhaseGrid:
    """Evolve a chord function for time ``t``.

    ``chi0`` is a chord grid (values off the nodes are read by cubic interpolation)
    or anything with a ``chord`` evaluator, sampled on ``axes``.
    """
    if isinstance(chi0, PhaseGrid):
        if chi0.rep != "chord":
            raise ValueError(f"lindblad_propagate needs a chord grid, got {chi0.rep}")
        if chi0.hbar != spec.hbar or chi0.dims != spec.dims:
            raise ValueError("grid and LindbladSpec disagree on hbar or dimension")
        axes = chi0.axes
        R = flow(spec, FLOW_SIGN * t)
        if not np.allclose(R, np.eye(R.shape[0]), atol=1e-14, rtol=0):
            warnings.warn("reading the initial chord grid off-node with cubic interpolation", GridAccuracyWarning, stacklevel=2)
        else:
            pts = _chord_points(axes)
            M = decay_matrix(spec, t)
            damp = np.exp(-np.einsum("...i,ij,...j->...", pts, M, pts) / (2 * spec.hbar))
            return chi0.with_values(chi0.values * damp)
    else:
        if getattr(chi0, "hbar", spec.hbar) != spec.hbar:
            raise ValueError("state and LindbladSpec disagree on hbar")
        axes = tuple(Axis(*a) for a in (axes if axes is not None else centred_axes(spec.dims)))
    vals = characteristic_solution(chi0, spec, t, _chord_points(axes))
    return PhaseGrid("chord", axes, vals, spec.hbar)


# --------------------------------------------------------------- PDE oracle


def _fd4(v: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Fourth-order central first derivative, zero outside the box."""
    pad = [(0, 0)] * v.ndim
    pad[axis] = (2, 2)
    u = np.pad(v, pad)
    sl = lambda k: np.take(u, np.arange(2 + k, 2 + k + v.shape[axis]), axis=axis)  # noqa: E731
    return (sl(-2) - 8 * sl(-1) + 8 * sl(1) - sl(2)) / (12 * h)


def lindblad_rhs(chi: np.ndarray, spec: LindbladSpec, axes) -> np.ndarray:
    """Right-hand side of the chord Lindblad equation by finite differences."""
    pts = _chord_points(axes)
    vel = pts @ spec.generator.T
    D = spec.diffusion
    out = -np.einsum("...i,ij,...j->...", pts, D, pts) / (2 * spec.hbar) * chi
    for i, a in enumerate(axes):
        out = out - vel[..., i] * _fd4(chi, i, Axis(*a).spacing)
    return out


def fd_lindblad(chi0: PhaseGrid, spec: LindbladSpec, t: float, dt: float = 5e-3) -> PhaseGrid:
    """Integrate the chord Lindblad equation with RK4 in time."""
    if chi0.rep != "chord":
        raise ValueError("the PDE oracle acts on chord grids")
    steps = max(1, int(np.ceil(abs(t) / dt)))
    h = t / steps
    v = np.array(chi0.values)
    f = lambda y: lindblad_rhs(y, spec, chi0.axes)  # noqa: E731
    for _ in range(steps):
        k1 = f(v)
        k2 = f(v + 0.5 * h * k1)
        k3 = f(v + 0.5 * h * k2)
        k4 = f(v + h * k3)
        v = v + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return chi0.with_values(v)


def orientation_residuals(state, spec: LindbladSpec, t: float, axes, dt: float = 5e-3) -> dict:
    """Sup-distance between the PDE oracle and the characteristic solution for each flow orientation."""
    chi0 = PhaseGrid("chord", axes, state.chord(_chord_points(axes)), spec.hbar)
    ref = fd_lindblad(chi0, spec, t, dt).values
    pts = _chord_points(chi0.axes)
    return {s: float(np.max(np.abs(characteristic_solution(state, spec, t, pts, flow_sign=s) - ref))) for s in (-1, 1)}


# ------------------------------------------------------------- diagnostics


def wigner_from_chord_at(chi: PhaseGrid, x) -> np.ndarray:
    """Direct quadrature of ``W(x) = (2 pi hbar)^-L int d xi exp(i xi^x / hbar) chi(xi)``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    L, h = chi.dims, chi.hbar
    pts = _chord_points(chi.axes).reshape(-1, 2 * L)
    vals = chi.values.reshape(-1)
    keep = np.abs(vals) > 1e-20 * np.abs(vals).max()
    pts, vals = pts[keep], vals[keep]
    J = symplectic_form(L)
    # xi ^ x = xi . (J x) with the (p, q) ordering
    phase = pts @ (J @ x.T)
    w = np.exp(1j * phase / h).T @ vals * chi.cell / (2 * np.pi * h) ** L
    return w.real


def min_wigner(chi: PhaseGrid, refine: bool = True) -> float:
    """Minimum of the Wigner function recovered from a chord grid, refined off-node."""
    W = symplectic_fourier(chi, "chord->wigner")
    vals = W.values.real
    k = np.unravel_index(np.argmin(vals), vals.shape)
    best = float(vals[k])
    if not refine:
        return best
    x0 = np.array([c[i] for c, i in zip(W.coords(), k)])
    step = np.array([a.spacing for a in W.axes])
    res = minimize(
        lambda x: float(wigner_from_chord_at(chi, x)[0]),
        x0,
        method="Nelder-Mead",
        options={"initial_simplex": np.vstack([x0] + [x0 + 0.5 * s * e for s, e in zip(step, np.eye(len(x0)))]), "xatol": 1e-6, "fatol": 1e-18},
    )
    return min(best, float(res.fun))


def default_positivity_tol(L: int, hbar: float = 1.0) -> float:
    return 1e-6 * (np.pi * hbar) ** (-L)


def positivity_time(state, spec: LindbladSpec, t_max: float, tol: float | None = None, axes=None, n_scan: int = 41, resolution: float = 1e-3) -> float:
    """Earliest time at which ``min W(x, t) >= -tol``, bisection-refined to ``resolution``.

    ``axes`` are chord axes; they must contain the interference structure of the initial state.
    """
    tol = default_positivity_tol(spec.dims, spec.hbar) if tol is None else tol
    axes = tuple(Axis(*a) for a in (axes if axes is not None else centred_axes(spec.dims)))

    def positive(t):
        chi = lindblad_propagate(state, spec, t, axes)
        # refinement can only lower the minimum, so skip it when the nodes already fail
        return min_wigner(chi, refine=False) >= -tol and min_wigner(chi) >= -tol

    if positive(0.0):
        return 0.0
    times = np.linspace(0.0, t_max, n_scan)
    lo, hi = 0.0, None
    for t in times[1:]:
        if positive(t):
            hi = t
            break
        lo = t
    if hi is None:
        raise ValueError(f"Wigner function still negative at t_max={t_max}")
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if positive(mid):
            hi = mid
        else:
            lo = mid
    return hi


def evolution_trace(state, spec: LindbladSpec, times, axes=None) -> list:
    """Time-series records ``(t, purity, min_w, chi0_residual)``."""
    out = []
    for t in times:
        chi = lindblad_propagate(state, spec, float(t), axes)
        c0 = chi.values[chi.origin_index()]
        out.append({
            "t": float(t),
            "purity": purity(chi),
            "min_w": min_wigner(chi, refine=False),
            "chi0_residual": float(abs(c0 - (2 * np.pi * spec.hbar) ** (-spec.dims))),
        })
    return out


# ---------------------------------------------------------- central limit


def _chord_fn(chi1):
    return chi1.chord if hasattr(chi1, "chord") else chi1


def single_mode_mean(chi1, hbar: float = 1.0, eps: float = 1e-4) -> np.ndarray:
    """Mean ``(p, q)`` read from the phase of the chord function near the origin."""
    fn = _chord_fn(chi1)
    pts = np.array([[eps, 0.0], [-eps, 0.0], [0.0, eps], [0.0, -eps]])
    lv = np.log((2 * np.pi * hbar) * np.asarray(fn(pts), dtype=complex))
    # chi ~ exp(i m^xi / hbar): d/dxi_p -> -i m_q / hbar, d/dxi_q -> i m_p / hbar
    dp = (lv[0] - lv[1]).imag / (2 * eps)
    dq = (lv[2] - lv[3]).imag / (2 * eps)
    return np.array([dq * hbar, -dp * hbar])


def clt_cm_chord(chi1, L: int, xi, hbar: float = 1.0, mean_tol: float = 1e-6):
    """Chord function of the rescaled centre of mass of ``L`` independent copies.

    ``chi_CM(xi) = (2 pi hbar)^-1 [(2 pi hbar) chi1(xi / sqrt(L))]^L``.
    """
    if int(L) != L or L < 1:
        raise ValueError("particle count must be a positive integer")
    m = single_mode_mean(chi1, hbar)
    if np.max(np.abs(m)) > mean_tol:
        raise ValueError(f"single-particle mean {m} is nonzero; re-centre the state first")
    fn = _chord_fn(chi1)
    xi = np.asarray(xi, dtype=float)
    base = (2 * np.pi * hbar) * np.asarray(fn(xi / np.sqrt(L)), dtype=complex)
    return base ** int(L) / (2 * np.pi * hbar)


@dataclass(frozen=True)
class CltResult:
    L_list: tuple
    distances: tuple

    @property
    def monotone(self) -> bool:
        d = self.distances
        return all(b < a for a, b in zip(d[:-1], d[1:]))


def gaussian_wigner_grid(cov, axes, hbar: float = 1.0) -> PhaseGrid:
    """Normalized Gaussian with covariance ``cov`` centred at the origin."""
    cov = np.asarray(cov, dtype=float)
    pts = _chord_points(axes)
    quad = np.einsum("...i,ij,...j->...", pts, np.linalg.inv(cov), pts)
    n = cov.shape[0]
    vals = np.exp(-0.5 * quad) / np.sqrt((2 * np.pi) ** n * np.linalg.det(cov))
    return PhaseGrid("wigner", axes, vals, hbar)


def clt_convergence_metric(chi1, L_list, target_cov, axes=None, hbar: float = 1.0) -> CltResult:
    """Sup-distance of the centre-of-mass Wigner function to the target Gaussian for each ``L``.

    ``axes`` are the (centred, odd) Wigner axes; the chord samples live on their reciprocal.
    """
    axes = tuple(Axis(*a) for a in (axes if axes is not None else centred_axes(1, 257, 8.0 * np.sqrt(hbar))))
    if len(axes) != 2:
        raise DimensionError("the centre-of-mass construction is single-mode")
    chord_axes = reciprocal_axes(axes, hbar)
    pts = _chord_points(chord_axes)
    target = gaussian_wigner_grid(target_cov, axes, hbar).values.real
    dists = []
    for L in L_list:
        chi = PhaseGrid("chord", chord_axes, clt_cm_chord(chi1, L, pts, hbar), hbar)
        W = symplectic_fourier(chi, "chord->wigner", target_axes=None)
        dists.append(float(np.max(np.abs(W.values.real - target))))
    return CltResult(tuple(int(v) for v in L_list), tuple(dists))


def covariance_from_chord(chi1, L: int = 1, hbar: float = 1.0, eps: float = 1e-4) -> np.ndarray:
    """Covariance of a zero-mean state from the curvature of ``log chi`` at the origin.

    ``log[(2 pi hbar)^L chi] ~ -xi.J^T K J xi / (2 hbar^2)`` near ``xi = 0``.
    """
    fn = _chord_fn(chi1)
    n = 2 * L
    E = np.eye(n) * eps
    Hs = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            pts = np.array([E[i] + E[j], E[i] - E[j], -E[i] + E[j], -E[i] - E[j]])
            v = np.log((2 * np.pi * hbar) ** L * np.asarray(fn(pts), dtype=complex)).real
            Hs[i, j] = Hs[j, i] = (v[0] - v[1] - v[2] + v[3]) / (4 * eps**2)
    J = symplectic_form(L)
    return -(hbar**2) * J @ Hs @ J.T
