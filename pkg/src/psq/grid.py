"""Sampled phase-space fields and the transforms between them.

Grids are uniform and, for transforms, centred with an odd number of nodes so
that the origin is an exact node of both the centre grid and the chord grid.
Axis ``2k`` holds ``p_k`` (or ``xi_p``) and axis ``2k + 1`` holds ``q_k``.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass
from math import factorial
from typing import NamedTuple, Sequence

import numpy as np
import scipy.fft as sfft
from scipy.integrate import trapezoid
from scipy.ndimage import map_coordinates

from .symplectic import AffineMap, DimensionError

REPS = ("wigner", "chord", "husimi", "marginal")
MIN_POINTS = 8
BOUNDARY_REL = 1e-6


class ReciprocityError(ValueError):
    """Requested chord/centre axes are not reciprocal for the symplectic transform."""


class GridAccuracyWarning(UserWarning):
    """An operation fell back to interpolation or saw mass at the grid boundary."""


def fft_workers() -> int:
    """Worker count for transforms; capped by ``PSQ_THREADS`` when set."""
    cap = os.environ.get("PSQ_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            raise ValueError(f"PSQ_THREADS must be an integer, got {cap!r}") from None
    return n


class Axis(NamedTuple):
    lo: float
    hi: float
    n: int

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    def coords(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)

    @property
    def centered(self) -> bool:
        return self.n % 2 == 1 and abs(self.lo + self.hi) <= 1e-12 * max(1.0, abs(self.hi))

    def node(self, value: float) -> int | None:
        """Index of ``value`` if it lies on a node, else None."""
        pos = (value - self.lo) / self.spacing
        k = int(round(pos))
        if 0 <= k < self.n and abs(pos - k) < 1e-9:
            return k
        return None

    @classmethod
    def centred(cls, half_width: float, n: int) -> "Axis":
        if n % 2 == 0:
            raise ValueError("centred axes need an odd number of nodes")
        return cls(-float(half_width), float(half_width), int(n))

    @classmethod
    def from_spacing(cls, spacing: float, n: int) -> "Axis":
        half = spacing * (n - 1) / 2
        return cls(-half, half, n)


def default_labels(naxes: int) -> tuple:
    return tuple(f"{'pq'[i % 2]}{i // 2}" for i in range(naxes))


@dataclass(frozen=True)
class PhaseGrid:
    """A complex field sampled on a uniform box in phase (or chord) space."""

    rep: str
    axes: tuple
    values: np.ndarray
    hbar: float = 1.0
    labels: tuple = None

    def __post_init__(self):
        if self.rep not in REPS:
            raise ValueError(f"unknown representation {self.rep!r}; expected one of {REPS}")
        axes = tuple(Axis(float(a[0]), float(a[1]), int(a[2])) for a in self.axes)
        for a in axes:
            if a.n < MIN_POINTS:
                raise ValueError(f"axis {a} has fewer than {MIN_POINTS} points")
            if not a.hi > a.lo:
                raise ValueError(f"degenerate axis {a}")
        vals = np.array(self.values, dtype=complex)
        if vals.shape != tuple(a.n for a in axes):
            raise DimensionError(f"values shape {vals.shape} does not match axes {[a.n for a in axes]}")
        labels = default_labels(len(axes)) if self.labels is None else tuple(self.labels)
        if len(labels) != len(axes):
            raise DimensionError("one label per axis required")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        vals.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "labels", labels)

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def dims(self) -> int:
        if self.ndim % 2:
            raise DimensionError(f"{self.ndim}-axis grid is not a full phase space")
        return self.ndim // 2

    @property
    def cell(self) -> float:
        return float(np.prod([a.spacing for a in self.axes]))

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def coords(self) -> list:
        return [a.coords() for a in self.axes]

    def points(self) -> np.ndarray:
        """All grid points, shape ``(n1, ..., nk, k)``."""
        return np.stack(np.meshgrid(*self.coords(), indexing="ij"), axis=-1)

    def origin_index(self) -> tuple:
        idx = tuple(a.node(0.0) for a in self.axes)
        if any(i is None for i in idx):
            raise ValueError("grid origin is not a node")
        return idx

    def with_values(self, values, rep: str | None = None) -> "PhaseGrid":
        return PhaseGrid(rep or self.rep, self.axes, values, self.hbar, self.labels)

    def value_at(self, x) -> complex:
        """Value at a point; nodes are exact, other points are linearly interpolated (flagged)."""
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.ndim:
            raise DimensionError(f"point has {x.size} components, grid has {self.ndim} axes")
        nodes = [a.node(v) for a, v in zip(self.axes, x)]
        if all(k is not None for k in nodes):
            return complex(self.values[tuple(nodes)])
        warnings.warn(f"point {x} is off-grid; using linear interpolation", GridAccuracyWarning, stacklevel=2)
        return complex(interpolate(self, x[None, :], order=1)[0])

    def boundary_ratio(self) -> float:
        """Largest boundary magnitude relative to the global maximum."""
        mag = np.abs(self.values)
        peak = mag.max()
        if peak == 0:
            return 0.0
        edge = 0.0
        for ax in range(self.ndim):
            edge = max(edge, np.take(mag, [0, -1], axis=ax).max())
        return float(edge / peak)


def interpolate(g: PhaseGrid, pts, order: int = 1) -> np.ndarray:
    """Spline interpolation of grid values at arbitrary points (zero outside the box)."""
    pts = np.asarray(pts, dtype=float)
    flat = pts.reshape(-1, g.ndim)
    idx = np.stack([(flat[:, i] - a.lo) / a.spacing for i, a in enumerate(g.axes)])
    kw = dict(order=order, mode="constant", cval=0.0, prefilter=order > 1)
    out = map_coordinates(g.values.real, idx, **kw).astype(complex)
    if np.any(g.values.imag):
        out += 1j * map_coordinates(g.values.imag, idx, **kw)
    return out.reshape(pts.shape[:-1])


def centred_axes(L: int, n: int = 257, half_width: float = 8.0) -> tuple:
    return tuple(Axis.centred(half_width, n) for _ in range(2 * L))


def default_axes(state=None, L: int | None = None, hbar: float = 1.0, n: int = 257) -> tuple:
    """257 nodes per axis on ``[-8 sqrt(hbar), 8 sqrt(hbar)]``; Fock(n) widens by ``sqrt(n + 1)``."""
    if state is not None:
        L, hbar = state.dims, state.hbar
    scale = 8.0 * np.sqrt(hbar)
    level = getattr(state, "n", None)
    if isinstance(level, int):
        scale *= np.sqrt(level + 1)
    return centred_axes(L, n, scale)


def self_reciprocal_axes(L: int, n: int = 257, hbar: float = 1.0) -> tuple:
    """Axes whose chord grid coincides with the centre grid (spacing ``sqrt(2 pi hbar / n)``)."""
    return tuple(Axis.from_spacing(np.sqrt(2 * np.pi * hbar / n), n) for _ in range(2 * L))


def sample(state, rep: str, axes, chunk: int = 1 << 20, check_boundary: bool = True) -> PhaseGrid:
    """Evaluate ``state.wigner`` or ``state.chord`` at every node of ``axes``."""
    if rep not in ("wigner", "chord"):
        raise ValueError(f"can only sample wigner or chord, got {rep!r}")
    axes = tuple(Axis(*a) for a in axes)
    if len(axes) != 2 * state.dims:
        raise DimensionError(f"{len(axes)} axes given for a {state.dims}-mode state")
    fn = state.wigner if rep == "wigner" else state.chord
    shape = tuple(a.n for a in axes)
    coords = [a.coords() for a in axes]
    out = np.empty(shape, dtype=complex)
    flat = out.reshape(-1)
    total = flat.size
    for start in range(0, total, chunk):
        idx = np.unravel_index(np.arange(start, min(total, start + chunk)), shape)
        pts = np.stack([c[i] for c, i in zip(coords, idx)], axis=-1)
        flat[start:start + pts.shape[0]] = fn(pts)
    g = PhaseGrid(rep, axes, out, state.hbar)
    if check_boundary and g.boundary_ratio() > BOUNDARY_REL:
        warnings.warn(
            f"{rep} grid boundary magnitude is {g.boundary_ratio():.2e} of the peak; enlarge the box",
            GridAccuracyWarning,
            stacklevel=2,
        )
    return g


def reciprocal_axes(axes, hbar: float = 1.0) -> tuple:
    """Chord axes conjugate to centre axes (and vice versa): ``dxi = 2 pi hbar / (n dx)``."""
    axes = tuple(Axis(*a) for a in axes)
    if len(axes) % 2:
        raise DimensionError("reciprocal axes need conjugate pairs")
    for a in axes:
        if not a.centered:
            raise ReciprocityError(f"axis {a} is not centred with an odd node count")
    out = []
    for k in range(0, len(axes), 2):
        ap, aq = axes[k], axes[k + 1]
        out.append(Axis.from_spacing(2 * np.pi * hbar / (aq.n * aq.spacing), aq.n))
        out.append(Axis.from_spacing(2 * np.pi * hbar / (ap.n * ap.spacing), ap.n))
    return tuple(out)


def _axes_match(a, b, rtol=1e-10) -> bool:
    return all(
        x.n == y.n and abs(x.lo - y.lo) <= rtol * abs(y.hi) and abs(x.hi - y.hi) <= rtol * abs(y.hi)
        for x, y in zip(a, b)
    ) and len(a) == len(b)


def symplectic_fourier(g: PhaseGrid, direction: str = "wigner->chord", target_axes=None) -> PhaseGrid:
    """Discrete version of ``chi(xi) = (2 pi hbar)^-L int dx exp(-i xi^x / hbar) W(x)``.

    The inverse direction uses the kernel ``exp(+i xi^x / hbar)`` with the same prefactor.
    """
    forward = direction in ("wigner->chord", "forward")
    if not forward and direction not in ("chord->wigner", "inverse"):
        raise ValueError(f"unknown direction {direction!r}")
    expected = "wigner" if forward else "chord"
    if g.rep != expected:
        raise ValueError(f"{direction} needs a {expected} grid, got {g.rep}")
    L, h = g.dims, g.hbar
    out_axes = reciprocal_axes(g.axes, h)
    if target_axes is not None and not _axes_match(tuple(Axis(*a) for a in target_axes), out_axes):
        raise ReciprocityError(f"target axes {target_axes} are not reciprocal to {g.axes}")

    # xi^x = xi_p q - xi_q p: in both directions odd axes (q or xi_q) carry the
    # exp(-i ...) kernel and even axes (p or xi_p) carry exp(+i ...)
    plus_axes = list(range(0, 2 * L, 2))
    minus_axes = list(range(1, 2 * L, 2))
    all_axes = list(range(2 * L))
    v = sfft.ifftshift(g.values, axes=all_axes)
    workers = fft_workers()
    v = sfft.fftn(v, axes=minus_axes, workers=workers)
    v = sfft.ifftn(v, axes=plus_axes, norm="forward", workers=workers)
    v = sfft.fftshift(v, axes=all_axes)
    perm = []
    for k in range(L):
        perm += [2 * k + 1, 2 * k]
    v = np.transpose(v, perm) * (g.cell / (2 * np.pi * h) ** L)
    return PhaseGrid("chord" if forward else "wigner", out_axes, v, h, g.labels)


def integrate(g: PhaseGrid, axes: Sequence[int] | None = None):
    """Trapezoid integral over the given axes (all by default)."""
    axes = sorted(range(g.ndim) if axes is None else axes, reverse=True)
    v = g.values
    for ax in axes:
        v = trapezoid(v, dx=g.axes[ax].spacing, axis=ax)
    return v


def project_marginal(g: PhaseGrid, plane: AffineMap | None = None, axis_selection=None) -> PhaseGrid:
    """Marginal density of the selected coordinates after the symplectic change ``plane``.

    ``axis_selection`` lists coordinate indices (default: every position ``q_k``);
    at most one coordinate per mode may be selected so that the set is Lagrangian.
    A non-trivial ``plane`` resamples ``W(C^-1 (x - shift))`` by quintic splines.
    """
    if g.rep != "wigner":
        raise ValueError(f"marginals are projections of Wigner grids, got {g.rep}")
    L = g.dims
    sel = list(range(1, 2 * L, 2)) if axis_selection is None else [int(a) for a in axis_selection]
    if not sel or len(set(sel)) != len(sel) or min(sel) < 0 or max(sel) >= 2 * L:
        raise ValueError(f"invalid axis selection {sel}")
    modes = [a // 2 for a in sel]
    if len(set(modes)) != len(modes):
        raise ValueError(f"selection {sel} contains a conjugate pair; it is not Lagrangian")
    vals = g.values.real
    if plane is not None:
        if plane.dims != L:
            raise DimensionError(f"plane acts on {plane.dims} modes, grid has {L}")
        if not (np.allclose(plane.matrix, np.eye(2 * L), atol=1e-14) and not np.any(plane.shift)):
            pts = g.points()
            inv = plane.inverse()
            src = (pts - plane.shift) @ inv.matrix.T
            vals = interpolate(g.with_values(vals), src, order=5).real
    traced = [i for i in range(2 * L) if i not in sel]
    work = PhaseGrid("wigner", g.axes, vals, g.hbar, g.labels)
    marg = np.real(integrate(work, traced))
    keep_sorted = sorted(sel)
    order = [keep_sorted.index(a) for a in sel]
    marg = np.transpose(marg, order) if marg.ndim > 1 else marg
    return PhaseGrid(
        "marginal", tuple(g.axes[a] for a in sel), marg, g.hbar, tuple(g.labels[a] for a in sel)
    )


def chord_section(g: PhaseGrid, fix: dict | None = None) -> PhaseGrid:
    """Restrict a chord grid by fixing some components ``{axis_index: value}``.

    Values off the nodes are linearly interpolated and flagged with a warning.
    """
    if g.rep != "chord":
        raise ValueError(f"sections are taken of chord grids, got {g.rep}")
    fix = dict(fix or {})
    if not fix:
        return g
    vals = g.values
    for ax in sorted(fix, reverse=True):
        a = g.axes[ax]
        v = float(fix[ax])
        if not a.lo - 1e-12 <= v <= a.hi + 1e-12:
            raise ValueError(f"section value {v} outside axis {ax} range [{a.lo}, {a.hi}]")
        k = a.node(v)
        if k is not None:
            vals = np.take(vals, k, axis=ax)
        else:
            warnings.warn(f"section at {v} is off-node on axis {ax}; linear interpolation", GridAccuracyWarning, stacklevel=2)
            pos = (v - a.lo) / a.spacing
            k0 = min(int(np.floor(pos)), a.n - 2)
            w = pos - k0
            vals = (1 - w) * np.take(vals, k0, axis=ax) + w * np.take(vals, k0 + 1, axis=ax)
    keep = [i for i in range(g.ndim) if i not in fix]
    return PhaseGrid("chord", tuple(g.axes[i] for i in keep), vals, g.hbar, tuple(g.labels[i] for i in keep))


def _central_weights(order: int, half: int) -> np.ndarray:
    offsets = np.arange(-half, half + 1, dtype=float)
    A = np.vander(offsets, increasing=True).T
    rhs = np.zeros(offsets.size)
    rhs[order] = factorial(order)
    return np.linalg.solve(A, rhs)


def moments_from_chord(g: PhaseGrid, order: int, variable: str = "q", mode: int = 0, accuracy: int = 8) -> float:
    """Moment ``<q^n>`` or ``<p^n>`` of one mode from derivatives of the chord grid at the origin.

    ``<q^n> = (i hbar)^n d^n/dxi_p^n (2 pi hbar)^L chi |0`` and
    ``<p^n> = (-i hbar)^n d^n/dxi_q^n (2 pi hbar)^L chi |0``.
    """
    if g.rep != "chord":
        raise ValueError("moments are read from chord grids")
    if not 0 <= order <= 4:
        raise ValueError("moment order must be between 0 and 4")
    if variable not in ("q", "p"):
        raise ValueError("variable must be 'q' or 'p'")
    L, h = g.dims, g.hbar
    origin = g.origin_index()
    scale = (2 * np.pi * h) ** L
    if order == 0:
        return float((scale * g.values[origin]).real)
    ax = 2 * mode + (0 if variable == "q" else 1)
    line = list(origin)
    half = (order + accuracy) // 2
    centre = origin[ax]
    if centre - half < 0 or centre + half >= g.axes[ax].n:
        raise ValueError(f"finite-difference stencil of half-width {half} exceeds the grid")
    line[ax] = slice(centre - half, centre + half + 1)
    samples = scale * g.values[tuple(line)]
    deriv = _central_weights(order, half) @ samples / g.axes[ax].spacing**order
    factor = (1j * h) ** order if variable == "q" else (-1j * h) ** order
    return float((factor * deriv).real)


# ---------------------------------------------------------------- file format

MAGIC = "# psq-grid v1"


def write_grid(g: PhaseGrid, path) -> None:
    """Write a grid in the ``psq-grid v1`` text format (17 significant digits)."""
    header = [
        MAGIC,
        f"# rep={g.rep}",
        f"# L={g.ndim / 2:g}" if g.ndim % 2 else f"# L={g.ndim // 2}",
        f"# hbar={g.hbar!r}",
        f"# naxes={g.ndim}",
    ]
    for i, a in enumerate(g.axes):
        header.append(f"# axis{i}={a.lo!r},{a.hi!r},{a.n}")
    header.append("# labels=" + ",".join(g.labels))
    header.append("# columns=index " + " ".join(g.labels) + " re im")
    pts = g.points().reshape(-1, g.ndim)
    vals = g.values.reshape(-1)
    idx = np.arange(vals.size)
    body = np.column_stack([pts, vals.real, vals.imag])
    fmt = " ".join(["%.17g"] * body.shape[1])
    with open(path, "w") as fh:
        fh.write("\n".join(header) + "\n")
        for i, row in zip(idx, body):
            fh.write(f"{i} " + fmt % tuple(row) + "\n")


def read_grid(path) -> PhaseGrid:
    meta = {}
    axes = {}
    with open(path) as fh:
        first = fh.readline().rstrip("\n")
        if first != MAGIC:
            raise ValueError(f"{path}: not a psq-grid v1 file")
        nheader = 1
        for line in fh:
            if not line.startswith("#"):
                break
            nheader += 1
            key, _, val = line[1:].strip().partition("=")
            if key.startswith("axis"):
                lo, hi, n = val.split(",")
                axes[int(key[4:])] = Axis(float(lo), float(hi), int(n))
            else:
                meta[key] = val
    naxes = int(meta["naxes"])
    axis_list = tuple(axes[i] for i in range(naxes))
    data = np.loadtxt(path, comments="#", ndmin=2)
    shape = tuple(a.n for a in axis_list)
    values = np.empty(int(np.prod(shape)), dtype=complex)
    index = data[:, 0].astype(np.int64)
    values[index] = data[:, -2] + 1j * data[:, -1]
    labels = tuple(meta["labels"].split(",")) if meta.get("labels") else None
    return PhaseGrid(meta["rep"], axis_list, values.reshape(shape), float(meta["hbar"]), labels)
