"""Phase-space geometry: points, the skew product and affine symplectic maps.

Coordinates are interleaved per mode, ``(p1, q1, p2, q2, ..., pL, qL)``, so the
symplectic form is block diagonal and every mode occupies a contiguous pair of
axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

SYMPLECTIC_TOL = 1e-10


class DimensionError(ValueError):
    """Raised when phase-space objects of incompatible dimension are combined."""


def symplectic_form(L: int) -> np.ndarray:
    """Return the ``2L x 2L`` matrix J with ``J x . y = x ^ y``."""
    if L < 1:
        raise DimensionError(f"number of modes must be positive, got {L}")
    return np.kron(np.eye(L), np.array([[0.0, -1.0], [1.0, 0.0]]))


@dataclass(frozen=True)
class PhasePoint:
    """A point, translation, chord or centre in ``2L``-dimensional phase space."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(-1)
        if c.size == 0 or c.size % 2:
            raise DimensionError(f"phase point needs 2L components, got {c.size}")
        if not np.all(np.isfinite(c)):
            raise ValueError("phase point components must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def dims(self) -> int:
        return self.coords.size // 2

    @property
    def p(self) -> np.ndarray:
        return self.coords[0::2]

    @property
    def q(self) -> np.ndarray:
        return self.coords[1::2]

    @classmethod
    def zero(cls, L: int) -> "PhasePoint":
        return cls(np.zeros(2 * L))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __add__(self, other):
        return PhasePoint(self.coords + _vec(other, self.dims))

    def __sub__(self, other):
        return PhasePoint(self.coords - _vec(other, self.dims))

    def __neg__(self):
        return PhasePoint(-self.coords)

    def __len__(self):
        return self.coords.size


def _vec(x, L: int | None = None) -> np.ndarray:
    v = np.asarray(x.coords if isinstance(x, PhasePoint) else x, dtype=float)
    if v.shape[-1] % 2:
        raise DimensionError(f"phase-space vectors need an even length, got {v.shape[-1]}")
    if L is not None and v.shape[-1] != 2 * L:
        raise DimensionError(f"expected {2 * L} components, got {v.shape[-1]}")
    return v


def skew_product(a, b) -> np.ndarray | float:
    """Skew product ``a ^ b = sum_n (p_n q'_n - q_n p'_n)``.

    Broadcasts over leading axes; the last axis holds the coordinates.
    """
    a = _vec(a)
    b = _vec(b)
    if a.shape[-1] != b.shape[-1]:
        raise DimensionError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    out = (a[..., 0::2] * b[..., 1::2] - a[..., 1::2] * b[..., 0::2]).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def is_symplectic(m, tol: float = SYMPLECTIC_TOL) -> bool:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"matrix must be square, got shape {m.shape}")
    if m.shape[0] % 2:
        raise DimensionError(f"symplectic matrices have even size, got {m.shape[0]}")
    J = symplectic_form(m.shape[0] // 2)
    return bool(np.max(np.abs(m.T @ J @ m - J)) <= tol)


@dataclass(frozen=True)
class AffineMap:
    """Inhomogeneous linear canonical map ``x -> C x + shift``.

    The symplectic condition is checked at construction.
    """

    matrix: np.ndarray
    shift: np.ndarray = field(default=None)
    tol: float = SYMPLECTIC_TOL

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if not is_symplectic(m, self.tol):
            raise ValueError("matrix is not symplectic to tolerance %g" % self.tol)
        s = np.zeros(m.shape[0]) if self.shift is None else np.array(_vec(self.shift), dtype=float)
        if s.shape != (m.shape[0],):
            raise DimensionError(f"shift has {s.size} components, matrix acts on {m.shape[0]}")
        m.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "shift", s)

    @property
    def dims(self) -> int:
        return self.matrix.shape[0] // 2

    @classmethod
    def identity(cls, L: int) -> "AffineMap":
        return cls(np.eye(2 * L))

    @classmethod
    def translation(cls, eta) -> "AffineMap":
        eta = _vec(eta)
        return cls(np.eye(eta.size), eta)

    def __call__(self, x):
        return apply_affine(self, x)

    def inverse(self) -> "AffineMap":
        inv = np.linalg.inv(self.matrix)
        return AffineMap(inv, -inv @ self.shift, self.tol)

    def compose(self, other: "AffineMap") -> "AffineMap":
        """Return ``self o other`` (apply ``other`` first)."""
        if other.dims != self.dims:
            raise DimensionError("cannot compose maps of different dimension")
        return AffineMap(self.matrix @ other.matrix, self.matrix @ other.shift + self.shift, self.tol)

    def __matmul__(self, other: "AffineMap") -> "AffineMap":
        return self.compose(other)

    @property
    def linear(self) -> "AffineMap":
        return AffineMap(self.matrix, None, self.tol)

    def point_transformation(self) -> np.ndarray | None:
        """Return R if this is a configuration-space point map q -> R q, else None."""
        m = self.matrix
        pq = m[0::2, 1::2]
        qp = m[1::2, 0::2]
        if np.max(np.abs(pq), initial=0.0) > self.tol or np.max(np.abs(qp), initial=0.0) > self.tol:
            return None
        R = m[1::2, 1::2]
        if np.max(np.abs(m[0::2, 0::2] - np.linalg.inv(R).T)) > 1e-9:
            return None
        return R.copy()


def apply_affine(amap: AffineMap, x):
    v = _vec(x, amap.dims)
    out = v @ amap.matrix.T + amap.shift
    return PhasePoint(out) if isinstance(x, PhasePoint) else out


def coupling_rotation(theta: float) -> AffineMap:
    """Two-mode rotation generated by ``H = p1 q2 - p2 q1``.

    Positions and momenta rotate identically, ``q1' = cos t q1 + sin t q2`` and
    ``q2' = -sin t q1 + cos t q2``, so ``coupling_rotation(a) @ coupling_rotation(b)``
    equals ``coupling_rotation(a + b)``.
    """
    c, s = np.cos(theta), np.sin(theta)
    m = np.zeros((4, 4))
    for k in (0, 1):  # k=0 momenta, k=1 positions
        m[k, k] = c
        m[k, 2 + k] = s
        m[2 + k, k] = -s
        m[2 + k, 2 + k] = c
    return AffineMap(m)


def squeeze(r: float) -> AffineMap:
    """Single-mode squeeze ``(p, q) -> (r p, q / r)``."""
    if r <= 0:
        raise ValueError("squeeze factor must be positive")
    return AffineMap(np.diag([r, 1.0 / r]))


def phase_rotation(phi: float) -> AffineMap:
    """Single-mode rotation of the (q, p) plane by angle ``phi`` (harmonic flow)."""
    c, s = np.cos(phi), np.sin(phi)
    # (p, q) ordering; q' = c q + s p, p' = -s q + c p
    return AffineMap(np.array([[c, -s], [s, c]]))


def direct_sum(*maps: AffineMap) -> AffineMap:
    """Block-diagonal map acting independently on consecutive groups of modes."""
    m = block_diag(*(g.matrix for g in maps))
    return AffineMap(m, np.concatenate([g.shift for g in maps]))


def mode_permutation(order) -> AffineMap:
    """Map that moves mode ``order[k]`` into slot ``k``."""
    order = list(order)
    L = len(order)
    if sorted(order) != list(range(L)):
        raise ValueError(f"not a permutation of range({L}): {order}")
    m = np.zeros((2 * L, 2 * L))
    for k, j in enumerate(order):
        m[2 * k, 2 * j] = 1.0
        m[2 * k + 1, 2 * j + 1] = 1.0
    return AffineMap(m)


def lagrangian_rotation(alpha: float, beta: float) -> AffineMap:
    """Single-mode symplectic map whose new position is ``q' = alpha p + beta q``."""
    n = np.hypot(alpha, beta)
    if n == 0:
        raise ValueError("alpha and beta cannot both vanish")
    a, b = alpha / n, beta / n
    # rows: p' = b p - a q (scaled), q' = n (a p + b q)
    return AffineMap(np.array([[b / n, -a / n], [a * n, b * n]]))
