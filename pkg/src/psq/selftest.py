"""Fast invariant checks run by ``psq selftest``."""

from __future__ import annotations

import numpy as np

from .bell import ChshPointSet, chsh_value
from .decoherence import LindbladSpec, lindblad_propagate
from .gaussian import epr_state, reduced_epr_purity
from .grid import centred_axes, sample, symplectic_fourier
from .measures import normalization, purity
from .reduction import schmidt_decompose
from .states import Cat, Coherent, Fock, Product, Transformed
from .symplectic import coupling_rotation, is_symplectic


def _check(name, value, target, tol):
    ok = bool(abs(value - target) <= tol)
    return name, ok, f"value={value!r} target={target!r} tol={tol!r}"


def run_all() -> list:
    out = []
    ax = centred_axes(1, 129, 8.0)
    for label, s in (("coherent", Coherent((1.0, -0.5))), ("cat_odd", Cat((2.0, 1.0), -1)), ("fock3", Fock(3))):
        W = sample(s, "wigner", ax)
        out.append(_check(f"norm_{label}", normalization(W), 1.0, 1e-6))
        out.append(_check(f"chord_origin_{label}", float(np.real(s.chord(np.zeros(2)))), 1 / (2 * np.pi), 1e-14))
        chi = symplectic_fourier(W)
        err = float(np.max(np.abs(chi.values - s.chord(chi.points()))))
        out.append(_check(f"duality_{label}", err, 0.0, 1e-6))
        out.append(_check(f"purity_{label}", purity(W), 1.0, 1e-6))
    out.append(("symplectic_coupling", is_symplectic(coupling_rotation(0.3).matrix), "exact check"))
    out.append(_check("epr_reduced_purity", float(reduced_epr_purity(1.0, 4.0)), 0.8, 1e-12))
    rot = Transformed(Product((Coherent((0, 0), 1.0), Coherent((0, 0), 4.0))), coupling_rotation(-np.pi / 4))
    sp = schmidt_decompose(rot, [(-6, 6, 121), (-6, 6, 121)])
    out.append(_check("schmidt_norm", sp.norm(), 1.0, 1e-8))
    out.append(_check("schmidt_purity", sp.reduced_purity(), 0.8, 1e-3))
    out.append(_check("chsh_origin", chsh_value(epr_state(1.0, 4.0), ChshPointSet.origin_and((0, 0), (0, 0))), 2.0, 1e-9))
    spec = LindbladSpec.harmonic(0.1)
    chi = lindblad_propagate(Cat((1.5, 0.0), 1), spec, 1.0, centred_axes(1, 129, 8.0))
    out.append(_check("lindblad_trace", float(chi.values[chi.origin_index()].real), 1 / (2 * np.pi), 1e-12))
    return out
