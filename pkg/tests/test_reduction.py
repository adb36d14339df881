import numpy as np
import pytest

from psq.gaussian import epr_state, partial_trace, propagate, reduced_epr_purity
from psq.grid import Axis, centred_axes, sample, symplectic_fourier
from psq.measures import correlations, purity
from psq.reduction import (
    SchmidtSpectrum,
    concurrence_squared,
    reduce,
    reduce_chord,
    reduce_wigner,
    reduced_correlations,
    schmidt_decompose,
)
from psq.states import Cat, Coherent, Fock, Product, Transformed
from psq.symplectic import DimensionError, coupling_rotation, direct_sum, phase_rotation, squeeze

Q_AXES = ((-9.0, 9.0, 361), (-9.0, 9.0, 361))


@pytest.fixture(scope="module")
def epr_grids():
    ax = (Axis(-8, 8, 45), Axis(-4.5, 4.5, 49)) * 2
    W = sample(epr_state(1.0, 4.0), "wigner", ax)
    return W, symplectic_fourier(W)


def test_both_routes_reduced_purity(epr_grids):
    W, chi = epr_grids
    assert purity(W) == pytest.approx(1.0, abs=1e-6)
    for keep in (0, 1):
        assert purity(reduce_wigner(W, keep)) == pytest.approx(0.8, abs=1e-3)
        assert purity(reduce_chord(chi, keep)) == pytest.approx(0.8, abs=1e-3)
    assert concurrence_squared(W) == pytest.approx(0.2, abs=1e-3)
    assert concurrence_squared(chi, 1) == pytest.approx(0.2, abs=1e-3)


def test_reduced_grid_matches_closed_form(epr_grids):
    W, _ = epr_grids
    r = reduce(W, 0)
    ref = partial_trace(epr_state(1.0, 4.0), [0]).wigner(r.points())
    assert np.max(np.abs(r.values.real - ref)) < 1e-8


def test_reduced_chord_normalized(epr_grids):
    _, chi = epr_grids
    r = reduce(chi, 1)
    assert r.values[r.origin_index()] == pytest.approx(1 / (2 * np.pi), abs=1e-12)


def test_route_errors(epr_grids):
    W, chi = epr_grids
    with pytest.raises(ValueError):
        reduce_wigner(chi, 0)
    with pytest.raises(ValueError):
        reduce_chord(W, 0)
    with pytest.raises(ValueError):
        reduce(W, [2])
    assert reduce(W, [0, 1]) is W


def test_product_reduces_to_factor():
    a, b = Cat((1.0, 0.5), -1), Coherent((0.2, 0.3), omega=1.5)
    ax = centred_axes(2, 41, 6.0)
    W = sample(Product((a, b)), "wigner", ax, check_boundary=False)
    r = reduce(W, 0)
    assert np.max(np.abs(r.values.real - a.wigner(r.points()))) < 1e-6
    assert concurrence_squared(W) == pytest.approx(0.0, abs=1e-5)


def test_concurrence_requires_pure():
    ax = centred_axes(2, 33, 6.0)
    W = sample(Product((Coherent((0, 0)), Coherent((0, 0)))), "wigner", ax, check_boundary=False)
    with pytest.raises(ValueError):
        concurrence_squared(W.with_values(0.5 * W.values))


def test_local_maps_leave_concurrence_unchanged():
    ax = centred_axes(2, 41, 7.0)
    s = Transformed(Product((Fock(1), Coherent((0, 0)))), coupling_rotation(np.pi / 4))
    base = concurrence_squared(sample(s, "wigner", ax, check_boundary=False))
    local = Transformed(s, direct_sum(squeeze(1.3), phase_rotation(0.7)))
    moved = concurrence_squared(sample(local, "wigner", ax, check_boundary=False))
    assert base > 0.1
    assert moved == pytest.approx(base, abs=1e-4)


def test_schmidt_epr_geometric():
    sp = schmidt_decompose(epr_state(1.0, 4.0), Q_AXES)
    assert sp.norm() == pytest.approx(1.0, abs=1e-8)
    assert sp.reduced_purity() == pytest.approx(reduced_epr_purity(1.0, 4.0), abs=1e-8)
    assert sp.concurrence_squared() == pytest.approx(0.2, abs=1e-8)
    ratios = sp.probabilities[1:6] / sp.probabilities[:5]
    assert np.allclose(ratios, ratios[0], rtol=1e-5)
    # geometric weights (1 - r) r^k reproduce the purity (1 - r) / (1 + r)
    r = ratios[0]
    assert (1 - r) / (1 + r) == pytest.approx(0.8, abs=1e-6)


def test_schmidt_product_has_one_term():
    sp = schmidt_decompose(Product((Coherent((0.5, 1.0)), Fock(2))), Q_AXES)
    assert sp.lambdas[0] == pytest.approx(1.0, abs=1e-8)
    assert sp.lambdas[1] < 1e-8


def test_schmidt_errors():
    with pytest.raises(DimensionError):
        schmidt_decompose(Coherent((0, 0)), Q_AXES)
    with pytest.raises(ValueError):
        schmidt_decompose(Transformed(Product((Fock(1), Fock(0))), direct_sum(phase_rotation(0.3), phase_rotation(0.0))), Q_AXES)
    with pytest.raises(ValueError):
        SchmidtSpectrum(np.array([0.5, -0.1]))


def test_reduced_correlations_of_product():
    a, b = Fock(1), Coherent((0.4, 0.0))
    ax = centred_axes(2, 41, 8.0)
    chi = sample(Product((a, b)), "chord", ax, check_boundary=False)
    c1 = reduced_correlations(correlations(chi, "pure"), 0)
    ref = correlations(sample(a, "chord", ax[:2], check_boundary=False), "pure")
    assert np.max(np.abs(c1.values - ref.values)) < 1e-4


def test_reduced_correlations_purity_gaussian():
    g = epr_state(1.0, 4.0)
    ax = centred_axes(2, 41, 9.0)
    chi = sample(g, "chord", ax, check_boundary=False)
    c1 = reduced_correlations(correlations(chi, "pure"), 0)
    assert c1.at_origin() == pytest.approx(0.8, abs=1e-3)


def test_gaussian_rotation_reduces_like_grid():
    g = propagate(epr_state(1.0, 4.0), direct_sum(squeeze(2.0), phase_rotation(0.4)))
    assert partial_trace(g, [0]).purity == pytest.approx(0.8, abs=1e-12)
