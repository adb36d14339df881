import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid
from scipy.special import eval_laguerre

from psq.gaussian import GaussianState, gaussian_from_ground
from psq.states import (
    Cat,
    Coherent,
    Fock,
    GaussianPure,
    Product,
    Transformed,
    eval_chord,
    eval_position_wavefunction,
    eval_wigner,
    fock_wigner_asymptotic,
    laguerre,
)
from psq.symplectic import AffineMap, DimensionError, coupling_rotation, phase_rotation, squeeze

SINGLE = [
    Coherent((0.0, 0.0)),
    Coherent((1.2, -0.7), omega=2.0),
    Cat((3.0, 3.0), 1),
    Cat((1.0, 0.5), -1),
    Cat((0.8, 1.1), 1, omega=0.5),
    Fock(0),
    Fock(1),
    Fock(4, omega=1.7),
    Coherent((0.5, 0.5), hbar=0.3),
    Fock(2, hbar=2.0),
]


def wigner_from_psi(s, p, q, half=12.0, n=4001):
    """(1/2 pi hbar) int dy psi*(q - y/2) psi(q + y/2) exp(-i p y / hbar)."""
    y = np.linspace(-half, half, n)
    a = np.conj(s.wavefunction((q - y / 2)[:, None]))
    b = s.wavefunction((q + y / 2)[:, None])
    return float(np.real(trapezoid(a * b * np.exp(-1j * p * y / s.hbar), y)) / (2 * np.pi * s.hbar))


def test_wigner_examples():
    assert eval_wigner(Coherent((0, 0)), np.zeros(2)) == pytest.approx(1 / np.pi, rel=1e-14)
    assert eval_wigner(Cat((3, 3), 1), np.zeros(2)) == pytest.approx(1 / np.pi, rel=1e-12)
    assert eval_wigner(Fock(1), np.zeros(2)) == pytest.approx(-1 / np.pi, rel=1e-14)


def test_wigner_dimension_mismatch():
    with pytest.raises(DimensionError):
        eval_wigner(Coherent((0, 0)), np.zeros(4))


@pytest.mark.parametrize("s", SINGLE, ids=repr)
def test_chord_origin(s):
    assert eval_chord(s, np.zeros(2)) == pytest.approx(1 / (2 * np.pi * s.hbar), rel=1e-14)


def test_coherent_chord_modulus_independent_of_centre():
    xi = np.array([[0.3, -1.0], [2.0, 0.5]])
    ref = np.exp(-np.sum(xi**2, axis=-1) / 4) / (2 * np.pi)
    for eta in [(0, 0), (2, -1), (5, 5)]:
        assert np.allclose(np.abs(Coherent(eta).chord(xi)), ref, atol=1e-15)


def test_cat_chord_peaks_at_separation():
    eta = np.array([3.0, 3.0])
    s = Cat(tuple(eta), 1)
    for centre in (2 * eta, -2 * eta):
        vals = np.abs(s.chord(centre + 0.05 * np.array([[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1]])))
        assert vals[0] == vals.max()
        assert vals[0] > 0.4 / (2 * np.pi)


@pytest.mark.parametrize("s", SINGLE, ids=repr)
def test_chord_hermitian(s, rng):
    xi = rng.normal(size=(200, 2)) * 3
    assert np.allclose(s.chord(-xi), np.conj(s.chord(xi)), atol=1e-12)


@pytest.mark.parametrize("s", SINGLE, ids=repr)
def test_wigner_bound(s, rng):
    x = rng.normal(size=(10_000, 2)) * 4
    assert np.max(np.abs(s.wigner(x))) <= 1 / (np.pi * s.hbar) + 1e-12
    assert np.max(np.abs(s.chord(x))) <= 1 / (2 * np.pi * s.hbar) + 1e-12


@pytest.mark.parametrize("s", [Coherent((0.4, -0.9)), Cat((1.5, 1.0), 1), Cat((1.0, -2.0), -1), Fock(3), Fock(2, omega=2.0), Cat((0.6, 0.8), -1, omega=1.5)], ids=repr)
def test_wigner_matches_wavefunction_oracle(s, rng):
    for p, q in rng.normal(size=(6, 2)) * 1.5:
        assert eval_wigner(s, np.array([p, q])) == pytest.approx(wigner_from_psi(s, p, q), abs=1e-8)


def test_wavefunction_examples():
    assert eval_position_wavefunction(Coherent((0, 0)), np.zeros(1)) == pytest.approx(np.pi**-0.25, rel=1e-14)
    assert abs(eval_position_wavefunction(Fock(1), np.zeros(1))) < 1e-15
    q = np.linspace(-15, 15, 6001)
    for s in (Cat((3, 3), 1), Cat((2, -1), -1), Fock(5)):
        assert trapezoid(np.abs(s.wavefunction(q[:, None])) ** 2, q) == pytest.approx(1, abs=1e-6)


def test_wavefunction_rejects_non_point_map():
    t = Transformed(Coherent((0, 0)), phase_rotation(0.3))
    with pytest.raises(ValueError):
        t.wavefunction(np.zeros(1))


def test_laguerre_examples():
    z = np.linspace(-3, 9, 25)
    assert np.all(laguerre(0, z) == 1)
    assert np.allclose(laguerre(1, z), 1 - z)
    assert laguerre(2, 2.0) == pytest.approx(-1)
    for n in (3, 10, 40):
        assert np.allclose(laguerre(n, z), eval_laguerre(n, z), rtol=1e-10, atol=1e-10)


@given(st.integers(0, 30))
def test_laguerre_at_zero(n):
    assert laguerre(n, 0.0) == 1.0


def test_transformed_wigner_and_chord(rng):
    base = Cat((1.0, 2.0), -1)
    m = AffineMap(squeeze(1.7).matrix @ phase_rotation(0.4).matrix, [0.3, -0.2])
    t = Transformed(base, m)
    x = rng.normal(size=(50, 2))
    assert np.allclose(t.wigner(x), base.wigner((x - m.shift) @ np.linalg.inv(m.matrix).T))
    # chord: linear part on the argument, shift as a phase
    lin = Transformed(base, m.linear)
    assert np.allclose(np.abs(t.chord(x)), np.abs(lin.chord(x)))
    assert np.allclose(lin.chord(x), base.chord(x @ np.linalg.inv(m.matrix).T))


def test_product_factorizes(rng):
    a, b = Cat((1, 1), 1), Fock(2)
    s = a * b
    assert isinstance(s, Product) and s.dims == 2
    x = rng.normal(size=(20, 4))
    assert np.allclose(s.wigner(x), a.wigner(x[:, :2]) * b.wigner(x[:, 2:]))
    assert np.allclose(s.chord(x), a.chord(x[:, :2]) * b.chord(x[:, 2:]))
    with pytest.raises(ValueError):
        Product((Coherent((0, 0)), Coherent((0, 0), hbar=2.0)))


def test_rotated_product_wavefunction_norm():
    s = Transformed(Product((Coherent((0, 0), 1.0), Coherent((0, 0), 4.0))), coupling_rotation(np.pi / 4))
    q = np.linspace(-7, 7, 281)
    Q1, Q2 = np.meshgrid(q, q, indexing="ij")
    psi = s.wavefunction(np.stack([Q1, Q2], axis=-1))
    assert trapezoid(trapezoid(np.abs(psi) ** 2, q), q) == pytest.approx(1, abs=1e-9)


def test_gaussian_pure_matches_coherent(rng):
    g = GaussianPure(gaussian_from_ground([1.0]))
    x = rng.normal(size=(30, 2))
    assert np.allclose(g.wigner(x), Coherent((0, 0)).wigner(x), atol=1e-14)
    assert np.allclose(g.chord(x), Coherent((0, 0)).chord(x), atol=1e-14)


def test_state_validation():
    with pytest.raises(ValueError):
        Coherent((0, 0), omega=-1.0)
    with pytest.raises(ValueError):
        Fock(-1)
    with pytest.raises(ValueError):
        Cat((1, 1), 0)
    with pytest.raises(ValueError):
        GaussianPure(GaussianState(np.zeros(2), np.eye(2)))


def test_fock_asymptotic_parity_at_origin():
    for n in (10, 20, 31):
        exact = eval_wigner(Fock(n), np.zeros(2))
        assert np.sign(fock_wigner_asymptotic(n, np.zeros(2))) == np.sign(exact)


def test_fock_asymptotic_low_n_flagged():
    with pytest.warns(RuntimeWarning):
        fock_wigner_asymptotic(1, np.zeros(2))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fock_wigner_asymptotic(10, np.zeros(2))


def _asymptotic_error(n, cosine=False, zmax=10.0):
    z = np.linspace(0.5 if cosine else 0.0, zmax, 400)
    x = np.stack([np.zeros_like(z), z / (2 * np.sqrt(n))], axis=-1)
    exact = Fock(n).wigner(x)
    approx = fock_wigner_asymptotic(n, x, cosine=cosine)
    return np.max(np.abs(approx - exact)) / np.max(np.abs(exact))


def test_fock_asymptotic_improves_with_n():
    assert _asymptotic_error(100) < _asymptotic_error(10) / 2


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.floats(-2, 2), st.floats(-2, 2))
def test_fock_wigner_formula(n, p, q):
    r2 = p * p + q * q
    ref = (-1) ** n / np.pi * np.exp(-r2) * eval_laguerre(n, 2 * r2)
    assert eval_wigner(Fock(n), np.array([p, q])) == pytest.approx(ref, abs=1e-12)
