import numpy as np
import pytest

from psq.gaussian import epr_state, partial_trace
from psq.grid import centred_axes, sample, self_reciprocal_axes, symplectic_fourier
from psq.measures import (
    check_wigner_bound,
    correlations,
    fourier_invariance_residual,
    husimi,
    imag_fraction,
    mixture,
    normalization,
    parity_probabilities,
    purity,
    wehrl_entropy,
    wigner_entropy,
)
from psq.states import Cat, Coherent, Fock

STATES = [Coherent((1.0, -0.5)), Cat((3, 3), 1), Cat((2, 1), -1), Fock(3)]


@pytest.fixture(scope="module")
def sr_axes():
    return self_reciprocal_axes(1, 257)


@pytest.mark.parametrize("s", STATES, ids=repr)
def test_purity_pure_states(s, axes_1d):
    W = sample(s, "wigner", axes_1d)
    chi = symplectic_fourier(W)
    assert purity(W) == pytest.approx(1.0, abs=1e-6)
    assert purity(chi) == pytest.approx(purity(W), abs=1e-6)
    assert np.max(np.abs(chi.values)) <= abs(chi.values[chi.origin_index()]) + 1e-15
    assert check_wigner_bound(W)
    assert imag_fraction(W) < 1e-12


def test_purity_mixture(axes_1d):
    m = mixture([sample(Fock(0), "wigner", axes_1d), sample(Fock(1), "wigner", axes_1d)], [0.5, 0.5])
    assert purity(m) == pytest.approx(0.5, abs=1e-6)
    assert normalization(m) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        mixture([m, m], [0.7, 0.7])


def test_purity_reduced_epr():
    r = partial_trace(epr_state(1.0, 4.0), [0])
    W = sample(r, "wigner", centred_axes(1, 257, 8.0))
    assert purity(W) == pytest.approx(0.8, abs=1e-3)


def test_purity_wrong_rep(axes_1d):
    h = husimi(sample(Coherent((0, 0)), "wigner", axes_1d))
    with pytest.raises(ValueError):
        purity(h)


def test_correlations_coherent(axes_1d):
    chi = sample(Coherent((1.5, -2.0)), "chord", centred_axes(1, 257, 12.0))
    c = correlations(chi, method="pure")
    pts = chi.points()
    assert np.allclose(c.values, np.exp(-np.sum(pts**2, axis=-1) / 2), atol=1e-12)
    assert c.at_origin() == pytest.approx(1.0)


def test_correlations_routes_agree_for_pure(sr_axes):
    chi = sample(Cat((1.5, 1.0), 1), "chord", sr_axes)
    a, b = correlations(chi, "pure"), correlations(chi, "fourier")
    assert np.max(np.abs(a.values - b.values)) < 1e-8
    assert b.at_origin() == pytest.approx(purity(chi), abs=1e-10)
    assert np.allclose(b.values, b.values[::-1, ::-1], atol=1e-12)


def test_correlations_cat_peaks():
    eta = np.array([2.0, 1.5])
    chi = sample(Cat(tuple(eta), 1), "chord", centred_axes(1, 241, 12.0))
    c = correlations(chi, "pure")
    pts = chi.points()
    for centre in (np.zeros(2), 2 * eta, -2 * eta):
        k = np.unravel_index(np.argmin(np.sum((pts - centre) ** 2, axis=-1)), c.values.shape)
        window = c.values[k[0] - 3:k[0] + 4, k[1] - 3:k[1] + 4]
        assert c.values[k] == window.max() and c.values[k] > 0.2


def test_correlations_integral(axes_1d):
    chi = sample(Fock(2), "chord", centred_axes(1, 257, 12.0))
    c = correlations(chi, "pure")
    total = np.sum(c.values) * chi.cell
    assert total == pytest.approx(2 * np.pi, rel=1e-6)


@pytest.mark.parametrize("s,bound", [(Fock(2), 1e-5), (Coherent((0.5, -0.3)), 1e-6), (Cat((1.0, 1.0), -1), 1e-5)], ids=repr)
def test_fourier_invariance_pure(s, bound, sr_axes):
    chi = sample(s, "chord", sr_axes)
    assert fourier_invariance_residual(correlations(chi)) < bound


def test_fourier_invariance_mixture(sr_axes):
    chis = [sample(Fock(n), "chord", sr_axes) for n in (0, 1)]
    mix = mixture(chis, [0.5, 0.5])
    assert fourier_invariance_residual(correlations(mix)) > 0.1


def test_fourier_invariance_needs_self_reciprocal(axes_1d):
    chi = sample(Fock(1), "chord", axes_1d, check_boundary=False)
    with pytest.raises(ValueError):
        fourier_invariance_residual(correlations(chi, "pure"))


def test_parity_probabilities(axes_1d):
    assert parity_probabilities(sample(Cat((3, 3), 1), "wigner", axes_1d), np.zeros(2))[0] == pytest.approx(1.0)
    assert parity_probabilities(Fock(1), np.zeros(2))[1] == pytest.approx(1.0)
    pp, pm = parity_probabilities(Coherent((0, 0)), np.array([6.0, 6.0]))
    assert pp == pytest.approx(0.5, abs=1e-12) and pm == pytest.approx(0.5, abs=1e-12)


def test_parity_identity(rng):
    s = Cat((1.0, 2.0), -1)
    for x in rng.normal(size=(20, 2)):
        pp, pm = parity_probabilities(s, x)
        assert pp + pm == pytest.approx(1.0)
        assert s.wigner(x) == pytest.approx((2 * pp - 1) / np.pi, abs=1e-14)


def test_husimi_coherent_doubles_variance():
    W = sample(Coherent((0.5, -0.5), omega=2.0), "wigner", centred_axes(1, 257, 10.0))
    h = husimi(W, omega=2.0)
    assert normalization(h) == pytest.approx(1.0, abs=1e-6)
    P, Q = np.meshgrid(*h.coords(), indexing="ij")
    # covariance diag(omega/2, 1/(2 omega)) doubled
    vp, vq = 2.0, 0.5
    ref = np.exp(-((P - 0.5) ** 2) / (2 * vp) - (Q + 0.5) ** 2 / (2 * vq)) / (2 * np.pi * np.sqrt(vp * vq))
    assert np.max(np.abs(h.values.real - ref)) < 1e-8


def test_husimi_fock1_zero_at_origin(axes_1d):
    h = husimi(sample(Fock(1), "wigner", axes_1d))
    v = h.values.real
    assert v.min() >= -1e-9
    assert abs(v[h.origin_index()]) < 1e-9
    assert normalization(h) == pytest.approx(1.0, abs=1e-6)


def test_husimi_kernel_too_wide():
    W = sample(Coherent((0, 0)), "wigner", centred_axes(1, 33, 3.0), check_boundary=False)
    with pytest.raises(ValueError):
        husimi(W)


def test_wehrl_entropies(axes_1d):
    coh = wehrl_entropy(husimi(sample(Coherent((0, 0)), "wigner", axes_1d)))
    assert coh == pytest.approx(1.0, abs=1e-3)
    for s in (Cat((3, 3), 1), Fock(1), Fock(3)):
        assert wehrl_entropy(husimi(sample(s, "wigner", axes_1d))) > coh
    a = husimi(sample(Coherent((2, 0)), "wigner", axes_1d))
    b = husimi(sample(Fock(2), "wigner", axes_1d))
    mix = mixture([a, b], [0.4, 0.6])
    assert wehrl_entropy(mix) >= 0.4 * wehrl_entropy(a) + 0.6 * wehrl_entropy(b)


def test_wigner_entropy(axes_1d):
    assert wigner_entropy(sample(Coherent((0, 0)), "wigner", axes_1d)) == pytest.approx(1 - np.log(2), abs=1e-6)
    with pytest.raises(ValueError):
        wigner_entropy(sample(Fock(1), "wigner", axes_1d))
    r = partial_trace(epr_state(1.0, 4.0), [0])
    val = wigner_entropy(sample(r, "wigner", axes_1d))
    assert np.isfinite(val) and val > 0
