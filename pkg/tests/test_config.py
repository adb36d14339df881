import numpy as np
import pytest

from psq.config import ConfigError, build_map, build_state, load_config, parse_grid, parse_state
from psq.gaussian import epr_state
from psq.grid import Axis
from psq.states import Cat, Coherent, Fock, GaussianPure, Product, Transformed


def test_parse_simple_kinds():
    c = parse_state("cat:eta=3,3:sign=+")
    assert isinstance(c, Cat) and c.parity_sign == 1 and np.allclose(c.center.coords, [3, 3])
    assert parse_state("cat:eta=1,2:sign=-").parity_sign == -1
    f = parse_state("fock:n=2:omega=2")
    assert isinstance(f, Fock) and f.n == 2 and f.omega == 2
    assert isinstance(parse_state("vacuum"), Coherent)
    assert isinstance(parse_state("ground:w=1,4"), GaussianPure)


def test_parse_epr_packed_keys():
    s = parse_state("epr:w1=0.05,w2=20")
    assert isinstance(s, GaussianPure) and s.dims == 2
    x = np.array([0.1, -0.2, 0.3, 0.05])
    assert s.wigner(x) == pytest.approx(epr_state(0.05, 20).wigner(x))


def test_parse_product_and_hbar():
    s = parse_state("coherent:eta=1,0*fock:n=1", hbar=0.5)
    assert isinstance(s, Product) and s.dims == 2 and s.hbar == 0.5


@pytest.mark.parametrize(
    "text,key",
    [
        ("", "state"),
        ("dog", "state"),
        ("cat:sign=+", "state.eta"),
        ("cat:eta=1:sign=+", "state.eta"),
        ("cat:eta=1,1:sign=x", "state.sign"),
        ("fock:n=1.5", "state.n"),
        ("fock:n=1:colour=red", "state.colour"),
        ("coherent:eta=a,b", "state.eta"),
        ("coherent*fock:n=-1", "state[1].n"),
        ("epr:w1=1", "state.w1"),
        ("coherent:omega=-1", "state"),
    ],
)
def test_parse_errors_name_the_key(text, key):
    with pytest.raises(ConfigError) as err:
        parse_state(text)
    assert err.value.key == key


def test_build_map_types():
    assert np.allclose(build_map({"type": "coupling_rotation", "theta": 0.3}).matrix.shape, (4, 4))
    ds = build_map({"type": "direct_sum", "maps": [{"type": "squeeze", "r": 2}, {"type": "phase_rotation", "phi": 0.1}]})
    assert ds.dims == 2
    t = build_map({"type": "translation", "eta": [1, 2]})
    assert np.allclose(t(np.zeros(2)), [1, 2])
    assert build_map({"type": "permutation", "order": [1, 0]}).dims == 2
    with pytest.raises(ConfigError) as err:
        build_map({"type": "matrix", "matrix": [[2, 0], [0, 2]]})
    assert err.value.key == "map"
    with pytest.raises(ConfigError) as err:
        build_map({"type": "squeeze"})
    assert err.value.key == "map.r"
    with pytest.raises(ConfigError) as err:
        build_map({"type": "shear"})
    assert err.value.key == "map.type"


def test_yaml_nested_product_transform(tmp_path):
    p = tmp_path / "run.yaml"
    p.write_text(
        "hbar: 1.0\n"
        "grid: 41:[-6,6]\n"
        "state:\n"
        "  kind: transformed\n"
        "  map: {type: coupling_rotation, theta: -0.785398163397448}\n"
        "  base:\n"
        "    kind: product\n"
        "    factors:\n"
        "      - {kind: cat, eta: [1.0, 1.0], sign: '-'}\n"
        "      - fock:n=1\n"
    )
    cfg = load_config(p)
    s = build_state(cfg["state"], cfg["hbar"])
    assert isinstance(s, Transformed) and isinstance(s.base, Product) and s.dims == 2
    assert s.chord(np.zeros(4)) == pytest.approx(1 / (2 * np.pi) ** 2)


def test_json_config(tmp_path):
    p = tmp_path / "run.json"
    p.write_text('{"state": {"kind": "gaussian", "mean": [0, 0], "cov": [[1, 0], [0, 0.25]]}}')
    s = build_state(load_config(p)["state"])
    assert s.wigner(np.zeros(2)) == pytest.approx(1 / (2 * np.pi * 0.5))


def test_structured_errors_name_the_path(tmp_path):
    with pytest.raises(ConfigError) as err:
        build_state({"kind": "product", "factors": [{"kind": "fock", "n": 1}, {"kind": "cat", "eta": [1, 1], "sgn": "+"}]})
    assert err.value.key == "state.factors[1].sgn"
    with pytest.raises(ConfigError) as err:
        build_state({"kind": "transformed", "base": "fock:n=1", "map": {"type": "coupling_rotation", "theta": 1}})
    assert err.value.key == "state.map"
    with pytest.raises(ConfigError) as err:
        build_state({"kind": "gaussian", "mean": [0, 0]})
    assert err.value.key == "state.cov"
    bad = tmp_path / "bad.yaml"
    bad.write_text("state: [unclosed\n")
    with pytest.raises(ConfigError) as err:
        load_config(bad)
    assert err.value.key == "config"


def test_parse_grid():
    ax = parse_grid("257:[-8,8]^2")
    assert ax == (Axis(-8, 8, 257),) * 2
    assert parse_grid("33:[-4,4]", 4) == (Axis(-4, 4, 33),) * 4
    mixed = parse_grid("45:[-8,8];49:[-4.5,4.5];45:[-8,8];49:[-4.5,4.5]", 4)
    assert mixed[1] == Axis(-4.5, 4.5, 49)
    for bad in ("", "257[-8,8]", "4:[-1,1]", "33:[2,1]", "33:[a,1]"):
        with pytest.raises(ConfigError) as err:
            parse_grid(bad)
        assert err.value.key == "grid"
    with pytest.raises(ConfigError):
        parse_grid("33:[-4,4]^2", 4)
