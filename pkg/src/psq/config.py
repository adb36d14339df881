"""State mini-language, structured run configs and grid specifications.

One-line states::

    state   := factor ("*" factor)*
    factor  := kind (":" key "=" value)*
    kind    := coherent | cat | fock | ground | epr | vacuum
    value   := number ("," number)* | "+" | "-"

Examples: ``cat:eta=3,3:sign=+``, ``fock:n=2:omega=2``, ``epr:w1=0.05,w2=20``,
``coherent:eta=1,0*fock:n=1``.

Grids::

    grid    := block (";" block)*
    block   := n ":[" lo "," hi "]" ["^" count]

A single block without a count is repeated for every phase-space axis.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np
import yaml

from .gaussian import GaussianState, epr_state, gaussian_from_ground
from .grid import Axis
from .states import Cat, Coherent, Fock, GaussianPure, Product, Transformed
from .symplectic import (
    AffineMap,
    coupling_rotation,
    direct_sum,
    mode_permutation,
    phase_rotation,
    squeeze,
)


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _floats(key, text) -> list:
    try:
        return [float(v) for v in str(text).split(",")]
    except ValueError:
        raise ConfigError(key, f"expected comma-separated numbers, got {text!r}") from None


def _one(key, text) -> float:
    vals = _floats(key, text)
    if len(vals) != 1:
        raise ConfigError(key, f"expected a single number, got {text!r}")
    return vals[0]


def _sign(key, text) -> int:
    text = str(text).strip()
    if text in ("+", "+1", "1", "even"):
        return 1
    if text in ("-", "-1", "odd"):
        return -1
    raise ConfigError(key, f"sign must be + or -, got {text!r}")


_KINDS = {
    "coherent": {"eta", "omega"},
    "vacuum": {"omega"},
    "cat": {"eta", "sign", "omega"},
    "fock": {"n", "omega"},
    "ground": {"w"},
    "epr": {"w1", "w2"},
}


def build_factor(kind: str, params: dict, hbar: float, where: str = "state"):
    kind = kind.strip().lower()
    if kind not in _KINDS:
        raise ConfigError(where, f"unknown state kind {kind!r}; expected one of {sorted(_KINDS)}")
    extra = set(params) - _KINDS[kind]
    if extra:
        k = sorted(extra)[0]
        raise ConfigError(f"{where}.{k}", f"not a parameter of {kind}")
    omega = _one(f"{where}.omega", params.get("omega", 1.0))
    try:
        if kind in ("coherent", "vacuum"):
            eta = _floats(f"{where}.eta", params.get("eta", "0,0"))
            if len(eta) != 2:
                raise ConfigError(f"{where}.eta", "expected two numbers p,q")
            return Coherent(tuple(eta), omega, hbar)
        if kind == "cat":
            if "eta" not in params:
                raise ConfigError(f"{where}.eta", "cat needs eta=p,q")
            eta = _floats(f"{where}.eta", params["eta"])
            if len(eta) != 2:
                raise ConfigError(f"{where}.eta", "expected two numbers p,q")
            return Cat(tuple(eta), _sign(f"{where}.sign", params.get("sign", "+")), omega, hbar)
        if kind == "fock":
            n = _one(f"{where}.n", params.get("n", 0))
            if n != int(n) or n < 0:
                raise ConfigError(f"{where}.n", f"Fock level must be a nonnegative integer, got {n}")
            return Fock(int(n), omega, hbar)
        if kind == "ground":
            if "w" not in params:
                raise ConfigError(f"{where}.w", "ground needs w=omega1,...")
            return GaussianPure(gaussian_from_ground(_floats(f"{where}.w", params["w"]), hbar))
        if "w1" not in params or "w2" not in params:
            raise ConfigError(f"{where}.w1", "epr needs w1 and w2")
        return GaussianPure(epr_state(_one(f"{where}.w1", params["w1"]), _one(f"{where}.w2", params["w2"]), hbar))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from None


def _split_factor(text: str, where: str):
    parts = [p for p in re.split(r":(?=[A-Za-z_]\w*=)", text.strip())]
    kind, params = parts[0], {}
    for part in parts[1:]:
        key, _, val = part.partition("=")
        params[key.strip()] = val.strip()
    if ":" in kind:
        raise ConfigError(where, f"cannot parse {text!r}")
    # epr:w1=0.05,w2=20 packs two keys into one value
    for key in list(params):
        m = re.match(r"^([^=]*?),(\w+)=(.*)$", params[key])
        while m:
            params[key] = m.group(1)
            params[m.group(2)] = m.group(3)
            key = m.group(2)
            m = re.match(r"^([^=]*?),(\w+)=(.*)$", params[key])
    return kind, params


def parse_state(text: str, hbar: float = 1.0):
    """Build a state from the one-line mini-language."""
    if not text or not text.strip():
        raise ConfigError("state", "empty state description")
    factors = []
    for i, chunk in enumerate(text.split("*")):
        where = "state" if "*" not in text else f"state[{i}]"
        kind, params = _split_factor(chunk, where)
        factors.append(build_factor(kind, params, hbar, where))
    return factors[0] if len(factors) == 1 else Product(tuple(factors))


# ---------------------------------------------------------- structured config


def build_map(spec, where: str = "map") -> AffineMap:
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError(where, "a map needs a 'type'")
    kind = spec["type"]
    try:
        if kind == "coupling_rotation":
            return coupling_rotation(float(spec["theta"]))
        if kind == "squeeze":
            return squeeze(float(spec["r"]))
        if kind == "phase_rotation":
            return phase_rotation(float(spec["phi"]))
        if kind == "translation":
            return AffineMap.translation(np.asarray(spec["eta"], dtype=float))
        if kind == "permutation":
            return mode_permutation(spec["order"])
        if kind == "matrix":
            shift = spec.get("shift")
            return AffineMap(np.asarray(spec["matrix"], dtype=float), None if shift is None else np.asarray(shift, dtype=float))
        if kind == "direct_sum":
            return direct_sum(*(build_map(m, f"{where}.maps[{i}]") for i, m in enumerate(spec["maps"])))
    except KeyError as exc:
        raise ConfigError(f"{where}.{exc.args[0]}", "missing") from None
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from None
    raise ConfigError(f"{where}.type", f"unknown map type {kind!r}")


def build_state(spec, hbar: float = 1.0, where: str = "state"):
    """Build a state from a nested mapping (or a mini-language string)."""
    if isinstance(spec, str):
        return parse_state(spec, hbar)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(where, "a state needs a 'kind'")
    kind = spec["kind"]
    if kind == "product":
        factors = spec.get("factors")
        if not factors:
            raise ConfigError(f"{where}.factors", "product needs a nonempty list of factors")
        return Product(tuple(build_state(f, hbar, f"{where}.factors[{i}]") for i, f in enumerate(factors)))
    if kind == "transformed":
        if "base" not in spec or "map" not in spec:
            raise ConfigError(f"{where}.base" if "base" not in spec else f"{where}.map", "missing")
        base = build_state(spec["base"], hbar, f"{where}.base")
        amap = build_map(spec["map"], f"{where}.map")
        if amap.dims != base.dims:
            raise ConfigError(f"{where}.map", f"map acts on {amap.dims} modes, state has {base.dims}")
        return Transformed(base, amap)
    if kind == "gaussian":
        try:
            return GaussianPure(GaussianState(np.asarray(spec["mean"], float), np.asarray(spec["cov"], float), hbar))
        except KeyError as exc:
            raise ConfigError(f"{where}.{exc.args[0]}", "missing") from None
        except ValueError as exc:
            raise ConfigError(where, str(exc)) from None
    params = {k: (",".join(str(v) for v in val) if isinstance(val, (list, tuple)) else str(val)) for k, val in spec.items() if k != "kind"}
    return build_factor(kind, params, hbar, where)


def load_config(path) -> dict:
    """Read a YAML or JSON run config into a dict."""
    text = Path(path).read_text()
    try:
        data = json.loads(text) if str(path).endswith(".json") else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError("config", f"cannot parse {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a mapping")
    return data


# ------------------------------------------------------------------ grids

_BLOCK = re.compile(r"^\s*(\d+)\s*:\s*\[\s*([^,\]]+)\s*,\s*([^\]]+)\s*\]\s*(?:\^\s*(\d+))?\s*$")


def parse_grid(text: str, naxes: int | None = None, key: str = "grid") -> tuple:
    """``257:[-8,8]^2`` style axes; a count-free single block fills every axis."""
    axes = []
    blocks = [b for b in str(text).split(";") if b.strip()]
    if not blocks:
        raise ConfigError(key, "empty grid specification")
    for b in blocks:
        m = _BLOCK.match(b)
        if not m:
            raise ConfigError(key, f"cannot parse grid block {b!r}; expected n:[lo,hi]^count")
        n, lo, hi, count = m.groups()
        try:
            ax = Axis(float(lo), float(hi), int(n))
        except ValueError:
            raise ConfigError(key, f"bad numbers in {b!r}") from None
        if ax.n < 8 or not ax.hi > ax.lo:
            raise ConfigError(key, f"axis {b!r} needs at least 8 nodes and hi > lo")
        if count is None and len(blocks) == 1 and naxes is not None:
            return tuple(ax for _ in range(naxes))
        axes += [ax] * (int(count) if count else 1)
    if naxes is not None and len(axes) != naxes:
        raise ConfigError(key, f"grid gives {len(axes)} axes, the state needs {naxes}")
    return tuple(axes)
