"""Command-line front end: ``psq <subcommand> [options]``.

Scalars are printed (and optionally written) as ``key=value`` records; grids
are written in the psq-grid v1 text format.
"""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from . import bell, decoherence, measures, reduction
from .config import ConfigError, build_state, load_config, parse_grid, parse_state
from .grid import (
    GridAccuracyWarning,
    ReciprocityError,
    default_axes,
    read_grid,
    sample,
    symplectic_fourier,
    write_grid,
)
from .states import Transformed
from .symplectic import DimensionError

SUBCOMMANDS = ("state", "wigner", "chord", "transform", "reduce", "measure", "chsh", "lindblad", "clt", "selftest")
EX_OK, EX_NUMERIC, EX_CONFIG, EX_USAGE = 0, 1, 2, 64


class NumericalError(RuntimeError):
    """A numerical precondition (reciprocity, boundary mass, positivity...) failed."""


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple, np.ndarray)):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def emit(record: dict, path=None, stream=None) -> None:
    text = "".join(f"{k}={_fmt(v)}\n" for k, v in record.items())
    (stream or sys.stdout).write(text)
    if path:
        with open(path, "w") as fh:
            fh.write(text)


# ----------------------------------------------------------------- inputs


def _load_state(args):
    cfg = load_config(args.config) if getattr(args, "config", None) else {}
    hbar = args.hbar if args.hbar is not None else float(cfg.get("hbar", 1.0))
    if hbar <= 0:
        raise ConfigError("hbar", "must be positive")
    if getattr(args, "state", None):
        state = parse_state(args.state, hbar)
    elif "state" in cfg:
        state = build_state(cfg["state"], hbar)
    else:
        raise ConfigError("state", "give --state or a config file with a 'state' entry")
    return state, cfg


def _axes(args, cfg, naxes, state=None):
    text = args.grid if getattr(args, "grid", None) else cfg.get("grid")
    if text is None:
        return default_axes(state) if state is not None else None
    return parse_grid(text, naxes)


def _load_grid(path):
    try:
        return read_grid(path)
    except FileNotFoundError:
        raise ConfigError("input", f"no such file {path}") from None
    except (KeyError, ValueError) as exc:
        raise ConfigError("input", f"cannot read grid {path}: {exc}") from None


def _strict_sample(state, rep, axes):
    with warnings.catch_warnings():
        warnings.simplefilter("error", GridAccuracyWarning)
        try:
            return sample(state, rep, axes)
        except GridAccuracyWarning as w:
            raise NumericalError(str(w)) from None


# ------------------------------------------------------------ subcommands


def cmd_state(args):
    state, cfg = _load_state(args)
    L = state.dims
    x = np.zeros(2 * L) if args.at is None else np.asarray(args.at, dtype=float)
    if x.size != 2 * L:
        raise ConfigError("at", f"expected {2 * L} coordinates")
    rec = {
        "type": type(state.base if isinstance(state, Transformed) else state).__name__,
        "dims": L,
        "hbar": state.hbar,
        "wigner": float(np.real(state.wigner(x))),
        "chord_re": float(np.real(state.chord(x))),
        "chord_im": float(np.imag(state.chord(x))),
        "chord_origin": float(np.real(state.chord(np.zeros(2 * L)))),
    }
    cov = decoherence.covariance_from_chord(state, L, state.hbar) if args.moments else None
    if cov is not None:
        rec["covariance"] = cov.reshape(-1)
        rec["purity_gaussian"] = (state.hbar / 2) ** L / np.sqrt(np.linalg.det(cov))
    emit(rec, args.record)


def cmd_wigner(args):
    state, cfg = _load_state(args)
    axes = _axes(args, cfg, 2 * state.dims, state)
    g = _strict_sample(state, "wigner", axes)
    if args.out:
        write_grid(g, args.out)
    emit({
        "rep": g.rep,
        "integral": measures.normalization(g),
        "min": float(g.values.real.min()),
        "max": float(g.values.real.max()),
        "purity": measures.purity(g),
        "boundary_ratio": g.boundary_ratio(),
    }, args.record)


def cmd_chord(args):
    if args.input:
        w = _load_grid(args.input)
        g = symplectic_fourier(w, "wigner->chord")
    else:
        state, cfg = _load_state(args)
        axes = _axes(args, cfg, 2 * state.dims, state)
        g = _strict_sample(state, "chord", axes)
    if args.out:
        write_grid(g, args.out)
    emit({
        "rep": g.rep,
        "chord_origin": float(g.values[g.origin_index()].real),
        "purity": measures.purity(g),
        "boundary_ratio": g.boundary_ratio(),
    }, args.record)


def cmd_transform(args):
    g = _load_grid(args.input)
    direction = args.direction or ("wigner->chord" if g.rep == "wigner" else "chord->wigner")
    out = symplectic_fourier(g, direction)
    write_grid(out, args.out)
    emit({"rep": out.rep, "purity": measures.purity(out)}, args.record)


def cmd_reduce(args):
    g = _load_grid(args.input)
    r = reduction.reduce(g, args.keep)
    if args.out:
        write_grid(r, args.out)
    rec = {"rep": r.rep, "keep": args.keep, "reduced_purity": measures.purity(r)}
    full = measures.purity(g)
    rec["purity"] = full
    if abs(full - 1) < 1e-4:
        rec["concurrence_squared"] = 1 - rec["reduced_purity"]
    emit(rec, args.record)


def cmd_measure(args):
    g = _load_grid(args.input)
    rec = {"rep": g.rep}
    for what in args.what.split(","):
        what = what.strip()
        if what == "purity":
            rec["purity"] = measures.purity(g)
        elif what == "normalization":
            rec["normalization"] = measures.normalization(g)
        elif what == "wehrl":
            rec["wehrl"] = measures.wehrl_entropy(measures.husimi(g, args.omega))
        elif what == "wigner_entropy":
            rec["wigner_entropy"] = measures.wigner_entropy(g)
        elif what == "fourier_residual":
            chord = g if g.rep == "chord" else symplectic_fourier(g)
            rec["fourier_residual"] = measures.fourier_invariance_residual(measures.correlations(chord))
        elif what == "bound":
            rec["within_bound"] = measures.check_wigner_bound(g)
        elif what == "parity":
            pp, pm = measures.parity_probabilities(g, np.zeros(g.ndim))
            rec["parity_plus"], rec["parity_minus"] = pp, pm
        else:
            raise ConfigError("what", f"unknown measure {what!r}")
    emit(rec, args.record)


def _kv(text, key):
    out = {}
    for part in text.split(","):
        k, sep, v = part.partition("=")
        if not sep:
            raise ConfigError(key, f"expected key=value, got {part!r}")
        out[k.strip()] = v.strip()
    return out


def cmd_chsh(args):
    state, cfg = _load_state(args)
    if state.dims != 2:
        raise ConfigError("state", "CHSH needs a two-mode state")
    if args.at:
        v = np.asarray(args.at, dtype=float)
        pts = bell.ChshPointSet(v[0:2], v[2:4], v[4:6], v[6:8])
        emit({"chsh": bell.chsh_value(state, pts), **{k: np.asarray(x) for k, x in pts.as_dict().items()}}, args.record)
        return
    opts = _kv(args.scan, "scan") if args.scan else {}
    try:
        box = float(opts.get("box", 2.0))
    except ValueError:
        raise ConfigError("scan.box", f"not a number: {opts.get('box')!r}") from None
    if box <= 0:
        raise ConfigError("scan.box", "must be positive")
    res = bell.chsh_scan(state, box, args.steps)
    rec = {"max": res.max_value, "coarse_max": res.coarse_max, "violation": res.violation, "gap": bell.quantum_gap(res)}
    rec.update({k: np.asarray(v) for k, v in res.argmax.as_dict().items()})
    emit(rec, args.record)


def _times(text):
    try:
        t0, t1, n = text.split(":")
        return np.linspace(float(t0), float(t1), int(n))
    except ValueError:
        raise ConfigError("times", f"expected t0:t1:n, got {text!r}") from None


def cmd_lindblad(args):
    state, cfg = _load_state(args)
    if state.dims != 1:
        raise ConfigError("state", "the harmonic Lindblad model is single-mode")
    if args.gamma < 0:
        raise ConfigError("gamma", "must be nonnegative")
    spec = decoherence.LindbladSpec.harmonic(args.gamma, args.omega, state.hbar, args.channels)
    axes = _axes(args, cfg, 2)
    if axes is None:
        axes = parse_grid("257:[-12,12]", 2)
    if args.positivity:
        tol = args.tol if args.tol is not None else decoherence.default_positivity_tol(1, state.hbar)
        try:
            t = decoherence.positivity_time(state, spec, args.t_max, tol, axes)
        except ValueError as exc:
            raise NumericalError(str(exc)) from None
        emit({"positivity_time": t, "tol": tol, "gamma": args.gamma}, args.record)
        return
    trace = decoherence.evolution_trace(state, spec, _times(args.times), axes)
    lines = ["t purity min_w chi0_residual"]
    lines += [" ".join(repr(float(r[k])) for k in ("t", "purity", "min_w", "chi0_residual")) for r in trace]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)


def cmd_clt(args):
    state, cfg = _load_state(args)
    if state.dims != 1:
        raise ConfigError("state", "the centre-of-mass construction takes a single-mode state")
    Ls = [int(v) for v in args.L.split(",")]
    axes = _axes(args, cfg, 2)
    if axes is None:
        axes = parse_grid("257:[-8,8]", 2)
    try:
        cov = decoherence.covariance_from_chord(state, 1, state.hbar)
        res = decoherence.clt_convergence_metric(state, Ls, cov, axes, state.hbar)
    except ValueError as exc:
        raise NumericalError(str(exc)) from None
    emit({"L": res.L_list, "distance": res.distances, "monotone": res.monotone, "target_cov": cov.reshape(-1)}, args.record)


def cmd_selftest(args):
    from .selftest import run_all

    results = run_all()
    ok = True
    for name, passed, detail in results:
        sys.stdout.write(f"{name}={'pass' if passed else 'FAIL'} {detail}\n")
        ok &= passed
    if not ok:
        raise NumericalError("self-test failures")


# ------------------------------------------------------------------ parser


def _add_state(p, grid=True):
    p.add_argument("--state", help="state in the mini-language, e.g. cat:eta=3,3:sign=+")
    p.add_argument("--config", help="YAML/JSON run config with 'state', 'hbar', 'grid'")
    p.add_argument("--hbar", type=float, default=None)
    if grid:
        p.add_argument("--grid", help="axes, e.g. 257:[-8,8]^2")
    p.add_argument("--record", help="also write the key=value record here")


def _floats_arg(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="psq", description="Phase-space states, entanglement and decoherence.")
    sub = ap.add_subparsers(dest="cmd", metavar="subcommand")

    p = sub.add_parser("state", help="evaluate a state at a point")
    _add_state(p, grid=False)
    p.add_argument("--at", type=_floats_arg)
    p.add_argument("--moments", action="store_true", help="report the covariance read from the chord function")
    p.set_defaults(fn=cmd_state)

    p = sub.add_parser("wigner", help="sample the Wigner function")
    _add_state(p)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_wigner)

    p = sub.add_parser("chord", help="sample the chord function or transform a Wigner grid")
    _add_state(p)
    p.add_argument("--input")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_chord)

    p = sub.add_parser("transform", help="symplectic Fourier transform of a grid file")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--direction", choices=("wigner->chord", "chord->wigner"))
    p.add_argument("--record")
    p.set_defaults(fn=cmd_transform)

    p = sub.add_parser("reduce", help="partial trace of a grid file")
    p.add_argument("--input", required=True)
    p.add_argument("--keep", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--record")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("measure", help="scalar diagnostics of a grid file")
    p.add_argument("--input", required=True)
    p.add_argument("--what", default="purity,normalization")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--record")
    p.set_defaults(fn=cmd_measure)

    p = sub.add_parser("chsh", help="reflection CHSH value or maximization")
    _add_state(p, grid=False)
    p.add_argument("--scan", help="scan options, e.g. box=2")
    p.add_argument("--steps", type=int, default=21)
    p.add_argument("--at", type=_floats_arg, help="a1p,a1q,b1p,b1q,a2p,a2q,b2p,b2q")
    p.set_defaults(fn=cmd_chsh)

    p = sub.add_parser("lindblad", help="damped oscillator evolution of a single-mode state")
    _add_state(p)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--channels", default="q", choices=("q", "p", "pq"))
    p.add_argument("--times", default="0:1:11")
    p.add_argument("--positivity", action="store_true")
    p.add_argument("--t-max", dest="t_max", type=float, default=10.0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_lindblad)

    p = sub.add_parser("clt", help="centre-of-mass convergence to the Gaussian")
    _add_state(p)
    p.add_argument("--L", default="4,16,64")
    p.set_defaults(fn=cmd_clt)

    p = sub.add_parser("selftest", help="fast invariant checks")
    p.set_defaults(fn=cmd_selftest)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    if not argv or argv[0] not in SUBCOMMANDS + ("-h", "--help"):
        ap.print_usage(sys.stderr)
        if argv:
            sys.stderr.write(f"psq: unknown subcommand {argv[0]!r}\n")
        return EX_USAGE
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EX_OK if exc.code == 0 else EX_CONFIG
    try:
        args.fn(args)
    except ConfigError as exc:
        sys.stderr.write(f"psq: config error: {exc}\n")
        return EX_CONFIG
    except (NumericalError, ReciprocityError, DimensionError) as exc:
        sys.stderr.write(f"psq: numerical precondition failed: {exc}\n")
        return EX_NUMERIC
    except ValueError as exc:
        sys.stderr.write(f"psq: numerical precondition failed: {exc}\n")
        return EX_NUMERIC
    return EX_OK


if __name__ == "__main__":
    sys.exit(main())
