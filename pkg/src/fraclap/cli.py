"""Command-line front end: ``fraclap <subcommand> [options]``.

Subcommands write CSV (17 significant digits) or JSON to ``--out`` or stdout.
Exit codes: 0 success, 1 invalid input, 2 I/O failure, 3 numerical failure.

Settings are merged as command-line flags > ``--config`` file > defaults.
The config file is flat TOML whose keys are the long flag names, e.g.::

    alpha = 0.25
    n = 1024
    window = [0.2, 0.8]
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import json
import math
import platform
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import tomli

from . import __version__
from .errors import NumericalError
from .kernels import KernelEvaluator, KernelTable, green_G, tabulate
from .operators import GridFunction, PvQuadratureConfig, apply_discrete, reference_pv, riesz_integral
from .solver import SolveReport, TestFunctionSpec, full_solve, solve_discrete, solve_green
from .symbol import AlphaParam, Regime, beta_coeff, c1_constant, c_alpha, phi_hat
from .toeplitz import grid_index, scaled_inverse_probe

SUBCOMMANDS = ("coeffs", "apply", "invtable", "green", "solve", "convergence")
EXPERIMENTS = ("apply", "inverse", "solve")

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3


class CliError(Exception):
    """Invalid command-line input (exit code 1)."""


@dataclass(frozen=True)
class CliConfig:
    subcommand: str
    alpha: float | None = None
    n: int | None = None
    x: float | None = None
    y: float | None = None
    a: float = 0.3
    b: float = 0.7
    scale: float = 1.0
    kind: str | None = None
    tol: float | None = None
    window: tuple[float, float] = (0.2, 0.8)
    sweep: tuple[int, ...] = (512, 1024, 2048, 4096)
    points: tuple[float, ...] = (0.25, 0.5, 0.75)
    experiment: str = "apply"
    format: str = "csv"
    out: str | None = None
    meta: bool = False
    unchecked_alpha: bool = False


_REQUIRED = {
    "coeffs": ("alpha", "n"),
    "apply": ("alpha", "n", "x"),
    "invtable": ("alpha", "n"),
    "green": ("alpha",),
    "solve": ("alpha", "n"),
    "convergence": ("alpha",),
}


# --------------------------------------------------------------------------- records


def _num(v):
    """JSON-safe float: non-finite values become ``None``."""
    return None if v is None or not math.isfinite(v) else float(v)


def _unnum(v):
    return math.nan if v is None else float(v)


@dataclass(frozen=True)
class CoeffTable:
    alpha: float
    c1: float | None
    c_alpha: float | None
    phi_hat: tuple[float, ...]
    beta: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "C1": _num(self.c1),
            "C_alpha": _num(self.c_alpha),
            "rows": [
                {"n": i, "phi_hat": p, "beta": _num(b)}
                for i, (p, b) in enumerate(zip(self.phi_hat, self.beta))
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> CoeffTable:
        rows = data["rows"]
        return cls(
            alpha=data["alpha"],
            c1=data["C1"],
            c_alpha=data["C_alpha"],
            phi_hat=tuple(r["phi_hat"] for r in rows),
            beta=tuple(_unnum(r["beta"]) for r in rows),
        )

    def equals(self, other: CoeffTable) -> bool:
        return (
            (self.alpha, self.c1, self.c_alpha, self.phi_hat) ==
            (other.alpha, other.c1, other.c_alpha, other.phi_hat)
            and np.array_equal(self.beta, other.beta, equal_nan=True)
        )


@dataclass(frozen=True)
class ApplyRecord:
    alpha: float
    n: int
    x: float
    grid_x: float
    discrete: float
    reference: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> ApplyRecord:
        return cls(**data)


@dataclass(frozen=True)
class ProbeRow:
    x: float
    y: float
    raw: float
    scaled_green: float
    riesz_split: float


@dataclass(frozen=True)
class ProbeTable:
    alpha: float
    n: int
    rows: tuple[ProbeRow, ...]

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "n": self.n,
            "rows": [{k: _num(v) for k, v in dataclasses.asdict(r).items()} for r in self.rows],
        }

    @classmethod
    def from_dict(cls, data: dict) -> ProbeTable:
        rows = tuple(ProbeRow(**{k: _unnum(v) for k, v in r.items()}) for r in data["rows"])
        return cls(data["alpha"], data["n"], rows)

    def equals(self, other: ProbeTable) -> bool:
        def flat(t):
            return [dataclasses.astuple(r) for r in t.rows]

        return (self.alpha, self.n) == (other.alpha, other.n) and np.array_equal(
            np.array(flat(self), dtype=float), np.array(flat(other), dtype=float), equal_nan=True
        )


@dataclass(frozen=True)
class ConvergenceRecord:
    experiment: str
    alpha: float
    sweep: tuple[int, ...]
    errors: tuple[float, ...]
    slope: float | None = field(default=None)

    def to_dict(self) -> dict:
        out = {
            "experiment": self.experiment,
            "alpha": self.alpha,
            "rows": [{"N": n, "error": e} for n, e in zip(self.sweep, self.errors)],
        }
        if len(self.sweep) > 1:
            out["slope"] = _num(self.slope)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> ConvergenceRecord:
        rows = data["rows"]
        return cls(
            experiment=data["experiment"],
            alpha=data["alpha"],
            sweep=tuple(r["N"] for r in rows),
            errors=tuple(r["error"] for r in rows),
            slope=data.get("slope"),
        )


def loglog_slope(ns: Sequence[int], errors: Sequence[float]) -> float | None:
    """Least-squares slope of ``log(error)`` against ``log(N)``.

    ``None`` when fewer than two points are given or an error is not positive.
    """
    errors = np.asarray(errors, dtype=float)
    if len(ns) < 2 or not np.all(errors > 0) or not np.all(np.isfinite(errors)):
        return None
    slope, _ = np.polyfit(np.log(np.asarray(ns, dtype=float)), np.log(errors), 1)
    return float(slope)


# --------------------------------------------------------------------------- parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    sup = argparse.SUPPRESS
    common.add_argument("--alpha", type=float, default=sup, help="fractional order")
    common.add_argument("--n", type=int, default=sup, help="matrix order N (grid k/N, k = 0..N)")
    common.add_argument("--x", type=float, default=sup, help="evaluation point in (0, 1); snapped to row floor(N x)")
    common.add_argument("--y", type=float, default=sup, help="second point in (0, 1)")
    common.add_argument("--a", type=float, default=sup, help="left end of the right-hand side support")
    common.add_argument("--b", type=float, default=sup, help="right end of the right-hand side support")
    common.add_argument("--scale", type=float, default=sup, help="multiplier of the right-hand side")
    common.add_argument("--kind", choices=("hat", "bump"), default=sup, help="right-hand side shape")
    common.add_argument("--tol", type=float, default=sup, help="quadrature tolerance")
    common.add_argument("--window", type=_float_list, default=sup, metavar="LO,HI")
    common.add_argument("--sweep", type=_int_list, default=sup, metavar="N1,N2,...")
    common.add_argument("--points", type=_float_list, default=sup, metavar="P1,P2,...",
                        help="grid for invtable and green")
    common.add_argument("--experiment", choices=EXPERIMENTS, default=sup)
    common.add_argument("--format", choices=("csv", "json"), default=sup)
    common.add_argument("--out", default=sup, metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--meta", action="store_true", default=sup,
                        help="also write run metadata to PATH.meta.json")
    common.add_argument("--config", default=sup, metavar="FILE", help="flat TOML file of defaults")
    common.add_argument("--unchecked-alpha", dest="unchecked_alpha", action="store_true",
                        default=sup, help=sup)

    parser = _Parser(prog="fraclap", description="Fractional Laplacian on ]0,1[ via Toeplitz matrices.")
    parser.add_argument("--version", action="version", version=f"fraclap {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    helps = {
        "coeffs": "symbol and binomial coefficients",
        "apply": "discrete operator against the continuous one at a point",
        "invtable": "scaled entries of the inverse matrix",
        "green": "table of the kernels G, K, H",
        "solve": "solve the fractional boundary problem three ways",
        "convergence": "error sweep over N with a log-log slope",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _coerce(key: str, value: Any):
    if key in ("window", "points"):
        return _float_list(value) if isinstance(value, str) else tuple(float(v) for v in value)
    if key == "sweep":
        return _int_list(value) if isinstance(value, str) else tuple(int(v) for v in value)
    if key == "n":
        if isinstance(value, bool) or not float(value).is_integer():
            raise CliError(f"n must be an integer, got {value!r}")
        return int(value)
    if key in ("alpha", "x", "y", "a", "b", "scale", "tol"):
        if isinstance(value, bool):
            raise CliError(f"{key} must be a number, got {value!r}")
        return float(value)
    if key in ("meta", "unchecked_alpha"):
        if not isinstance(value, bool):
            raise CliError(f"{key} must be true or false, got {value!r}")
    return value


def _read_config(path: str) -> dict:
    with open(path, "rb") as fh:  # OSError propagates as an I/O failure
        try:
            data = tomli.load(fh)
        except tomli.TOMLDecodeError as exc:
            raise CliError(f"cannot parse config {path}: {exc}") from None
    known = {f.name for f in dataclasses.fields(CliConfig)} - {"subcommand"}
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(data) - known)
    if unknown:
        raise CliError(f"unknown config keys: {', '.join(unknown)}")
    if any(isinstance(v, dict) for v in data.values()):
        raise CliError("config file must be flat (no tables)")
    return data


def parse_config(argv: Sequence[str] | None = None) -> CliConfig:
    """Parse *argv* into a validated :class:`CliConfig`."""
    ns = vars(build_parser().parse_args(argv))
    values: dict = {}
    if "config" in ns:
        values.update(_read_config(ns.pop("config")))
    values.update(ns)
    try:
        values = {k: _coerce(k, v) for k, v in values.items()}
    except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
        raise CliError(str(exc)) from None
    cfg = CliConfig(**values)
    validate(cfg)
    return cfg


def _alpha(cfg: CliConfig) -> AlphaParam:
    return AlphaParam.unchecked(cfg.alpha) if cfg.unchecked_alpha else AlphaParam(cfg.alpha)


def validate(cfg: CliConfig) -> None:
    """Subcommand-specific checks, run before any computation."""
    missing = [k for k in _REQUIRED[cfg.subcommand] if getattr(cfg, k) is None]
    if missing:
        raise CliError(f"{cfg.subcommand} requires --{', --'.join(missing)}")
    alpha = _alpha(cfg)
    if cfg.tol is not None and not cfg.tol > 0:
        raise CliError(f"tol must be positive, got {cfg.tol}")
    if len(cfg.window) != 2 or not 0.0 < cfg.window[0] < cfg.window[1] < 1.0:
        raise CliError(f"window must be two numbers 0 < lo < hi < 1, got {cfg.window}")
    if cfg.n is not None and cfg.n < 1:
        raise CliError(f"n must be positive, got {cfg.n}")
    for name in ("x", "y"):
        v = getattr(cfg, name)
        if v is not None and not 0.0 < v < 1.0:
            raise CliError(f"{name} = {v} must lie in (0, 1)")
    if not 0.0 < cfg.a < cfg.b < 1.0:
        raise CliError(f"support [{cfg.a}, {cfg.b}] must satisfy 0 < a < b < 1")
    sub = cfg.subcommand
    if sub in ("invtable", "green"):
        alpha.require(Regime.SUB_HALF, what=sub)
        pts = cfg.points
        if not pts or any(not 0.0 < p < 1.0 for p in pts) or any(q <= p for p, q in zip(pts, pts[1:])):
            raise CliError("points must be increasing values in (0, 1)")
    if sub == "invtable" and cfg.x is not None and cfg.y is not None and cfg.x == cfg.y:
        raise CliError("x and y must differ")
    if sub == "solve":
        alpha.require(Regime.SUB_HALF, what=sub)
        if cfg.n < 64:
            raise CliError(f"solve needs n >= 64, got {cfg.n}")
    if sub == "apply" and cfg.n < 2:
        raise CliError(f"apply needs n >= 2, got {cfg.n}")
    if sub == "convergence":
        if not cfg.sweep or any(n < 64 for n in cfg.sweep):
            raise CliError("sweep needs at least one N, each >= 64")
        if cfg.experiment in ("inverse", "solve"):
            alpha.require(Regime.SUB_HALF, what=f"the {cfg.experiment} experiment")


# --------------------------------------------------------------------------- commands


def _rhs(cfg: CliConfig, default_kind: str) -> TestFunctionSpec:
    return TestFunctionSpec(cfg.kind or default_kind, cfg.a, cfg.b, cfg.scale)


def _continuous(alpha: AlphaParam, f: TestFunctionSpec, x: float, tol: float) -> float:
    if alpha.regime is Regime.NEGATIVE:
        return riesz_integral(alpha, f, x, tol=tol, breakpoints=f.breakpoints)
    return reference_pv(alpha, f, x, PvQuadratureConfig(tol=tol), breakpoints=f.breakpoints)


def cmd_coeffs(cfg: CliConfig) -> CoeffTable:
    alpha = _alpha(cfg)
    phi = phi_hat(alpha, cfg.n).c
    if alpha.regime is Regime.SUB_HALF or alpha.unchecked_hook:
        beta = beta_coeff(alpha, cfg.n).b
    else:
        beta = np.full(cfg.n + 1, math.nan)

    def maybe(fn):
        try:
            return fn(alpha)
        except ValueError:
            return None

    return CoeffTable(alpha.value, maybe(c1_constant), maybe(c_alpha), tuple(phi.tolist()), tuple(beta.tolist()))


def cmd_apply(cfg: CliConfig) -> ApplyRecord:
    alpha = _alpha(cfg)
    f = _rhs(cfg, "bump")
    g = GridFunction.from_callable(f, cfg.n)
    disc = apply_discrete(alpha, g, cfg.x)
    ref = _continuous(alpha, f, cfg.x, cfg.tol or 1e-10)
    return ApplyRecord(alpha.value, cfg.n, cfg.x, grid_index(cfg.n, cfg.x) / cfg.n, disc, ref)


def cmd_invtable(cfg: CliConfig) -> ProbeTable:
    alpha = _alpha(cfg)
    if cfg.x is not None and cfg.y is not None:
        pairs = [(cfg.x, cfg.y)]
    else:
        pairs = [(x, y) for x in cfg.points for y in cfg.points]
    rows = []
    for x, y in pairs:
        if x == y:
            rows.append(ProbeRow(x, y, math.nan, math.nan, math.nan))
        else:
            p = scaled_inverse_probe(alpha, cfg.n, x, y)
            rows.append(ProbeRow(x, y, p.raw, p.scaled_green, p.riesz_split))
    return ProbeTable(alpha.value, cfg.n, tuple(rows))


def cmd_green(cfg: CliConfig) -> KernelTable:
    ev = KernelEvaluator(_alpha(cfg), tol=cfg.tol or 1e-7)
    return tabulate(ev, cfg.points, cfg.points)


def cmd_solve(cfg: CliConfig) -> SolveReport:
    return full_solve(_alpha(cfg), _rhs(cfg, "hat"), cfg.n, cfg.window, tol=cfg.tol or 1e-10)


def _window_nodes(n: int, window, count: int = 65) -> np.ndarray:
    ks = np.arange(math.ceil(window[0] * n - 1e-9), math.floor(window[1] * n + 1e-9) + 1)
    return ks[:: max(1, math.ceil(len(ks) / count))]


def cmd_convergence(cfg: CliConfig) -> ConvergenceRecord:
    alpha = _alpha(cfg)
    tol = cfg.tol or 1e-10
    errors = []
    if cfg.experiment == "apply":
        f = _rhs(cfg, "bump")
        x = cfg.x if cfg.x is not None else 0.5
        ref = _continuous(alpha, f, x, tol)
        for n in cfg.sweep:
            errors.append(abs(apply_discrete(alpha, GridFunction.from_callable(f, n), x) - ref))
    elif cfg.experiment == "inverse":
        x = cfg.x if cfg.x is not None else 0.4
        y = cfg.y if cfg.y is not None else 0.6
        exact = green_G(KernelEvaluator(alpha, tol=1e-12), x, y)
        for n in cfg.sweep:
            errors.append(abs(scaled_inverse_probe(alpha, n, x, y).scaled_green - exact))
    else:
        f = _rhs(cfg, "hat")
        for n in cfg.sweep:
            ks = _window_nodes(n, cfg.window)
            disc = solve_discrete(alpha, f, n)[ks]
            green = solve_green(alpha, f, ks / n, tol=tol)
            errors.append(float(np.max(np.abs(disc - green))))
    errors = tuple(float(e) for e in errors)
    return ConvergenceRecord(cfg.experiment, alpha.value, tuple(cfg.sweep), errors,
                             loglog_slope(cfg.sweep, errors))


_COMMANDS = {
    "coeffs": cmd_coeffs,
    "apply": cmd_apply,
    "invtable": cmd_invtable,
    "green": cmd_green,
    "solve": cmd_solve,
    "convergence": cmd_convergence,
}


# --------------------------------------------------------------------------- output


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(v)
    return f"{float(v) + 0.0:.17g}"


def _csv(header: Sequence[str], rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _json(obj: dict) -> str:
    return json.dumps(obj, indent=1, allow_nan=False) + "\n"


def render(cfg: CliConfig, result) -> str:
    """Serialise a command result in ``cfg.format``."""
    as_json = cfg.format == "json"
    if isinstance(result, CoeffTable):
        if as_json:
            return _json(result.to_dict())
        head = json.dumps({"alpha": result.alpha, "C1": _num(result.c1), "C_alpha": _num(result.c_alpha)})
        rows = ((i, p, b) for i, (p, b) in enumerate(zip(result.phi_hat, result.beta)))
        return head + "\n" + _csv(("n", "phi_hat", "beta"), rows)
    if isinstance(result, ApplyRecord):
        if as_json:
            return _json(result.to_dict())
        return _csv(("alpha", "n", "x", "grid_x", "discrete", "reference"),
                    [dataclasses.astuple(result)])
    if isinstance(result, ProbeTable):
        if as_json:
            return _json(result.to_dict())
        return _csv(("x", "y", "raw", "scaled_green", "riesz_split"),
                    (dataclasses.astuple(r) for r in result.rows))
    if isinstance(result, KernelTable):
        if as_json:
            return _json(result.to_dict())
        return _csv(("x", "y", "G", "K", "H"), result.rows())
    if isinstance(result, SolveReport):
        if as_json:
            return result.to_json() + "\n"
        return _csv(("x", "g_discrete", "g_green", "g_riesz"), result.rows())
    if isinstance(result, ConvergenceRecord):
        if as_json:
            return _json(result.to_dict())
        return _csv(("N", "error"), zip(result.sweep, result.errors))
    raise TypeError(f"cannot render {type(result).__name__}")


def _metadata(cfg: CliConfig, argv: Sequence[str]) -> dict:
    return {
        "fraclap_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "argv": list(argv),
        "config": dataclasses.asdict(cfg),
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def run(cfg: CliConfig, argv: Sequence[str] = ()) -> str:
    """Execute *cfg*, write its output and return the rendered text."""
    text = render(cfg, _COMMANDS[cfg.subcommand](cfg))
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if cfg.meta:
        meta = json.dumps(_metadata(cfg, argv), indent=1) + "\n"
        if cfg.out is None:
            sys.stderr.write(meta)
        else:
            with open(cfg.out + ".meta.json", "w", encoding="utf-8") as fh:
                fh.write(meta)
    return text


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
        run(cfg, argv)
    except OSError as exc:
        print(f"fraclap: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as exc:
        print(f"fraclap: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (CliError, ValueError) as exc:
        print(f"fraclap: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
