"""Command-line front end.

Subcommands::

    spectrum      closed-form levels, optionally checked by AIM and the FD oracle
    verify        spectrum with --verify all
    wavefunction  sampled, normalized R(r) for one level
    aim-table     termination condition delta_k(rho0; E) against k

Settings resolve as command-line flags over a ``--config`` JSON file over
built-in defaults.  Exit codes: 0 success, 2 invalid configuration (nothing
written), 3 a requested computation failed (partial output has a status
column).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field, replace

from . import __version__
from .aim import AimOptions, delta_sequence, find_eigenvalues
from .errors import (
    BracketTooNarrow,
    DiatomicAimError,
    DomainError,
    NoConvergence,
    PoleError,
    QuadratureError,
    UnconvergedLevel,
)
from .oracle import RadialGrid, default_grid as oracle_default_grid, solve_levels
from .potentials import MODELS, SpectrumResult, UnitSystem, aim_seed, make_model
from .special import sample_radial_wavefunction

log = logging.getLogger("diatomic_aim")

EXIT_OK, EXIT_CONFIG, EXIT_FAILED = 0, 2, 3
VERIFY_CHOICES = ("none", "aim", "oracle", "all")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid run configuration (exit code 2)."""


@dataclass(frozen=True)
class AimSettings:
    k_min: int = 8
    k_step: int = 4
    k_max: int = 60
    rho0: float | None = None
    energy_tol: float = 1e-10
    stability_tol: float = 1e-9
    scan_points: int = 400
    bracket: tuple[float, float] | None = None
    digits: int | None = None

    def options(self) -> AimOptions:
        return AimOptions(
            k_min=min(self.k_min, self.k_max), k_step=self.k_step, k_max=self.k_max,
            grid_points=self.scan_points, energy_tol=self.energy_tol,
            stability_tol=self.stability_tol, rho0=self.rho0, digits=self.digits,
        )


@dataclass(frozen=True)
class GridSettings:
    r_max: float | None = None
    points: int | None = None


@dataclass(frozen=True)
class RunConfig:
    potential: str = "coulomb"
    params: dict = field(default_factory=dict)
    units: UnitSystem = field(default_factory=UnitSystem)
    levels: tuple = ((0, 0),)
    verify: str = "none"
    aim: AimSettings = field(default_factory=AimSettings)
    grid: GridSettings = field(default_factory=GridSettings)
    format: str = "csv"
    out: str | None = None

    def validate(self) -> "RunConfig":
        if not self.levels:
            raise ConfigError("at least one level is required")
        for n, l in self.levels:
            if n < 0 or l < 0:
                raise ConfigError(f"quantum numbers must be nonnegative, got {n}:{l}")
        if self.verify not in VERIFY_CHOICES:
            raise ConfigError(f"verify must be one of {VERIFY_CHOICES}, got {self.verify!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        a = self.aim
        if a.k_max < 1:
            raise ConfigError(f"k_max must be >= 1, got {a.k_max}")
        if not (a.energy_tol > 0 and a.stability_tol > 0):
            raise ConfigError("tolerances must be positive")
        if a.rho0 is not None and not a.rho0 > 0:
            raise ConfigError(f"rho0 must be positive, got {a.rho0}")
        if a.bracket is not None and not a.bracket[0] < a.bracket[1]:
            raise ConfigError(f"bracket must satisfy lo < hi, got {a.bracket}")
        if self.grid.r_max is not None and not self.grid.r_max > 0:
            raise ConfigError(f"r_max must be positive, got {self.grid.r_max}")
        if self.grid.points is not None and self.grid.points < 100:
            raise ConfigError(f"grid points must be >= 100, got {self.grid.points}")
        try:
            a.options()
            self.model()
        except (ValueError, DomainError) as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def model(self):
        return make_model(self.potential, self.params, self.units)

    def to_json(self) -> dict:
        return {
            "potential": self.potential,
            "params": dict(self.params),
            "units": {"hbar": self.units.hbar, "mu": self.units.mu},
            "levels": [list(lv) for lv in self.levels],
            "verify": self.verify,
            "aim": {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self.aim).items()},
            "grid": asdict(self.grid),
            "output": {"format": self.format, "path": self.out},
        }


# --------------------------------------------------------------------------
# parsing


def parse_levels(text: str) -> tuple:
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            n, l = item.split(":")
            out.append((int(n), int(l)))
        except ValueError:
            raise ConfigError(f"bad level {item!r}; expected n:l") from None
    return tuple(out)


def parse_param(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise ConfigError(f"bad --param {text!r}; expected key=value")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise ConfigError(f"--param {key}: {value!r} is not a number") from None


def parse_bracket(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"bad bracket {text!r}; expected lo,hi") from None
    return lo, hi


def _from_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    known = {"potential", "params", "units", "levels", "verify", "aim", "grid", "output"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    return data


def _merge_file(cfg: RunConfig, data: dict) -> RunConfig:
    try:
        kw = {}
        if "potential" in data:
            kw["potential"] = str(data["potential"])
        if "params" in data:
            kw["params"] = {str(k): float(v) for k, v in data["params"].items()}
        if "units" in data:
            kw["units"] = UnitSystem(**{k: float(v) for k, v in data["units"].items()})
        if "levels" in data:
            kw["levels"] = tuple((int(n), int(l)) for n, l in data["levels"])
        if "verify" in data:
            kw["verify"] = str(data["verify"])
        if "aim" in data:
            aim = dict(data["aim"])
            if aim.get("bracket") is not None:
                aim["bracket"] = tuple(float(x) for x in aim["bracket"])
            kw["aim"] = replace(cfg.aim, **aim)
        if "grid" in data:
            kw["grid"] = replace(cfg.grid, **data["grid"])
        out = data.get("output", {})
        if "format" in out:
            kw["format"] = str(out["format"])
        if "path" in out:
            kw["out"] = out["path"]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config file: {exc}") from exc
    return replace(cfg, **kw)


def _merge_flags(cfg: RunConfig, ns: argparse.Namespace) -> RunConfig:
    kw = {}
    if ns.potential is not None:
        kw["potential"] = ns.potential
        if ns.potential.lower() != cfg.potential.lower():
            kw["params"] = {}  # parameters from another model do not carry over
    if ns.param:
        params = dict(kw.get("params", cfg.params))
        params.update(parse_param(p) for p in ns.param)
        kw["params"] = params
    if ns.hbar is not None or ns.mu is not None:
        try:
            kw["units"] = UnitSystem(
                cfg.units.hbar if ns.hbar is None else ns.hbar,
                cfg.units.mu if ns.mu is None else ns.mu,
            )
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
    if getattr(ns, "levels", None) is not None:
        kw["levels"] = parse_levels(ns.levels)
    if getattr(ns, "level", None) is not None:
        kw["levels"] = parse_levels(ns.level)
    if getattr(ns, "verify", None) is not None:
        kw["verify"] = ns.verify
    if ns.format is not None:
        kw["format"] = ns.format
    if ns.out is not None:
        kw["out"] = ns.out
    aim = {}
    for flag, name in (("k_max", "k_max"), ("k_min", "k_min"), ("rho0", "rho0"),
                       ("scan_points", "scan_points")):
        if getattr(ns, flag) is not None:
            aim[name] = getattr(ns, flag)
    if ns.bracket is not None:
        aim["bracket"] = parse_bracket(ns.bracket)
    if aim:
        kw["aim"] = replace(cfg.aim, **aim)
    grid = {}
    if ns.r_max is not None:
        grid["r_max"] = ns.r_max
    if ns.grid_points is not None:
        grid["points"] = ns.grid_points
    if grid:
        kw["grid"] = replace(cfg.grid, **grid)
    return replace(cfg, **kw)


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if ns.config:
        cfg = _merge_file(cfg, _from_file(ns.config))
    cfg = _merge_flags(cfg, ns)
    if ns.command == "verify":
        cfg = replace(cfg, verify="all")
    return cfg.validate()


# --------------------------------------------------------------------------
# commands


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x + 0.0, ".17g")  # + 0.0 folds -0.0 into 0
    return str(x)


def _json_num(x):
    if isinstance(x, float):
        return x + 0.0 if math.isfinite(x) else None
    return x


def _rows_csv(header, rows, meta=None) -> str:
    buf = io.StringIO()
    for k, v in (meta or {}).items():
        buf.write(f"# {k}={_num(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(x) for x in row])
    return buf.getvalue()


def _rows_json(header, rows, meta=None) -> str:
    doc = {}
    if meta:
        doc["meta"] = {k: _json_num(v) for k, v in meta.items()}
    doc["rows"] = [{h: _json_num(x) for h, x in zip(header, row)} for row in rows]
    return json.dumps(doc, indent=2) + "\n"


def render(cfg: RunConfig, header, rows, meta=None) -> str:
    return (_rows_csv if cfg.format == "csv" else _rows_json)(header, rows, meta)


SPECTRUM_HEADER = ("n", "l", "E_closed", "E_aim", "E_oracle", "rel_diff_aim", "rel_diff_oracle", "status")


def _oracle_grid(cfg, model):
    if cfg.grid.r_max is None and cfg.grid.points is None:
        return None
    base = oracle_default_grid(model)
    return RadialGrid(0.0, cfg.grid.r_max or base.r_max, cfg.grid.points or base.points)


def cmd_spectrum(cfg: RunConfig) -> tuple[list[SpectrumResult], bool]:
    """One SpectrumResult per requested level, ordered by (l, n)."""
    model = cfg.model()
    levels = sorted(set(cfg.levels), key=lambda nl: (nl[1], nl[0]))
    by_l: dict[int, list[int]] = {}
    for n, l in levels:
        by_l.setdefault(l, []).append(n)
    aim_E: dict = {}
    orc_E: dict = {}
    status: dict = {}
    do_aim = cfg.verify in ("aim", "all")
    do_orc = cfg.verify in ("oracle", "all")
    for l, ns in by_l.items():
        count = max(ns) + 1
        if do_aim:
            try:
                reps = find_eigenvalues(model, l, count, cfg.aim.bracket, cfg.aim.options())
                for n in ns:
                    aim_E[n, l] = reps[n].energy
            except (NoConvergence, BracketTooNarrow, PoleError, DomainError) as exc:
                log.warning("AIM l=%d: %s", l, exc)
                for n in ns:
                    status[n, l] = f"aim_failed:{type(exc).__name__}"
        if do_orc:
            try:
                Es = solve_levels(model, l, count, _oracle_grid(cfg, model))
                for n in ns:
                    orc_E[n, l] = Es[n]
            except (UnconvergedLevel, DomainError) as exc:
                log.warning("oracle l=%d: %s", l, exc)
                for n in ns:
                    prev = status.get((n, l))
                    tag = f"oracle_failed:{type(exc).__name__}"
                    status[n, l] = tag if prev is None else f"{prev};{tag}"
    results = [
        SpectrumResult.build(
            n, l, model.closed_form_energy(n, l), aim_E.get((n, l)), orc_E.get((n, l)),
            status.get((n, l), "ok"),
        )
        for n, l in levels
    ]
    return results, not status


def spectrum_rows(results):
    return [
        (r.n, r.l, r.E_closed, r.E_aim, r.E_oracle, r.rel_diff_aim, r.rel_diff_oracle, r.status)
        for r in results
    ]


def cmd_wavefunction(cfg: RunConfig, n: int, l: int):
    """Sampled R(r) and its metadata.  A pinned --r-max disables auto-extension."""
    model = cfg.model()
    pinned = cfg.grid.r_max is not None
    wf = sample_radial_wavefunction(
        model, n, l, r_max=cfg.grid.r_max, points=cfg.grid.points or 20000,
        extensions=0 if pinned else 3,
    )
    meta = {
        "potential": model.kind, "n": n, "l": l, "energy": wf.energy,
        "norm_constant": wf.norm_constant, "node_count": wf.node_count,
        "residual_l2": wf.residual_l2,
    }
    return wf, meta


def cmd_aim_table(cfg: RunConfig, l: int, E: float):
    """Rows (k, delta_k, relative delta_k, sign) at rho0 for k = 1..k_max.

    ``delta`` is evaluated on the jointly rescaled functions, so only its sign
    and zeros are meaningful; ``relative_delta`` is scale free.
    """
    model = cfg.model()
    seed = aim_seed(model, l, E, cfg.aim.rho0)
    deltas = delta_sequence(seed, cfg.aim.k_max, digits=cfg.aim.digits)
    rows = [(k, d, rel, (d > 0) - (d < 0)) for k, (d, rel) in enumerate(deltas, start=1)]
    meta = {"potential": model.kind, "l": l, "energy": E, "rho0": seed.eval_point}
    return rows, meta


# --------------------------------------------------------------------------
# entry point


def _color(text: str, code: str) -> str:
    if os.environ.get("NO_COLOR") or not sys.stderr.isatty():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def _error(msg: str) -> None:
    print(f"{_color('error:', '31')} {msg}", file=sys.stderr)


def _write(cfg: RunConfig, text: str) -> None:
    if cfg.out is None or cfg.out == "-":
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head); not an error
            devnull = os.open(os.devnull, os.O_WRONLY)
            os.dup2(devnull, sys.stdout.fileno())
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", type=str.lower, choices=sorted(MODELS))
    common.add_argument("--param", action="append", metavar="KEY=VALUE",
                        help="model parameter, repeatable (mie: V0,a; kratzer: De,re; "
                             "coulomb: coupling; pseudoharmonic: V0,r0)")
    common.add_argument("--hbar", type=float)
    common.add_argument("--mu", type=float, help="reduced mass")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--config", metavar="PATH", help="JSON config; flags take precedence")
    common.add_argument("--grid-points", type=int, help="points of the r grid")
    common.add_argument("--r-max", type=float, help="outer end of the r grid")
    common.add_argument("--rho0", type=float, help="AIM evaluation point")
    common.add_argument("--k-max", type=int, help="largest AIM iteration")
    common.add_argument("--k-min", type=int, help="first AIM iteration tried")
    common.add_argument("--scan-points", type=int, help="energies in the AIM scan")
    common.add_argument("--bracket", metavar="LO,HI", help="AIM energy bracket")
    common.add_argument("--dump-config", action="store_true",
                        help="print the resolved configuration as JSON and exit")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="diatomic-aim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", parents=[common], help="tabulate energy levels")
    sp.add_argument("--levels", metavar="N:L[,N:L...]")
    sp.add_argument("--verify", choices=VERIFY_CHOICES)

    vp = sub.add_parser("verify", parents=[common], help="spectrum with --verify all")
    vp.add_argument("--levels", metavar="N:L[,N:L...]")

    wp = sub.add_parser("wavefunction", parents=[common], help="sample R(r) for one level")
    wp.add_argument("--level", metavar="N:L", help="level to sample (default 0:0)")

    ap = sub.add_parser("aim-table", parents=[common], help="delta_k against k at one energy")
    ap.add_argument("--l", type=int, default=0, dest="ell")
    ap.add_argument("--energy", type=float, required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(ns)
        if ns.command == "wavefunction" and len(cfg.levels) != 1:
            raise ConfigError("wavefunction takes exactly one level")
        if ns.command == "aim-table" and ns.ell < 0:
            raise ConfigError("l must be nonnegative")
    except ConfigError as exc:
        _error(str(exc))
        return EXIT_CONFIG

    if ns.dump_config:
        sys.stdout.write(json.dumps(cfg.to_json(), indent=2, sort_keys=True) + "\n")
        return EXIT_OK

    try:
        if ns.command in ("spectrum", "verify"):
            results, ok = cmd_spectrum(cfg)
            _write(cfg, render(cfg, SPECTRUM_HEADER, spectrum_rows(results)))
            if not ok:
                _error("some levels did not converge; see the status column")
                return EXIT_FAILED
        elif ns.command == "wavefunction":
            (n, l), = cfg.levels
            wf, meta = cmd_wavefunction(cfg, n, l)
            _write(cfg, render(cfg, ("r", "R"), zip(wf.r_grid.tolist(), wf.values.tolist()), meta))
        else:
            rows, meta = cmd_aim_table(cfg, ns.ell, ns.energy)
            _write(cfg, render(cfg, ("k", "delta", "relative_delta", "sign"), rows, meta))
    except PoleError as exc:
        _error(f"{exc} (rho0={exc.x})")
        return EXIT_FAILED
    except DomainError as exc:
        _error(str(exc))
        return EXIT_CONFIG
    except (QuadratureError, DiatomicAimError, OverflowError) as exc:
        _error(f"{type(exc).__name__}: {exc}")
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
