"""Command-line front end emitting CSV or JSON tables.

Exit codes: 0 success, 1 numerical contract violation, 2 usage or config error.
Parameters may come from a ``key = value`` config file; flags take precedence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import channels, montecarlo, schemes
from .gaussian import DomainError

SCHEMA = "cvtradeoff.table/1"
COMMANDS = ("curve", "scheme", "teleport", "mc", "lossy", "erasure", "noise-decision")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    parameters: dict[str, Any] = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"


@dataclass
class Table:
    columns: list[str]
    rows: list[dict[str, Any]]


# -- parsing helpers ----------------------------------------------------------


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive) or a comma-separated list of T values."""
    try:
        if ":" in text:
            start, stop, step = (float(s) for s in text.split(":"))
            if step <= 0 or stop < start:
                raise UsageError(f"bad grid range {text!r}")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + k * step, 12) for k in range(n)]
        else:
            values = [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None
    if not values or not all(0.0 < v < 1.0 for v in values):
        raise UsageError(f"grid values must lie in (0, 1): {text!r}")
    return values


def parse_pair(text: str, name: str) -> tuple[float, float]:
    try:
        a, b = (float(s) for s in text.split(","))
    except ValueError:
        raise UsageError(f"{name} must be two comma-separated numbers, got {text!r}") from None
    return a, b


def read_config(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvtradeoff", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value parameter file; flags override it")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("curve", parents=[common], help="optimal tradeoff curve on a T grid")
    p.add_argument("--grid")
    p.add_argument("--degraded", help="detector efficiency and visibility, e.g. 0.95,0.99")

    p = sub.add_parser("scheme", parents=[common], help="one tap-and-displace operating point")
    p.add_argument("--T", dest="T", type=float)

    p = sub.add_parser("teleport", parents=[common], help="one teleportation operating point")
    p.add_argument("--r", type=float)

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo of the tap-and-displace scheme")
    p.add_argument("--T", dest="T", type=float)
    p.add_argument("--amp")
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--shards", type=int)

    p = sub.add_parser("lossy", parents=[common], help="lossy channel: amplifier vs partial estimation")
    p.add_argument("--eta", type=float)
    p.add_argument("--optimize", action="store_true", default=None)
    p.add_argument("--T", dest="T", type=float)

    p = sub.add_parser("erasure", parents=[common], help="erasure channel with partial estimation")
    p.add_argument("--p", type=float)
    p.add_argument("--optimize", action="store_true", default=None)
    p.add_argument("--T", dest="T", type=float)

    p = sub.add_parser("noise-decision", parents=[common], help="classical vs quantum for additive noise")
    p.add_argument("--chi", type=float)
    return parser


_CASTS = {"T": float, "r": float, "eta": float, "p": float, "chi": float, "shots": int, "seed": int, "shards": int}


def resolve_config(argv: Sequence[str]) -> RunConfig:
    """Merge flags with an optional config file into a :class:`RunConfig`."""
    argv = list(argv)
    parser = build_parser()
    # Allow the command itself to come from the config file.
    if not any(a in COMMANDS for a in argv) and "--config" in argv:
        i = argv.index("--config")
        if i + 1 < len(argv):
            cmd = read_config(argv[i + 1]).get("command")
            if cmd:
                argv = [cmd] + argv
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError(f"a command is required: one of {', '.join(COMMANDS)}")

    params = {k: v for k, v in vars(args).items() if k not in ("command", "config", "out", "format")}
    file_values = read_config(args.config) if args.config else {}
    for key, raw in file_values.items():
        if key in ("command", "out", "format"):
            continue
        if key not in params:
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        if params[key] is None:
            try:
                if key == "optimize":
                    params[key] = raw.lower() in ("1", "true", "yes", "on")
                else:
                    params[key] = _CASTS.get(key, str)(raw)
            except ValueError:
                raise UsageError(f"bad value for {key}: {raw!r}") from None
    fmt = args.format or file_values.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {fmt!r}")
    return RunConfig(args.command, params, args.out or file_values.get("out"), fmt)


def _require(params: dict[str, Any], *names: str) -> None:
    missing = [n for n in names if params.get(n) is None]
    if missing:
        raise UsageError("missing required parameter(s): " + ", ".join("--" + n for n in missing))


# -- commands -----------------------------------------------------------------


def cmd_curve(grid: Sequence[float], degraded: tuple[float, float] | None = None) -> Table:
    columns = ["T", "var_m", "var_n", "G", "F", "F_bound"]
    if degraded is not None:
        columns += ["G_degraded", "F_degraded"]
    rows = []
    for T in grid:
        pt = schemes.feedforward_point(T)
        row = {"T": T, "var_m": pt.budget.var_m, "var_n": pt.budget.var_n, "G": pt.G, "F": pt.F,
               "F_bound": schemes.tradeoff_bound(pt.G)}
        if degraded is not None:
            dp = schemes.degraded_feedforward_point(T, *degraded)
            row["G_degraded"], row["F_degraded"] = dp.G, dp.F
        rows.append(row)
    return Table(columns, rows)


def cmd_scheme(T: float) -> Table:
    scheme = schemes.FeedForwardScheme(T)
    pt = schemes.feedforward_point(T)
    row = {"T": T, "lambda": scheme.lam, "kappa": scheme.kappa, "var_m": pt.budget.var_m,
           "var_n": pt.budget.var_n, "G": pt.G, "F": pt.F, "F_bound": schemes.tradeoff_bound(pt.G)}
    return Table(list(row), [row])


def cmd_teleport(r: float) -> Table:
    pt = schemes.teleportation_point(r)
    row = {"r": r, "var_m": pt.budget.var_m, "var_n": pt.budget.var_n, "G": pt.G, "F": pt.F,
           "F_bound": schemes.tradeoff_bound(pt.G)}
    return Table(list(row), [row])


MC_COLUMNS = [
    "T", "amp_x", "amp_p", "n_shots", "seed",
    "gain_x", "gain_x_stderr", "gain_p", "gain_p_stderr",
    "var_n_hat", "var_n_stderr", "var_m_hat", "var_m_stderr",
    "F_hat", "F_stderr", "G_hat", "G_stderr",
    "var_n", "var_m", "F", "G",
]


def cmd_mc(T: float, amplitude: tuple[float, float], n_shots: int, seed: int, shards: int = 1) -> Table:
    moments = montecarlo.run_feedforward_moments(T, amplitude, n_shots, seed, shards=shards)
    summary = montecarlo.summarize_moments(moments, amplitude)
    values = summary.as_dict()
    for key in ("var_n_hat", "var_m_hat", "F_hat", "G_hat"):
        if not math.isfinite(values[key]):
            raise DomainError(f"non-finite estimate {key}")
    pt = schemes.feedforward_point(T)
    row = {"T": T, "amp_x": amplitude[0], "amp_p": amplitude[1], "n_shots": n_shots, "seed": seed}
    row.update({k: values[k] for k in MC_COLUMNS if k in values})
    row.update({"var_n": pt.budget.var_n, "var_m": pt.budget.var_m, "F": pt.F, "G": pt.G})
    return Table(MC_COLUMNS, [row])


def cmd_lossy(eta: float, optimize: bool = False, T: float | None = None) -> Table:
    if bool(optimize) == (T is not None):
        raise UsageError("give exactly one of --optimize or --T")
    if optimize:
        res = channels.lossy_hybrid_optimize(eta)
        row = {"eta": eta, **res.as_dict(), "F_closed_form": channels.lossy_hybrid_optimal_fidelity(eta)}
    else:
        b = channels.lossy_hybrid_noise(eta, T)
        row = {"eta": eta, "T": T, "var_m": b.var_m, "var_n": b.var_n,
               "F": channels.lossy_hybrid_fidelity(eta, T), "F_amplifier": channels.lossy_amplifier_fidelity(eta)}
    return Table(list(row), [row])


def cmd_erasure(p: float, optimize: bool = False, T: float | None = None) -> Table:
    if bool(optimize) == (T is not None):
        raise UsageError("give exactly one of --optimize or --T")
    if optimize:
        row = {"p": p, **channels.erasure_optimize(p).as_dict()}
    else:
        if not 0.0 <= T < 1.0:
            raise UsageError(f"T must lie in [0, 1), got {T}")
        row = {"p": p, "T": T, "F": channels.erasure_fidelity(1.0, T), "G": channels.erasure_fidelity(0.0, T),
               "F_prime": channels.erasure_fidelity(p, T)}
    return Table(list(row), [row])


def cmd_noise_decision(chi: float) -> Table:
    fq, fc = channels.additive_noise_fidelities(chi)
    row = {"chi": chi, "F_quantum": fq, "F_classical": fc, "strategy": channels.additive_noise_decision(chi)}
    return Table(list(row), [row])


def dispatch(config: RunConfig) -> Table:
    p = config.parameters
    cmd = config.command
    if cmd == "curve":
        _require(p, "grid")
        degraded = parse_pair(p["degraded"], "--degraded") if p.get("degraded") else None
        if degraded is not None and not all(0.0 < v <= 1.0 for v in degraded):
            raise UsageError("--degraded values must lie in (0, 1]")
        return cmd_curve(parse_grid(p["grid"]), degraded)
    if cmd == "scheme":
        _require(p, "T")
        return cmd_scheme(p["T"])
    if cmd == "teleport":
        _require(p, "r")
        return cmd_teleport(p["r"])
    if cmd == "mc":
        _require(p, "T", "amp", "shots", "seed")
        if p["shots"] < 100:
            raise UsageError("--shots must be at least 100")
        return cmd_mc(p["T"], parse_pair(p["amp"], "--amp"), p["shots"], p["seed"], p.get("shards") or 1)
    if cmd == "lossy":
        _require(p, "eta")
        return cmd_lossy(p["eta"], bool(p.get("optimize")), p.get("T"))
    if cmd == "erasure":
        _require(p, "p")
        return cmd_erasure(p["p"], bool(p.get("optimize")), p.get("T"))
    if cmd == "noise-decision":
        _require(p, "chi")
        return cmd_noise_decision(p["chi"])
    raise UsageError(f"unknown command {cmd!r}")


# -- output -------------------------------------------------------------------


def _plain(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def format_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        cells = []
        for col in table.columns:
            v = _plain(row.get(col))
            if v is None:
                cells.append("")
            elif isinstance(v, float):
                cells.append(format(v, ".9g"))
            else:
                cells.append(str(v))
        writer.writerow(cells)
    return buf.getvalue()


def format_json(table: Table, config: RunConfig) -> str:
    doc = {
        "schema": SCHEMA,
        "command": config.command,
        "parameters": {k: _plain(v) for k, v in config.parameters.items() if v is not None},
        "columns": table.columns,
        "rows": [{c: _plain(row.get(c)) for c in table.columns} for row in table.rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = resolve_config(argv)
        table = dispatch(config)
    except UsageError as exc:
        print(f"cvtradeoff: error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"cvtradeoff: contract violation: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    text = format_json(table, config) if config.format == "json" else format_csv(table)
    if config.out:
        Path(config.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
