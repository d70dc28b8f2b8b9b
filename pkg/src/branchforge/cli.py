"""Command-line front end.

    branchforge tree --truncation 9 --out out/tree9
    branchforge trace --system truncated:3 --omega0 1.01 --out out/n3
    branchforge plot --in out/tree9/element_*.csv out/n3/curve.csv --out fig.svg
    branchforge scenario --id appendix-case1 --out out/case1

Exit codes: 0 success, 1 I/O failure, 2 bad usage or input, 3 start point
failed Newton verification, 4 a scenario claim failed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .continuation import ContinuationConfig, NewtonError, solve_at_omega, trace_curve, trunk_point
from .export import MalformedCSVError, curve_table, element_table, mode_column, read_csv, write_csv, write_json
from .galerkin import AlgebraicSystem
from .modes import ModeSet, as_mode, diagonal_truncation, parse_modes
from .scenarios import SCENARIOS, UnknownScenarioError, run_scenario
from .svgplot import Series, render
from .tree import build_tree

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_NEWTON, EXIT_CLAIMS = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class StartError(Exception):
    pass


# ------------------------------------------------------------------ config file
def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_config(path: str | Path, allowed: dict[str, type]) -> dict:
    """key = value per line, '#' starts a comment; keys outside ``allowed`` are errors."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in allowed:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r} (allowed: {', '.join(sorted(allowed))})")
        kind = allowed[key]
        try:
            out[key] = _parse_bool(value) if kind is bool else kind(value)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return out


TRACE_KEYS: dict[str, type] = {f.name: type(f.default) for f in dataclasses.fields(ContinuationConfig)}
TRACE_KEYS.update({"direction": int, "trunk_mode": str, "omega0": float})
TREE_KEYS: dict[str, type] = {"truncation": int, "max_order": int, "omega_max": float, "format": str,
                               "samples": int}


def _merge(args: argparse.Namespace, allowed: dict[str, type]) -> dict:
    conf = read_config(args.config, allowed) if getattr(args, "config", None) else {}
    for key in allowed:
        v = getattr(args, key, None)
        if v is not None:
            conf[key] = v
    return conf


def _sidecar(out: Path, command: str, argv: list[str], extra: dict | None = None) -> None:
    info = {
        "command": command,
        "argv": argv,
        "branchforge": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    info.update(extra or {})
    write_json(out / "run-info.json", info)


def _outdir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ------------------------------------------------------------------------ tree
def cmd_tree(args: argparse.Namespace, argv: list[str]) -> int:
    conf = _merge(args, TREE_KEYS)
    if "truncation" not in conf:
        raise UsageError("--truncation is required")
    N = conf["truncation"]
    max_order = conf.get("max_order", 3)
    omega_max = conf.get("omega_max", 6.0)
    fmt = conf.get("format", "csv")
    samples = conf.get("samples", 200)
    if fmt not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {fmt!r}")
    if N < 1 or max_order < 1 or samples < 2 or omega_max <= 1:
        raise UsageError("need truncation >= 1, max-order >= 1, samples >= 2, omega-max > 1")
    try:
        tree = build_tree(N, max_order, omega_max)
    except ValueError as exc:  # e.g. a malformed BRANCHFORGE_THREADS
        raise UsageError(str(exc)) from None
    out = _outdir(args.out)
    doc = tree.to_dict()
    if fmt == "csv":
        for idx, (e, d) in enumerate(zip(tree.elements, doc["elements"])):
            name = f"element_{idx:03d}.csv"
            header, rows = element_table(e, samples, omega_max)
            write_csv(out / name, header, rows)
            d["file"] = name
    write_json(out / "tree.json", doc)
    _sidecar(out, "tree", argv)
    print(tree.stats_line())
    return EXIT_OK


# ----------------------------------------------------------------------- trace
def parse_system(spec: str) -> ModeSet:
    kind, _, body = spec.partition(":")
    if kind == "truncated":
        try:
            N = int(body)
        except ValueError:
            raise UsageError(f"bad truncation in {spec!r}") from None
        if N < 1:
            raise UsageError("truncation must be positive")
        return diagonal_truncation(N)
    if kind == "modes":
        try:
            return parse_modes(body)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    raise UsageError(f"--system must be truncated:N or modes:\"(m,n),...\", got {spec!r}")


def _start_from_file(system: AlgebraicSystem, path: str, config: ContinuationConfig):
    header, data = read_csv(path)
    cols = {h: i for i, h in enumerate(header)}
    need = ["omega"] + [mode_column(x) for x in system.span]
    missing = [c for c in need if c not in cols]
    if missing:
        raise MalformedCSVError(f"{path}: missing columns {', '.join(missing)}")
    if len(data) == 0:
        raise MalformedCSVError(f"{path}: no data rows")
    row = data[0]
    amps = np.array([row[cols[mode_column(x)]] for x in system.span])
    return solve_at_omega(system, float(row[cols["omega"]]), amps, config)


def cmd_trace(args: argparse.Namespace, argv: list[str]) -> int:
    conf = _merge(args, TRACE_KEYS)
    if args.system is None:
        raise UsageError("--system is required")
    span = parse_system(args.system)
    system = AlgebraicSystem(span)
    direction = conf.pop("direction", 1)
    if direction not in (1, -1):
        raise UsageError("direction must be 1 or -1")
    omega0 = conf.pop("omega0", 1.01)
    trunk_mode = conf.pop("trunk_mode", "(0,0)")
    try:
        config = ContinuationConfig(**conf)
        mode = parse_modes(trunk_mode)[0] if isinstance(trunk_mode, str) else as_mode(trunk_mode)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    try:
        if args.start == "trunk":
            if mode not in span:
                raise UsageError(f"trunk mode {mode} is not in the system")
            start = trunk_point(system, mode, omega0, config)
        else:
            start = _start_from_file(system, args.start, config)
        if system.residual_norm(start.omega, start.amplitudes) >= config.newton_tol:
            raise StartError("start point misses the residual tolerance")
    except (NewtonError, np.linalg.LinAlgError) as exc:
        raise StartError(str(exc)) from None
    except ValueError as exc:
        if isinstance(exc, MalformedCSVError):
            raise
        raise StartError(str(exc)) from None
    curve = trace_curve(system, start, direction, config)
    out = _outdir(args.out)
    header, rows = curve_table(curve)
    write_csv(out / "curve.csv", header, rows)
    energies = curve.energies()
    markers = [dict(m.to_dict(), omega=curve.points[m.index].omega, energy=float(energies[m.index]))
               for m in curve.markers]
    write_json(out / "markers.json", {"markers": markers})
    _sidecar(out, "trace", argv, {"config": dataclasses.asdict(config), "system": span.as_pairs()})
    kinds = curve.marker_kinds()
    print(f"points={len(curve.points)} folds={kinds.count('fold')} "
          f"bifurcation-candidates={kinds.count('bifurcation-candidate')} loops={kinds.count('closed-loop')}")
    return EXIT_OK


# ------------------------------------------------------------------------ plot
def parse_window(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"bad window {text!r}") from None
    if len(vals) != 4:
        raise UsageError("window needs omega_min,omega_max,e_min,e_max")
    x0, x1, y0, y1 = vals
    if not (x1 > x0 and y1 > y0):
        raise UsageError(f"empty window {text!r}")
    return vals


def _tree_styles(directory: Path) -> dict[str, str]:
    doc_path = directory / "tree.json"
    if not doc_path.exists():
        return {}
    try:
        doc = json.loads(doc_path.read_text())
        return {e["file"]: e["category"] for e in doc.get("elements", []) if "file" in e}
    except (ValueError, KeyError, TypeError):
        raise MalformedCSVError(f"{doc_path}: unreadable tree metadata") from None


def _markers(directory: Path) -> list[tuple[float, float]]:
    path = directory / "markers.json"
    if not path.exists():
        return []
    try:
        doc = json.loads(path.read_text())
        return [(float(m["omega"]), float(m["energy"])) for m in doc["markers"]
                if m["kind"] in ("bifurcation-candidate", "closed-loop")]
    except (ValueError, KeyError, TypeError):
        raise MalformedCSVError(f"{path}: unreadable markers") from None


def load_series(path: str) -> list[Series]:
    p = Path(path)
    header, data = read_csv(p)
    cols = {h: i for i, h in enumerate(header)}
    if "omega" not in cols or "energy" not in cols:
        raise MalformedCSVError(f"{p}: needs omega and energy columns")
    pts = data[:, [cols["omega"], cols["energy"]]]
    if "s" in cols:
        return [Series(pts, "trace", p.name, _markers(p.parent) if p.name == "curve.csv" else [])]
    if "element" in cols:
        src = data[:, cols["source"]] if "source" in cols else np.ones(len(data))
        out = []
        keys = sorted({(int(s), int(e)) for s, e in zip(src, data[:, cols["element"]])})
        for s, e in keys:
            sel = (src == s) & (data[:, cols["element"]] == e)
            out.append(Series(pts[sel], "trace" if s == 0 else "reducible", f"{p.name}:{e}"))
        return out
    style = _tree_styles(p.parent).get(p.name, "branch")
    return [Series(pts, style, p.name)]


def cmd_plot(args: argparse.Namespace, argv: list[str]) -> int:
    window = parse_window(args.window) if args.window else None
    series = []
    for path in args.inputs:
        series += load_series(path)
    svg = render(series, window, title=args.title or "")
    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg)
    return EXIT_OK


# -------------------------------------------------------------------- scenario
def cmd_scenario(args: argparse.Namespace, argv: list[str]) -> int:
    if args.id not in SCENARIOS:
        raise UsageError(f"unknown scenario {args.id!r}; known: {', '.join(SCENARIOS)}")
    out = _outdir(args.out)
    try:
        report = run_scenario(args.id, out)
    except UnknownScenarioError:
        raise UsageError(f"unknown scenario {args.id!r}") from None
    for c in report.claims:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.key}: {c.description} [{c.reference}]")
    for note in report.notes:
        print(f"note: {note}")
    _sidecar(out, "scenario", argv)
    return EXIT_OK if report.passed else EXIT_CLAIMS


# ------------------------------------------------------------------------ main
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="branchforge", description="Reducible trees and continuation for the "
                                     "cubic wave equation's Galerkin systems.")
    parser.add_argument("--version", action="version", version=f"branchforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tree", help="build the N-reducible tree")
    p.add_argument("--truncation", type=int, help="N of the N x N truncation (required)")
    p.add_argument("--max-order", dest="max_order", type=int, help="largest branch order (default 3)")
    p.add_argument("--omega-max", dest="omega_max", type=float, help="frequency window (default 6.0)")
    p.add_argument("--format", choices=("json", "csv"), help="csv also writes sampled curves (default csv)")
    p.add_argument("--samples", type=int, help="points per sampled element (default 200)")
    p.add_argument("--config", help="key = value file with the options above")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("trace", help="trace a solution curve by pseudo-arc-length continuation")
    p.add_argument("--system", help='truncated:N or modes:"(m,n),..." (required)')
    p.add_argument("--start", default="trunk", help="trunk, or a CSV whose first row is the start (default trunk)")
    p.add_argument("--omega0", type=float, help="start frequency on the trunk (default 1.01)")
    p.add_argument("--trunk-mode", dest="trunk_mode", help='trunk to start on (default "(0,0)")')
    p.add_argument("--direction", type=int, choices=(1, -1), help="initial sign of dOmega/ds (default 1)")
    p.add_argument("--config", help="key = value file with continuation parameters")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("plot", help="render CSV curves as an SVG E-Omega diagram")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, help="CSV files from tree, trace or scenario")
    p.add_argument("--out", required=True, help="SVG file to write")
    p.add_argument("--window", help="omega_min,omega_max,e_min,e_max (default: data bounds)")
    p.add_argument("--title", help="SVG title")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("scenario", help="run a named study and check its claims")
    p.add_argument("--id", required=True, help="one of: " + ", ".join(SCENARIOS))
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_scenario)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except UsageError as exc:
        print(f"branchforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MalformedCSVError as exc:
        print(f"branchforge: malformed input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StartError as exc:
        print(f"branchforge: start point failed verification: {exc}", file=sys.stderr)
        return EXIT_NEWTON
    except OSError as exc:
        print(f"branchforge: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
