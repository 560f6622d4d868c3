"""Command-line front end: simulate, profile, density, diagnose, render.

Output directories resolve in this order: an explicit ``--out``, the
``LMCF_LAB_OUT`` environment variable, then ``./lmcf_out``.  ``simulate``
accepts bundled scenario ids or paths to TOML files and exits nonzero if any
run fails a check.  The integrator contains no random source; the
``--seedless-deterministic`` flag is accepted (and on by default) so batch
scripts can state the guarantee explicitly.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from os import environ
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from . import scenarios
from .diagnostics import NOT_APPLICABLE, PASS, DensityQuery, gaussian_density
from .errors import LmcfLabError
from .render import RenderStyle, emit_svg
from .serialization import (
    MANIFEST_NAME,
    read_curve_csv,
    read_trajectory,
    report_to_json_text,
    write_curve_csv,
)

_OUT_ENV = "LMCF_LAB_OUT"


def _default_out() -> str:
    return environ.get(_OUT_ENV, "lmcf_out")


def _parse_param(raw: str) -> tuple[str, object]:
    """Split ``key=value`` and coerce the value as a TOML literal.

    Values that do not parse as TOML (bare words, paths) stay strings, so
    ``--param path=curve.csv`` works without shell-quoted quotes.
    """
    key, sep, value = raw.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {raw!r}")
    try:
        parsed = tomllib.loads(f"v = {value}")["v"]
    except tomllib.TOMLDecodeError:
        parsed = value
    return key, parsed


def _simulate_one(ref: str, out_root: str) -> scenarios.ScenarioOutcome:
    return scenarios.run_scenario(scenarios.resolve_scenario(ref), out_root=out_root)


def _cmd_simulate(args: argparse.Namespace) -> int:
    out_root = args.out or _default_out()
    if not args.seedless_deterministic:
        print("note: the integrator has no random source; runs are "
              "deterministic regardless of this flag", file=sys.stderr)
    results: list[tuple[str, scenarios.ScenarioOutcome | None, str | None]] = []
    if args.workers > 1 and len(args.scenario) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            futures = [pool.submit(_simulate_one, ref, out_root) for ref in args.scenario]
            for ref, fut in zip(args.scenario, futures):
                try:
                    results.append((ref, fut.result(), None))
                except LmcfLabError as err:
                    results.append((ref, None, str(err)))
    else:
        for ref in args.scenario:
            try:
                results.append((ref, _simulate_one(ref, out_root), None))
            except LmcfLabError as err:
                results.append((ref, None, str(err)))
    failed = 0
    for ref, outcome, error in results:
        if outcome is None:
            print(f"{ref}: ERROR {error}")
            failed += 1
            continue
        verdicts = ", ".join(f"{name}={v}" for name, v in outcome.verdicts) or "no checks"
        status = "ok" if outcome.ok else "FAILED"
        if outcome.error:
            verdicts += f"; run error: {outcome.error}"
        print(f"{outcome.scenario_id}: {status} ({verdicts}) -> {outcome.directory}")
        failed += 0 if outcome.ok else 1
    return 1 if failed else 0


def _cmd_profile(args: argparse.Namespace) -> int:
    spec = scenarios.component_spec_from_params(args.kind, dict(args.param))
    component, report = scenarios.construct_component(spec)
    out_dir = Path(args.out or _default_out()) / f"profile_{args.kind}"
    out_dir.mkdir(parents=True, exist_ok=True)
    curve_file = write_curve_csv(component.curve, out_dir / "curve.csv")
    payload = dict(
        report,
        kind=args.kind,
        nodes=component.curve.n,
        closed=component.curve.closed,
        curve_file=str(curve_file),
    )
    (out_dir / "report.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_density(args: argparse.Namespace) -> int:
    curve = read_curve_csv(args.curve)
    x1, y1, x2, y2 = args.center
    query = DensityQuery(
        center=(complex(x1, y1), complex(x2, y2)),
        scale=args.scale,
        alpha_nodes=args.alpha_nodes,
        truncation=args.truncation,
    )
    result = gaussian_density(curve, query)
    print(json.dumps({
        "value": result.value,
        "error_estimate": result.error_estimate,
        "tail_warning": result.tail_warning,
    }, indent=2, sort_keys=True))
    return 0


def _trajectory_dir(path: Path) -> Path:
    if (path / "snapshots" / MANIFEST_NAME).is_file():
        return path / "snapshots"
    if (path / MANIFEST_NAME).is_file():
        return path
    raise LmcfLabError(f"no snapshot manifest under {path}")


def _cmd_diagnose(args: argparse.Namespace) -> int:
    trajectory = read_trajectory(_trajectory_dir(Path(args.run)))
    spec = scenarios.check_spec_from_params(args.check, dict(args.param))
    report = scenarios.run_check(spec, trajectory)
    print(report_to_json_text(report))
    return 0 if report.verdict in (PASS, NOT_APPLICABLE) else 1


def _cmd_render(args: argparse.Namespace) -> int:
    path = Path(args.input)
    if path.is_dir():
        target = read_trajectory(_trajectory_dir(path))[-1]
    else:
        target = read_curve_csv(path)
    style = RenderStyle(guide_angles=tuple(args.guide))
    text = emit_svg(target, path=args.out, style=style)
    if args.out is None:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmcf-lab",
        description="Equivariant curve-flow lab: run scenarios and inspect artifacts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one or more scenarios")
    sim.add_argument("scenario", nargs="+",
                     help="bundled id (%s) or path to a TOML file"
                     % ", ".join(scenarios.bundled_scenario_ids()))
    sim.add_argument("--out", default=None,
                     help=f"output root (default: ${_OUT_ENV} or ./lmcf_out)")
    sim.add_argument("--workers", type=int, default=1,
                     help="run scenarios in this many processes")
    sim.add_argument("--seedless-deterministic", default=True,
                     action=argparse.BooleanOptionalAction,
                     help="assert deterministic, seed-free execution")
    sim.set_defaults(func=_cmd_simulate)

    prof = sub.add_parser("profile", help="construct a named curve and report on it")
    prof.add_argument("kind", choices=scenarios.component_kinds())
    prof.add_argument("--param", action="append", type=_parse_param, default=[],
                      metavar="KEY=VALUE", help="constructor parameter (repeatable)")
    prof.add_argument("--out", default=None, help="output root")
    prof.set_defaults(func=_cmd_profile)

    dens = sub.add_parser("density", help="Gaussian density of a stored curve")
    dens.add_argument("curve", help="curve CSV file")
    dens.add_argument("--center", type=float, nargs=4, required=True,
                      metavar=("X1", "Y1", "X2", "Y2"),
                      help="ambient center: real/imag parts of both coordinates")
    dens.add_argument("--scale", type=float, required=True,
                      help="backward-heat-kernel scale (time to the center)")
    dens.add_argument("--alpha-nodes", type=int, default=128)
    dens.add_argument("--truncation", type=float, default=8.0)
    dens.set_defaults(func=_cmd_density)

    diag = sub.add_parser("diagnose", help="run one check against stored snapshots")
    diag.add_argument("run", help="scenario output directory (or its snapshots/)")
    diag.add_argument("--check", required=True, choices=scenarios.check_kinds())
    diag.add_argument("--param", action="append", type=_parse_param, default=[],
                      metavar="KEY=VALUE", help="check parameter (repeatable)")
    diag.set_defaults(func=_cmd_diagnose)

    rend = sub.add_parser("render", help="draw a curve CSV or a run's final state")
    rend.add_argument("input", help="curve CSV file or scenario output directory")
    rend.add_argument("--out", default=None, help="SVG file (default: stdout)")
    rend.add_argument("--guide", type=float, action="append", default=[],
                      help="dashed ray guide at this angle (repeatable)")
    rend.set_defaults(func=_cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LmcfLabError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
