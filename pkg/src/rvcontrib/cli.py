"""Command-line interface.

Subcommands: ``analyze``, ``simulate``, ``decompose`` and ``threshold``.
Exit status: 0 success, 1 usage or validation error, 2 data error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import analyze, prepare
from .errors import DataError, RVContribError
from .io import file_digest, load_matrix_csv, write_matrix_csv, write_report
from .metrics import per_response_profile
from .permutation import (
    DEFAULT_GRID,
    DEFAULT_LEVEL,
    DEFAULT_N_PERMS,
    DEFAULT_SEED,
    PermutationPlan,
    contribution_threshold,
)
from .plot import render_contribution_plot, render_response_profile
from .simulation import PRESETS, SimulationSpec, generate_dataset, preset

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _grid(text: str) -> tuple[int, ...]:
    try:
        grid = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}; expected e.g. 1,2,3,4") from None
    if not grid:
        raise argparse.ArgumentTypeError("grid is empty")
    if any(a < 1 for a in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise argparse.ArgumentTypeError(f"grid {text!r} must be positive and strictly ascending")
    return grid


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _level(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid level {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError("level must lie strictly between 0 and 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rvcontrib", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rvcontrib {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_args(p):
        p.add_argument("--x", required=True, type=Path, help="explanatory variables (CSV)")
        p.add_argument("--y", required=True, type=Path, help="response variables (CSV)")
        p.add_argument("--confounders", type=Path, help="confounders to regress out (CSV)")

    def perm_args(p):
        p.add_argument("--perms", type=_positive_int, default=DEFAULT_N_PERMS)
        p.add_argument("--level", type=_level, default=DEFAULT_LEVEL)
        p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
        p.add_argument("--threads", type=_positive_int, default=1,
                       help="worker threads; never changes results")

    a = sub.add_parser("analyze", help="adaptive test, contribution profile and threshold")
    data_args(a)
    a.add_argument("--grid", type=_grid, default=DEFAULT_GRID, help="powers, e.g. 1,2,3,4")
    perm_args(a)
    a.add_argument("--out", default="rvcontrib", help="output prefix")

    s = sub.add_parser("simulate", help="write a simulated X/Y pair as CSV")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS))
    src.add_argument("--spec", type=Path, help="JSON simulation spec")
    s.add_argument("--seed", type=_seed, required=True)
    s.add_argument("--n", type=_positive_int, help="override the number of rows")
    s.add_argument("--out", default="sim", help="output prefix")

    d = sub.add_parser("decompose", help="per-response profile of one variable")
    data_args(d)
    d.add_argument("--variable", required=True, help="column name in the X file")
    d.add_argument("--alpha", type=_positive_int, default=1)
    d.add_argument("--out", default="rvcontrib", help="output prefix")

    t = sub.add_parser("threshold", help="permutation threshold on the maximum contribution")
    data_args(t)
    t.add_argument("--alpha", type=_positive_int, default=1)
    perm_args(t)
    return parser


def _check_inputs(args) -> None:
    for attr in ("x", "y", "confounders", "spec"):
        path = getattr(args, attr, None)
        if path is not None and not path.is_file():
            raise UsageError(f"--{attr}: no such file: {path}")


def _load(args):
    x = load_matrix_csv(args.x)
    y = load_matrix_csv(args.y)
    z = load_matrix_csv(args.confounders) if args.confounders else None
    return x, y, z


def _cmd_analyze(args) -> None:
    x, y, z = _load(args)
    plan = PermutationPlan(args.perms, args.seed, args.level)
    report = analyze(x, y, z, args.grid, plan, threads=args.threads)
    inputs = {"x": args.x, "y": args.y}
    if args.confounders:
        inputs["confounders"] = args.confounders
    report.provenance.update({
        "command": "analyze",
        "inputs": {k: {"file": p.name, "sha256": file_digest(p)} for k, p in inputs.items()},
    })
    report_path = Path(f"{args.out}_report.json")
    plot_path = Path(f"{args.out}_contributions.svg")
    write_report(report, report_path)
    render_contribution_plot(report.profile, plot_path)

    t = report.test
    print(f"alpha_m: {t.alpha_m}")
    for a, p in zip(t.grid, t.p_values):
        print(f"p(alpha={a}): {p:.6g}")
    print(f"aSPC p: {t.aspc_p:.6g}")
    print(f"threshold: {report.profile.threshold:.6g}")
    print("flagged: " + (", ".join(report.profile.flagged_names) or "(none)"))
    print(f"wrote {report_path} and {plot_path}")


def _cmd_simulate(args) -> None:
    if args.preset:
        spec = preset(args.preset, seed=args.seed, n=args.n)
    else:
        with open(args.spec, encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DataError(f"{args.spec}: invalid JSON: {exc}") from None
        try:
            spec = SimulationSpec.from_dict({**raw, "seed": args.seed})
        except (KeyError, TypeError) as exc:
            raise DataError(f"{args.spec}: invalid simulation spec: {exc}") from None
        if args.n is not None:
            spec = spec.with_(n=args.n)
    x, y = generate_dataset(spec)
    x_path, y_path = Path(f"{args.out}_X.csv"), Path(f"{args.out}_Y.csv")
    write_matrix_csv(x, x_path)
    write_matrix_csv(y, y_path)
    print(f"wrote {x_path} ({x.n}x{x.shape[1]}) and {y_path} ({y.n}x{y.shape[1]})")


def _cmd_decompose(args) -> None:
    x, y, z = _load(args)
    if args.variable not in x.col_names:
        raise DataError(f"{args.x}: no column named {args.variable!r}")
    xs, ys = prepare(x, y, z)
    k = xs.column_index(args.variable)
    values = per_response_profile(xs, ys, k, args.alpha)
    csv_path = Path(f"{args.out}_{args.variable}_profile.csv")
    svg_path = Path(f"{args.out}_{args.variable}_profile.svg")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["response", "value"])
        for name, v in zip(ys.col_names, values):
            w.writerow([name, repr(float(v))])
    title = f"{args.variable}: correlations to the power {2 * args.alpha}"
    render_response_profile(values, ys.col_names, svg_path, title)
    print(f"contribution of {args.variable} (alpha={args.alpha}): {values.sum():.6g}")
    print(f"wrote {csv_path} and {svg_path}")


def _cmd_threshold(args) -> None:
    x, y, z = _load(args)
    xs, ys = prepare(x, y, z)
    plan = PermutationPlan(args.perms, args.seed, args.level)
    print(f"{contribution_threshold(xs, ys, args.alpha, plan, threads=args.threads):.17g}")


COMMANDS = {
    "analyze": _cmd_analyze,
    "simulate": _cmd_simulate,
    "decompose": _cmd_decompose,
    "threshold": _cmd_threshold,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _check_inputs(args)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"rvcontrib: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, RVContribError) as exc:
        print(f"rvcontrib: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"rvcontrib: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
