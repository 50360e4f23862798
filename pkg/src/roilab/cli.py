"""Command-line interface.

Subcommands: scenario, table, mc, blw-scan, jm-check, corr, compare.
Exit codes: 0 on success/PASS, 2 when a reference comparison fails,
1 on any error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .datasets import DATASET_IDS
from .errors import RoiLabError
from .harness import (
    ScenarioConfig,
    atomic_write,
    compare_dataset,
    report_text,
    run_scenario,
    wide_table_text,
)
from .jointmeas import jm_feasible
from .measurements import load_json, noisy_x, noisy_z
from .uncertainty import blw_sum_scan, scan_csv

_GAMMA_ALIASES = {
    "0": 0.0,
    "pi/16": math.pi / 16,
    "pi/8": math.pi / 8,
    "pi/4": math.pi / 4,
    "3pi/16": 3 * math.pi / 16,
}


def parse_gamma(text: str) -> float:
    if text in _GAMMA_ALIASES:
        return _GAMMA_ALIASES[text]
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"gamma {text!r} is neither a float nor one of {', '.join(_GAMMA_ALIASES)}"
        ) from None


def parse_alpha_beta(text: str) -> tuple[complex, complex]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("--alpha-beta expects re,im,re,im")
    re_a, im_a, re_b, im_b = (float(p) for p in parts)
    return complex(re_a, im_a), complex(re_b, im_b)


def _add_common(p: argparse.ArgumentParser, states: bool = True) -> None:
    p.add_argument(
        "--gamma",
        action="append",
        type=parse_gamma,
        metavar="G",
        help="angle in radians or symbolic (pi/8); repeatable",
    )
    if states:
        p.add_argument(
            "--state",
            action="append",
            choices=["H", "V", "plus", "minus", "psi-minus", "psi-plus"],
            help="named input state; repeatable",
        )
        p.add_argument(
            "--alpha-beta",
            action="append",
            type=parse_alpha_beta,
            metavar="RE,IM,RE,IM",
            help="custom input state amplitudes; repeatable",
        )
    p.add_argument("--shots", type=int, default=None, help="simulate N-shot counting noise")
    p.add_argument("--seed", type=int, default=0, help="substream seed (default 0)")
    p.add_argument("--format", choices=["csv", "json"], default="csv", dest="fmt")
    p.add_argument("--out", default=None, metavar="PATH", help="write the report here")
    p.add_argument("--data-dir", default=None, metavar="PATH", help="reference dataset directory")


def _config(args, scenario: str, default_gammas=None) -> ScenarioConfig:
    states = list(args.state or [])
    states.extend(getattr(args, "alpha_beta", None) or [])
    kwargs = dict(
        scenario=scenario,
        shots=args.shots,
        seed=args.seed,
        out=args.out,
        fmt=args.fmt,
        data_dir=args.data_dir,
    )
    gammas = args.gamma if args.gamma else default_gammas
    if gammas is not None:
        kwargs["gamma_list"] = tuple(gammas)
    if states:
        kwargs["states"] = tuple(states)
    return ScenarioConfig(**kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roi-lab",
        description="Sequential qubit measurement scenarios, tables, and reference comparisons.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scenario", help="run a measurement scenario")
    p.add_argument(
        "name",
        choices=["macrorealistic", "retrieving", "no-retrieving"],
        help="which scenario to run",
    )
    _add_common(p)

    p = sub.add_parser("table", help="regenerate the tomography tables")
    _add_common(p)
    p.add_argument("--layout", choices=["long", "wide"], default="long")

    p = sub.add_parser("mc", help="shot-noise simulation of a scenario")
    p.add_argument(
        "name",
        choices=["table", "macrorealistic", "retrieving", "no-retrieving"],
        nargs="?",
        default="table",
    )
    _add_common(p)

    p = sub.add_parser("blw-scan", help="scan the worst-case uncertainty sum over gamma")
    p.add_argument("--points", type=int, default=10000, help="grid size on [0, pi/4]")
    p.add_argument("--format", choices=["csv", "json"], default="csv", dest="fmt")
    p.add_argument("--out", default=None, metavar="PATH")

    p = sub.add_parser("jm-check", help="joint-measurability verdict for a POVM pair")
    p.add_argument("--gamma", type=parse_gamma, default=math.pi / 8)
    p.add_argument("--sharp", action="store_true", help="check sharp Z against sharp X")
    p.add_argument("--povm-a", default=None, metavar="JSON", help="first POVM from a JSON file")
    p.add_argument("--povm-b", default=None, metavar="JSON", help="second POVM from a JSON file")
    p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("corr", help="margin correlation and its envelope")
    _add_common(p)

    p = sub.add_parser("compare", help="compare computed values against shipped reference data")
    p.add_argument("--dataset", default="all", help=f"one of {', '.join(DATASET_IDS)} or 'all'")
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["csv", "json"], default="csv", dest="fmt")
    p.add_argument("--out", default=None, metavar="PATH")
    p.add_argument("--data-dir", default=None, metavar="PATH")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write(text, out)


def _run(args) -> int:
    if args.command == "scenario":
        cfg = _config(args, args.name.replace("-", "_"))
        report = run_scenario(cfg)
        if cfg.out is None:
            _emit(report_text(report, cfg.fmt), None)
        return 0 if report.passed else 2

    if args.command == "table":
        cfg = _config(args, "table")
        if args.layout == "wide":
            _emit(wide_table_text(cfg.gamma_list), args.out)
            return 0
        report = run_scenario(cfg)
        if cfg.out is None:
            _emit(report_text(report, cfg.fmt), None)
        return 0 if report.passed else 2

    if args.command == "mc":
        if args.shots is None:
            args.shots = 625
        cfg = _config(args, args.name.replace("-", "_"))
        report = run_scenario(cfg)
        if cfg.out is None:
            _emit(report_text(report, cfg.fmt), None)
        return 0 if report.passed else 2

    if args.command == "blw-scan":
        if args.points < 3:
            raise RoiLabError(f"need at least 3 grid points, got {args.points}")
        grid = np.linspace(0.0, math.pi / 4, args.points)
        report = blw_sum_scan(grid)
        if args.fmt == "json":
            import json

            text = json.dumps(
                {
                    "grid_argmin": report.grid_argmin,
                    "grid_min": report.grid_min,
                    "gamma_star": report.gamma_star,
                    "min_sum": report.min_sum,
                },
                indent=1,
                sort_keys=True,
            ) + "\n"
        else:
            text = scan_csv(grid)
        _emit(text, args.out)
        sys.stderr.write(
            f"grid argmin {report.grid_argmin:.9f} (sum {report.grid_min:.12f}); "
            f"analytic optimum {report.gamma_star:.9f} (sum {report.min_sum:.12f})\n"
        )
        return 0

    if args.command == "jm-check":
        if args.povm_a or args.povm_b:
            if not (args.povm_a and args.povm_b):
                raise RoiLabError("--povm-a and --povm-b must be given together")
            first, second = load_json(args.povm_a), load_json(args.povm_b)
        elif args.sharp:
            first, second = noisy_z(math.pi / 4), noisy_x(1.0)
        else:
            first, second = noisy_z(args.gamma), noisy_x(math.cos(2 * args.gamma))
        report = jm_feasible(first, second, tol=args.tol)
        verdict = "feasible" if report.feasible else "infeasible"
        sys.stdout.write(
            f"{verdict} residual={report.residual:.3e} iterations={report.iterations}\n"
        )
        return 0

    if args.command == "corr":
        cfg = _config(args, "corr", default_gammas=[math.pi / 8])
        report = run_scenario(cfg)
        if cfg.out is None:
            _emit(report_text(report, cfg.fmt), None)
        return 0

    if args.command == "compare":
        ids = DATASET_IDS if args.dataset == "all" else (args.dataset,)
        failed = False
        chunks = []
        for dataset_id in ids:
            report = compare_dataset(dataset_id, args.shots, args.seed, args.data_dir)
            chunks.append(report_text(report, args.fmt))
            status = "PASS" if report.passed else "FAIL"
            sys.stderr.write(f"{dataset_id}: {status} (worst dev {report.worst_dev:.4f})\n")
            failed = failed or not report.passed
        _emit("".join(chunks), args.out)
        return 2 if failed else 0

    raise RoiLabError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except RoiLabError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
