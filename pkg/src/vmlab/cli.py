"""Command-line front end.

    vmlab norm        --scenario PATH|PRESET [--restarts N]
    vmlab converge    {martingale|basis|rn} --scenario ... [--levels L] [--family F]
    vmlab daugavet    --scenario ... [--sweep 4,64,1024] [--sign -1]
    vmlab identity    --scenario ... [--lam 1.0]
    vmlab series-gap  --scenario ... [--sign -1] [--samples 64]
    vmlab report      --scenario ...          run the scenario's own experiment
    vmlab preset      NAME [--out PATH]       dump a builtin scenario as JSON

Common flags: --scenario (path or preset name), --out, --format {json,csv},
--seed, --exact-cutoff, --tolerance.  Exit codes: 0 success, 1 validation or
parse error, 2 capacity error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import CapacityExceeded, ParseError, ValidationError
from .harness import PRESETS, Scenario, build_scenario, emit, load_scenario, preset_scenario, run


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--scenario", required=True, help="scenario file or preset name")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--format", default="json", choices=("json", "csv"))
    parser.add_argument("--seed", type=int, default=None, help="override the experiment seed")
    parser.add_argument("--exact-cutoff", type=int, default=None, dest="exact_cutoff")
    parser.add_argument("--tolerance", type=float, default=None)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vmlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="norm table for every scenario function")
    _add_common(p)
    p.add_argument("--restarts", type=int, default=None)

    p = sub.add_parser("converge", help="net convergence diagnostics")
    p.add_argument("net", choices=("martingale", "basis", "rn"))
    _add_common(p)
    p.add_argument("--levels", type=int, default=None)
    p.add_argument("--family", choices=("coordinate", "expectation"), default=None)

    p = sub.add_parser("daugavet", help="rank-one Daugavet defect sweep")
    _add_common(p)
    p.add_argument("--sweep", default=None, help="comma-separated atom counts")
    p.add_argument("--sign", type=int, choices=(-1, 1), default=None)

    p = sub.add_parser("identity", help="combined-norm density identity check")
    _add_common(p)
    p.add_argument(
        "--lambda",
        "--lam",
        dest="lam",
        type=float,
        default=None,
        help="coefficient of the second map",
    )

    p = sub.add_parser("series-gap", help="distance of the map to a partial operator sum")
    _add_common(p)
    p.add_argument("--sign", type=int, choices=(-1, 1), default=None)
    p.add_argument("--samples", type=int, default=None)

    p = sub.add_parser("report", help="run the experiment stored in the scenario")
    _add_common(p)

    p = sub.add_parser("preset", help="dump a builtin scenario as JSON")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--out", default=None)
    return parser


def _load(name_or_path: str) -> Scenario:
    if name_or_path in PRESETS:
        return preset_scenario(name_or_path)
    return load_scenario(name_or_path)


def _experiment_override(args) -> dict | None:
    """Experiment section implied by the subcommand, or None to keep the scenario's."""
    cmd = args.command
    if cmd == "report":
        return None
    if cmd == "norm":
        exp = {"kind": "norm"}
        if args.restarts is not None:
            exp["restarts"] = args.restarts
        return exp
    if cmd == "converge":
        kind = {"martingale": "martingale", "basis": "basis", "rn": "rn_net"}[args.net]
        exp = {"kind": kind}
        if args.levels is not None:
            exp["levels"] = args.levels
        if kind == "rn_net" and args.family is not None:
            exp["family"] = args.family
        return exp
    if cmd == "daugavet":
        exp = {"kind": "daugavet"}
        if args.sweep is not None:
            exp["sweep"] = [int(v) for v in args.sweep.split(",") if v]
        if args.sign is not None:
            exp["sign"] = args.sign
        return exp
    if cmd == "identity":
        exp = {"kind": "identity"}
        if args.lam is not None:
            exp["lambda"] = args.lam
        return exp
    if cmd == "series-gap":
        exp = {"kind": "series_gap"}
        if args.sign is not None:
            exp["sign"] = args.sign
        if args.samples is not None:
            exp["samples"] = args.samples
        return exp
    raise AssertionError(cmd)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "preset":
            text = json.dumps(PRESETS[args.name], indent=2, sort_keys=True) + "\n"
            if args.out is None:
                sys.stdout.write(text)
            else:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            return 0

        scenario = _load(args.scenario)
        override = _experiment_override(args)
        if override is not None:
            # keep the scenario's carried defaults (defaulting is re-validated)
            merged = dict(scenario.raw)
            base = {
                k: v
                for k, v in scenario.raw["experiment"].items()
                if k in ("seed", "tolerance", "exact_cutoff")
            }
            merged["experiment"] = {**base, **override}
            scenario = build_scenario(merged)
        report = run(
            scenario,
            seed=args.seed,
            exact_cutoff=args.exact_cutoff,
            tolerance=args.tolerance,
        )
        emit(report, args.format, args.out)
        if "error" in report:
            if report["error"]["type"] == "CapacityExceeded":
                return 2
            return 1
        return 0
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CapacityExceeded as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
