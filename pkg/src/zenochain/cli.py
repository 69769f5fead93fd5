"""Command line entry point.

Subcommands: simulate, theory, compare, figure {fig2,fig3,fig4,fig5},
three-level.  Global flags --seed, --out-dir, --reproducible and
--realizations override the corresponding config values.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, ParseError, ValidationError, parse_config
from .experiments import (
    preset_fig2,
    preset_fig3,
    preset_fig4,
    preset_fig5,
    run_experiment,
    run_three_level,
    write_theory_csv,
)


def _load_config(path: str, args: argparse.Namespace) -> ExperimentConfig:
    text = Path(path).read_text(encoding="utf-8")
    config = parse_config(text)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    if args.realizations is not None:
        config = dataclasses.replace(config, realizations=args.realizations)
    if args.out_dir is not None:
        config = dataclasses.replace(config, output_path=args.out_dir)
    return config


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out-dir", type=str, default=None, help="output directory")
    parser.add_argument(
        "--reproducible",
        action="store_true",
        help="suppress the timestamp header so identical runs are byte-identical",
    )
    parser.add_argument(
        "--realizations", type=int, default=None, help="override realization count"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zenochain",
        description="Stochastic Zeno confinement on spin chains: simulation and theory.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a config and emit all CSVs")
    p_sim.add_argument("config")
    _add_common(p_sim)

    p_theory = sub.add_parser("theory", help="emit theory.csv only")
    p_theory.add_argument("config")
    _add_common(p_theory)

    p_cmp = sub.add_parser("compare", help="simulate and print theory-vs-simulation")
    p_cmp.add_argument("config")
    _add_common(p_cmp)

    p_fig = sub.add_parser("figure", help="run a figure-reproduction preset")
    p_fig.add_argument("name", choices=["fig2", "fig3", "fig4", "fig5"])
    p_fig.add_argument("--m", type=int, default=None, help="override interval count")
    _add_common(p_fig)

    p_three = sub.add_parser("three-level", help="three-level model closed form vs numerics")
    p_three.add_argument("--omega", type=float, default=1.0)
    p_three.add_argument(
        "--g", type=str, default="0.1,1,10", help="comma-separated coupling list"
    )
    p_three.add_argument("--t-max", type=float, default=200.0)
    p_three.add_argument("--dt", type=float, default=0.05)
    _add_common(p_three)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            config = _load_config(args.config, args)
            result = run_experiment(config, reproducible=args.reproducible)
            print(f"wrote {len(result['files'])} files to {result['out_dir']}")
        elif args.command == "theory":
            config = _load_config(args.config, args)
            path = write_theory_csv(
                config, out_dir=config.output_path, reproducible=args.reproducible
            )
            print(f"wrote {path}")
        elif args.command == "compare":
            config = _load_config(args.config, args)
            result = run_experiment(config, reproducible=args.reproducible)
            theory_path = Path(result["out_dir"]) / "theory.csv"
            pstar = _read_pstar(theory_path)
            mean_ln = result["mean_log_survival"]
            print(f"mean ln P (simulation): {mean_ln:.6f}")
            print(f"ln P* (time-averaged theory): {np.log(pstar):.6f}")
            rel = abs(mean_ln - np.log(pstar)) / abs(np.log(pstar))
            print(f"relative deviation: {rel:.4f}")
        elif args.command == "figure":
            out = args.out_dir or "out"
            seed = args.seed
            kwargs = {"reproducible": args.reproducible}
            if args.m is not None:
                kwargs["m"] = args.m
            if args.realizations is not None and args.name in ("fig4", "fig5"):
                kwargs["realizations"] = args.realizations
            runner = {
                "fig2": preset_fig2,
                "fig3": preset_fig3,
                "fig4": preset_fig4,
                "fig5": preset_fig5,
            }[args.name]
            if seed is not None:
                kwargs["seed"] = seed
            path = runner(out, **kwargs)
            print(f"wrote {path}")
        elif args.command == "three-level":
            out = args.out_dir or "out"
            g_list = [float(x) for x in args.g.split(",") if x.strip()]
            path = run_three_level(
                args.omega, g_list, args.t_max, args.dt, out, args.reproducible
            )
            print(f"wrote {path}")
    except (ParseError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1
    return 0


def _read_pstar(theory_path: Path) -> float:
    import csv as _csv

    with open(theory_path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(_csv.reader(lines))
    header, first = rows[0], rows[1]
    return float(first[header.index("pstar_time_avg")])


if __name__ == "__main__":
    raise SystemExit(main())
