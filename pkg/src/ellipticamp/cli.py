"""Command-line entry point: ``ellipticamp <command> ...``.

Exit status is 0 on success, 1 when the computation rejects its inputs
(domain errors, unwritable paths) and 2 on usage errors.
"""

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .errors import DomainError
from .experiments import AMP_COLUMNS, FIGURES, ExperimentConfig, metadata, run_amp_lv, run_figure, write_csv
from .fixed_point import GrowthLaw, solve_system
from .lcp import GATES, SOLVERS, equilibrium
from .lv_stats import survival_fraction
from .rand_matrix import sample_elliptic, sample_normalized_elliptic, spectral_norm, symmetric_part_top_eigenvalue


class UsageError(Exception):
    pass


def _growth(args):
    if args.r is None:
        return GrowthLaw.constant(1.0)
    return GrowthLaw(args.r, args.weights)


def _config(args, **overrides):
    """Config from ``--config`` (if any) with explicit flags layered on top."""
    base = {}
    if getattr(args, "config", None):
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
    for key, val in overrides.items():
        if val is not None:
            base[key] = val
    cfg = ExperimentConfig.from_dict(base)
    if cfg.seed is None:
        raise UsageError("--seed is required (on the command line or in the config)")
    return cfg


def _emit(obj):
    print(json.dumps(obj, indent=2))


def cmd_sample_matrix(args):
    sampler = sample_normalized_elliptic if args.normalized else sample_elliptic
    A = sampler(args.n, args.rho, args.seed)
    if args.out:
        out = Path(args.out)
        if out.suffix == ".csv":
            np.savetxt(out, A, delimiter=",", fmt="%.17g")
        else:
            np.save(out, A)
    _emit(
        {
            "n": args.n,
            "rho": args.rho,
            "seed": args.seed,
            "normalized": args.normalized,
            "spectral_norm": spectral_norm(A),
            "symmetric_top_eigenvalue": symmetric_part_top_eigenvalue(A),
            "out": args.out,
        }
    )


def cmd_solve_system(args):
    sol = solve_system(args.kappa, args.rho, _growth(args))
    _emit(sol.to_dict())


def cmd_equilibrium(args):
    law = _growth(args)
    if len(law.values) != 1:
        raise UsageError("equilibrium takes a single growth value --r")
    A = sample_normalized_elliptic(args.n, args.rho, args.seed)
    r = np.full(args.n, law.values[0])
    res = equilibrium(A, args.kappa, r, solver=args.solver, gate=args.gate, verify=args.verify)
    if args.out:
        np.savetxt(args.out, res.x_star, fmt="%.17g")
    _emit(
        {
            "n": args.n,
            "rho": args.rho,
            "kappa": args.kappa,
            "seed": args.seed,
            "gate": args.gate,
            "gate_passed": res.gate_passed,
            "gate_value": res.gate_value,
            "solver": res.solver,
            "survival_fraction": survival_fraction(res.x_star),
            "survival_fraction_eps": survival_fraction(res.x_star, 1e-6),
            "residuals": res.residuals,
        }
    )


def cmd_amp_run(args):
    growth = _growth(args).to_dict() if args.r is not None else None
    cfg = _config(
        args, n=args.n, kappa=args.kappa, rho=args.rho, K=args.K, seed=args.seed,
        growth=growth, limit_samples=args.limit_samples,
    )
    rows = run_amp_lv(cfg)
    meta = metadata(cfg, command="amp-run")
    if args.out:
        write_csv(args.out, rows, meta)
    else:
        print("# " + "; ".join(f"{k}={v}" for k, v in meta.items()))
        print(",".join(AMP_COLUMNS))
        for row in rows:
            print(",".join(str(row[c]) for c in AMP_COLUMNS))


def cmd_figure(args):
    cfg = _config(args, seed=args.seed, workers=args.workers, output_dir=args.output_dir)
    if args.name not in FIGURES:
        raise UsageError(f"unknown figure {args.name!r}; choose from {', '.join(FIGURES)}")
    for path in run_figure(args.name, cfg):
        print(path)


def build_parser():
    p = argparse.ArgumentParser(prog="ellipticamp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def growth_flags(sp):
        sp.add_argument("--r", type=float, nargs="+", help="growth-rate atoms (default 1)")
        sp.add_argument("--weights", type=float, nargs="+", help="atom weights (default uniform)")

    sp = sub.add_parser("sample-matrix", help="draw an elliptic matrix")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--normalized", action="store_true", help="divide by sqrt(n)")
    sp.add_argument("--out", help="write the matrix (.npy, or .csv)")
    sp.set_defaults(func=cmd_sample_matrix)

    sp = sub.add_parser("solve-system", help="solve for (delta, sigma, gamma)")
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--rho", type=float, required=True)
    growth_flags(sp)
    sp.set_defaults(func=cmd_solve_system)

    sp = sub.add_parser("equilibrium", help="LV equilibrium for one sampled matrix")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--seed", type=int, required=True)
    growth_flags(sp)
    sp.add_argument("--gate", choices=GATES, default="norm")
    sp.add_argument("--solver", choices=SOLVERS, default="auto")
    sp.add_argument("--verify", action="store_true", help="cross-check with the other solver")
    sp.add_argument("--out", help="write x* (one value per line)")
    sp.set_defaults(func=cmd_equilibrium)

    sp = sub.add_parser("amp-run", help="AMP for the LV equilibrium vs density evolution")
    sp.add_argument("--config")
    sp.add_argument("--n", type=int)
    sp.add_argument("--rho", type=float)
    sp.add_argument("--kappa", type=float)
    sp.add_argument("--K", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--limit-samples", type=int)
    growth_flags(sp)
    sp.add_argument("--out", help="write the table as CSV instead of printing it")
    sp.set_defaults(func=cmd_amp_run)

    sp = sub.add_parser("figure", help="write the CSV tables behind a figure")
    sp.add_argument("name", help=", ".join(FIGURES))
    sp.add_argument("--config")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--output-dir", help="overrides the config and $ELLIPTICAMP_OUTPUT_DIR")
    sp.set_defaults(func=cmd_figure)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always", RuntimeWarning)
            args.func(args)
    except UsageError as exc:
        print(f"ellipticamp {args.command}: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"ellipticamp {args.command}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ellipticamp {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
