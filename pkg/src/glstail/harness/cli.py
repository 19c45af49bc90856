"""Command-line entry point: ``glstail <subcommand> [options]``.

Exit codes: 0 success, 1 usage error, 2 verification violation.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from ..conjugate import fenchel_transform, tail_from_psi
from ..errors import GLSTailError
from ..moments import gls_norm
from ..psi_functions import P_MAX, log_grid
from ..specs import parse_kernel, parse_oracle, parse_psi
from ..transfer import build_psi_function
from .._io import write_csv
from .config import ExperimentConfig, load_config
from .simulate import IncrementLaw, simulate_martingale
from .verify import verify_bdg, verify_doob

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _cmd_conjugate(args) -> int:
    psi = parse_psi(args.psi)
    y = np.array(args.y) if args.y else np.linspace(args.y_min, args.y_max, args.ny)
    table = fenchel_transform(psi, np.sort(y), args.p_grid_size, p_max=args.p_max)
    for yi, hs, ap in zip(table.y_grid, table.hstar, table.argmax_p):
        print(f"y={yi:.6g}  h*={hs:.10g}  argmax_p={ap:.6g}")
    if args.out:
        print(f"wrote {table.to_csv(args.out)}")
    return EXIT_OK


def _cmd_tailbound(args) -> int:
    psi = parse_psi(args.psi)
    t = np.array(args.t, dtype=float)
    bound = np.atleast_1d(tail_from_psi(psi, args.C, t, args.p_grid_size, p_max=args.p_max))
    if t.size == 1:
        print(f"{bound[0]:.10g}")
    else:
        for ti, bi in zip(t, bound):
            print(f"t={ti:.6g}  bound={bi:.10g}")
    if args.out:
        print(f"wrote {write_csv(args.out, ('t', 'bound'), (t, bound))}")
    return EXIT_OK


def _cmd_transfer(args) -> int:
    kernel = parse_kernel(args.kernel, args.p0)
    eta = parse_oracle(args.oracle)
    p = np.array(args.p) if args.p else log_grid(args.p_min, args.p_max, args.np)
    psi = build_psi_function(kernel, eta, p, args.p0)
    p = np.unique(p)
    values = psi(p)
    for pi, vi in zip(p, values):
        print(f"p={pi:.6g}  psi={vi:.10g}")
    if args.out:
        print(f"wrote {write_csv(args.out, ('p', 'value'), (p, values))}")
    return EXIT_OK


def _cmd_gls_norm(args) -> int:
    oracle = parse_oracle(args.oracle)
    kappa = parse_psi(args.kappa)
    grid = np.array(args.p) if args.p else args.grid
    res = gls_norm(oracle, kappa, grid, p_max=args.p_max)
    print(f"{res.value:.10g}")
    print(f"argmax p = {res.p:.6g}", file=sys.stderr)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    batch = simulate_martingale(args.n, args.trials, IncrementLaw.parse(args.law), args.seed, args.workers)
    out = Path(args.out_dir)
    batch.terminal.to_csv(out / "terminal.csv")
    batch.running_max.to_csv(out / "running_max.csv")
    batch.quad_variation_sqrt.to_csv(out / "quad_variation_sqrt.csv")
    print(f"simulated {batch.n_trials} paths of {batch.n_steps} {batch.law} steps (seed {batch.seed})")
    print(f"wrote terminal.csv, running_max.csv, quad_variation_sqrt.csv to {out}")
    return EXIT_OK


def _experiment(args, kernel: str) -> ExperimentConfig:
    base = load_config(args.config) if args.config else ExperimentConfig(kernel=kernel, p_grid=DEFAULT_P[kernel])
    if base.kernel != kernel:
        raise UsageError(f"config file is for kernel {base.kernel!r}, not {kernel!r}")
    return base.with_overrides(
        law=IncrementLaw.parse(args.law) if args.law else None,
        n_steps=args.n,
        n_trials=args.trials,
        seed=args.seed,
        p_grid=tuple(args.p) if args.p else None,
        fit_window=tuple(args.fit_window) if args.fit_window else None,
        workers=args.workers,
        out_dir=args.out_dir,
        slack_sigmas=args.slack,
    )


DEFAULT_P = {"doob": (2.0, 3.0, 4.0, 6.0, 8.0), "bdg": (2.0, 4.0, 6.0)}


def _cmd_verify(args, kernel: str) -> int:
    cfg = _experiment(args, kernel)
    report = (verify_doob if kernel == "doob" else verify_bdg)(cfg)
    paths = report.write(cfg.out_dir)
    print(report.summary())
    print("wrote " + ", ".join(str(p) for p in paths.values()))
    failed = report.failed or (args.strict and report.violations > 0)
    return EXIT_VIOLATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="glstail", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("conjugate", help="tabulate the Young-Fenchel transform h*(y)")
    p.add_argument("--psi", required=True, help="generating function, e.g. power:2")
    p.add_argument("--y", type=float, nargs="+")
    p.add_argument("--y-min", type=float, default=1.0)
    p.add_argument("--y-max", type=float, default=3.0)
    p.add_argument("--ny", type=int, default=50)
    p.add_argument("--p-grid-size", type=int, default=512)
    p.add_argument("--p-max", type=float, default=P_MAX)
    p.add_argument("--out", help="conjugate.csv path")
    p.set_defaults(func=_cmd_conjugate)

    p = sub.add_parser("tailbound", help="tail bound exp(-h*(ln(t/C))) at given t")
    p.add_argument("--psi", required=True)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--t", type=float, nargs="+", required=True)
    p.add_argument("--p-grid-size", type=int, default=512)
    p.add_argument("--p-max", type=float, default=P_MAX)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_tailbound)

    p = sub.add_parser("transfer", help="tabulate psi_{p0}[eta](p) for a kernel and oracle")
    p.add_argument("--kernel", required=True, help="doob | bdg | custom:path.csv")
    p.add_argument("--oracle", required=True, help="e.g. gaussian:1 or sample:path.csv")
    p.add_argument("--p0", type=float)
    p.add_argument("--p", type=float, nargs="+")
    p.add_argument("--p-min", type=float, default=2.0)
    p.add_argument("--p-max", type=float, default=16.0)
    p.add_argument("--np", type=int, default=16)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_transfer)

    p = sub.add_parser("gls-norm", help="grid estimate of sup_p |zeta|_p / kappa(p)")
    p.add_argument("--oracle", required=True)
    p.add_argument("--kappa", required=True)
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--p", type=float, nargs="+", help="explicit p grid")
    p.add_argument("--p-max", type=float, default=P_MAX)
    p.set_defaults(func=_cmd_gls_norm)

    p = sub.add_parser("simulate", help="simulate martingale paths and store the samples")
    p.add_argument("--law", default="gaussian")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", default="out")
    p.set_defaults(func=_cmd_simulate)

    for name, kernel in (("verify-doob", "doob"), ("verify-bdg", "bdg")):
        p = sub.add_parser(name, help=f"Monte Carlo check of the {kernel} transfer")
        p.add_argument("--config", help="INI file with an [experiment] section")
        p.add_argument("--law")
        p.add_argument("--n", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--p", type=float, nargs="+")
        p.add_argument("--fit-window", type=float, nargs=2)
        p.add_argument("--slack", type=float)
        p.add_argument("--workers", type=int)
        p.add_argument("--out-dir")
        p.add_argument("--strict", action="store_true", help="treat BDG warnings as violations")
        p.set_defaults(func=lambda a, k=kernel: _cmd_verify(a, k))
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GLSTailError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
