"""``qdiv`` command-line front end.

Each subcommand reads JSON inputs, evaluates a grid, and writes one CSV (or
JSON) row per grid point. Exit status: 0 on success, 2 on invalid input, 3 on
numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import hypothesis_testing as ht
from . import io
from .algebra import martingale_sequence, nested_chain_m4
from .divergences import FdState, sandwiched_d, sandwiched_q, standard_d, standard_q
from .errors import NotConverged, NumericalError, ParseError, ValidationError
from .gicar import classical_renyi_q, gicar_q
from .measured import measured_opt, regularized_estimate, test_measured_opt
from .variational import closed_form_optimizer, iterative_solve

# default pairs used when no state files are given
CLASSICAL_PAIR = (np.diag([0.5, 0.5]), np.diag([1 / 3, 2 / 3]))
QUBIT_PAIR = (np.full((2, 2), 0.5), np.diag([2 / 3, 1 / 3]))


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text}") from exc


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QDIV_THREADS", "1")))
    except ValueError:
        return 1


def _grid_map(fn, grid):
    """Evaluate ``fn`` on every grid point, in grid order."""
    workers = min(_threads(), max(len(grid), 1))
    if workers == 1:
        return [fn(x) for x in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, grid))


def _pair(args, default=QUBIT_PAIR):
    if args.rho is None and args.sigma is None:
        return FdState.from_matrix(default[0]), FdState.from_matrix(default[1])
    if args.rho is None or args.sigma is None:
        raise ValidationError("give both --rho and --sigma, or neither")
    return io.parse_state(args.rho), io.parse_state(args.sigma)


def _n_list(args) -> list[int]:
    if args.nlist:
        return args.nlist
    if args.nmax:
        ns, n = [], 1
        while n < args.nmax:
            ns.append(n)
            n *= 2
        return ns + [args.nmax]
    raise ValidationError("give --nlist or --nmax")


# --- commands ------------------------------------------------------------------


def cmd_div(args):
    rho, sigma = _pair(args)
    header = ["alpha", "sandwiched_q", "sandwiched_d", "standard_q", "standard_d"]

    def row(a):
        sq = sandwiched_q(rho, sigma, a) if a >= 0.5 else float("nan")
        sd = sandwiched_d(rho, sigma, a) if a >= 0.5 else float("nan")
        return [a, sq, sd, standard_q(rho, sigma, a), standard_d(rho, sigma, a)]

    return header, _grid_map(row, args.alpha)


def cmd_variational(args):
    rho, sigma = _pair(args)
    header = ["alpha", "sandwiched_q", "closed_form_value", "iterative_value", "iterative_converged"]

    def row(a):
        closed = closed_form_optimizer(rho, sigma, a)
        try:
            it = iterative_solve(rho, sigma, a, seed=args.seed)
        except NotConverged as exc:
            it = exc.best
        return [a, sandwiched_q(rho, sigma, a), closed.value, it.value, it.converged]

    return header, _grid_map(row, args.alpha)


def cmd_martingale(args):
    rho, sigma = _pair(args)
    chain = io.parse_chain(args.chain) if args.chain else nested_chain_m4() if rho.dim == 4 else None
    if chain is None:
        raise ValidationError("--chain is required unless the states live on M_4")
    header = ["alpha", "link", "pattern", "sandwiched_d"]
    rows = []
    for a in args.alpha:
        for i, (N, v) in enumerate(zip(chain.links, martingale_sequence(rho, sigma, chain, a))):
            rows.append([a, i, json.dumps([list(p) for p in N.pattern]), v])
    return header, rows


def cmd_sce(args):
    default = CLASSICAL_PAIR if args.classical else QUBIT_PAIR
    rho, sigma = _pair(args, default)
    method = "classical" if args.classical else "auto"
    header = ["n", "r", "alpha_star", "sce_value", "hoeffding_value"]
    rows = []
    for r in args.r:
        h = ht.hoeffding_anti_divergence(rho, sigma, r)

        def row(n, r=r, h=h):
            res = ht.min_type1_result(rho, sigma, n, r, method)
            sce = -res.log_success / n if res.log_success > -np.inf else float("inf")
            return [n, r, res.alpha_star, sce, h]

        rows.extend(_grid_map(row, _n_list(args)))
    return header, rows


def cmd_hoeffding(args):
    rho, sigma = _pair(args)
    header = ["r", "hoeffding_value", "u_star"]

    def row(r):
        h, u = ht.hoeffding_maximizer(rho, sigma, r)
        return [r, h, u]

    return header, _grid_map(row, args.r)


def cmd_cutoff(args):
    rho, sigma = _pair(args)
    header = ["kappa", "alpha", "cutoff_rate"]
    return header, _grid_map(lambda k: [k, 1.0 / (1.0 - k), ht.cutoff_rate(rho, sigma, k)], args.kappa)


def cmd_measured(args):
    rho, sigma = _pair(args)
    if args.nmax:
        header = ["alpha", "n", "regularized_estimate", "sandwiched_d"]
        rows = []
        for a in args.alpha:
            target = sandwiched_d(rho, sigma, a)
            est = regularized_estimate(rho, sigma, a, args.nmax, seed=args.seed)
            rows.extend([a, n, v, target] for n, v in enumerate(est, start=1))
        return header, rows
    header = ["alpha", "test_measured", "measured", "sandwiched_d"]

    def row(a):
        tm, _ = test_measured_opt(rho, sigma, a, seed=args.seed)
        m, _ = measured_opt(rho, sigma, a, seed=args.seed)
        return [a, tm, m, sandwiched_d(rho, sigma, a)]

    return header, _grid_map(row, args.alpha)


def cmd_gicar(args):
    if not (args.mu1 and args.mu2):
        raise ValidationError("--mu1 and --mu2 are required")
    mu1, mu2 = io.parse_measure(args.mu1), io.parse_measure(args.mu2)
    header = ["alpha", "n", "gicar_q", "classical_q", "gap"]
    rows = []
    for a in args.alpha:
        target = classical_renyi_q(mu1, mu2, a)

        def row(n, a=a, target=target):
            q = gicar_q(mu1, mu2, n, a)
            gap = abs(q - target) if np.isfinite(q) and np.isfinite(target) else (0.0 if q == target else np.inf)
            return [a, n, q, target, gap]

        rows.extend(_grid_map(row, _n_list(args)))
    return header, rows


COMMANDS = {
    "div": (cmd_div, "sandwiched and standard Renyi divergences on an alpha grid"),
    "variational": (cmd_variational, "closed-form and iterative variational values"),
    "martingale": (cmd_martingale, "divergences of restrictions along a subalgebra chain"),
    "sce": (cmd_sce, "strong converse exponents -(1/n) log(1 - alpha*_n)"),
    "hoeffding": (cmd_hoeffding, "Hoeffding anti-divergence on an r grid"),
    "cutoff": (cmd_cutoff, "generalized kappa-cutoff rates"),
    "measured": (cmd_measured, "measured, test-measured and regularized divergences"),
    "gicar": (cmd_gicar, "GICAR binomial-mixture quasi-entropies and their classical limit"),
}

DEFAULTS = {"alpha": [2.0], "r": [0.25], "kappa": [0.5]}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdiv", description="Quantum Renyi divergence laboratory.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        p = sub.add_parser(name, help=helptext, description=helptext)
        p.add_argument("--config", help="JSON file with default values for any flag")
        p.add_argument("--rho", help="state JSON for rho")
        p.add_argument("--sigma", help="state JSON for sigma")
        p.add_argument("--alpha", type=_floats, help="comma-separated alpha grid")
        p.add_argument("--r", type=_floats, help="comma-separated rate grid")
        p.add_argument("--kappa", type=_floats, help="comma-separated kappa grid")
        p.add_argument("--nmax", type=int, help="largest n (powers of two below it are included)")
        p.add_argument("--nlist", type=_ints, help="comma-separated list of n")
        p.add_argument("--classical", action="store_true", help="use the classical type-class path")
        p.add_argument("--mu1", help="measure JSON for mu1")
        p.add_argument("--mu2", help="measure JSON for mu2")
        p.add_argument("--chain", help="subalgebra chain JSON")
        p.add_argument("--seed", type=int, help="random seed (default 0)")
        p.add_argument("--out", help="output file (default: standard output)")
        p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    return parser


def _apply_config(args) -> None:
    """Fill flags left unset on the command line from ``--config`` and the built-in defaults."""
    config = {}
    if args.config:
        try:
            with open(args.config) as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(config, dict):
            raise ParseError("config must be a JSON object")
    for key, value in config.items():
        key = key.replace("-", "_")
        if not hasattr(args, key) or key in ("command", "config"):
            raise ParseError(f"unknown config key {key!r}")
        if getattr(args, key) in (None, False):
            if key in ("alpha", "r", "kappa") and not isinstance(value, list):
                value = [float(value)]
            if key == "nlist" and not isinstance(value, list):
                value = [int(value)]
            setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if getattr(args, key) is None:
            setattr(args, key, value)
    if args.seed is None:
        args.seed = 0
    if args.format is None:
        args.format = "csv"
    for key in ("alpha", "r", "kappa", "nlist"):
        if getattr(args, key) is not None and len(getattr(args, key)) == 0:
            raise ValidationError(f"--{key} grid is empty")


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        header, rows = COMMANDS[args.command][0](args)
    except (ValidationError, ParseError) as exc:
        print(f"qdiv: invalid input: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"qdiv: numerical failure: {exc}", file=sys.stderr)
        return 3
    text = io.to_csv(header, rows) if args.format == "csv" else io.to_json(header, rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
