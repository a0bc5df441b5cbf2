"""Command-line front end.

    python -m partmaxent solve    -J 1,2 -a 1,1
    python -m partmaxent forward  -J 1,2,3 -b 4.0,-8.5,4.6
    python -m partmaxent estimate -J 1 -a 1 -n 100 --mode both
    python -m partmaxent count    -J 1,2 -N 3,4
    python -m partmaxent sample   -J 1 -a 1 -n 100 --exact --samples 3
    python -m partmaxent shape    -J 1,2,3 -b 4.0,-8.5,4.6 --grid 0.01:5:500
    python -m partmaxent qj       -J 1,2
    python -m partmaxent validate

Exit codes: 0 success, 2 no convergence, 3 invalid or infeasible input,
1 anything else.  JSON floats carry 12 significant digits; exact integers
(counts, profiles) are decimal strings.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from .asymptotics import estimate_p
from .domain import MomentVector, Profile, ProfileSet, _parse_list, scaled_profile
from .errors import InvalidInput, NoConvergence, PartMaxEntError
from .exact_count import count_exact
from .intpoly import enumerate_QJ, is_n_feasible
from .maxent_continuous import DualVector, forward_map, m_alpha, solve_beta
from .maxent_discrete import default_scale, solve_beta_hat
from .sampler import (ShapeCurve, empirical_shape, limit_shape, make_rng, parse_grid,
                      sample_mu, sample_uniform_many)

DEFAULT_GRID = "0.01:5:500"


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _num(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".12g")


def dumps(obj) -> str:
    """Compact JSON with every float written to 12 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(text: str, out):
    if not text.endswith("\n"):
        text += "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# argument plumbing
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def _floats(text):
    return _parse_list(text, float)


def _ints(text):
    return _parse_list(text, int)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = {"J": "-J", "alpha": "-a", "beta": "-b", "N": "-N", "n": "-n"}
        raise InvalidInput("missing " + ", ".join(flags.get(m, m) for m in missing))


def _alpha(args) -> MomentVector:
    _need(args, "J", "alpha")
    return MomentVector(ProfileSet.of(args.J), args.alpha)


def _beta(args) -> DualVector:
    _need(args, "J", "beta")
    return DualVector(ProfileSet.of(args.J), args.beta)


def _single_n(args) -> int:
    _need(args, "n")
    if len(args.n) != 1:
        raise InvalidInput("this subcommand takes a single -n")
    return args.n[0]


def _profile_and_scale(args):
    """N from -N (n optional) or from -a with -n."""
    J = ProfileSet.of(args.J)
    if args.N is not None:
        N = Profile(J, args.N)
        n = args.n[0] if args.n else default_scale(N)
        return N, n
    n = _single_n(args)
    return scaled_profile(_alpha(args), n), n


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_solve(args):
    alpha = _alpha(args)
    try:
        report = solve_beta(alpha)
    except NoConvergence as exc:
        if exc.best is not None:
            sys.stderr.write(dumps({"best": exc.best.to_json()}) + "\n")
        raise
    body = {"J": alpha.J.to_json(), "alpha": alpha.to_json()}
    body.update(report.to_json())
    body["M"] = m_alpha(report.beta)
    _emit(dumps(body), args.out)


def cmd_forward(args):
    beta = _beta(args)
    alpha = forward_map(beta)
    _emit(dumps({"J": beta.J.to_json(), "beta": beta.to_json(), "alpha": alpha.to_json(),
                 "M": m_alpha(beta)}), args.out)


def _estimate_one(alpha, n, mode, lattice):
    modes = ("leading", "refined") if mode == "both" else (mode,)
    parts = {m: estimate_p(alpha, n, m, lattice) for m in modes}
    first = next(iter(parts.values()))
    common = first.to_json()
    for key in ("mode", "H", "lclt_factor", "log_estimate", "estimate"):
        common.pop(key)
    for m, br in parts.items():
        common[m] = {"log_estimate": br.to_json()["log_estimate"], "estimate": br.estimate}
        if m == "refined":
            common[m].update({"H": br.H, "lclt_factor": br.lclt_factor})
    return common


def cmd_estimate(args):
    alpha = _alpha(args)
    _need(args, "n")
    lattice = enumerate_QJ(alpha.J)
    results = [_estimate_one(alpha, n, args.mode, lattice) for n in args.n]
    _emit(dumps(results[0] if len(results) == 1 else results), args.out)


def cmd_count(args):
    _need(args, "J")
    if args.N is None:
        N, _ = _profile_and_scale(args)
    else:
        N = Profile(ProfileSet.of(args.J), args.N)
    feasible = is_n_feasible(N, enumerate_QJ(N.J))
    count = count_exact(N, memory_cap=args.memory_cap) if feasible else 0
    _emit(dumps({"count": str(count), "feasible": feasible}), args.out)


def cmd_sample(args):
    _need(args, "J")
    N, n = _profile_and_scale(args)
    dual = solve_beta_hat(N, None, n)
    rng = make_rng(args.seed)
    if args.exact:
        lams, tries = sample_uniform_many(N, dual, rng, args.samples, max_tries=args.max_tries)
    else:
        lams, tries = [sample_mu(dual, rng) for _ in range(args.samples)], args.samples
    if args.format == "csv":
        grid = parse_grid(args.grid or DEFAULT_GRID)
        curves = [empirical_shape(lam, n, grid).values for lam in lams]
        _emit(ShapeCurve(grid, np.mean(curves, axis=0)).to_csv(), args.out)
        return
    _emit(dumps({"J": N.J.to_json(), "N": [str(v) for v in N.values], "n": n,
                 "exact": bool(args.exact), "seed": args.seed, "tries": tries,
                 "partitions": [lam.to_json() for lam in lams]}), args.out)


def cmd_shape(args):
    _need(args, "J")
    if args.beta is not None:
        beta = _beta(args)
    else:
        beta = solve_beta(_alpha(args)).beta
    curve = limit_shape(beta, parse_grid(args.grid or DEFAULT_GRID))
    if args.format == "json":
        _emit(dumps({"J": beta.J.to_json(), "beta": beta.to_json(),
                     "t": curve.grid, "phi": curve.values}), args.out)
    else:
        _emit(curve.to_csv(), args.out)


def cmd_qj(args):
    _need(args, "J")
    _emit(dumps(enumerate_QJ(ProfileSet.of(args.J)).to_json()), args.out)


def cmd_validate(args):
    from .validation import run_checks

    results = run_checks(args.checks or None)
    if args.format == "json":
        _emit(dumps([r.to_json() for r in results]), args.out)
    elif args.format == "csv":
        rows = ["name,passed,seconds,limit"]
        rows += [f"{r.name},{str(r.passed).lower()},{r.seconds:.12g},{r.limit:.12g}" for r in results]
        _emit("\n".join(rows), args.out)
    else:
        _emit("\n".join(r.line() for r in results), args.out)
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "solve": (cmd_solve, "alpha -> beta by Newton on the dual"),
    "forward": (cmd_forward, "beta -> alpha by quadrature"),
    "estimate": (cmd_estimate, "leading and refined estimates of p(N(alpha, n))"),
    "count": (cmd_count, "exact p(N)"),
    "sample": (cmd_sample, "draws from mu_n or uniform draws from P(N)"),
    "shape": (cmd_shape, "limit shape phi(t) as CSV"),
    "qj": (cmd_qj, "list the integer-valued polynomials Q_J"),
    "validate": (cmd_validate, "run the acceptance checks"),
}


def build_parser():
    parser = _Parser(prog="partmaxent", description="Partitions with prescribed power sums.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-J", dest="J", help="comma list of powers, e.g. 1,2")
        p.add_argument("-a", dest="alpha", type=_floats, help="alpha, matched to J")
        p.add_argument("-b", dest="beta", type=_floats, help="beta, matched to J")
        p.add_argument("-N", dest="N", type=_ints, help="profile N, matched to J")
        p.add_argument("-n", dest="n", type=_ints, help="scale n (comma list for estimate)")
        p.add_argument("--mode", choices=("leading", "refined", "both"), default="both")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write to this file instead of stdout")
        p.add_argument("--format", choices=("json", "csv"),
                       default={"shape": "csv", "validate": None}.get(name, "json"),
                       help="validate prints a text table unless a format is given")
        p.add_argument("--grid", help="a:b:m, m points from a to b")
        if name == "sample":
            p.add_argument("--samples", type=int, default=1)
            p.add_argument("--exact", action="store_true",
                           help="uniform on P(N) by rejection instead of mu_n draws")
            p.add_argument("--max-tries", type=int, default=10 ** 8)
        if name == "count":
            p.add_argument("--memory-cap", type=int, default=10 ** 8)
        if name == "validate":
            p.add_argument("checks", nargs="*", help="subset of check names")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fun = COMMANDS[args.command][0]
    try:
        status = fun(args)
    except PartMaxEntError as exc:
        sys.stderr.write(f"partmaxent {args.command}: {type(exc).__name__}: {exc}\n")
        return exc.exit_code
    except (OSError, KeyError) as exc:
        sys.stderr.write(f"partmaxent {args.command}: {exc}\n")
        return 1
    return status or 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
