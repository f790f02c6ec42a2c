"""``widthlab`` command line.

Every subcommand prints one report (JSON by default, keys sorted) on stdout.
Failures print ``{"error": ..., "kind": ...}`` on stderr and exit with
2 (invalid argument), 3 (resource limit), 4 (solver failure) or 1 (other).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional, Sequence

from . import approx, auctions, instances, maximize, reproduce, widths
from .errors import InvalidArgument, ResourceLimit, SolverFailure, WidthlabError
from .fileio import dumps, function_to_dict, load_function, load_profile, save_json
from .setfn import elements

DEFAULT_SEED = 0
FORMATS = ("json", "text", "csv")
EXIT_CODES = {InvalidArgument: 2, ResourceLimit: 3, SolverFailure: 4}


class _Parser(argparse.ArgumentParser):
    def error(self, message):           # route usage errors through the JSON error path
        raise InvalidArgument(message)


def env_seed() -> int:
    raw = os.environ.get("WIDTHLAB_SEED")
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise InvalidArgument(f"WIDTHLAB_SEED must be an integer, got {raw!r}") from None


def env_threads() -> int:
    """Parallelism cap. Computations here are single-threaded, so this is only validated."""
    raw = os.environ.get("WIDTHLAB_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise InvalidArgument(f"WIDTHLAB_THREADS must be a positive integer, got {raw!r}")
    return n


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        for i, x in enumerate(obj):
            yield from _flatten(x, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report)
    rows = list(_flatten(report))
    if fmt == "text":
        return "".join(f"{k}: {json.dumps(v)}\n" for k, v in rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric", "value"])
    for k, v in rows:
        w.writerow([k, v if isinstance(v, (str, int, float)) and not isinstance(v, bool) else json.dumps(v)])
    return buf.getvalue()


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_widths(args) -> dict:
    f = load_function(args.function)
    return widths.width_report(f, max_d=args.max_d).to_dict()


def _resolve_d(args, fs) -> int:
    if args.d is not None:
        if args.d < 0:
            raise InvalidArgument("--d must be nonnegative")
        return args.d
    if not args.auto_width:
        raise InvalidArgument("pass --d or --auto-width")
    if any(f.m > widths.MAX_M_WIDTH for f in fs):
        raise ResourceLimit(f"--auto-width needs m <= {widths.MAX_M_WIDTH}")
    return max(widths.supermodular_width(f) for f in fs)


def cmd_maximize(args) -> dict:
    if args.problem == "constrained":
        if len(args.functions) != 1:
            raise InvalidArgument("constrained maximization takes exactly one function file")
        f = load_function(args.functions[0])
        if args.k is None:
            raise InvalidArgument("--k is required for constrained maximization")
        d = _resolve_d(args, [f])
        S, trace = maximize.batched_greedy_constrained(f, args.k, d)
        out = {"problem": "constrained", "k": args.k, "d": d, "set": elements(S),
               "value": trace.value, "queries": trace.queries,
               "trace": [s.to_dict() for s in trace.steps]}
        if args.brute_force:
            best, opt = maximize.brute_force_constrained(f, args.k)
            out["opt"] = opt
            out["opt_set"] = elements(best)
            out["ratio"] = trace.value / opt if opt > 0 else 1.0
        return out
    fs = [g for path in args.functions for g in load_profile(path)]
    d = _resolve_d(args, fs)
    alloc, trace = maximize.batched_greedy_welfare(fs, d)
    out = {"problem": "welfare", "d": d, "allocation": [elements(p) for p in alloc.parts],
           "value": alloc.welfare, "queries": trace.queries,
           "trace": [s.to_dict() for s in trace.steps]}
    if args.brute_force:
        best, opt = maximize.brute_force_welfare(fs)
        out["opt"] = opt
        out["opt_allocation"] = [elements(p) for p in best.parts]
        out["ratio"] = alloc.welfare / opt if opt > 0 else 1.0
    return out


INSTANCE_NAMES = ("threshold-any-two", "pair-matching", "symmetric-two-level", "all-pairs",
                  "hard-cm", "hard-wm", "projective-plane", "single-bid-pos", "random")


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise InvalidArgument(f"instance {args.name} needs --{n.replace('_', '-')}")


def cmd_instance(args) -> dict:
    name = args.name
    if name == "threshold-any-two":
        _need(args, "m")
        obj = function_to_dict(instances.threshold_any_two(args.m))
    elif name == "pair-matching":
        _need(args, "t")
        obj = function_to_dict(instances.pair_matching(args.t))
    elif name == "symmetric-two-level":
        _need(args, "m")
        obj = function_to_dict(instances.symmetric_two_level(args.m))
    elif name == "all-pairs":
        _need(args, "m")
        obj = function_to_dict(instances.all_pairs(args.m))
    elif name == "hard-cm":
        _need(args, "d", "c1", "c2")
        p = instances.HardCMParams.make(args.d, args.c1, args.c2, m=args.m)
        obj = function_to_dict(instances.hard_cm_instance(p))
    elif name == "hard-wm":
        _need(args, "d", "c1", "c2", "n")
        p = instances.HardWMParams.make(args.d, args.c1, args.c2, args.n)
        obj = {"agents": [function_to_dict(f) for f in instances.hard_wm_instance(p)]}
    elif name == "projective-plane":
        _need(args, "q")
        pp = instances.projective_plane_instance(args.q)
        obj = {"agents": [function_to_dict(f) for f in pp.valuations()],
               "lines": [elements(ln) for ln in pp.lines]}
    elif name == "single-bid-pos":
        _need(args, "d", "eps")
        obj = {"agents": [function_to_dict(f) for f in instances.single_bid_pos_instance(args.d, args.eps)]}
    elif name == "random":
        _need(args, "m")
        seed = args.seed if args.seed is not None else env_seed()
        obj = function_to_dict(instances.random_monotone(args.m, seed, args.style))
    else:
        raise InvalidArgument(f"unknown instance {name!r}; choose from {INSTANCE_NAMES}")
    if args.output:
        save_json(obj, args.output)
    return obj


def cmd_approx(args) -> dict:
    f = load_function(args.function)
    S = f.full if args.target_set is None else args.target_set
    cert = approx.find_pointwise_approximator(f, args.d, S, args.mode, certify=not args.no_certify)
    return cert.to_dict()


def _parse_supports(items: Sequence[str], n: int, m: int):
    if not items:
        return None
    sup: list[list[int]] = [[] for _ in range(n)]
    for item in items:
        try:
            who, mask = item.split(":")
            i, S = int(who), int(mask, 0)
        except ValueError:
            raise InvalidArgument(f"--support expects PLAYER:MASK, got {item!r}") from None
        if not 0 <= i < n or not 0 < S < (1 << m):
            raise InvalidArgument(f"--support {item!r} is out of range")
        sup[i].append(S)
    full = (1 << m) - 1
    return [s if s else [full] for s in sup]


def cmd_auction(args) -> dict:
    fs = [g for path in args.valuations for g in load_profile(path)]
    seed = args.seed if args.seed is not None else env_seed()
    if args.levels:
        grid = auctions.BidGrid.explicit(sorted(set([0.0] + args.levels)))
    elif args.grid is not None:
        grid = auctions.BidGrid.uniform(args.grid, auctions.max_item_price(fs))
    else:
        grid = auctions.default_grid(fs)
    supports = _parse_supports(args.support or [], len(fs), fs[0].m)
    game = auctions.build_game(args.mechanism, fs, grid, supports)
    _, opt = maximize.brute_force_welfare(fs)
    out = {"mechanism": args.mechanism, "grid": grid.to_dict(), "opt": opt, "seed": seed}
    if args.rounds > 0:
        rep = auctions.no_regret_dynamics(game, args.rounds, seed=seed,
                                          algorithm=args.algorithm, opt=opt)
        out["dynamics"] = rep.to_dict()
    if args.enumerate_nash:
        eqs = auctions.enumerate_pure_nash(game)
        out["nash"] = [{"profile": [game.action_repr(i, a) for i, a in enumerate(p)],
                        **o.to_dict()} for p, o in eqs[:args.max_nash]]
        out["nash_count"] = len(eqs)
    return out


def cmd_reproduce(args) -> dict:
    seed = args.seed if args.seed is not None else env_seed()
    checks = reproduce.run_suite(args.suite, seed)
    out = reproduce.summary(checks)
    out["suite"] = args.suite
    out["seed"] = seed
    return out


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="widthlab", description="Complementarity widths, greedy maximization and auction checks.")
    p.add_argument("--format", choices=FORMATS, default="json")
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    w = sub.add_parser("widths", parents=[common], help="degree, widths and hypergraph level of a function")
    w.add_argument("function")
    w.add_argument("--max-d", type=int, default=None, help="also test MPH-d membership for d <= k")
    w.add_argument("--report", choices=("json", "text"), default=None)
    w.set_defaults(run=cmd_widths)

    mx = sub.add_parser("maximize", parents=[common], help="batched greedy maximization")
    mx.add_argument("problem", choices=("constrained", "welfare"))
    mx.add_argument("functions", nargs="+")
    mx.add_argument("--k", type=int)
    mx.add_argument("--d", type=int)
    mx.add_argument("--auto-width", action="store_true")
    mx.add_argument("--brute-force", action="store_true")
    mx.set_defaults(run=cmd_maximize)

    ins = sub.add_parser("instance", parents=[common], help="emit a named instance as JSON")
    ins.add_argument("name", choices=INSTANCE_NAMES)
    for flag in ("m", "t", "d", "c1", "c2", "n", "q", "seed"):
        ins.add_argument(f"--{flag}", type=int)
    ins.add_argument("--eps", type=float)
    ins.add_argument("--style", choices=instances.STYLES, default="nonneg-hypergraph")
    ins.add_argument("-o", "--output")
    ins.set_defaults(run=cmd_instance)

    ap = sub.add_parser("approx", parents=[common], help="CH pointwise approximation certificate")
    ap.add_argument("function")
    ap.add_argument("--d", type=int, required=True)
    ap.add_argument("--mode", choices=approx.MODES, default="saw")
    ap.add_argument("--target-set", type=lambda s: int(s, 0), default=None)
    ap.add_argument("--no-certify", action="store_true")
    ap.set_defaults(run=cmd_approx)

    au = sub.add_parser("auction", parents=[common], help="equilibria and no-regret play")
    au.add_argument("mechanism", choices=auctions.MECHANISMS)
    au.add_argument("--valuations", nargs="+", required=True)
    au.add_argument("--grid", type=float, help="bid step")
    au.add_argument("--levels", type=float, nargs="+", help="explicit bid levels")
    au.add_argument("--rounds", type=int, default=0)
    au.add_argument("--seed", type=int)
    au.add_argument("--algorithm", choices=("regret-matching", "hedge"), default="regret-matching")
    au.add_argument("--enumerate-nash", action="store_true")
    au.add_argument("--max-nash", type=int, default=20)
    au.add_argument("--support", action="append", help="PLAYER:MASK (SIA)")
    au.set_defaults(run=cmd_auction)

    rp = sub.add_parser("reproduce", parents=[common], help="re-run the numerical checks")
    rp.add_argument("--suite", default="all",
                    choices=sorted(reproduce.SUITES) + ["all"])
    rp.add_argument("--seed", type=int)
    rp.set_defaults(run=cmd_reproduce)
    return p


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        env_threads()
        args = build_parser().parse_args(argv)
        report = args.run(args)
        fmt = args.format
        if getattr(args, "report", None):
            fmt = args.report
        stdout.write(render(report, fmt))
        if args.command == "reproduce" and not report["all_passed"]:
            return 1
        return 0
    except WidthlabError as exc:
        stderr.write(json.dumps({"error": str(exc), "kind": exc.kind}, sort_keys=True) + "\n")
        for cls, code in EXIT_CODES.items():
            if isinstance(exc, cls):
                return code
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
