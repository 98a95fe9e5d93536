"""Command-line entry point.

Exit codes: 0 success (or comparable), 3 not comparable, 2 input/usage error,
1 a verification check failed.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import __version__
from .experiments import continuity_sweep, dumps, load_game, solve_document, sweep_csv, sweep_violations
from .games import team_optimal_value
from .info_struct import InputError, load_json, read_json, team_marginal
from .lp_engine import CERT_TOL, GAP_TOL, MEMBER_TOL, LPNumericalError
from .ordering import IncomparableInputs, is_correlated_garbling, lecam_deficiency, tat_compare
from .prob_core import ShapeError
from .strategy import DEFAULT_CAP, CapExceededError

EXIT_OK, EXIT_FAIL, EXIT_ERROR, EXIT_NOT_COMPARABLE = 0, 1, 2, 3

log = logging.getLogger("teamlab")

TOLERANCES = {"membership_l1": MEMBER_TOL, "certificate": CERT_TOL, "duality_gap": GAP_TOL}


def _header(args) -> dict:
    return {"tool": "teamlab", "version": __version__, "seed": args.seed, "tolerances": TOLERANCES}


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise InputError(f"{args.command} requires {' '.join(missing)}")


def cmd_solve(args) -> int:
    _need(args, "info", "game")
    info = load_json(args.info)
    game = load_game(args.game, info)
    doc = solve_document(info, game["cost"], args.cap, args.seed, timing=args.timing)
    doc["tolerances"] = TOLERANCES
    _emit(dumps(doc), args.out)
    return EXIT_OK


def cmd_team_solve(args) -> int:
    _need(args, "info", "game")
    info = load_json(args.info)
    doc = read_json(args.game)
    if "cost" not in doc:
        raise InputError(f"{args.game}: missing field 'cost'")
    shape = (info.state_size,) + info.split.team1_act
    cost = np.asarray(doc["cost"], dtype=float)
    if cost.size != int(np.prod(shape)):
        raise InputError(f"{args.game}: 'cost' has {cost.size} entries, expected {int(np.prod(shape))} for shape {shape}")
    value, policy = team_optimal_value(team_marginal(info, 1), cost.reshape(shape), args.cap)
    out = _header(args)
    out.update({"value": value, "policy": [list(t) for t in policy.tables]})
    _emit(dumps(out), args.out)
    return EXIT_OK


def cmd_garble_check(args) -> int:
    _need(args, "info", "info2")
    mu, nu = load_json(args.info), load_json(args.info2)
    res = is_correlated_garbling(mu, nu, cap=args.cap)
    out = _header(args)
    out.update(res.to_dict())
    _emit(dumps(out), args.out)
    return EXIT_OK if res.comparable else EXIT_NOT_COMPARABLE


def cmd_lecam(args) -> int:
    _need(args, "info", "info2")
    mu, nu = load_json(args.info), load_json(args.info2)
    fwd = lecam_deficiency(mu, nu, cap=args.cap)
    back = lecam_deficiency(nu, mu, cap=args.cap)
    out = _header(args)
    out.update(fwd.to_dict())
    out["comparable"] = fwd.delta <= CERT_TOL
    out["delta_reverse"] = back.delta
    out["distance"] = max(fwd.delta, back.delta)
    _emit(dumps(out), args.out)
    return EXIT_OK if out["comparable"] else EXIT_NOT_COMPARABLE


def cmd_compare_tat(args) -> int:
    _need(args, "info", "info2")
    mu, nu = load_json(args.info), load_json(args.info2)
    res = tat_compare(mu, nu, cap=args.cap)
    out = _header(args)
    out.update(res.to_dict())
    _emit(dumps(out), args.out)
    return EXIT_OK if res.comparable else EXIT_NOT_COMPARABLE


def cmd_continuity(args) -> int:
    _need(args, "info", "game")
    info = load_json(args.info)
    game = load_game(args.game, info)
    records = continuity_sweep(info, game["cost"], args.steps, args.seed if args.seed is not None else 0, args.cap)
    _emit(sweep_csv(records), args.csv or args.out)
    bad = sweep_violations(records)
    if bad:
        log.error("%d sweep records violate the continuity bound", len(bad))
        return EXIT_FAIL
    return EXIT_OK


def cmd_example1(args) -> int:
    from .acceptance import criterion_example1

    res = criterion_example1(args.grid)
    out = _header(args)
    out.update(res.extra)
    out["checks_passed"] = res.passed
    _emit(dumps(out), args.out)
    return EXIT_OK if res.passed else EXIT_FAIL


def cmd_verify_all(args) -> int:
    from .acceptance import MASTER_SEED, run_all

    seed = MASTER_SEED if args.seed is None else args.seed
    results = run_all(seed, jobs=args.jobs)
    lines = [r.line() for r in results]
    print("\n".join(lines))
    if args.out:
        doc = _header(args)
        doc["seed"] = seed
        doc["criteria"] = [
            {"number": r.number, "name": r.name, "passed": r.passed, "worst": r.worst,
             "tolerance": r.tolerance, "instances": r.instances}
            for r in results
        ]
        _emit(dumps(doc), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


COMMANDS = {
    "solve": (cmd_solve, "equilibrium value of a zero-sum team-against-team game"),
    "team-solve": (cmd_team_solve, "optimal value of Team 1's team problem"),
    "garble-check": (cmd_garble_check, "is --info2 a correlated garbling of --info"),
    "lecam": (cmd_lecam, "Le Cam deficiency of --info with respect to --info2"),
    "compare-tat": (cmd_compare_tat, "team-against-team ordering test"),
    "continuity": (cmd_continuity, "equilibrium value along a perturbation path (CSV)"),
    "example1": (cmd_example1, "grid game in which more information hurts both teams"),
    "verify-all": (cmd_verify_all, "run every acceptance criterion"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="teamlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"teamlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--info", help="information structure JSON")
    common.add_argument("--info2", help="second information structure JSON")
    common.add_argument("--game", help="game JSON with 'cost' (and optional 'cost2')")
    common.add_argument("--seed", type=int, default=None, help="master seed")
    common.add_argument("--steps", type=int, default=20, help="continuity sweep steps (>= 2)")
    common.add_argument("--grid", type=int, default=101, help="grid size m for the example1 game (>= 3)")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="enumeration cap")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv", help="write the sweep CSV here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for verify-all")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing in solve output")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=helptext, description=helptext)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.cap < 1 or args.jobs < 1:
        print("teamlab: error: --cap and --jobs must be >= 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return COMMANDS[args.command][0](args)
    except (InputError, IncomparableInputs, ShapeError, CapExceededError, ValueError) as exc:
        print(f"teamlab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (LPNumericalError, OSError) as exc:
        print(f"teamlab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
