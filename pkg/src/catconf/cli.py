"""Command line: ``catconf rank|count|verify|formulas``.

Exit codes: 0 success / stabilized, 1 verification failed, 2 loop budget
exhausted, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from typing import Optional, Sequence


from . import __version__
from .catalecticant import RANK_TOL, build_catalecticant, build_stacked_catalecticant, generating_memberships, rank_report
from .formulas import CaseSpec, defectivity_check, generic_rank_uniform, perfect_case
from .io import SchemaError, encode_complex, load_polyvector, load_solution_set, write_json
from .monodromy import MonodromyConfig, SolutionClassSet, dedup, run, scaled_sigma_min, solution_set_json
from .presets import COUNT_PRESETS, RANK_PRESETS, build_count_system
from .systems import StartPairError, WaringSystem, make_start_pair
from .tracker import SingularJacobianError, TrackerConfig, refine, track

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3

log = logging.getLogger("catconf")


class InputError(Exception):
    pass


def _global_flags() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--tol", type=float, default=None,
                   help="rank: relative rank threshold; count: dedup radius; verify: residual threshold")
    g.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    g.add_argument("--out", default=None, help="write the payload (solution set for count) to this file")
    g.add_argument("--json", action="store_true", help="print the full run report as JSON")
    g.add_argument("-v", "--verbose", action="count", default=0)
    return g


def build_parser() -> argparse.ArgumentParser:
    g = _global_flags()
    parser = argparse.ArgumentParser(prog="catconf", description=__doc__, parents=[g])
    sub = parser.add_subparsers(dest="command", required=True)

    rank = sub.add_parser("rank", parents=[g], help="catalecticant rank report")
    src = rank.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(RANK_PRESETS))
    src.add_argument("--input", help="polynomial vector JSON file")
    rank.add_argument("--order", type=int, default=None, help="derivative order h (default: preset / d-1)")

    count = sub.add_parser("count", parents=[g], help="count decompositions by monodromy")
    count.add_argument("--preset", required=True, choices=sorted(COUNT_PRESETS))
    count.add_argument("--input", help="target polynomial vector JSON; classes are tracked onto it")
    count.add_argument("--stable-loops", type=int, default=8)
    count.add_argument("--max-loops", type=int, default=100)
    count.add_argument("--use-paper-start", action="store_true", help="start from the published 40-entry vector")
    count.add_argument("--corrector-tol", type=float, default=TrackerConfig.corrector_tol)
    count.add_argument("--step-min", type=float, default=TrackerConfig.step_min)
    count.add_argument("--max-steps", type=int, default=TrackerConfig.max_steps)

    verify = sub.add_parser("verify", parents=[g], help="re-check a solution-set file")
    verify.add_argument("solutions")

    formulas = sub.add_parser("formulas", parents=[g], help="closed-form rank arithmetic")
    fsub = formulas.add_subparsers(dest="formula", required=True)
    fp = fsub.add_parser("perfect")
    fp.add_argument("--n", type=int, required=True)
    fp.add_argument("--degrees", type=int, nargs="+", required=True)
    fg = fsub.add_parser("generic-rank")
    fg.add_argument("--n", type=int, required=True)
    fg.add_argument("--r", type=int, required=True)
    fg.add_argument("--a", type=int, required=True)
    fd = fsub.add_parser("defect")
    fd.add_argument("--n", type=int, required=True)
    fd.add_argument("--r", type=int, required=True)
    fd.add_argument("--a1", type=int, required=True)
    fd.add_argument("--s", type=int, required=True)
    fd.add_argument("--a2", type=int, required=True)
    return parser


def cmd_rank(args) -> tuple[dict, int]:
    tol = RANK_TOL if args.tol is None else args.tol
    if args.preset:
        preset = RANK_PRESETS[args.preset]
        h = preset.h if args.order is None else args.order
        f, summands = preset.instance(args.seed)
    else:
        try:
            f = load_polyvector(args.input)
        except (SchemaError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        summands = None
        h = (min(f.degrees) - 1) if args.order is None else args.order
    try:
        if len(set(f.degrees)) == 1:
            cat = build_catalecticant(f, h, tol)
        else:
            cat = build_stacked_catalecticant(f, h, tol)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    memberships = generating_memberships(cat, summands, f.degrees) if summands is not None else []
    return rank_report(cat, memberships), EXIT_OK


def _config(args) -> MonodromyConfig:
    tracker = TrackerConfig(corrector_tol=args.corrector_tol, step_min=args.step_min, max_steps=args.max_steps)
    kw = dict(stable_loops=args.stable_loops, max_loops=args.max_loops, threads=max(1, args.threads), tracker=tracker)
    if args.tol is not None:
        kw["dedup_tol"] = args.tol
    return MonodromyConfig(**kw)


def _track_to_target(system, state, target_p, config: MonodromyConfig) -> SolutionClassSet:
    target = SolutionClassSet(system, target_p, config)
    for c in state.classes:
        res = track(system, state.base_p, target_p, c.x, config.tracker)
        if not res.ok:
            continue
        try:
            x, _ = refine(system, target_p, res.endpoint, config.tracker.refine_tol, config.tracker.refine_iters)
        except SingularJacobianError:
            continue
        target.add(x)
    return target


def cmd_count(args) -> tuple[dict, int]:
    if args.use_paper_start and args.preset != "quartics-reduced":
        raise InputError("--use-paper-start is only valid for --preset quartics-reduced")
    system = build_count_system(args.preset, args.seed)
    config = _config(args)
    try:
        start = make_start_pair(system, args.seed, published=args.use_paper_start)
    except StartPairError as exc:
        raise InputError(str(exc)) from exc

    state = run(system, start, config, seed=args.seed)
    payload = solution_set_json(state, args.preset)
    summary = {
        "count": state.count,
        "spurious_filtered": state.spurious,
        "stabilized": state.stabilized,
        "loops_run": state.loops_run,
        "history": state.history,
        "path_failures": state.path_failures,
        "paths_tracked": state.paths_tracked,
        "expected": COUNT_PRESETS[args.preset].expected,
    }
    if args.use_paper_start:
        summary["contains_start"] = any(
            dedup(c.summands, system.summands(start.x), 1e-6) for c in state.classes.valid
        )
    if args.input:
        if not isinstance(system, WaringSystem):
            raise InputError(f"--input needs a forward-map Waring preset, not {args.preset}")
        try:
            f = load_polyvector(args.input)
        except (SchemaError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        if f.n != system.n or f.degrees != system.degrees:
            raise InputError(f"input has n={f.n}, degrees {f.degrees}; preset needs n={system.n}, degrees {system.degrees}")
        target = _track_to_target(system, state, f.coefficients(), config)
        payload["base_p"] = encode_complex(f.coefficients())
        payload["classes"] = [c.to_json() for c in target.valid]
        summary["count"] = len(target.valid)
    payload["summary"] = summary
    return payload, (EXIT_OK if state.stabilized else EXIT_BUDGET)


def cmd_verify(args) -> tuple[dict, int]:
    try:
        data = load_solution_set(args.solutions)
    except SchemaError as exc:
        raise InputError(str(exc)) from exc
    if data["preset"] not in COUNT_PRESETS:
        raise InputError(f"unknown preset {data['preset']!r} in {args.solutions}")
    system = build_count_system(data["preset"], int(data["seed"]))
    base_p = data["base_p"]
    if base_p.size != system.p_dim:
        raise InputError(f"preset {data['preset']} has {system.p_dim} parameters, file has {base_p.size}")
    tol = 1e-8 if args.tol is None else args.tol
    rows = []
    for i, summands in enumerate(data["summand_arrays"]):
        if summands.ndim != 2 or summands.size != system.x_dim:
            raise InputError(f"class {i} has {summands.size} coordinates, preset needs {system.x_dim}")
        x = summands.reshape(-1)
        res = system.residual_norm(x, base_p, full=True)
        reg = scaled_sigma_min(system.jacobian(x, base_p), x, base_p)
        rows.append({"index": i, "residual": res, "residual_ok": res <= tol, "sigma_min": reg, "regular": reg >= 1e-6})
    arrays = data["summand_arrays"]
    duplicates = [
        [i, j] for i in range(len(arrays)) for j in range(i + 1, len(arrays))
        if dedup(arrays[i], arrays[j], 1e-6)
    ]
    ok = all(r["residual_ok"] and r["regular"] for r in rows) and not duplicates
    payload = {
        "preset": data["preset"],
        "classes": len(rows),
        "max_residual": max((r["residual"] for r in rows), default=0.0),
        "failed": [r["index"] for r in rows if not r["residual_ok"]],
        "irregular": [r["index"] for r in rows if not r["regular"]],
        "duplicates": duplicates,
        "details": rows,
        "ok": ok,
    }
    return payload, (EXIT_OK if ok else EXIT_VERIFY_FAILED)


def cmd_formulas(args) -> tuple[dict, int]:
    if args.formula == "perfect":
        return {"k": perfect_case(CaseSpec(args.n, len(args.degrees), tuple(args.degrees)))}, EXIT_OK
    if args.formula == "generic-rank":
        return {"k": generic_rank_uniform(args.n, args.r, args.a)}, EXIT_OK
    try:
        k, kp, defective = defectivity_check(args.n, args.r, args.a1, args.s, args.a2)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return {"k": k, "kprime": kp, "defective": defective}, EXIT_OK


COMMANDS = {"rank": cmd_rank, "count": cmd_count, "verify": cmd_verify, "formulas": cmd_formulas}


def _config_snapshot(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("json", "verbose")}


def _human(args, payload: dict) -> str:
    if args.command == "count":
        s = payload["summary"]
        quiet = args.stable_loops
        status = f"stabilized after {quiet} quiet loops" if s["stabilized"] else f"NOT stabilized within {s['loops_run']} loops"
        lines = [f"{args.preset}: at least {s['count']} decompositions ({status})",
                 f"loops run {s['loops_run']}, path failures {s['path_failures']}/{s['paths_tracked']}"
                 + (f", spurious filtered {s['spurious_filtered']}" if s["spurious_filtered"] else "")]
        if "contains_start" in s:
            lines.append(f"published start vector among the classes: {s['contains_start']}")
        return "\n".join(lines)
    if args.command == "rank":
        return (f"shape {payload['shape'][0]}x{payload['shape'][1]}, rank {payload['rank']}, gap {payload['gap']:.3e}"
                + (f", max membership residual {max(payload['memberships']):.3e}" if payload["memberships"] else ""))
    if args.command == "verify":
        return (f"{payload['preset']}: {payload['classes']} classes, max residual {payload['max_residual']:.3e}, "
                f"failed {payload['failed']}, irregular {payload['irregular']}, duplicates {payload['duplicates']}: "
                + ("OK" if payload["ok"] else "FAILED"))
    return json.dumps(payload)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    t0 = time.perf_counter()
    try:
        payload, code = COMMANDS[args.command](args)
    except (InputError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = {
        "command": ["catconf", *argv],
        "preset": getattr(args, "preset", None),
        "seed": args.seed,
        "config": _config_snapshot(args),
        "result": payload,
        "wall_time": time.perf_counter() - t0,
        "version": __version__,
    }
    if args.out:
        write_json(args.out, payload)
    if args.command == "formulas" and not args.json:
        print(json.dumps(payload))
    elif args.json:
        print(json.dumps(report, indent=1))
    else:
        print(_human(args, payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
