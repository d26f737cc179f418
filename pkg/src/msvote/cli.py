"""Command-line entry point.

Exit codes: 0 success / axiom holds / theorem passes, 1 axiom violated or
theorem fails, 2 usage or input error, 3 enumeration cap exceeded.
JSON goes to stdout, one-line summaries to stderr.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import axioms, counterexamples, simulation
from .core import CapExceeded, StageVector, VotingError, election_to_dict, load_election, serialize_election
from .generate import random_approval, random_ranked
from .rules import RuleRunner

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, default=str))


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _vector(text: str, relaxed: bool = False) -> StageVector:
    return StageVector.parse(text, relaxed)


def _k1_values(text: str) -> tuple:
    if ":" in text:
        lo, hi = (int(x) for x in text.split(":"))
        return tuple(range(lo, hi + 1))
    return tuple(int(x) for x in text.split(",") if x.strip())


def _param(text: str):
    key, sep, val = text.partition("=")
    if not sep:
        raise VotingError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(val)
    except json.JSONDecodeError:
        return key, val


# subcommands

def cmd_run(args) -> int:
    e = load_election(args.election)
    runner = RuleRunner.of(args.rule)
    v = _vector(args.vector, args.relaxed)
    if args.deterministic:
        final, traj = runner.deterministic(e, v)
        _emit([e.labels(final)])
        _note(f"trajectory: {' -> '.join(str(len(s)) for s in traj.sets)}")
        return EXIT_OK
    result = runner.run(e, v)
    _emit([e.labels(S) for S in result.sorted_finals()])
    if result.truncated:
        _note("warning: trajectory frontier exceeded its cap; finals are partial")
    _note(f"{len(result.finals)} final committee(s)")
    return EXIT_OK


def cmd_axiom_check(args) -> int:
    e = load_election(args.election)
    runner = RuleRunner.of(args.rule)
    v = _vector(args.vector)
    a = args.axiom
    if a == axioms.SOLID_COALITION:
        verdict = axioms.check_solid_coalition(runner, e, v, args.ceiling_threshold)
    elif a == axioms.COMMITTEE_MONOTONICITY:
        if not args.vector2:
            raise VotingError("committee-monotonicity needs --vector2")
        verdict = axioms.check_committee_monotonicity(runner, e, v, _vector(args.vector2))
    elif a == axioms.CANDIDATE_MONOTONICITY:
        verdict = axioms.check_candidate_monotonicity(runner, e, v)
    elif a == axioms.CONSISTENCY:
        if not args.election2:
            raise VotingError("consistency needs --election2")
        verdict = axioms.check_consistency(runner, e, load_election(args.election2), v)
    elif a == axioms.JUSTIFIED_REPRESENTATION:
        verdict = axioms.check_outputs_jr(runner, e, v, args.ceiling_threshold)
    else:
        verdict = axioms.check_outputs_pareto(runner, e, v)
    _emit(axioms.verdict_to_json(verdict, e))
    _note(f"{a}: {'holds' if verdict.holds else 'VIOLATED'}")
    return EXIT_OK if verdict.holds else EXIT_FAIL


def cmd_axiom_search(args) -> int:
    gen = axioms.SearchConfig(min_m=args.min_m, max_m=args.max_m, min_n=args.min_n, max_n=args.max_n,
                              stages=args.stages, approval_p=args.approval_p)
    found = axioms.search_violation(args.axiom, args.rule, gen, args.seed, args.budget)
    if found is None:
        _emit({"found": False, "budget": args.budget})
        _note(f"{args.axiom}: no violation in {args.budget} trials")
        return EXIT_OK
    e = found["election"]
    elections = e if isinstance(e, tuple) else (e,)
    _emit({"found": True, "trial": found["trial"], "seed": found["seed"],
           "elections": [election_to_dict(x) for x in elections],
           "vector": found["vector"],
           "verdict": axioms.verdict_to_json(found["verdict"], elections[0])})
    _note(f"{args.axiom}: violation at trial {found['trial']}")
    return EXIT_FAIL


def cmd_theorem_verify(args) -> int:
    params = dict(_param(p) for p in args.param)
    report = counterexamples.verify(counterexamples.build(args.id, args.rule, **params))
    _emit(report.to_json())
    _note(f"{args.id} [{args.rule}]: {'pass' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_theorem_list(args) -> int:
    _emit([{"id": k, "description": v} for k, v in counterexamples.SCENARIOS.items()])
    return EXIT_OK


def cmd_simulate(args) -> int:
    overrides = {}
    for key in ("n_gauss", "n_uniform", "n_voters"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    cfg = simulation.SimConfig(rule=args.rule, seed=args.seed, k2=args.k2,
                               k1_values=_k1_values(args.k1), trials=args.trials, **overrides)
    result = simulation.run_sweep(cfg, progress=(lambda k1: _note(f"k1={k1} done")) if args.verbose else None)
    labels = simulation.default_labels(cfg.m)
    simulation.emit_csv(result.records, args.out, labels)
    if args.svg:
        simulation.emit_svg(result.aggregates, args.metric, args.svg)
    _emit(simulation.sweep_report(result.aggregates))
    _note(f"wrote {len(result.records)} records to {args.out}")
    return EXIT_OK


def cmd_gen(args) -> int:
    rng = random.Random(args.seed)
    if args.kind == "ranked-uniform":
        e = random_ranked(rng, args.m, args.n)
    elif args.kind == "approval-uniform":
        e = random_approval(rng, args.m, args.n, args.p)
    else:
        cfg = simulation.SimConfig(n_gauss=args.n_gauss, n_uniform=args.m - args.n_gauss,
                                   n_voters=args.n, k2=1, k1_values=(1,), trials=1)
        cands, voters = simulation.sample_instance(cfg, args.seed)
        e = simulation.profile_from_points(cands, voters)
    text = serialize_election(e)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="msvote", description="Exact multi-stage multi-winner voting.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="final committees of a (multi-stage) rule")
    run.add_argument("--rule", required=True, help="e.g. l1:plu, lmax:borda, thiele:pav, or 'a;b' per stage")
    run.add_argument("--election", required=True)
    run.add_argument("--vector", required=True, help="stage sizes, e.g. 4,2")
    run.add_argument("--relaxed", action="store_true", help="allow k1 = m and repeated sizes")
    run.add_argument("--deterministic", action="store_true", help="lexicographic tie-break at every stage")
    run.set_defaults(func=cmd_run)

    ax = sub.add_parser("axiom", help="check or search for axiom violations")
    axsub = ax.add_subparsers(dest="axiom_command", required=True)
    chk = axsub.add_parser("check")
    chk.add_argument("--axiom", required=True, choices=axioms.AXIOMS)
    chk.add_argument("--rule", required=True)
    chk.add_argument("--election", required=True)
    chk.add_argument("--election2", help="second voter group (consistency)")
    chk.add_argument("--vector", required=True)
    chk.add_argument("--vector2", help="second vector (committee-monotonicity)")
    chk.add_argument("--ceiling-threshold", action="store_true", help="use ceil(n/k) as the threshold")
    chk.set_defaults(func=cmd_axiom_check)
    srch = axsub.add_parser("search")
    srch.add_argument("--axiom", required=True, choices=axioms.AXIOMS)
    srch.add_argument("--rule", required=True)
    srch.add_argument("--seed", type=int, default=0)
    srch.add_argument("--budget", type=int, default=1000)
    srch.add_argument("--min-m", type=int, default=3)
    srch.add_argument("--max-m", type=int, default=4)
    srch.add_argument("--min-n", type=int, default=1)
    srch.add_argument("--max-n", type=int, default=6)
    srch.add_argument("--stages", type=int)
    srch.add_argument("--approval-p", type=float, default=0.5)
    srch.set_defaults(func=cmd_axiom_search)

    th = sub.add_parser("theorem", help="rebuild and verify counter-example scenarios")
    thsub = th.add_subparsers(dest="theorem_command", required=True)
    ver = thsub.add_parser("verify")
    ver.add_argument("--id", required=True, choices=tuple(counterexamples.SCENARIOS))
    ver.add_argument("--rule", required=True)
    ver.add_argument("--param", action="append", default=[], help="builder option key=value, e.g. i0=2")
    ver.set_defaults(func=cmd_theorem_verify)
    lst = thsub.add_parser("list")
    lst.set_defaults(func=cmd_theorem_list)

    sim = sub.add_parser("simulate", help="Euclidean two-stage sweep over k1")
    sim.add_argument("--rule", default="l1:plu")
    sim.add_argument("--seed", type=int, default=42)
    sim.add_argument("--k2", type=int, default=4)
    sim.add_argument("--k1", default="4:30", help="inclusive range a:b or list a,b,c")
    sim.add_argument("--trials", type=int, default=50)
    sim.add_argument("--n-gauss", type=int)
    sim.add_argument("--n-uniform", type=int)
    sim.add_argument("--n-voters", type=int)
    sim.add_argument("--out", required=True)
    sim.add_argument("--svg")
    sim.add_argument("--metric", choices=("score", "gini"), default="gini")
    sim.add_argument("--verbose", action="store_true")
    sim.set_defaults(func=cmd_simulate)

    gen = sub.add_parser("gen", help="write a random election file")
    gen.add_argument("--kind", required=True, choices=("ranked-uniform", "approval-uniform", "euclidean"))
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float, default=0.5)
    gen.add_argument("--n-gauss", type=int, default=0, help="euclidean: how many candidates are Gaussian")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except CapExceeded as exc:
        _note(f"error: {exc}")
        return EXIT_CAP
    except (VotingError, OSError) as exc:
        _note(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
