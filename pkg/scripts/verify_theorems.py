"""Verify every counterexample scenario against a set of rules and print a pass/fail table."""
import argparse
import json

from msvote.counterexamples import SCENARIOS, BranchPreconditionError, build, verify

DEFAULT_RULES = {
    "T2_L1_A": ["l1:borda", "l1:plu", "l1:app"],
    "T2_L1_B": ["l1:borda", "l1:app"],
    "T2_LMAX": ["lmax:borda"],
    "T3": ["l1:borda", "lmax:borda", "l1:plu", "l1:app"],
    "T4_1": ["l1:borda", "lmax:borda", "l1:plu"],
    "T4_2": ["l1:borda", "lmax:borda"],
    "T4_3": ["l1:borda", "lmax:borda"],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--json", action="store_true", help="print full reports")
    args = ap.parse_args()

    failed = 0
    for sid in SCENARIOS:
        for rule in DEFAULT_RULES.get(sid, ["thiele:pav", "thiele:acc"]):
            try:
                report = verify(build(sid, rule))
            except BranchPreconditionError as exc:
                print(f"{sid:<9} {rule:<11} n/a   {exc}")
                continue
            failed += not report.passed
            print(f"{sid:<9} {rule:<11} {'pass' if report.passed else 'FAIL'}")
            if args.json:
                print(json.dumps(report.to_json(), indent=2))
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()
