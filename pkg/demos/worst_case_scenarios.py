#!/usr/bin/env python3
"""Run every registered scenario and print its report.

Each scenario replays a closed-form construction (or a randomized bound check)
and compares the measured welfare, cost, or ratio against the claimed bound.
Equivalent to looping `contcount reproduce <name>` over `contcount
list-scenarios`. Exits nonzero if any scenario fails.
"""

import sys

from contcount.harness import list_scenarios, reproduce


def main():
    failures = 0
    for name, claim in list_scenarios():
        report = reproduce(name, seed=0)
        status = "PASS" if report.passed else "FAIL"
        failures += not report.passed
        print(f"[{status}] {name}")
        print(f"       claim: {claim}")
        for line in report.lines:
            print(f"       {line}")
    print(f"\n{len(list_scenarios()) - failures}/{len(list_scenarios())} scenarios passed")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
