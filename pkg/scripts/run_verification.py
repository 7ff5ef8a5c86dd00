"""Run the verification suites and print one line per check.

    python scripts/run_verification.py --seed 1 --suite all
"""

import argparse
import sys
import time

from spontaneous_qrng.experiments import SUITES, run_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--suite", default="all", choices=[*SUITES, "all"])
    ap.add_argument("--budget", type=int, default=None)
    args = ap.parse_args()

    t0 = time.perf_counter()
    checks = run_suite(args.suite, args.seed, args.budget)
    for c in checks:
        flag = "PASS" if c.passed else "FAIL"
        print(f"{flag}  {c.suite:8s} {c.name:28s} stat={c.statistic:<12.4g} thr={c.threshold:<10.3g} {c.detail}")
    print(f"{sum(c.passed for c in checks)}/{len(checks)} passed in {time.perf_counter() - t0:.1f} s")
    return 0 if all(c.passed for c in checks) else 1


if __name__ == "__main__":
    sys.exit(main())
