#!/usr/bin/env python3
"""Run the full verification stack on the bundled corpus.

For every bundled solution: the residual system, the admissible-tuple
equations, and (for alphabets up to the configured bound) the Cuntz word
oracle.  Prints one line per solution per layer.
"""

import argparse
import time

from neargroup.corpus import corpus_all
from neargroup.cuntz import fs_indicators, oracle_check
from neargroup.solutions import MNSolution, residual_general, residual_mn
from neargroup.tuples import to_tuple, verify_admissible


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-alphabet", type=int, default=10,
                    help="run the word oracle up to this alphabet size")
    ap.add_argument("--tolerance", type=float, default=1e-10)
    ap.add_argument("--oracle-tolerance", type=float, default=1e-9)
    args = ap.parse_args()

    failures = 0
    for name, s in corpus_all().items():
        rep = (residual_mn(s, args.tolerance) if isinstance(s, MNSolution)
               else residual_general(s, args.tolerance))
        print(f"{name:12s} residuals  max={rep.max_residual:.2e} "
              f"{'pass' if rep.passed else 'FAIL'}")
        failures += not rep.passed
        t = to_tuple(s, check=False)
        rep = verify_admissible(t, args.oracle_tolerance)
        print(f"{name:12s} admissible max={rep.max_residual:.2e} "
              f"{'pass' if rep.passed else 'FAIL'}")
        failures += not rep.passed
        if t.alphabet <= args.max_alphabet:
            t0 = time.time()
            rep = oracle_check(t, args.oracle_tolerance)
            print(f"{name:12s} oracle     max={rep.max_residual:.2e} "
                  f"{'pass' if rep.passed else 'FAIL'} ({time.time()-t0:.1f}s)")
            failures += not rep.passed
        (nu21, nu31, nu41), rep = fs_indicators(t, args.oracle_tolerance)
        print(f"{name:12s} indicators nu21={nu21.real:+.0f} nu31={nu31:.4f} "
              f"checks {'pass' if rep.passed else 'FAIL'}")
        failures += not rep.passed
    print("corpus:", "all layers pass" if failures == 0 else f"{failures} FAILURES")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
