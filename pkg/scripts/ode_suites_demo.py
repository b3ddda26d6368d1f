#!/usr/bin/env python3
"""Run both randomized ODE comparison suites and summarize the margins.

Suite A.1 checks the Riccati inequality v'/v >= a'/a for the Dirichlet
start against the Robin start and the asymptotic slope floor (at least
half the frequency k).  Suite A.2 checks zero-freeness and the relative
growth margin after the probe point delta.  Margins are worst cases over
the suite; a negative margin would mean a counterexample.

Example:

    python3 scripts/ode_suites_demo.py --seed 7 --count-a1 20 --count-a2 10
"""

import argparse

from tubespec.ode_compare import a1_suite_report, a2_suite_report


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--count-a1", type=int, default=20)
    ap.add_argument("--count-a2", type=int, default=10)
    ap.add_argument("--show", type=int, default=5,
                    help="print this many individual cases per suite")
    args = ap.parse_args()

    a1 = a1_suite_report(seed=args.seed, count=args.count_a1)
    print(f"suite A.1: {a1['count']} cases, all_passed={a1['all_passed']}")
    print(f"  worst riccati margin : {a1['worst_riccati_margin']:+.3e}")
    print(f"  worst slope gap      : {a1['worst_slope_gap']:+.3e}")
    for c in a1["cases"][:args.show]:
        print(f"    k={c['k']:.3f} alpha={c['alpha']:+.3f} "
              f"slope={c['slope']:.6f} (floor {c['slope_threshold']:.6f}) "
              f"riccati={c['riccati_margin']:+.2e}")

    a2 = a2_suite_report(seed=args.seed, count=args.count_a2)
    print(f"\nsuite A.2: {a2['count']} cases, all_passed={a2['all_passed']}")
    print(f"  worst growth margin  : {a2['worst_growth_margin']:+.3e}")
    for c in a2["cases"][:args.show]:
        print(f"    k={c['k']:.3f} alpha={c['alpha']:+.3f} "
              f"delta={c['delta']:.3f} a(m1)={c['a_m1']:.6e} "
              f"margin={c['min_relative_margin']:+.2e} "
              f"no_zero={c['no_zero']}")

    ok = a1["all_passed"] and a2["all_passed"]
    print(f"\noverall: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
