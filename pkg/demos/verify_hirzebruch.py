"""Run the randomized identity checks on a few polytopes and summarize them.

For each check the largest error over all charts (or pairs, or triples) is
printed next to its tolerance.

    python demos/verify_hirzebruch.py [samples]
"""
import sys

from delzant import hirzebruch, simplex
from delzant.verify import SampleConfig, run_suite

samples = int(sys.argv[1]) if len(sys.argv) > 1 else 30
cases = {
    "CP^2": simplex(2, [1, 0, 0]),
    "H_1": hirzebruch(1, [1, 1, 1, 1]),
    "H_2": hirzebruch(2, [1, 1, 2, 1]),
}

for name, P in cases.items():
    result = run_suite(P, SampleConfig(samples, seed=0))
    print(f"{name}: {len(result.reports)} reports, {'all pass' if result.passed else 'FAILURES'}")
    for check in sorted({r.check for r in result.reports}):
        group = result.by_check(check)
        print(f"  {check:20s} worst {result.worst(check):9.2e}  tol {group[0].tolerance:.0e}"
              f"  {sum(r.passed for r in group)}/{len(group)}")
