"""Hit statistics and delta for the reference dynamic- and static-skew runs.

    python3 demos/delta_table.py [paths] [--no-bridge]
"""

import sys
import warnings

from barrierprod.montecarlo import RunConfig, reference_dynamic, reference_static, simulate

paths = int(next((a for a in sys.argv[1:] if a.isdigit()), 1_000_000))
bridge = "--no-bridge" not in sys.argv
warnings.simplefilter("ignore", RuntimeWarning)
for label, dyn in (("dynamic q", reference_dynamic()), ("static q", reference_static())):
    r = simulate(dyn, RunConfig(paths, 42, brownian_bridge=bridge))
    print(f"{label}  mean X_T = {r.mean_terminal:.5f} +- {r.stderr_terminal:.1e}")
    print("  level      hits     below     above   delta  stderr")
    for s in r:
        print(f"  {s.barrier_frac:5.2f} {s.hits:9d} {s.ended_below:9d} {s.ended_above:9d}  {s.delta_hat:6.3f}  {s.std_err:.3f}")
