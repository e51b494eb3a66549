"""Empirical coverage of every concentration bound the engine uses.

Each deviation function promises that its one-sided bound fails with
probability at most eps. Violations at the production value eps = 1e-12
are unobservable, so the check runs at eps = 0.01 where a correct bound
must stay at or below a 1% violation frequency over 1e5 trials. A
deliberately broken variant (bound halved) is included to show the
harness actually bites.
"""
import numpy as np

from mdiqds.bounds import hoeffding_delta
from mdiqds.montecarlo import BOUND_IDS, validate_bound

EPS = 0.01
TRIALS = 100_000
SEED = 42


def main():
    print(f"# one-sided bound coverage at eps = {EPS}, {TRIALS} trials each")
    print(f"{'bound':20} | {'violations':>10} | {'frequency':>9} | {'wilson99':>8} | verdict")
    print("-" * 72)
    for bound in BOUND_IDS:
        stats = validate_bound(bound, eps=EPS, trials=TRIALS, seed=SEED)
        verdict = "ok" if stats.frequency <= EPS else "VIOLATED"
        print(f"{bound:20} | {stats.successes:10d} | {stats.frequency:9.5f} | "
              f"{stats.wilson99_upper:8.5f} | {verdict}")

    # sabotage check: a half-width Hoeffding band must leak far more than eps
    rng = np.random.default_rng(SEED)
    mean = 1e5
    draws = rng.poisson(mean, TRIALS)
    broken = (draws < mean - 0.5 * hoeffding_delta(mean, EPS)).mean()
    print(f"\nhalf-width hoeffding band violates {broken:.3f} of trials "
          f"(>{EPS}), so the harness detects broken bounds.")


if __name__ == "__main__":
    main()
