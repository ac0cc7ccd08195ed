#!/usr/bin/env python3
"""Monte Carlo decoupling errors versus the one-shot bounds.

Draws random rho_AE instances (|A| = 4 split 2x2), estimates the
Haar-averaged decoupling error by sampling, and prints it next to the
optimized upper bound and the positive-part lower bound.
"""

import argparse

from qdecoupling.decoupling import (
    decoupling_error_lower_bound,
    decoupling_error_upper_bound_optimized,
    mc_decoupling_error,
    standard_instance,
)
from qdecoupling.states import make_rng, random_state


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = make_rng(args.seed)
    print(f"{'inst':>4} {'|E|':>3} {'rank':>4} {'mean':>10} {'stderr':>9} "
          f"{'lower':>10} {'upper':>10} {'s*':>7}")
    for k in range(args.instances):
        de = int(rng.integers(2, 4))
        rank = int(rng.integers(1, 5))
        rho = random_state((("A", 4), ("E", de)), rank, rng)
        inst = standard_instance(rho, 2, 2)
        est = mc_decoupling_error(inst, args.samples, seed=args.seed + k)
        upper, s_star = decoupling_error_upper_bound_optimized(inst)
        lower = decoupling_error_lower_bound(rho, 2, 2)
        ok = lower <= est.mean + 3 * est.stderr and est.mean - 3 * est.stderr <= upper
        print(f"{k:>4} {de:>3} {rank:>4} {est.mean:>10.5f} {est.stderr:>9.5f} "
              f"{lower:>10.5f} {upper:>10.5f} {s_star:>7.4f} {'ok' if ok else 'VIOLATION'}")


if __name__ == "__main__":
    main()
