"""Energy of random low-density subsets of F_q^n against their expected value.

Prints per-seed rows and a summary of how often E(P) <= 100 E[E(P)] and
eps_hat <= eps + 0.1.
"""

import argparse

from apfree import fq
from apfree.constructions import pipeline_lowenergy, sparse_regime_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--eps", type=float, default=0.5)
    ap.add_argument("--seeds", type=int, default=100)
    args = ap.parse_args()

    sp = fq.make_space(args.q, args.n)
    e_ok = x_ok = 0
    print("seed  |P|  energy  ratio_to_expected  eps_hat")
    for seed in range(args.seeds):
        rep = pipeline_lowenergy(sp, args.eps, seed)
        m = rep.metrics
        ratio = m["energy"] / m["energy_expected"]
        e_ok += ratio <= 100
        x_ok += m["eps_hat"] <= args.eps + 0.1
        print(f"{seed:4d} {len(rep.output):5d} {m['energy']:12d} {ratio:8.3f} {m['eps_hat']:.4f}")
    print(f"energy within 100x: {e_ok}/{args.seeds}; eps_hat <= eps+0.1: {x_ok}/{args.seeds}")
    print("sparse regime check:", sparse_regime_check(args.q, args.n))


if __name__ == "__main__":
    main()
