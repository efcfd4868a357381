"""Error of each feedback policy on the linear multipass scheme.

The comparison column is the van Trees (Bayesian Cramer-Rao) limit for the
uniform prior, 1/sqrt(sum of squared gaps), which any estimator must respect
asymptotically.
"""
import argparse
import math

from phasebounds.bounds import scheme_bound
from phasebounds.estimator import POLICIES, simulate
from phasebounds.schemes import preset


def main():
    p = argparse.ArgumentParser(description="feedback policy comparison")
    p.add_argument("--K", type=int, default=8)
    p.add_argument("--M", type=int, default=8)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    spec = preset("linear_multipass", K=args.K, M=args.M)
    fisher = sum(c.gap**2 * c.copies for c in spec.components)
    print(f"linear_multipass K={args.K} M={args.M}: bound {scheme_bound(spec).value:.3e}, van Trees {1 / math.sqrt(fisher):.3e}")
    for policy in POLICIES:
        rep = simulate(spec, trials=args.trials, seed=args.seed, policy=policy, mi_bins=None, keep_records=False)
        print(f"  {policy:12s} eps = {rep.epsilon:.4e} +- {rep.epsilon_se:.1e}")


if __name__ == "__main__":
    main()
