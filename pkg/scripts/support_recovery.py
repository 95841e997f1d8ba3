"""Support recovery study on planted sparse signals.

For each seed, draw one instance, pick lambda by 10-fold CV and refit on the
full data. Reports how often the true support is contained in the selected
set and the distribution of selected-set sizes.

    python3 scripts/support_recovery.py --seeds 100 --rule min
"""

import argparse
import time

import numpy as np

from sparsescreen.dataset import standardize
from sparsescreen.model_selection import CvConfig, cross_validate
from sparsescreen.solver import PenaltySpec, fit
from sparsescreen.synthlab import SynthSpec, generate


def run(seeds, rule, n, p, s, magnitude, noise_sd, k):
    supersets, sizes, false_pos = 0, [], []
    for seed in range(seeds):
        inst = generate(SynthSpec(n=n, p=p, s=s, beta_magnitude=magnitude, noise_sd=noise_sd, seed=seed))
        curve = cross_validate(inst.X, inst.y, CvConfig(k=k, seed=seed, rule=rule))
        c = fit(standardize(inst.X), inst.y, PenaltySpec(curve.selected(rule)))
        selected = set(np.flatnonzero(c.beta_std).tolist())
        truth = set(inst.true_support.tolist())
        supersets += truth <= selected
        sizes.append(len(selected))
        false_pos.append(len(selected - truth))
    return supersets, np.array(sizes), np.array(false_pos)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--rule", choices=["min", "one_se"], default="min")
    ap.add_argument("--n", type=int, default=47)
    ap.add_argument("--p", type=int, default=448)
    ap.add_argument("--s", type=int, default=5)
    ap.add_argument("--beta-magnitude", type=float, default=3.0)
    ap.add_argument("--noise-sd", type=float, default=0.5)
    ap.add_argument("-k", type=int, default=10)
    a = ap.parse_args()

    t0 = time.perf_counter()
    supersets, sizes, fp = run(a.seeds, a.rule, a.n, a.p, a.s, a.beta_magnitude, a.noise_sd, a.k)
    print(f"rule={a.rule} seeds={a.seeds} ({time.perf_counter() - t0:.1f}s)")
    print(f"true support contained: {supersets}/{a.seeds}")
    print(f"selected-set size: mean {sizes.mean():.2f}  median {np.median(sizes):.0f}  "
          f"min {sizes.min()}  max {sizes.max()}")
    print(f"false positives: mean {fp.mean():.2f}")


if __name__ == "__main__":
    main()
