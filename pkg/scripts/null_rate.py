"""How often a pure-noise response yields an empty model.

Mirrors the degenerate-handling check: responses with no planted signal,
screened with the one-standard-error rule.

    python3 scripts/null_rate.py --seeds 100
"""

import argparse

from sparsescreen.model_selection import CvConfig
from sparsescreen.screening import screen_response
from sparsescreen.synthlab import SynthSpec, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--first-seed", type=int, default=1)
    ap.add_argument("--rule", choices=["min", "one_se"], default="one_se")
    a = ap.parse_args()

    empty = 0
    for seed in range(a.first_seed, a.first_seed + a.seeds):
        inst = generate(SynthSpec(n=47, p=448, s=0, noise_sd=1.0, seed=seed))
        r = screen_response(inst.X, inst.y, None, "noise", CvConfig(rule=a.rule))
        empty += r.n_nonzero == 0
    print(f"rule={a.rule}: empty model in {empty}/{a.seeds} pure-noise responses ({empty / a.seeds:.2f})")


if __name__ == "__main__":
    main()
