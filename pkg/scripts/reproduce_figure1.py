"""Count-versus-local-factor regression on the transcribed published counts.

Writes figure1.tsv and regression_summary.json to --out and prints the
fitted line, the t test and the per-factor mean counts.

    python3 scripts/reproduce_figure1.py --out runs/figure1
"""

import argparse
import json
from pathlib import Path

from sparsescreen.cli import main as cli_main

TABLE1 = Path(__file__).resolve().parents[1] / "fixtures" / "table1.csv"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--input", default=str(TABLE1))
    ap.add_argument("--out", default="runs/figure1")
    a = ap.parse_args()

    rc = cli_main(["analyze", a.input, "--out", a.out, "--overwrite"])
    if rc:
        raise SystemExit(rc)
    s = json.loads((Path(a.out) / "regression_summary.json").read_text())
    print(f"n={s['n']}  count = {s['intercept']:.3f} + {s['slope']:.3f} * factor")
    print(f"r^2={s['r_squared']:.4f}  t={s['t_stat']:.3f}  p={s['p_value']:.3e}")
    for f, m in s["per_factor_means"].items():
        print(f"  factor {f}: mean count {m:.2f}")


if __name__ == "__main__":
    main()
