"""Counterexample hunt over several sizes; prints one agreement row per n and exits nonzero on any counterexample.

    python scripts/hunt.py --sizes 4,5,6,7,8 --count 300 --seed 1
"""

import argparse
import json
import subprocess
import sys


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="4,5,6,7,8")
    ap.add_argument("--count", type=int, default=300)
    ap.add_argument("--prob", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--backend", choices=["exact", "bigfloat"], default="exact")
    args = ap.parse_args()

    worst = 0
    print("n,pairs,iso_iso,iso_not,not_iso,not_not,demotions,counterexamples")
    for n in (int(s) for s in args.sizes.split(",")):
        proc = subprocess.run(
            [sys.executable, "-m", "isoperturb.cli", "hunt", "--family", "gnp", "--n", str(n),
             "--prob", str(args.prob), "--count", str(args.count), "--seed", str(args.seed + n),
             "--backend", args.backend, "--format", "json-lines", "--out", f"counterexamples/n{n}"],
            capture_output=True, text=True,
        )
        r = json.loads(proc.stdout)
        print(f"{n},{r['pairs']},{r['engine_iso_oracle_iso']},{r['engine_iso_oracle_not']},"
              f"{r['engine_not_oracle_iso']},{r['engine_not_oracle_not']},{r['internal_demotions']},"
              f"{r['counterexamples']}")
        worst = max(worst, proc.returncode)
    sys.exit(worst)


if __name__ == "__main__":
    main()
