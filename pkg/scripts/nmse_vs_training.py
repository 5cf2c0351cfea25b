"""Median NMSE at 5 dB vs the BS beam count K_T and the RIS training length K_S.

    python scripts/nmse_vs_training.py --threads 4
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from ristrice import harness

SPECS = Path(__file__).resolve().parent / "specs"


def _table(spec, summary):
    points = sorted({k[2:] for k in summary})
    label = "K_T" if spec.axis == "k_t" else "K_S"
    head = [f"{p[0]}" if spec.axis == "k_t" else f"{p[1]}x{p[2]}" for p in points]
    print(f"{label:<14}" + "".join(f"{h:>11}" for h in head))
    for m in spec.methods:
        cells = [summary[(m.name, spec.snr_db[0], *p)]["median"] for p in points]
        print(f"{m.name:<14}" + "".join(f"{c:>11.4e}" for c in cells))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out-dir", default="results")
    args = p.parse_args(argv)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in ("training_k_t", "training_k_s"):
        spec = harness.load_spec(SPECS / f"{name}.json")
        if args.trials:
            spec = replace(spec, trials=args.trials)
        text, _, summary = harness.run_sweep(spec, threads=args.threads)
        (out_dir / f"{name}.csv").write_text(text)
        _table(spec, summary)
        print()
    print(f"wrote {out_dir}/training_k_t.csv and {out_dir}/training_k_s.csv", file=sys.stderr)


if __name__ == "__main__":
    main()
