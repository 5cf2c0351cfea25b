"""Median NMSE vs SNR for LS, TRICE-BES, TRICE-CS (two grid densities) and Joint-CS.

    python scripts/nmse_vs_snr.py --threads 4 --out results/nmse_vs_snr.csv
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from ristrice import harness

SPEC = Path(__file__).resolve().parent / "specs" / "nmse_vs_snr.json"


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--spec", default=str(SPEC))
    p.add_argument("--trials", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default="results/nmse_vs_snr.csv")
    args = p.parse_args(argv)

    spec = harness.load_spec(args.spec)
    if args.trials:
        spec = replace(spec, trials=args.trials)
    text, _, summary = harness.run_sweep(spec, threads=args.threads)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)

    snrs = list(spec.snr_db)
    print(f"{'method':<14}" + "".join(f"{s:>11g}" for s in snrs))
    for m in spec.methods:
        cells = [summary[(m.name, s, spec.base.k_t, spec.base.k_sv, spec.base.k_sh)]["median"] for s in snrs]
        print(f"{m.name:<14}" + "".join(f"{c:>11.4e}" for c in cells))
    print(f"wrote {out}", file=sys.stderr)


if __name__ == "__main__":
    main()
