"""Command line entry point: ``ristrice {sweep,single,validate}``."""

import argparse
import json
import sys
import warnings
from dataclasses import asdict, replace

import numpy as np

from . import harness
from .training import METHODS, validate_config


def _floats(text):
    return tuple(float(x) for x in text.split(","))


def _load(args):
    spec = harness.load_spec(args.spec) if args.spec else harness.ExperimentSpec()
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["master_seed"] = args.seed
    if getattr(args, "snr", None):
        changes["snr_db"] = args.snr
    if getattr(args, "method", None):
        known = {m.name: m for m in spec.methods}
        changes["methods"] = tuple(known.get(n, harness.MethodSpec(n, n)) for n in args.method.split(","))
    if getattr(args, "trials", None):
        changes["trials"] = args.trials
    return replace(spec, **changes) if changes else spec


def cmd_sweep(args):
    spec = _load(args)
    text, rows, summary = harness.run_sweep(spec, threads=args.threads, timing=args.timing)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    log = sys.stderr
    print(f"{'method':<22}{'snr':>6}{'k_t':>5}{'k_s':>7}{'median':>13}{'mean':>13}{'failed':>8}", file=log)
    all_failed = False
    for (method, snr, k_t, k_sv, k_sh), s in summary.items():
        print(f"{method:<22}{snr:>6g}{k_t:>5}{f'{k_sv}x{k_sh}':>7}{s['median']:>13.4e}"
              f"{s['mean']:>13.4e}{s['failed']:>8}", file=log)
        all_failed |= s["failed"] == s["trials"]
    return 2 if all_failed else 0


def cmd_single(args):
    spec = _load(args)
    cfg, snr = spec.points()[0]
    rows = harness.run_trial(spec, cfg, snr, args.trial)
    from .chanmodel import realize, sample_paths

    params = sample_paths(cfg, np.random.default_rng(harness._channel_seed(spec.master_seed, args.trial)))
    ch = realize(cfg, params)
    dump = {
        "config": asdict(cfg),
        "snr_db": snr,
        "trial": args.trial,
        "seed": rows[0].seed,
        "truth": {
            "psi_t": params.psi_t.tolist(), "psi_r": params.psi_r.tolist(),
            "mu_v_eff": ch.mu_v_eff.tolist(), "mu_h_eff": ch.mu_h_eff.tolist(),
            "alpha_eff": [[a.real, a.imag] for a in ch.alpha_eff],
        },
        "results": [{"method": r.method, "nmse": r.nmse, "psi_rmse": r.psi_rmse,
                     "mu_rmse": r.mu_rmse, "error": r.error} for r in rows],
    }
    print(json.dumps(dump, indent=2))
    return 2 if all(r.error for r in rows) else 0


def cmd_validate(args):
    spec = _load(args)
    for _, cfg in spec.configs():
        print(f"config: {asdict(cfg)}")
        grids = {m.kind: m.grids for m in spec.methods}
        for method in METHODS:
            report = validate_config(cfg, method, grids.get(method))
            print(f"  [{method}] {'ok' if report.ok else 'NOT OK'}")
            for line in report.lines():
                print(f"    {line}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="ristrice", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--spec", help="experiment spec (JSON)")
        sp.add_argument("--seed", type=int, help="override master_seed")
        sp.add_argument("--method", help="comma-separated method names")
        sp.add_argument("--snr", type=_floats, help="comma-separated SNR values in dB")
        sp.add_argument("--trials", type=int, help="override the trial count")

    sp = sub.add_parser("sweep", help="run an experiment spec and write CSV")
    common(sp)
    sp.add_argument("--out", help="CSV path (stdout when omitted)")
    sp.add_argument("--threads", type=int, default=1, help="worker processes")
    sp.add_argument("--timing", action="store_true", help="fill runtime_ms (breaks byte-identical reruns)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("single", help="one trial with a parameter dump")
    common(sp)
    sp.add_argument("--trial", type=int, default=0)
    sp.set_defaults(func=cmd_single)

    sp = sub.add_parser("validate", help="training-overhead report")
    common(sp)
    sp.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return args.func(args)
    except (harness.SpecError, OSError) as err:
        print(f"spec error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
