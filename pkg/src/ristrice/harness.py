"""Monte-Carlo sweeps over SNR or training budget, written out as CSV."""

import csv
import hashlib
import io
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .chanmodel import SystemConfig, realize, sample_paths
from .sensing import add_noise, nmse, synthesize
from .sparsekit import GridSpec
from .training import build_training
from .trice import path_errors, run_joint_cs, run_ls, run_trice

KINDS = ("ls", "trice-bes", "trice-cs", "joint-cs")
AXES = ("snr", "k_t", "k_s")
HEADER = ["method", "snr_db", "k_t", "k_s_v", "k_s_h", "trial", "seed",
          "nmse", "psi_rmse", "mu_rmse", "runtime_ms"]


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class MethodSpec:
    name: str
    kind: str
    grids: GridSpec = GridSpec()


@dataclass(frozen=True)
class ExperimentSpec:
    base: SystemConfig = SystemConfig()
    methods: tuple = (MethodSpec("trice-bes", "trice-bes"),)
    snr_db: tuple = (10.0,)
    axis: str = "snr"
    values: tuple = ()
    trials: int = 200
    master_seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise SpecError("trials must be >= 1")
        if self.axis not in AXES:
            raise SpecError(f"sweep axis must be one of {AXES}, got {self.axis!r}")
        if self.axis != "snr" and not self.values:
            raise SpecError(f"sweep over {self.axis} needs a list of values")
        names = [m.name for m in self.methods]
        if len(set(names)) != len(names):
            raise SpecError(f"duplicate method names in {names}")
        for m in self.methods:
            if m.kind not in KINDS:
                raise SpecError(f"unknown method kind {m.kind!r}; expected one of {KINDS}")
        self.configs()  # raises SpecError on an invalid swept value

    def configs(self):
        """``(axis value, SystemConfig)`` for every swept configuration."""
        if self.axis == "snr":
            return [(None, self.base)]
        out = []
        for v in self.values:
            try:
                if self.axis == "k_t":
                    cfg = replace(self.base, k_t=int(v))
                else:
                    k_sv, k_sh = (int(x) for x in v)
                    cfg = replace(self.base, k_sv=k_sv, k_sh=k_sh)
            except (TypeError, ValueError) as err:
                raise SpecError(f"bad {self.axis} value {v!r}: {err}") from err
            out.append((v, cfg))
        return out

    def points(self):
        return [(cfg, float(snr)) for _, cfg in self.configs() for snr in self.snr_db]


@dataclass
class ResultRow:
    method: str
    snr_db: float
    k_t: int
    k_s_v: int
    k_s_h: int
    trial: int
    seed: int
    nmse: float
    psi_rmse: float = math.nan
    mu_rmse: float = math.nan
    runtime_ms: float = math.nan
    error: str = field(default="", compare=False)


def stable_seed(*parts):
    """64-bit seed from a stable hash of ``parts``."""
    text = "|".join(repr(p) for p in parts).encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")


def _channel_seed(master_seed, trial):
    # shared by every sweep point: common random numbers across the sweep
    return stable_seed(master_seed, "channel", trial)


def _point_seed(master_seed, cfg, trial):
    # the SNR is left out: one unit-noise draw per (training shape, trial) is
    # rescaled across the SNR axis
    return stable_seed(master_seed, cfg.k_t, cfg.k_sv, cfg.k_sh, trial)


def run_trial(spec, cfg, snr_db, trial):
    """One channel and one noisy block, estimated by every method."""
    seed = _point_seed(spec.master_seed, cfg, trial)
    params = sample_paths(cfg, np.random.default_rng(_channel_seed(spec.master_seed, trial)))
    channels = realize(cfg, params)
    train = build_training(cfg)
    block = add_noise(synthesize(cfg, channels, train), snr_db, np.random.default_rng(seed))

    rows = []
    for m in spec.methods:
        row = ResultRow(m.name, snr_db, cfg.k_t, cfg.k_sv, cfg.k_sh, trial, seed, math.nan)
        start = time.perf_counter()
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                if m.kind == "ls":
                    report = run_ls(block, train, cfg)
                elif m.kind == "joint-cs":
                    report = run_joint_cs(block, train, cfg, m.grids)
                else:
                    report = run_trice(block, train, cfg, m.kind.split("-")[1], m.grids, factor=False)
            row.nmse = nmse(channels.h, report.h_hat)
            row.psi_rmse, row.mu_rmse = path_errors(report.paths, channels)
        except Exception as err:  # recorded per row, the sweep carries on
            row.error = f"{type(err).__name__}: {err}"
        row.runtime_ms = 1e3 * (time.perf_counter() - start)
        rows.append(row)
    return rows


def _run_job(job):
    spec, cfg, snr, trial = job
    return run_trial(spec, cfg, snr, trial)


def run_rows(spec, threads=1):
    """Detail rows ordered by sweep point, then trial, then method."""
    jobs = [(spec, cfg, snr, t) for cfg, snr in spec.points() for t in range(spec.trials)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        chunks = [_run_job(j) for j in jobs]
    return [row for chunk in chunks for row in chunk]


def summarize(rows):
    """Per-cell statistics keyed by ``(method, snr_db, k_t, k_s_v, k_s_h)``.

    Failed trials are excluded; ``failed`` counts them.
    """
    cells = {}
    for r in rows:
        if r.trial < 0:
            continue
        cells.setdefault((r.method, r.snr_db, r.k_t, r.k_s_v, r.k_s_h), []).append(r)
    out = {}
    for key, cell in cells.items():
        ok = [r for r in cell if not r.error]
        vals = np.array([r.nmse for r in ok])
        out[key] = dict(
            median=float(np.median(vals)) if ok else math.nan,
            mean=float(np.mean(vals)) if ok else math.nan,
            psi_rmse=float(np.median([r.psi_rmse for r in ok])) if ok else math.nan,
            mu_rmse=float(np.median([r.mu_rmse for r in ok])) if ok else math.nan,
            runtime_ms=float(np.mean([r.runtime_ms for r in cell])),
            trials=len(cell),
            failed=len(cell) - len(ok),
        )
    return out


def summary_rows(rows, master_seed):
    rows_out = []
    for (method, snr, k_t, k_sv, k_sh), s in summarize(rows).items():
        rows_out.append(ResultRow(method, snr, k_t, k_sv, k_sh, -1, master_seed, s["median"],
                                  s["psi_rmse"], s["mu_rmse"], s["runtime_ms"]))
    return rows_out


def _fmt(x):
    if isinstance(x, float):
        return "nan" if math.isnan(x) else f"{x:.6e}"
    return str(x)


def to_csv(rows, timing=False):
    """CSV text; ``runtime_ms`` is left blank unless ``timing`` is set."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for r in rows:
        values = [r.method, f"{r.snr_db:g}", r.k_t, r.k_s_v, r.k_s_h, r.trial, r.seed,
                  r.nmse, r.psi_rmse, r.mu_rmse, r.runtime_ms if timing else ""]
        writer.writerow([_fmt(v) for v in values])
    return buf.getvalue()


def run_sweep(spec, threads=1, timing=False):
    """Returns ``(csv_text, detail_rows, summary)``."""
    rows = run_rows(spec, threads)
    return to_csv(rows + summary_rows(rows, spec.master_seed), timing), rows, summarize(rows)


# ---------------------------------------------------------------- spec files

_TOP_KEYS = {"system", "methods", "snr_db", "sweep", "trials", "master_seed"}
_GRID_KEYS = {f.name for f in fields(GridSpec)}
_SYSTEM_KEYS = {f.name for f in fields(SystemConfig)}


def _reject_unknown(obj, allowed, where):
    if not isinstance(obj, dict):
        raise SpecError(f"{where} must be an object")
    extra = set(obj) - allowed
    if extra:
        raise SpecError(f"unknown key(s) in {where}: {sorted(extra)}")


def _method(entry):
    if isinstance(entry, str):
        return MethodSpec(entry, entry)
    _reject_unknown(entry, {"name", "kind", "grid"}, "method")
    grid = entry.get("grid", {})
    _reject_unknown(grid, _GRID_KEYS, "method grid")
    kind = entry.get("kind", entry.get("name"))
    return MethodSpec(entry.get("name", kind), kind, GridSpec(**grid))


def spec_from_dict(d):
    _reject_unknown(d, _TOP_KEYS, "spec")
    system = d.get("system", {})
    _reject_unknown(system, _SYSTEM_KEYS, "system")
    sweep = d.get("sweep", {"axis": "snr"})
    _reject_unknown(sweep, {"axis", "values"}, "sweep")
    try:
        return ExperimentSpec(
            base=SystemConfig(**system),
            methods=tuple(_method(m) for m in d.get("methods", ["trice-bes"])),
            snr_db=tuple(float(s) for s in d.get("snr_db", [10.0])),
            axis=sweep.get("axis", "snr"),
            values=tuple(tuple(v) if isinstance(v, list) else v for v in sweep.get("values", [])),
            trials=int(d.get("trials", 200)),
            master_seed=int(d.get("master_seed", 0)),
        )
    except SpecError:
        raise
    except (TypeError, ValueError) as err:
        raise SpecError(str(err)) from err


def load_spec(path):
    try:
        with open(path) as fh:
            return spec_from_dict(json.load(fh))
    except json.JSONDecodeError as err:
        raise SpecError(f"{path}: {err}") from err


def spec_to_dict(spec):
    def method(m):
        return {"name": m.name, "kind": m.kind, "grid": asdict(m.grids)}

    return {
        "system": asdict(spec.base),
        "methods": [method(m) for m in spec.methods],
        "snr_db": list(spec.snr_db),
        "sweep": {"axis": spec.axis, "values": [list(v) if isinstance(v, tuple) else v for v in spec.values]},
        "trials": spec.trials,
        "master_seed": spec.master_seed,
    }
