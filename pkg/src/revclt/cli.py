"""Command line entry point: ``revclt <experiment> [flags]``.

Every experiment writes into ``--out``: a CSV of bulk values, a
whitespace-separated ``.dat`` twin for gnuplot and a JSON summary.  All
three carry the version, seed and a hash of the configuration, and
contain nothing else that varies between runs, so reruns are
byte-identical.  The exit status is 0 iff every acceptance criterion
evaluated by the run passed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__, acceptance
from .chain_model import ChainError, ChainSpec, build_chain
from .diagnostics import conditional_binning, ks_one_sample, nonuniform_integrability_report, slow_variation_report
from .limits import HoldingLaw, StableRef, c_alpha, c_alpha_reflection, gamma_m, normal_cdf
from .martingale import build_kernel, check_lindeberg, check_stbl, max_remainder_experiment
from .operator_algebra import TABLE_MAX, VarianceTable, kappa, remark3_distance
from .simulate import MODES, SimulationBatch, simulate_many

log = logging.getLogger("revclt")

EXPERIMENTS = ("analyze", "simulate", "martingale", "stable", "limits", "report")
CHAINS = ("example1", "stable", "constant")


class InputError(RuntimeError):
    """A config or input file is missing or malformed."""


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    chain: str = "example1"
    alpha: float | None = None
    c: float | None = None
    n: tuple[int, ...] = (10**5,)
    nmax: int = 10**6
    reps: int = 4000
    seed: int = 42
    mode: str | None = None
    eps: tuple[float, ...] = (0.1, 0.5, 1.0)
    samples: str | None = None
    only: tuple[str, ...] = ()
    robustness_seeds: tuple[int, ...] = ()
    out: str = "revclt_out"
    threads: int | None = field(default=None, compare=False)

    def __post_init__(self):
        # resolve the chain parameter here so the hashed config is what runs
        if self.chain == "stable" and self.alpha is None:
            object.__setattr__(self, "alpha", 1.5)
        if self.chain == "constant" and self.c is None:
            object.__setattr__(self, "c", 0.5)

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise InputError(f"experiment must be one of {EXPERIMENTS}")
        if self.chain not in CHAINS:
            raise InputError(f"chain must be one of {CHAINS}")
        if self.mode is not None and self.mode not in MODES:
            raise InputError(f"mode must be one of {MODES}")
        if any(k < 1 for k in self.n) or self.nmax < 1 or self.reps < 1:
            raise InputError("n, nmax and reps must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must fit in 64 unsigned bits")

    def hashed(self) -> dict[str, Any]:
        # output location and thread count never change results
        d = asdict(self)
        d.pop("out")
        d.pop("threads")
        return d

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.hashed(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def chain_spec(self) -> ChainSpec:
        try:
            if self.chain == "stable":
                return build_chain("stable", alpha=self.alpha)
            if self.chain == "constant":
                return build_chain("constant", c=self.c)
            return build_chain("example1")
        except ChainError as exc:
            raise InputError(str(exc)) from exc

    def path(self, name: str) -> Path:
        return Path(self.out) / name


_LIST_FIELDS = {"n": int, "eps": float, "only": str, "robustness_seeds": int}


def config_from_json(doc: dict) -> ExperimentConfig:
    known = set(ExperimentConfig.__dataclass_fields__)
    extra = set(doc) - known
    if extra:
        raise InputError(f"unknown config keys: {sorted(extra)}")
    if "experiment" not in doc:
        raise InputError("config needs 'experiment'")
    kw = dict(doc)
    for k, typ in _LIST_FIELDS.items():
        if k in kw:
            v = kw[k]
            kw[k] = tuple(_number(typ, x) for x in (v if isinstance(v, list) else [v]))
    for k in ("nmax", "reps", "seed"):
        if k in kw:
            kw[k] = _number(int, kw[k])
    cfg = ExperimentConfig(**kw)
    cfg.validate()
    return cfg


def _number(typ, x):
    if typ is str:
        return str(x)
    v = float(x) if isinstance(x, str) else x
    if typ is int:
        if float(v) != int(float(v)):
            raise InputError(f"expected an integer, got {x!r}")
        return int(float(v))
    return float(v)


# ---------------------------------------------------------------------------
# output


def _g17(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def _provenance(cfg: ExperimentConfig) -> list[str]:
    return [
        f"revclt {__version__}",
        f"experiment={cfg.experiment} seed={cfg.seed} config_hash={cfg.config_hash}",
        "config=" + json.dumps(cfg.hashed(), sort_keys=True, separators=(",", ":")),
    ]


def write_table(cfg: ExperimentConfig, name: str, columns: Sequence[str], rows) -> Path:
    """Writes ``name.csv`` and ``name.dat``; returns the CSV path."""
    body = io.StringIO()
    w = csv.writer(body, lineterminator="\n")
    w.writerow(columns)
    text_rows = [[_g17(v) for v in r] for r in rows]
    w.writerows(text_rows)
    data = body.getvalue()
    digest = hashlib.sha256(data.encode()).hexdigest()
    head = [*_provenance(cfg), f"rows={len(text_rows)} data_sha256={digest}"]
    out = cfg.path(name + ".csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("".join(f"# {h}\n" for h in head) + data)
    dat = "".join(f"# {h}\n" for h in head) + "# " + " ".join(columns) + "\n"
    dat += "".join(" ".join(r) + "\n" for r in text_rows)
    cfg.path(name + ".dat").write_text(dat)
    return out


def read_table(path: str | Path) -> tuple[dict[str, str], list[str], np.ndarray]:
    """Reads a CSV written by :func:`write_table`, checking its digest.

    Returns the header fields, column names and a float array of rows.
    """
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {p}: {exc}") from exc
    lines = text.splitlines(keepends=True)
    head = [ln[2:].strip() for ln in lines if ln.startswith("# ")]
    data = "".join(ln for ln in lines if not ln.startswith("#"))
    meta: dict[str, str] = {}
    for h in head:
        if h.startswith("config="):
            meta["config"] = h[len("config=") :]
            continue
        for tok in h.split():
            if "=" in tok:
                k, v = tok.split("=", 1)
                meta[k] = v
    if "data_sha256" not in meta or "config_hash" not in meta:
        raise InputError(f"{p}: missing provenance header")
    if hashlib.sha256(data.encode()).hexdigest() != meta["data_sha256"]:
        raise InputError(f"{p}: data does not match its recorded checksum (corrupted or edited)")
    rows = list(csv.reader(io.StringIO(data)))
    if not rows:
        raise InputError(f"{p}: no column header")
    cols, body = rows[0], rows[1:]
    if str(len(body)) != meta.get("rows"):
        raise InputError(f"{p}: row count {len(body)} differs from header")
    try:
        arr = np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(cols))
    except ValueError as exc:
        raise InputError(f"{p}: malformed row ({exc})") from exc
    return meta, cols, arr


def write_summary(cfg: ExperimentConfig, name: str, results: dict, checks: dict[str, acceptance.CriterionResult]) -> Path:
    doc = {
        "version": __version__,
        "experiment": cfg.experiment,
        "seed": cfg.seed,
        "config_hash": cfg.config_hash,
        "config": cfg.hashed(),
        "results": acceptance._jsonable(results),
        "criteria": {k: v.to_json() | {"runtime_s": None} for k, v in checks.items()},
        "all_pass": all(v.passed for v in checks.values()),
    }
    out = cfg.path(name + ".json")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return out


# ---------------------------------------------------------------------------
# experiments


def _sigma_table(spec: ChainSpec, n: int) -> VarianceTable | None:
    return VarianceTable(spec, n + 1) if n + 1 <= TABLE_MAX else None


def _decade_grid(nmax: int) -> list[int]:
    grid = []
    k = 1
    while k <= nmax:
        grid.extend(v for v in (k, 2 * k, 5 * k) if v <= nmax)
        k *= 10
    return grid


def _wants(cfg: ExperimentConfig, cid: str) -> bool:
    return not cfg.only or cid in cfg.only


def _checks(cfg: ExperimentConfig, ids: Sequence[str], ctx: acceptance.AcceptanceContext) -> dict:
    out = {}
    for cid in ids:
        if _wants(cfg, cid):
            res = acceptance.run_criterion(cid, ctx)
            print(res.line())
            out[cid] = res
    return out


def run_analyze(cfg: ExperimentConfig) -> dict:
    spec = cfg.chain_spec()
    if 2 * cfg.nmax + 2 > TABLE_MAX:
        raise InputError(f"--nmax above {TABLE_MAX // 2 - 1} is out of table range")
    table = VarianceTable(spec, 2 * cfg.nmax + 2)
    grid = _decade_grid(cfg.nmax)
    rows = []
    for n in grid:
        s = table.sigma_sq(n)
        rows.append((n, s, s / n, s / (2 * n * math.log(n)) if n > 1 else math.nan))
    write_table(cfg, "analyze", ("n", "sigma_sq", "ell", "ratio_to_2nlogn"), rows)
    decades = [10**k for k in range(0, int(math.log10(cfg.nmax) + 1e-9) + 1)]
    k = kappa(spec) if spec.symmetry.odd_setting else None
    results: dict[str, Any] = {
        "chain": spec.to_json(),
        "kappa_flag": None if k is None else k.flag,
        "kappa": None if k is None else k.value,
        "slow_variation_series": [asdict(r) for r in slow_variation_report(table, decades)],
    }
    for d in decades[1:]:
        results[f"ratio_at_1e{int(round(math.log10(d)))}"] = table.sigma_sq(d) / (2 * d * math.log(d))
    if spec.symmetry.odd_setting:
        ms = [m for m in decades if m >= 10]
        results["remark3_matrix"] = {
            "m": ms,
            "n": ms,
            "distance": [[remark3_distance(spec, m, n, table) for n in ms] for m in ms],
        }
    ids = []
    if spec.variant == "example1" and cfg.nmax >= 10**6:
        ids = ["1", "2", "3", "7", "8a", "8b"]
    checks = _checks(cfg, ids, acceptance.AcceptanceContext(cfg.threads))
    write_summary(cfg, "analyze", results, checks)
    return checks


def _batch_rows(batch: SimulationBatch, scale: float) -> list[tuple]:
    return [(i, batch.W0[i], batch.tau0[i], batch.S[i], batch.S[i] / scale) for i in range(batch.reps)]


def run_simulate(cfg: ExperimentConfig) -> dict:
    spec = cfg.chain_spec()
    n = cfg.n[0]
    batch = simulate_many(spec, n, cfg.reps, cfg.seed, mode=cfg.mode, threads=cfg.threads)
    table = _sigma_table(spec, n)
    sigma = math.sqrt(table.sigma_sq(n)) if table is not None else math.nan
    csv_path = write_table(cfg, "simulate", ("replicate", "W0", "tau0", "Sn", "Sn_over_sigma"), _batch_rows(batch, sigma))
    z = batch.S / sigma
    results: dict[str, Any] = {"n": n, "reps": cfg.reps, "mode": batch.mode, "sigma_sq": sigma * sigma}
    if math.isfinite(sigma):
        rep = nonuniform_integrability_report(z)
        results.update(asdict(rep))
        results["ks_normal_half"] = ks_one_sample(z, lambda x: normal_cdf(0.0, 0.5, x))
        results["ks_normal_one"] = ks_one_sample(z, lambda x: normal_cdf(0.0, 1.0, x))
        if cfg.reps >= 500:
            bins = conditional_binning(z, batch.W0, 10, lambda x: normal_cdf(0.0, 0.5, x))
            results["binning_max_ks"] = bins.max_ks
            results["binning_critical"] = bins.critical
            results["binning_undersized"] = list(bins.undersized)
    results["csv_sha256"] = hashlib.sha256(csv_path.read_bytes()).hexdigest()
    ids = []
    if spec.variant == "example1" and n == 10**5 and cfg.reps == 4000 and batch.mode == "regenerative":
        ids = ["5", "12"]
    ctx = acceptance.AcceptanceContext(cfg.threads, samples=batch, seed=cfg.seed)
    checks = _checks(cfg, ids, ctx)
    write_summary(cfg, "simulate", results, checks)
    return checks


def run_martingale(cfg: ExperimentConfig) -> dict:
    spec = cfg.chain_spec()
    if not spec.symmetry.odd_setting:
        raise InputError("martingale experiments need an odd chain")
    rows = []
    results: dict[str, Any] = {}
    for n in cfg.n:
        kernel = build_kernel(spec, n)
        stbl = check_stbl(kernel, cfg.reps, cfg.seed, cfg.threads)
        lind = check_lindeberg(kernel, cfg.eps, cfg.reps, cfg.seed, threads=cfg.threads)
        rem = max_remainder_experiment(spec, n, cfg.reps, cfg.seed, cfg.threads)
        for r in range(cfg.reps):
            rows.append((n, r, stbl.values[r], *lind.values[r], rem.max_R_sq_over_sigma_sq[r]))
        results[str(n)] = {
            "stbl_mean": stbl.mean,
            "stbl_variance": stbl.variance,
            "lindeberg_mean": {str(e): v for e, v in lind.mean().items()},
            "maxR_mean": rem.mean_max_R,
            "M_sq_mean": rem.mean_M_sq,
            "telescoping_gap": rem.telescoping_gap,
            "dnorm_ratio": kernel.dnorm_ratio(),
        }
    cols = ("n", "rep", "stbl_stat", *(f"lindeberg_stat_eps{e:g}" for e in cfg.eps), "maxR_over_sigma")
    write_table(cfg, "martingale", cols, rows)
    ids = []
    if spec.variant == "example1" and {10**3, 10**4, 10**5} <= set(cfg.n) and cfg.reps == 500:
        ids = ["10"]
    checks = _checks(cfg, ids, acceptance.AcceptanceContext(cfg.threads, seed=cfg.seed))
    write_summary(cfg, "martingale", results, checks)
    return checks


def run_stable(cfg: ExperimentConfig) -> dict:
    alpha = 1.5 if cfg.alpha is None else cfg.alpha
    try:
        spec = build_chain("stable", alpha=alpha)
    except ChainError as exc:
        raise InputError(str(exc)) from exc
    n = cfg.n[0]
    batch = simulate_many(spec, n, cfg.reps, cfg.seed, mode=cfg.mode, threads=cfg.threads)
    scale = n ** (1.0 / alpha)
    write_table(cfg, "stable", ("replicate", "W0", "tau0", "Sn", "Sn_scaled"), _batch_rows(batch, scale))
    ca = c_alpha(alpha)
    ref = StableRef(alpha, ca)
    results = {
        "alpha": alpha,
        "n": n,
        "reps": cfg.reps,
        "c_alpha": ca,
        "c_alpha_reflection": c_alpha_reflection(alpha),
        "ks_stable": ks_one_sample(batch.S / scale, ref.cdf),
    }
    print(f"alpha={alpha:g} c_alpha={ca:.15g} ks={results['ks_stable']:.6g}")
    ids = ["9"] if alpha == 1.5 and n == 10**5 and cfg.reps == 4000 else []
    checks = _checks(cfg, ids, acceptance.AcceptanceContext(cfg.threads, seed=cfg.seed))
    write_summary(cfg, "stable", results, checks)
    return checks


def run_limits(cfg: ExperimentConfig) -> dict:
    spec = cfg.chain_spec()
    law = HoldingLaw(spec)
    ys = [10.0**k for k in range(0, 7)]
    write_table(cfg, "limits_H", ("y", "H", "tail_prob"), [(y, law.H(y), law.tail_prob(y)) for y in ys])
    ms = [10**k for k in range(2, 7)]
    grows = []
    for m in ms:
        g = gamma_m(spec, m, law)
        grows.append((m, g, g * g / m))
    write_table(cfg, "limits_gamma", ("m", "gamma_m", "H_at_gamma"), grows)
    results: dict[str, Any] = {"chain": spec.to_json()}
    if spec.variant == "stable":
        a = dict(spec.params)["alpha"]
        results["alpha"] = a
        results["c_alpha"] = c_alpha(a)
        print(f"alpha={a:g} c_alpha={results['c_alpha']:.15g}")
    ids = ["4"] if spec.variant == "example1" else []
    checks = _checks(cfg, ids, acceptance.AcceptanceContext(cfg.threads))
    write_summary(cfg, "limits", results, checks)
    return checks


def _load_samples(path: str) -> SimulationBatch:
    meta, cols, arr = read_table(path)
    try:
        conf = json.loads(meta["config"])
    except (KeyError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: unreadable config header") from exc
    need = ("replicate", "W0", "tau0", "Sn")
    if conf.get("experiment") != "simulate" or tuple(cols[:4]) != need:
        raise InputError(f"{path}: not a simulate output")
    if conf.get("chain") != "example1" or conf.get("n") != [10**5]:
        raise InputError(f"{path}: criteria 5 and 12 need Example1 samples at n = 1e5")
    n = conf["n"][0]
    mode = conf.get("mode") or "regenerative"
    return SimulationBatch(n, mode, int(conf["seed"]), arr[:, 3].copy(), arr[:, 1].copy(), arr[:, 2].astype(np.int64), None, None)


def run_report(cfg: ExperimentConfig) -> dict:
    known = [c.id for c in acceptance.CRITERIA]
    unknown = [c for c in cfg.only if c not in known]
    if unknown:
        raise InputError(f"unknown criterion ids {unknown}; choose from {known}")
    samples = _load_samples(cfg.samples) if cfg.samples else None
    ctx = acceptance.AcceptanceContext(cfg.threads, samples=samples)
    checks = _checks(cfg, [c.id for c in acceptance.CRITERIA], ctx)
    doc: dict[str, Any] = {
        "version": __version__,
        "seed": cfg.seed,
        "config_hash": cfg.config_hash,
        "criteria": {k: {"value": acceptance._jsonable(v.value), "window": v.window, "pass": v.passed} for k, v in checks.items()},
        "all_pass": all(v.passed for v in checks.values()),
    }
    if cfg.robustness_seeds:
        ids = [c for c in acceptance.MONTE_CARLO if _wants(cfg, c)]
        base = {c: checks[c].passed for c in ids}
        per_seed = {}
        for s in cfg.robustness_seeds:
            sctx = acceptance.AcceptanceContext(cfg.threads, seed=s)
            per_seed[str(s)] = {c: acceptance.run_criterion(c, sctx).passed for c in ids}
        flagged = sorted({c for pat in per_seed.values() for c in ids if pat[c] != base[c]})
        doc["robustness"] = {"seeds": per_seed, "baseline": base, "flagged": flagged}
    out = cfg.path("report.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return checks


RUNNERS = {
    "analyze": run_analyze,
    "simulate": run_simulate,
    "martingale": run_martingale,
    "stable": run_stable,
    "limits": run_limits,
    "report": run_report,
}


def run(cfg: ExperimentConfig) -> int:
    cfg.validate()
    checks = RUNNERS[cfg.experiment](cfg)
    return 0 if all(c.passed for c in checks.values()) else 1


# ---------------------------------------------------------------------------
# argument parsing


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(_number(int, t) for t in text.split(","))
    except (ValueError, InputError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(","))


def _int(text: str) -> int:
    try:
        return _number(int, text)
    except (ValueError, InputError) as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text}") from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="revclt", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"revclt {__version__}")
    sub = ap.add_subparsers(dest="experiment", required=True)

    def common(p, n_default=None, reps_default=None):
        p.add_argument("--config", help="JSON config; flags given explicitly override it")
        p.add_argument("--seed", type=_int)
        p.add_argument("--out")
        p.add_argument("--threads", type=int)
        p.add_argument("-v", "--verbose", action="store_true")
        if n_default is not None:
            p.add_argument("--n", type=_int_list, help="horizon (comma list for martingale)")
        if reps_default is not None:
            p.add_argument("--reps", type=_int)

    p = sub.add_parser("analyze", help="exact variance table, kappa, slow variation")
    common(p)
    p.add_argument("--chain", choices=CHAINS)
    p.add_argument("--alpha", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--nmax", type=_int)

    p = sub.add_parser("simulate", help="replicates of S_n")
    common(p, True, True)
    p.add_argument("--chain", choices=CHAINS)
    p.add_argument("--alpha", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--mode", choices=MODES)

    p = sub.add_parser("martingale", help="stability, Lindeberg and remainder statistics")
    common(p, True, True)
    p.add_argument("--chain", choices=CHAINS)
    p.add_argument("--alpha", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--eps", type=_float_list)

    p = sub.add_parser("stable", help="stable limit of the heavy-tailed chain")
    common(p, True, True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--mode", choices=MODES)

    p = sub.add_parser("limits", help="H table, gamma_m table and c_alpha")
    common(p)
    p.add_argument("--chain", choices=CHAINS)
    p.add_argument("--alpha", type=float)
    p.add_argument("--c", type=float)

    p = sub.add_parser("report", help="evaluate every acceptance criterion")
    common(p)
    p.add_argument("--samples", help="simulate CSV to use for criteria 5 and 12")
    p.add_argument("--only", type=lambda s: tuple(s.split(",")), help="comma list of criterion ids")
    p.add_argument("--robustness-seeds", type=_int_list, help="rerun Monte Carlo criteria under these seeds")
    return ap


_DEFAULTS = {
    "simulate": {"n": (10**5,), "reps": 4000},
    "martingale": {"n": (10**3, 10**4, 10**5), "reps": 500},
    "stable": {"n": (10**5,), "reps": 4000, "seed": 7, "chain": "stable"},
}


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    doc: dict[str, Any] = {"experiment": ns.experiment}
    if getattr(ns, "config", None):
        try:
            loaded = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot load config {ns.config}: {exc}") from exc
        if loaded.get("experiment", ns.experiment) != ns.experiment:
            raise InputError(f"{ns.config} is for experiment {loaded['experiment']!r}")
        doc.update(loaded)
    else:
        doc.update(_DEFAULTS.get(ns.experiment, {}))
    for key in ("chain", "alpha", "c", "n", "nmax", "reps", "seed", "mode", "eps", "samples", "only", "robustness_seeds", "out"):
        v = getattr(ns, key, None)
        if v is not None:
            doc[key] = list(v) if isinstance(v, tuple) else v
    cfg = config_from_json(doc)
    return ExperimentConfig(**{**asdict(cfg), "threads": ns.threads})


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
        return run(cfg)
    except InputError as exc:
        print(f"revclt: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
