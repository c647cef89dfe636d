"""Named experiments: Monte Carlo left sides against predictor right sides.

An experiment binds a law, a theorem identifier and scalar parameters;
running it estimates the required ingredients (harmonic values, kappa,
weighted dual integrals) per the configured policy, runs the matching
Monte Carlo statistic for every horizon in n_list, and emits rows with
the MC/predicted ratio and a +-4-stderr ratio interval.  Results are
bit-reproducible from (config, seed) regardless of thread count.

Expensive ingredients (tables, kappa) are cached on disk keyed by a hash
of their estimation parameters.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from .asymptotics import predict
from .errors import InsufficientSweep, UnknownTheorem
from .harmonic import HarmonicTable, TableParams, build_harmonic_table, \
    estimate_V_killed, estimate_V_ladder, kappa_constant, weighted_table_integral
from .increments import cramer_tilt, parse_law
from .rngstream import mix64
from .walk import McEstimate, Statistic, mc_estimate, mc_tilted_survival, \
    mc_unconditioned


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    law: str
    theorem_id: str
    n_list: tuple
    samples: int
    seed: int
    x: float = 0.0
    y: float | None = None
    delta: float | None = None
    t: float | None = None
    q: float | None = None
    a: float | None = None
    v_source: str = "ladder"        # ladder | killed | supplied
    v_value: float | None = None
    kappa_source: str = "computed"  # computed | supplied
    kappa_value: float | None = None
    i_value: float | None = None
    band: tuple = (0.0, math.inf)

    def __post_init__(self):
        if not self.n_list or list(self.n_list) != sorted(self.n_list):
            raise ValueError("n_list must be non-empty and ascending")
        if self.samples < 10 ** 3:
            raise ValueError("samples must be at least 1e3")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        policy = d.get("ingredient_policy", {})
        v_src, v_val = _source_field(policy.get("v_source", "ladder"))
        k_src, k_val = _source_field(policy.get("kappa_source", "computed"))
        return cls(
            name=d["name"], law=d["law"], theorem_id=d["theorem_id"],
            n_list=tuple(d["n_list"]), samples=int(d["samples"]),
            seed=int(d["seed"]), x=float(d.get("x", 0.0)),
            y=d.get("y"), delta=d.get("delta"), t=d.get("t"), q=d.get("q"),
            a=d.get("a"), v_source=v_src, v_value=v_val,
            kappa_source=k_src, kappa_value=k_val,
            i_value=policy.get("i_value"),
            band=tuple(d.get("band", (0.0, math.inf))))

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _source_field(spec):
    """'ladder' | 'killed' | 'computed' | {'supplied': value}."""
    if isinstance(spec, dict):
        return "supplied", float(spec["supplied"])
    if isinstance(spec, str) and spec.startswith("supplied:"):
        return "supplied", float(spec.split(":", 1)[1])
    return spec, None


@dataclass(frozen=True)
class ReportRow:
    name: str
    theorem: str
    n: int
    mc: McEstimate
    predicted: float
    ratio: float
    ratio_lo: float
    ratio_hi: float


# ---------------------------------------------------------------------------
# Ingredient cache


class IngredientCache:
    def __init__(self, root: str | os.PathLike | None = None):
        if root is None:
            root = os.environ.get("CONDWALK_CACHE",
                                  Path.home() / ".cache" / "condwalk")
        self.root = Path(root)

    def _path(self, key: dict) -> Path:
        blob = json.dumps(key, sort_keys=True)
        return self.root / (hashlib.sha256(blob.encode()).hexdigest()[:24] + ".json")

    def get_or_compute(self, key: dict, compute):
        path = self._path(key)
        if path.exists():
            return json.loads(path.read_text())
        value = compute()
        self.root.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(value))
        return value


def _table_for(law_str, law, dual, tilt, seed, threads, cache):
    params = TableParams(seed=seed)
    key = {"kind": "table", "law": law_str, "dual": dual,
           "tilt": tilt.lam if tilt else None, "method": params.method,
           "accuracy": params.accuracy, "rel": params.rel_accuracy,
           "seed": seed}

    def compute():
        tab = build_harmonic_table(law, dual=dual, tilt=tilt,
                                   params=params, threads=threads)
        return {"grid": list(tab.grid),
                "mean": [v.mean for v in tab.values],
                "stderr": [v.stderr for v in tab.values],
                "count": [v.count for v in tab.values],
                "offset": tab.extrapolation_offset,
                "tilt": tab.tilt, "dual": tab.dual}

    raw = cache.get_or_compute(key, compute) if cache else compute()
    vals = tuple(McEstimate(m, s, c, seed) for m, s, c in
                 zip(raw["mean"], raw["stderr"], raw["count"]))
    return HarmonicTable(tuple(raw["grid"]), vals, raw["dual"], raw["tilt"],
                         raw["offset"])


# ---------------------------------------------------------------------------
# Experiment runner


_TILTED = {"IGL1", "IGL2", "TAU-S-TILT", "TAU-L-TILT"}
_UNCONDITIONED = {"LLT", "MD"}
_NEEDS_V = {"AA001D", "AA002bis", "MD-C", "ICLT-S", "TAU-S", "EXPF"}
_NEEDS_KAPPA = {"TAU-S", "TAU-L", "TAU-S-TILT", "TAU-L-TILT"}
_SUPPORTED = _TILTED | _UNCONDITIONED | _NEEDS_V | _NEEDS_KAPPA | {
    "BB001D", "BB002bis", "MD-L", "ICLT-L"}


def _statistic_for(cfg: ExperimentConfig) -> Statistic:
    tid = cfg.theorem_id
    if tid in ("TAU-S", "TAU-L", "TAU-S-TILT", "TAU-L-TILT"):
        return Statistic.exit_at_n()
    if tid in ("ICLT-S", "ICLT-L"):
        if cfg.t is not None:
            return Statistic.scaled_cdf(cfg.t)
        return Statistic.survival()
    if tid in ("IGL1", "IGL2"):
        return Statistic.survival()
    if tid == "EXPF":
        from .targets import TargetFunction
        return Statistic.target(TargetFunction.exponential(cfg.a), 0.0)
    if cfg.y is None or cfg.delta is None:
        raise UnknownTheorem(f"{tid} requires y and delta in the config")
    return Statistic.interval(cfg.y, cfg.delta)


def _estimate_v(cfg, law, x, threads):
    if cfg.v_source == "supplied":
        return cfg.v_value
    seed = mix64(cfg.seed ^ 0xA5A5)
    if cfg.v_source == "killed":
        return estimate_V_killed(law, x, 10 ** 4, 10 ** 5, seed,
                                 threads=threads).mean
    return estimate_V_ladder(law, x, samples=10 ** 5, seed=seed,
                             threads=threads).mean


def run_experiment(cfg: ExperimentConfig, threads: int | None = None,
                   cache: IngredientCache | None = None):
    """One row per horizon; raises for unknown theorem ids."""
    if cfg.theorem_id not in _SUPPORTED:
        raise UnknownTheorem(
            f"{cfg.theorem_id!r} is not runnable as an experiment "
            f"(supported: {sorted(_SUPPORTED)})")
    law = parse_law(cfg.law)
    tid = cfg.theorem_id
    stat = None if tid in _UNCONDITIONED else _statistic_for(cfg)

    ing = {"sigma": law.sigma, "x": cfg.x, "y": cfg.y, "delta": cfg.delta,
           "q": cfg.q, "t": cfg.t if cfg.t is not None else math.inf,
           "f_int": 1.0}

    tilt = None
    if tid in _TILTED:
        tilt = cramer_tilt(law)
        dual_tab = _table_for(cfg.law, law, True, tilt, mix64(cfg.seed ^ 0xD0),
                              threads, cache)
        i_int = cfg.i_value if cfg.i_value is not None else \
            weighted_table_integral(dual_tab, tilt.lam)
        drift = {"lam": tilt.lam, "log_mgf": tilt.log_mgf,
                 "tilted_sigma": tilt.tilted_sigma, "i_integral": i_int}
        if tid in ("IGL1", "TAU-S-TILT"):
            drift["v_lambda_x"] = _estimate_v(cfg, tilt.sampler, cfg.x, threads)
        if tid in ("TAU-S-TILT", "TAU-L-TILT"):
            ing["kappa"] = cfg.kappa_value if cfg.kappa_source == "supplied" \
                else kappa_constant(law, dual_tab, tilt=tilt)
        ing["drift"] = drift
    else:
        if tid in _NEEDS_V:
            ing["v_x"] = _estimate_v(cfg, law, cfg.x, threads)
        if tid in _NEEDS_KAPPA:
            if cfg.kappa_source == "supplied":
                ing["kappa"] = cfg.kappa_value
            else:
                dual_tab = _table_for(cfg.law, law, True, None,
                                      mix64(cfg.seed ^ 0xD1), threads, cache)
                ing["kappa"] = kappa_constant(law, dual_tab)
        if tid == "EXPF":
            dual_tab = _table_for(cfg.law, law, True, None,
                                  mix64(cfg.seed ^ 0xD1), threads, cache)
            ing["exp_vstar_int"] = weighted_table_integral(dual_tab, cfg.a)
            ing["a"] = cfg.a

    rows = []
    for j, n in enumerate(cfg.n_list):
        seed_n = mix64(cfg.seed ^ mix64(7000 + j))
        if tid in _UNCONDITIONED:
            mc = mc_unconditioned(law, n, Statistic.interval(cfg.y, cfg.delta),
                                  cfg.samples, seed_n, threads)
        elif tid in _TILTED:
            mc = mc_tilted_survival(law, tilt, cfg.x, n, stat, cfg.samples,
                                    seed_n, threads)
        else:
            mc = mc_estimate(law, cfg.x, n, stat, cfg.samples, seed_n, threads)
        pred = predict(tid, **{**ing, "n": n}).value
        ratio = mc.mean / pred
        half = 4.0 * mc.stderr / pred
        rows.append(ReportRow(cfg.name, tid, n, mc, pred, ratio,
                              ratio - half, ratio + half))
    return rows


def band_pass(cfg: ExperimentConfig, rows) -> bool:
    lo, hi = cfg.band
    return all(lo <= r.ratio <= hi for r in rows)


def convergence_sweep(cfg: ExperimentConfig, n_list=None,
                      threads: int | None = None,
                      cache: IngredientCache | None = None):
    """Rows over an ascending n grid plus a trend verdict.

    The trend holds when |ratio - 1| does not increase beyond the overlap
    of consecutive +-4-stderr ratio intervals.
    """
    ns = tuple(n_list) if n_list is not None else cfg.n_list
    if len(ns) < 2:
        raise InsufficientSweep("need at least two horizon values")
    cfg2 = ExperimentConfig(**{**cfg.__dict__, "n_list": ns})
    rows = run_experiment(cfg2, threads=threads, cache=cache)
    ok = True
    for a, b in zip(rows, rows[1:]):
        slack = 0.5 * ((a.ratio_hi - a.ratio_lo) + (b.ratio_hi - b.ratio_lo))
        if abs(b.ratio - 1.0) > abs(a.ratio - 1.0) + slack:
            ok = False
    return {"rows": rows, "trend_ok": ok}


# ---------------------------------------------------------------------------
# Reports


_CSV_HEADER = "name,theorem,n,mc_mean,mc_stderr,samples,seed,predicted,ratio,ratio_lo,ratio_hi"


def _g17(x: float) -> str:
    return format(x, ".17g")


def row_record(r: ReportRow) -> dict:
    return {"name": r.name, "theorem": r.theorem, "n": r.n,
            "mc_mean": _g17(r.mc.mean), "mc_stderr": _g17(r.mc.stderr),
            "samples": r.mc.count, "seed": r.mc.seed,
            "predicted": _g17(r.predicted), "ratio": _g17(r.ratio),
            "ratio_lo": _g17(r.ratio_lo), "ratio_hi": _g17(r.ratio_hi)}


def emit_report(rows, format: str, path) -> None:
    """CSV or JSON report; numeric fields rendered at 17 significant digits."""
    if not rows:
        raise ValueError("no rows to emit")
    path = Path(path)
    if format == "csv":
        lines = [_CSV_HEADER]
        for r in rows:
            rec = row_record(r)
            lines.append(",".join(str(rec[k]) for k in _CSV_HEADER.split(",")))
        path.write_text("\n".join(lines) + "\n")
    elif format == "json":
        path.write_text(json.dumps([row_record(r) for r in rows], indent=1) + "\n")
    else:
        raise ValueError(f"unknown report format {format!r}")


def parse_report(path):
    """Rows back from a JSON report (numeric strings to floats)."""
    recs = json.loads(Path(path).read_text())
    out = []
    for r in recs:
        mc = McEstimate(float(r["mc_mean"]), float(r["mc_stderr"]),
                        int(r["samples"]), int(r["seed"]))
        out.append(ReportRow(r["name"], r["theorem"], int(r["n"]), mc,
                             float(r["predicted"]), float(r["ratio"]),
                             float(r["ratio_lo"]), float(r["ratio_hi"])))
    return out
