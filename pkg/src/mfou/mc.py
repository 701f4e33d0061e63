"""Monte Carlo experiment runner.

Repeats simulate-then-estimate over a ladder of sample sizes, collects
per-replicate estimation errors, and derives the two diagnostics used
throughout: the log-log RMSE slope across the ladder, and density
diagnostics (KS distance to a matched Gaussian, skewness, kurtosis) of
the rescaled errors at a fixed n.

Replicate (n, m) always uses the substream derived from
(master_seed, n, m), so reports are bit-identical across reruns and
thread counts.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import estim, sim
from .model import ModelParams, PairParams

__all__ = [
    "ExperimentConfig",
    "McReport",
    "DensityDiagnostics",
    "run_experiment",
    "rmse_slopes",
    "rescaled_density",
]

ESTIMATORS = ("low-freq-cov", "low-freq-corr", "high-freq", "nu-low", "nu-high")
PROCESSES = ("mfou-exact", "mfou-euler", "mfbm")

# fraction of failed replicates above which a run is declared failed
MAX_FAILURE_RATE = 0.01


@dataclass(frozen=True)
class ExperimentConfig:
    """One ladder experiment: simulate `process`, apply `estimator`."""

    pair: PairParams
    estimator: str
    n_ladder: tuple[int, ...]
    M: int = 1000
    master_seed: int = 0
    s: int = 1
    delta: float = 1.0
    delta_rule: str = "fixed"  # "fixed" | "sqrt" (delta_n = n^{-1/2})
    process: str = "mfou-exact"
    substeps: int = 1

    def __post_init__(self):
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if self.process not in PROCESSES:
            raise ValueError(f"unknown process {self.process!r}")
        if self.delta_rule not in ("fixed", "sqrt"):
            raise ValueError(f"unknown delta rule {self.delta_rule!r}")
        if list(self.n_ladder) != sorted(set(self.n_ladder)):
            raise ValueError("n_ladder must be strictly increasing")
        if self.M < 2:
            raise ValueError("M must be >= 2")

    def delta_for(self, n: int) -> float:
        return n ** -0.5 if self.delta_rule == "sqrt" else self.delta

    def estimands(self) -> tuple[str, ...]:
        return ("nu2",) if self.estimator.startswith("nu-") else ("rho", "eta")

    def truth(self) -> dict[str, float]:
        if self.estimator.startswith("nu-"):
            return {"nu2": self.pair.nu1 ** 2}
        return {"rho": self.pair.rho, "eta": self.pair.eta12}

    def to_dict(self) -> dict:
        p = self.pair
        return {
            "pair": {"H1": p.H1, "H2": p.H2, "alpha1": p.alpha1,
                     "alpha2": p.alpha2, "nu1": p.nu1, "nu2": p.nu2,
                     "rho": p.rho, "eta12": p.eta12},
            "estimator": self.estimator,
            "n_ladder": list(self.n_ladder),
            "M": self.M,
            "master_seed": self.master_seed,
            "s": self.s,
            "delta": self.delta,
            "delta_rule": self.delta_rule,
            "process": self.process,
            "substeps": self.substeps,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        pp = doc["pair"]
        return cls(
            pair=PairParams(**pp),
            estimator=doc["estimator"],
            n_ladder=tuple(doc["n_ladder"]),
            M=doc.get("M", 1000),
            master_seed=doc.get("master_seed", 0),
            s=doc.get("s", 1),
            delta=doc.get("delta", 1.0),
            delta_rule=doc.get("delta_rule", "fixed"),
            process=doc.get("process", "mfou-exact"),
            substeps=doc.get("substeps", 1),
        )

    def content_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class McReport:
    config: ExperimentConfig
    # errors[estimand][n] -> array of per-replicate estimation errors
    errors: dict[str, dict[int, np.ndarray]]
    failures: list[tuple[int, int, str]] = field(default_factory=list)
    wall_time: float = 0.0

    def rmse(self, estimand: str) -> dict[int, float]:
        return {n: float(np.sqrt(np.mean(e ** 2)))
                for n, e in self.errors[estimand].items()}

    def mean(self, estimand: str) -> dict[int, float]:
        return {n: float(np.mean(e)) for n, e in self.errors[estimand].items()}

    def stderr(self, estimand: str) -> dict[int, float]:
        return {n: float(np.std(e, ddof=1) / math.sqrt(len(e)))
                for n, e in self.errors[estimand].items()}

    def summary_dict(self) -> dict:
        # wall_time is deliberately left out: the summary must be
        # byte-identical across reruns with the same config and seed
        out = {
            "config": self.config.to_dict(),
            "config_hash": self.config.content_hash(),
            "failures": len(self.failures),
            "per_n": {},
            "slopes": {},
        }
        for est in self.config.estimands():
            out["per_n"][est] = {
                str(n): {"rmse": self.rmse(est)[n],
                         "mean": self.mean(est)[n],
                         "stderr": self.stderr(est)[n]}
                for n in self.config.n_ladder
            }
        if len(self.config.n_ladder) >= 3:
            for est, (slope, se) in rmse_slopes(self).items():
                out["slopes"][est] = {"slope": slope, "stderr": se}
        return out

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "replicate", "estimand", "error"])
            for est in self.config.estimands():
                for n in self.config.n_ladder:
                    for m, e in enumerate(self.errors[est][n]):
                        w.writerow([n, m, est, f"{e:.17g}"])

    def write_summary(self, path):
        with open(path, "w") as fh:
            json.dump(self.summary_dict(), fh, indent=2)

    @classmethod
    def read_csv(cls, path, config: ExperimentConfig | None = None) -> "McReport":
        rows = {}
        with open(path, newline="") as fh:
            for rec in csv.DictReader(fh):
                rows.setdefault(rec["estimand"], {}).setdefault(
                    int(rec["n"]), []).append(float(rec["error"]))
        errors = {est: {n: np.asarray(v) for n, v in d.items()}
                  for est, d in rows.items()}
        if config is None:
            some = next(iter(errors.values()))
            config = ExperimentConfig(
                pair=PairParams(0.1, 0.2, 1, 1, 1, 1, 0, 0),
                estimator="high-freq" if "rho" in errors else "nu-high",
                n_ladder=tuple(sorted(some)),
                M=len(next(iter(some.values()))),
            )
        return cls(config=config, errors=errors)


def _seed_for(master: int, n: int) -> int:
    ss = np.random.SeedSequence(entropy=int(master) & (2**64 - 1),
                                spawn_key=(int(n),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _univariate_model(p: PairParams) -> ModelParams:
    return ModelParams(H=[p.H1], alpha=[p.alpha1], nu=[p.nu1],
                       rho=[[1.0]], eta=[[0.0]])


def _simulate(cfg: ExperimentConfig, n: int, seed: int, m: int) -> np.ndarray:
    grid = sim.SamplingGrid(n=n, delta=cfg.delta_for(n))
    if cfg.estimator.startswith("nu-"):
        model = _univariate_model(cfg.pair)
    else:
        model = cfg.pair.to_model()
    if cfg.process == "mfou-exact":
        return sim.simulate_mfou_exact(model, grid, seed, replicate=m).values
    if cfg.process == "mfou-euler":
        return sim.simulate_mfou_euler(model, grid, seed,
                                       substeps=cfg.substeps, replicate=m).values
    return sim.simulate_mfbm(model.H, model.rho, model.eta, grid, seed,
                             replicate=m).values


def _estimate(cfg: ExperimentConfig, values: np.ndarray, n: int) -> dict[str, float]:
    p = cfg.pair
    delta = cfg.delta_for(n)
    if cfg.estimator == "low-freq-cov":
        r = estim.estimate_low_freq(values[0], values[1], p, s=cfg.s, delta=delta)
        return {"rho": r.rho_hat, "eta": r.eta_hat}
    if cfg.estimator == "low-freq-corr":
        r = estim.estimate_low_freq_corr(values[0], values[1], p, s=cfg.s,
                                         delta=delta)
        return {"rho": r.rho_hat, "eta": r.eta_hat}
    if cfg.estimator == "high-freq":
        r = estim.estimate_high_freq(values[0], values[1], p.H1, p.H2,
                                     p.nu1, p.nu2, delta)
        return {"rho": r.rho_hat, "eta": r.eta_hat}
    if cfg.estimator == "nu-low":
        r = estim.estimate_nu_low(values[0], p.alpha1, p.H1, s=cfg.s)
        return {"nu2": r.nu2_hat}
    r = estim.estimate_nu_high(values[0], p.H1, delta)
    return {"nu2": r.nu2_hat}


def run_experiment(cfg: ExperimentConfig) -> McReport:
    """Full ladder run; raises if more than 1% of replicates fail."""
    t0 = time.time()
    truth = cfg.truth()
    errors = {est: {} for est in cfg.estimands()}
    failures = []
    for n in cfg.n_ladder:
        seed_n = _seed_for(cfg.master_seed, n)
        cols = {est: np.full(cfg.M, np.nan) for est in cfg.estimands()}
        for m in range(cfg.M):
            try:
                values = _simulate(cfg, n, seed_n, m)
                ests = _estimate(cfg, values, n)
                for est, v in ests.items():
                    cols[est][m] = v - truth[est]
            except Exception as exc:  # noqa: BLE001 - recorded, not fatal
                failures.append((n, m, f"{type(exc).__name__}: {exc}"))
        for est in cfg.estimands():
            errors[est][n] = cols[est][~np.isnan(cols[est])]
    report = McReport(config=cfg, errors=errors, failures=failures,
                      wall_time=time.time() - t0)
    total = cfg.M * len(cfg.n_ladder)
    if len(failures) > MAX_FAILURE_RATE * total:
        raise RuntimeError(
            f"{len(failures)}/{total} replicates failed; first: {failures[0]}")
    return report


def rmse_slopes(report: McReport) -> dict[str, tuple[float, float]]:
    """OLS slope of log2(RMSE) on log2(n), with regression stderr."""
    ladder = report.config.n_ladder
    if len(ladder) < 3:
        raise ValueError("ladder too short: need at least 3 points")
    x = np.log2(np.asarray(ladder, dtype=float))
    out = {}
    for est in report.config.estimands():
        y = np.log2([report.rmse(est)[n] for n in ladder])
        res = stats.linregress(x, y)
        out[est] = (float(res.slope), float(res.stderr))
    return out


@dataclass
class DensityDiagnostics:
    """Shape diagnostics of rescaled estimation errors at one n."""

    n: int
    rate: float
    bins: np.ndarray
    counts: np.ndarray
    ks_distance: float
    ks_critical_1pct: float
    skewness: float
    skewness_se: float
    excess_kurtosis: float
    kurtosis_se: float

    @property
    def gaussian_ks_pass(self) -> bool:
        return self.ks_distance < self.ks_critical_1pct


def rescaled_density(report: McReport, rate: float, n: int,
                     estimand: str = "rho",
                     log_correction: bool = False) -> DensityDiagnostics:
    """Diagnostics of errors scaled by n^rate (or sqrt(n / log n)).

    The KS distance is taken to the Gaussian with the sample's own mean
    and variance; its 1% critical value uses the asymptotic
    1.628 / sqrt(M) approximation.
    """
    if n not in report.config.n_ladder:
        raise ValueError(f"n={n} not in the ladder")
    scale = math.sqrt(n / math.log(n)) if log_correction else n ** rate
    e = report.errors[estimand][n] * scale
    M = len(e)
    mu, sd = float(np.mean(e)), float(np.std(e, ddof=1))
    lo, hi = mu - 5 * sd, mu + 5 * sd
    counts, bins = np.histogram(e, bins=64, range=(lo, hi))
    ks = stats.kstest(e, "norm", args=(mu, sd)).statistic
    return DensityDiagnostics(
        n=n, rate=rate, bins=bins, counts=counts,
        ks_distance=float(ks), ks_critical_1pct=1.628 / math.sqrt(M),
        skewness=float(stats.skew(e)), skewness_se=math.sqrt(6.0 / M),
        excess_kurtosis=float(stats.kurtosis(e)),
        kurtosis_se=math.sqrt(24.0 / M),
    )
