"""Command-line entry point.

Subcommands:

    cov         covariance tables -> CSV
    simulate    one trajectory -> CSV + metadata sidecar
    estimate    estimator on a trajectory CSV -> JSON
    montecarlo  ladder experiment -> raw-error CSV + summary JSON
    rates       rate prediction and variance limits -> JSON

Every run is driven by a single JSON config file with a ``kind``
discriminator matching the subcommand.  Exit codes: 0 success, 1
invalid configuration (all violations listed), 2 runtime or numerical
failure.  Output files are written to a temporary name and renamed on
success, so a failed run never leaves a partial artifact behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

__all__ = ["main"]

SUBCOMMANDS = ("cov", "simulate", "estimate", "montecarlo", "rates")


class ConfigError(Exception):
    """Invalid configuration; carries the full list of violations."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mfou", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", metavar="{%s}" % ",".join(SUBCOMMANDS))
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name, add_help=True)
        sp.add_argument("--config", required=True, help="JSON config path")
        sp.add_argument("--out", required=True, help="output path")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the seed in the config")
        sp.add_argument("--threads", type=int, default=None,
                        help="BLAS thread cap (default: MFOU_THREADS or unset)")
    return p


def _apply_threads(threads: int | None):
    """Cap BLAS threads; results never depend on this."""
    if threads is None:
        env = os.environ.get("MFOU_THREADS")
        threads = int(env) if env else None
    if threads is None:
        return
    if threads < 1:
        raise ConfigError([f"threads must be >= 1, got {threads}"])
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(threads)
    try:
        import threadpoolctl
        threadpoolctl.threadpool_limits(threads)
    except ImportError:
        pass


def _load_config(path, kind: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError([f"cannot read config: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"]) from exc
    if not isinstance(doc, dict):
        raise ConfigError(["config must be a JSON object"])
    got = doc.get("kind")
    if got != kind:
        raise ConfigError([f"config kind {got!r} does not match subcommand {kind!r}"])
    return doc


def _require(doc: dict, keys, kind: str):
    missing = [k for k in keys if k not in doc]
    if missing:
        raise ConfigError([f"{kind} config missing key {k!r}" for k in missing])


def _pair_from(doc: dict):
    from .model import InvalidModelError, PairParams
    _require(doc, ["pair"], doc.get("kind", "?"))
    try:
        pair = PairParams(**doc["pair"])
    except (TypeError, InvalidModelError) as exc:
        raise ConfigError([f"invalid pair parameters: {exc}"]) from exc
    errs = pair.to_model().validation_errors()
    if errs:
        raise ConfigError(errs)
    return pair


def _atomic_write(path, writer):
    """writer(tmp_path) then atomic rename onto `path`."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mfou-tmp-")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path, doc):
    def writer(tmp):
        with open(tmp, "w") as fh:
            json.dump(doc, fh, indent=2)
    _atomic_write(path, writer)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _cmd_cov(doc: dict, out, seed):
    import csv

    from . import kernels
    pair = _pair_from(doc)
    _require(doc, ["delta", "nlags"], "cov")
    delta, nlags = float(doc["delta"]), int(doc["nlags"])
    if delta <= 0 or nlags < 1:
        raise ConfigError(["cov needs delta > 0 and nlags >= 1"])
    r11 = kernels.auto_cov_table(pair.H1, pair.alpha1, pair.nu1, delta, nlags)
    r22 = kernels.auto_cov_table(pair.H2, pair.alpha2, pair.nu2, delta, nlags)
    r12, r21 = kernels.cross_cov_table(pair, delta, nlags)

    def writer(tmp):
        with open(tmp, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "r11", "r22", "r12", "r21"])
            for k in range(nlags + 1):
                w.writerow([_fmt(k * delta)] + [_fmt(t[k])
                                                for t in (r11, r22, r12, r21)])

    _atomic_write(out, writer)


def _grid_from(doc: dict):
    from .sim import SamplingGrid
    _require(doc, ["n", "delta"], doc.get("kind", "?"))
    try:
        return SamplingGrid(n=int(doc["n"]), delta=float(doc["delta"]))
    except ValueError as exc:
        raise ConfigError([str(exc)]) from exc


def _cmd_simulate(doc: dict, out, seed):
    from . import sim
    pair = _pair_from(doc)
    grid = _grid_from(doc)
    process = doc.get("process", "mfou-exact")
    if process not in ("mfou-exact", "mfou-euler", "mfbm"):
        raise ConfigError([f"unknown process {process!r}"])
    seed = int(doc.get("seed", 0)) if seed is None else seed
    replicate = int(doc.get("replicate", 0))
    model = pair.to_model()
    if process == "mfou-exact":
        traj = sim.simulate_mfou_exact(model, grid, seed, replicate=replicate)
    elif process == "mfou-euler":
        traj = sim.simulate_mfou_euler(model, grid, seed,
                                       substeps=int(doc.get("substeps", 1)),
                                       replicate=replicate)
    else:
        traj = sim.simulate_mfbm(model.H, model.rho, model.eta, grid, seed,
                                 replicate=replicate)

    def writer(tmp):
        sim.write_trajectory_csv(traj, tmp, metadata={"process": process})
        os.replace(tmp + ".meta.json", str(out) + ".meta.json")

    _atomic_write(out, writer)


def _cmd_estimate(doc: dict, out, seed):
    from . import estim, sim
    _require(doc, ["estimator", "data"], "estimate")
    estimator = doc["estimator"]
    try:
        traj = sim.read_trajectory_csv(doc["data"])
    except OSError as exc:
        raise ConfigError([f"cannot read trajectory: {exc}"]) from exc
    y = traj.values
    s = int(doc.get("s", 1))
    delta = float(doc.get("delta", traj.grid.delta))
    if estimator in ("low-freq-cov", "low-freq-corr", "high-freq"):
        pair = _pair_from(doc)
        if y.shape[0] < 2:
            raise ConfigError(["pair estimators need a 2-component trajectory"])
        if estimator == "low-freq-cov":
            res = estim.estimate_low_freq(y[0], y[1], pair, s=s, delta=delta)
        elif estimator == "low-freq-corr":
            res = estim.estimate_low_freq_corr(y[0], y[1], pair, s=s, delta=delta)
        else:
            res = estim.estimate_high_freq(y[0], y[1], pair.H1, pair.H2,
                                           pair.nu1, pair.nu2, delta)
    elif estimator == "nu-low":
        _require(doc, ["alpha", "H"], "estimate")
        res = estim.estimate_nu_low(y[0], float(doc["alpha"]), float(doc["H"]), s=s)
    elif estimator == "nu-high":
        _require(doc, ["H"], "estimate")
        res = estim.estimate_nu_high(y[0], float(doc["H"]), delta)
    else:
        raise ConfigError([f"unknown estimator {estimator!r}"])
    _write_json(out, res.to_dict())


def _cmd_montecarlo(doc: dict, out, seed):
    from . import mc
    body = {k: v for k, v in doc.items() if k != "kind"}
    if seed is not None:
        body["master_seed"] = seed
    try:
        cfg = mc.ExperimentConfig.from_dict(body)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError([f"invalid experiment config: {exc}"]) from exc
    errs = cfg.pair.to_model().validation_errors()
    if errs:
        raise ConfigError(errs)
    report = mc.run_experiment(cfg)
    base = str(out)
    if base.endswith(".json"):
        base = base[:-len(".json")]
    _atomic_write(base + ".csv", report.write_csv)
    _atomic_write(base + ".json", report.write_summary)


def _cmd_rates(doc: dict, out, seed):
    from . import asymp, estim
    pair = _pair_from(doc)
    process = doc.get("process", "mfou")
    if process not in ("mfou", "mfbm"):
        raise ConfigError([f"unknown process tag {process!r}"])
    try:
        rate = asymp.predicted_rate(pair.Hsum, process=process)
    except ValueError as exc:
        raise ConfigError([str(exc)]) from exc
    result = {
        "Hsum": pair.Hsum,
        "process": process,
        "rate": {"exponent": rate.exponent,
                 "log_correction": rate.log_correction,
                 "regime": rate.regime},
    }
    if doc.get("variances", True) and process == "mfou":
        s = int(doc.get("s", 1))
        K = int(doc.get("truncation", asymp.DEFAULT_TRUNCATION))
        H = pair.Hsum
        if H < asymp.CRITICAL_HSUM:
            co = estim.low_freq_coeffs(pair, s)
            low = asymp.var_limit_low_freq(pair, co, K=K)
            high = asymp.var_limit_high_freq(pair.H1, pair.H2, pair.rho,
                                             pair.eta12, K=K)
            result["var_limit_low_freq"] = {
                "value": low.value, "tail_bound": low.tail_bound,
                "truncation": low.truncation, "s": s}
            result["var_limit_high_freq"] = {
                "value": high.value, "tail_bound": high.tail_bound,
                "truncation": high.truncation}
        elif H > asymp.CRITICAL_HSUM:
            co = estim.low_freq_coeffs(pair, s)
            a_sum = co.a1 + co.a2 + co.a3
            result["var_limit_supercritical"] = {
                "value": asymp.var_limit_supercritical(pair, a_sum), "s": s}
    _write_json(out, result)


_DISPATCH = {
    "cov": _cmd_cov,
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "montecarlo": _cmd_montecarlo,
    "rates": _cmd_rates,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 1
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        _apply_threads(args.threads)
        doc = _load_config(args.config, args.subcommand)
        _DISPATCH[args.subcommand](doc, args.out, args.seed)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - contract: runtime failure -> 2
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
