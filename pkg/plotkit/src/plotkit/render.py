"""Figure construction.

Each figure kind has a pure ``plot_data_*`` builder returning a plain
JSON-serializable dict -- the "plot definition" -- and a drawing step
that only consumes that dict.  Rerendering the same inputs yields an
identical plot definition; image bytes are left to the backend.
"""

from __future__ import annotations

import math
import os
import tempfile

import numpy as np

from . import report
from .figspec import FigureSpec

PRETTY = {"rho": r"$\rho$", "eta": r"$\eta$", "nu2": r"$\nu^2$"}
DENSITY_BINS = 48


def _pretty(estimand: str) -> str:
    return PRETTY.get(estimand, estimand)


def plot_data_loglog(summary: dict) -> dict:
    ladder = summary["config"]["n_ladder"]
    panels = []
    for est in report.estimands_of(summary):
        per_n = summary["per_n"][est]
        rmse = [per_n[str(n)]["rmse"] for n in ladder]
        slope = summary.get("slopes", {}).get(est)
        if slope is None:
            raise report.ReportError(
                "summary carries no fitted slopes (ladder shorter than 3?)")
        panels.append({
            "estimand": est,
            "n": list(ladder),
            "rmse": rmse,
            "slope": slope["slope"],
            "slope_stderr": slope["stderr"],
            "annotation": f"slope {slope['slope']:.3f}",
        })
    return {"kind": "loglog-rmse", "panels": panels}


def plot_data_density(summary: dict, errors: dict,
                      rate: float | None = None) -> dict:
    ladder = summary["config"]["n_ladder"]
    panels = []
    for est in report.estimands_of(summary):
        if est not in errors:
            raise report.ReportError(
                f"raw-error file has no rows for estimand {est!r}")
        r = rate
        if r is None:
            slope = summary.get("slopes", {}).get(est)
            r = -slope["slope"] if slope else 0.5
        curves = []
        ref_mu = ref_sd = 0.0
        for n in ladder:
            e = np.asarray(errors[est][n]) * float(n) ** r
            mu, sd = float(np.mean(e)), float(np.std(e, ddof=1))
            lo, hi = mu - 5 * sd, mu + 5 * sd
            dens, edges = np.histogram(e, bins=DENSITY_BINS, range=(lo, hi),
                                       density=True)
            curves.append({"n": n, "edges": edges.tolist(),
                           "density": dens.tolist()})
            ref_mu, ref_sd = mu, sd  # Gaussian matched to the largest n
        xs = np.linspace(ref_mu - 5 * ref_sd, ref_mu + 5 * ref_sd, 200)
        gauss = np.exp(-0.5 * ((xs - ref_mu) / ref_sd) ** 2) \
            / (ref_sd * math.sqrt(2 * math.pi))
        panels.append({
            "estimand": est,
            "rate": r,
            "curves": curves,
            "gaussian": {"x": xs.tolist(), "y": gauss.tolist(),
                         "mean": ref_mu, "std": ref_sd},
        })
    return {"kind": "density-superposition", "panels": panels}


def _theory_line(process: str) -> dict:
    if process == "mfbm":
        xs = np.linspace(0.02, 0.98, 97)
        ys = np.minimum(0.5, 1.0 - xs)
        label = r"$\min(1/2,\ 1-H)$"
    else:
        xs = np.linspace(0.02, 1.98, 197)
        ys = np.minimum(0.5, 2.0 - xs)
        label = r"$\min(1/2,\ 2-H)$"
    return {"H": xs.tolist(), "rate": ys.tolist(), "label": label}


def plot_data_rates(summaries: list[dict]) -> dict:
    processes = {s["config"].get("process", "mfou-exact") for s in summaries}
    tag = "mfbm" if processes == {"mfbm"} else "mfou"
    if len(processes) > 1:
        raise report.ReportError(
            f"reports mix processes: {sorted(processes)}")
    points = {est: [] for est in report.estimands_of(summaries[0])}
    for s in summaries:
        pair = s["config"]["pair"]
        H = pair["H1"] + pair["H2"]
        for est in points:
            slope = s.get("slopes", {}).get(est)
            if slope is None:
                raise report.ReportError(
                    "summary carries no fitted slopes (ladder shorter than 3?)")
            points[est].append({"H": H, "rate": -slope["slope"],
                                "stderr": slope["stderr"]})
    for est in points:
        points[est].sort(key=lambda d: d["H"])
    return {"kind": "rate-vs-H", "process": tag, "points": points,
            "theory": _theory_line(tag)}


def build_plot_data(spec: FigureSpec) -> dict:
    docs = spec.load_summaries()
    if spec.kind == "loglog-rmse":
        return plot_data_loglog(docs[0])
    if spec.kind == "density-superposition":
        errors = report.load_errors(report.errors_path_for(spec.reports[0]))
        return plot_data_density(docs[0], errors, rate=spec.rate)
    return plot_data_rates(docs)


def _draw(spec: FigureSpec, data: dict):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if data["kind"] == "loglog-rmse":
        panels = data["panels"]
        fig, axes = plt.subplots(len(panels), 1, figsize=(6, 3 * len(panels)),
                                 squeeze=False, sharex=True)
        for ax, panel in zip(axes[:, 0], panels):
            ax.loglog(panel["n"], panel["rmse"], "o-", base=2)
            ax.annotate(panel["annotation"], xy=(0.05, 0.08),
                        xycoords="axes fraction")
            ax.set_ylabel(f"RMSE of {_pretty(panel['estimand'])}")
            ax.grid(True, which="both", alpha=0.3)
        axes[-1, 0].set_xlabel(spec.xlabel or "n")
    elif data["kind"] == "density-superposition":
        panels = data["panels"]
        fig, axes = plt.subplots(len(panels), 1, figsize=(6, 3 * len(panels)),
                                 squeeze=False)
        for ax, panel in zip(axes[:, 0], panels):
            for curve in panel["curves"]:
                edges = np.asarray(curve["edges"])
                mids = 0.5 * (edges[:-1] + edges[1:])
                ax.plot(mids, curve["density"], label=f"n={curve['n']}")
            g = panel["gaussian"]
            ax.plot(g["x"], g["y"], "k--", label="Gaussian fit")
            ax.set_ylabel(f"density, {_pretty(panel['estimand'])}")
            ax.legend(fontsize=8)
        axes[-1, 0].set_xlabel(spec.xlabel
                               or "rescaled estimation error")
    else:
        fig, ax = plt.subplots(figsize=(6, 4))
        th = data["theory"]
        ax.plot(th["H"], th["rate"], "k--", label=th["label"])
        for est, pts in data["points"].items():
            ax.errorbar([p["H"] for p in pts], [p["rate"] for p in pts],
                        yerr=[p["stderr"] for p in pts], fmt="o",
                        label=_pretty(est))
        ax.set_xlabel(spec.xlabel or "H")
        ax.set_ylabel(spec.ylabel or "measured rate exponent")
        ax.legend()
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> dict:
    """Build the plot definition, draw it, and write the image.

    The image is written via a temporary file and an atomic rename so a
    failure never leaves a partial file.  Returns the plot definition.
    """
    data = build_plot_data(spec)
    fig = _draw(spec, data)
    directory = os.path.dirname(os.path.abspath(spec.out)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".plotkit-tmp-",
                               suffix="." + spec.fmt)
    os.close(fd)
    try:
        fig.savefig(tmp, format=spec.fmt)
        os.replace(tmp, spec.out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        import matplotlib.pyplot as plt
        plt.close(fig)
    return data
