import csv
import json

import numpy as np
import pytest


def write_report(tmp_path, name="run", ladder=(16, 64, 256), M=50,
                 estimands=("rho", "eta"), decay=0.5, process="mfou-exact",
                 H=(0.1, 0.2), seed=0):
    """Synthetic report files in the montecarlo output format.

    Per-replicate errors are Gaussian with standard deviation n^-decay,
    so the true RMSE follows an exact power law.
    """
    rng = np.random.default_rng(seed)
    errors = {est: {n: rng.standard_normal(M) * n ** -decay for n in ladder}
              for est in estimands}
    csv_path = tmp_path / f"{name}.csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "replicate", "estimand", "error"])
        for est in estimands:
            for n in ladder:
                for m, e in enumerate(errors[est][n]):
                    w.writerow([n, m, est, f"{e:.17g}"])

    x = np.log2(np.asarray(ladder, dtype=float))
    summary = {
        "config": {
            "pair": {"H1": H[0], "H2": H[1], "alpha1": 0.5, "alpha2": 0.5,
                     "nu1": 1.0, "nu2": 1.0, "rho": 0.5, "eta12": 0.2},
            "n_ladder": list(ladder),
            "M": M,
            "process": process,
        },
        "failures": 0,
        "per_n": {},
        "slopes": {},
    }
    for est in estimands:
        rmse = {n: float(np.sqrt(np.mean(errors[est][n] ** 2)))
                for n in ladder}
        summary["per_n"][est] = {
            str(n): {"rmse": rmse[n],
                     "mean": float(np.mean(errors[est][n])),
                     "stderr": float(np.std(errors[est][n], ddof=1)
                                     / np.sqrt(M))}
            for n in ladder
        }
        if len(ladder) >= 3:  # the montecarlo writer omits slopes otherwise
            y = np.log2([rmse[n] for n in ladder])
            slope, intercept = np.polyfit(x, y, 1)
            summary["slopes"][est] = {"slope": float(slope), "stderr": 0.01}
    json_path = tmp_path / f"{name}.json"
    json_path.write_text(json.dumps(summary, indent=2))
    return str(json_path)


@pytest.fixture
def report_path(tmp_path):
    return write_report(tmp_path)
