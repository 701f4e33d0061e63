"""Acceptance: render every bundled reference experiment end to end.

The reports are produced by the ``mfou`` command-line tool (the only
interface between the two packages); each figure kind must render
without error and the log-log annotation must equal the reported slope
to three decimals.
"""

import json
import pathlib
import shutil
import subprocess

import pytest

from plotkit import FigureSpec, render
from plotkit.render import build_plot_data

CONFIG_DIR = pathlib.Path(__file__).resolve().parents[2] / "configs"

pytestmark = pytest.mark.skipif(shutil.which("mfou") is None,
                                reason="mfou command not installed")


@pytest.fixture(scope="module")
def reports(tmp_path_factory):
    out_dir = tmp_path_factory.mktemp("reports")
    paths = {}
    for cfg in sorted(CONFIG_DIR.glob("fig*.json")):
        out = out_dir / f"{cfg.stem}.json"
        subprocess.run(["mfou", "montecarlo", "--config", str(cfg),
                        "--out", str(out)], check=True, timeout=570)
        paths[cfg.stem] = str(out)
    return paths


def test_acceptance_10(reports, tmp_path):
    assert len(reports) == 6
    ok = True
    worst = 0.0
    for name, path in reports.items():
        out = tmp_path / f"{name}-loglog.png"
        spec = FigureSpec(kind="loglog-rmse", reports=(path,),
                          out=str(out), title=name)
        data = render(spec)
        assert out.exists() and out.stat().st_size > 0
        summary = json.loads(open(path).read())
        for panel in data["panels"]:
            want = summary["slopes"][panel["estimand"]]["slope"]
            got = float(panel["annotation"].split()[-1])
            worst = max(worst, abs(got - want))
            ok = ok and abs(got - want) < 5e-4

        dens = tmp_path / f"{name}-density.png"
        render(FigureSpec(kind="density-superposition", reports=(path,),
                          out=str(dens)))
        assert dens.exists()

    # rate-vs-H panel across the mean-reverting sweep points
    rv = tmp_path / "rates.svg"
    sweep = tuple(reports[k] for k in ("fig1", "fig2", "fig3"))
    render(FigureSpec(kind="rate-vs-H", reports=sweep, out=str(rv),
                      fmt="svg"))
    ok = ok and rv.exists()
    print(f"ACCEPTANCE 10: {'PASS' if ok else 'FAIL'} - six panels "
          f"rendered, max annotation-slope gap {worst:.2e} (tol 5e-4)")
    assert ok
