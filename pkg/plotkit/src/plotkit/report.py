"""Readers for the Monte Carlo report file formats.

Two files per experiment: ``<base>.json`` (config echo, per-n summary
statistics, fitted slopes) and ``<base>.csv`` (one row per replicate
with columns n, replicate, estimand, error).
"""

from __future__ import annotations

import csv
import json
import os


class ReportError(Exception):
    """A report file is missing, malformed, or inconsistent."""


def load_summary(path: str) -> dict:
    if not os.path.exists(path):
        raise ReportError(f"report not found: {path}")
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ReportError(f"{path} is not valid JSON: {exc}") from exc
    for key in ("config", "per_n"):
        if key not in doc:
            raise ReportError(f"{path} lacks the {key!r} section")
    ladder = doc["config"].get("n_ladder", [])
    if not ladder:
        raise ReportError(f"{path} has an empty sample-size ladder")
    return doc


def errors_path_for(summary_path: str) -> str:
    base = summary_path
    if base.endswith(".json"):
        base = base[: -len(".json")]
    return base + ".csv"


def load_errors(path: str) -> dict[str, dict[int, list[float]]]:
    """Raw per-replicate errors keyed by estimand, then by n."""
    if not os.path.exists(path):
        raise ReportError(f"raw-error file not found: {path}")
    out: dict[str, dict[int, list[float]]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        expected = {"n", "replicate", "estimand", "error"}
        if reader.fieldnames is None or not expected <= set(reader.fieldnames):
            raise ReportError(f"{path} lacks columns {sorted(expected)}")
        for rec in reader:
            out.setdefault(rec["estimand"], {}).setdefault(
                int(rec["n"]), []).append(float(rec["error"]))
    if not out:
        raise ReportError(f"{path} contains no error rows")
    return out


def estimands_of(summary: dict) -> tuple[str, ...]:
    return tuple(sorted(summary["per_n"]))
