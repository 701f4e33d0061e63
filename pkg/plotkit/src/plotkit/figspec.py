from __future__ import annotations

from dataclasses import dataclass, field

from . import report

KINDS = ("loglog-rmse", "density-superposition", "rate-vs-H")
FORMATS = ("png", "svg")


@dataclass(frozen=True)
class FigureSpec:
    """One figure: which reports, which style, where to write it."""

    kind: str
    reports: tuple[str, ...]
    out: str
    fmt: str = "png"
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    # density panels only: rescaling exponent; None means use the
    # magnitude of the reported slope
    rate: float | None = field(default=None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise report.ReportError(f"unknown figure kind {self.kind!r}")
        if self.fmt not in FORMATS:
            raise report.ReportError(f"unknown format {self.fmt!r}")
        if not self.reports:
            raise report.ReportError("at least one report is required")
        if self.kind != "rate-vs-H" and len(self.reports) != 1:
            raise report.ReportError(
                f"{self.kind} takes exactly one report")

    def load_summaries(self) -> list[dict]:
        docs = [report.load_summary(p) for p in self.reports]
        tags = {report.estimands_of(d) for d in docs}
        if len(tags) != 1:
            raise report.ReportError(
                f"reports disagree on estimands: {sorted(tags)}")
        return docs
