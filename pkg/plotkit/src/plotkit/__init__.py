"""Static figure generation from Monte Carlo estimation reports.

The scripts consume the report files written by the ``mfou montecarlo``
command -- a raw-error CSV (columns n, replicate, estimand, error) and a
summary JSON -- and never recompute any statistics beyond axis
transforms.  One script per figure kind:

    plotkit-loglog    log-log RMSE vs n with the reported slope annotated
    plotkit-density   superposed densities of rescaled errors + Gaussian
    plotkit-rates     measured rate vs H with the theoretical broken line
"""

from .figspec import FigureSpec
from .render import render
from .report import ReportError, load_errors, load_summary

__all__ = ["FigureSpec", "render", "ReportError", "load_errors",
           "load_summary"]

__version__ = "0.1.0"
