"""Estimators of the cross-correlation and volatility parameters.

Two families for the pair parameters (rho, eta12):

* low-frequency: invert the exact lagged cross-covariance formulas,
  replacing theoretical covariances by sample averages over a unit-
  spaced grid; requires the marginal parameters (H, alpha, nu).
* high-frequency: quadratic-covariation style sums over a fine grid;
  needs only (H, nu), not the mean-reversion rates.

Plus the two matching estimators of the squared volatility nu^2 of a
univariate process.

All estimators are plain functions of the observed arrays; feeding the
components in swapped order negates the eta estimate and leaves the
rho estimate unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import HSUM_ONE_TOL, PairParams

__all__ = [
    "LagCoefficients",
    "EstimateResult",
    "low_freq_coeffs",
    "rescale_pair",
    "estimate_low_freq",
    "estimate_low_freq_corr",
    "rho_from_corr0",
    "estimate_high_freq",
    "estimate_nu_low",
    "estimate_nu_high",
]


@dataclass(frozen=True)
class LagCoefficients:
    """Inversion coefficients of the lagged-covariance system at lag s.

    rho  = a1*r12(0) + a2*r12(s) + a3*r21(s)
    eta  = b1*r12(0) + b2*r12(s) + b3*r21(s)
    """

    s: int
    a1: float
    a2: float
    a3: float
    b1: float
    b2: float
    b3: float


@dataclass
class EstimateResult:
    estimator: str
    n: int
    rho_hat: float | None = None
    eta_hat: float | None = None
    nu2_hat: float | None = None
    s: int | None = None
    delta: float | None = None
    advisory: str | None = None

    def to_dict(self) -> dict:
        out = {"estimator": self.estimator, "n": self.n}
        for k in ("rho_hat", "eta_hat", "nu2_hat", "s", "delta", "advisory"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        return out


def _check_hsum(p: PairParams):
    if abs(p.Hsum - 1.0) <= HSUM_ONE_TOL:
        raise ValueError("inversion undefined at H1+H2 = 1")


def low_freq_coeffs(p: PairParams, s: int) -> LagCoefficients:
    """Coefficients (a_i, b_i) of the exact covariance inversion.

    Internally everything is expressed through the damped integrals
    J12 = exp(-alpha1 s) I12(s), J21 = exp(-alpha2 s) I21(s), so no
    exponential of alpha*s is ever formed.
    """
    if s < 1:
        raise ValueError("lag s must be a positive integer")
    _check_hsum(p)
    H = p.Hsum
    c = p.nu1 * p.nu2 * H * (H - 1.0)
    J12 = kernels.J_integral(float(s), p.alpha1, p.alpha2, H)
    J21 = kernels.J_integral(float(s), p.alpha2, p.alpha1, H)
    a2 = 1.0 / (c * J12)
    a3 = 1.0 / (c * J21)
    e1 = math.exp(-p.alpha1 * s)
    e2 = math.exp(-p.alpha2 * s)
    a1 = -(e1 * a2 + e2 * a3)
    b1 = -e1 * a2 + e2 * a3
    return LagCoefficients(s=s, a1=a1, a2=a2, a3=a3, b1=b1, b2=a2, b3=-a3)


def rescale_pair(p: PairParams, delta: float) -> PairParams:
    """Pair parameters of the time-rescaled process t -> t/delta.

    Observations on a delta-spaced grid become unit-spaced; alpha picks
    up a factor delta and nu a factor delta^H (self-similarity of the
    driving noise), while (rho, eta) are invariant.
    """
    return PairParams(
        H1=p.H1, H2=p.H2,
        alpha1=p.alpha1 * delta, alpha2=p.alpha2 * delta,
        nu1=p.nu1 * delta ** p.H1, nu2=p.nu2 * delta ** p.H2,
        rho=p.rho, eta12=p.eta12,
    )


def _lagged_sums(y1: np.ndarray, y2: np.ndarray, s: int):
    """(1/n) sums over j = 1..n and j = 1..n-s of the three products."""
    n = len(y1) - 1
    if n <= s:
        raise ValueError("insufficient observations: need n > s")
    S0 = float(np.dot(y1[1:], y2[1:])) / n
    S12 = float(np.dot(y1[1 + s:], y2[1:n - s + 1])) / n
    S21 = float(np.dot(y1[1:n - s + 1], y2[1 + s:])) / n
    return n, S0, S12, S21


def estimate_low_freq(y1, y2, p: PairParams, s: int = 1,
                      delta: float = 1.0) -> EstimateResult:
    """Low-frequency (rho_hat, eta_hat) from unit-lag sample covariances.

    ``y1``, ``y2`` are the component samples at times 0, delta, ...,
    n*delta.  For delta != 1 the parameters are rescaled so the grid is
    unit-spaced (see :func:`rescale_pair`); the lag ``s`` counts grid
    steps.  All three sums carry the same 1/n normalization, so the
    estimator has the documented O(s/n) edge bias and nothing else.
    """
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    pp = rescale_pair(p, delta) if delta != 1.0 else p
    co = low_freq_coeffs(pp, s)
    n, S0, S12, S21 = _lagged_sums(y1, y2, s)
    return EstimateResult(
        estimator="low-freq-cov", n=n, s=s, delta=delta,
        rho_hat=co.a1 * S0 + co.a2 * S12 + co.a3 * S21,
        eta_hat=co.b1 * S0 + co.b2 * S12 + co.b3 * S21,
    )


def estimate_low_freq_corr(y1, y2, p: PairParams, s: int = 1,
                           delta: float = 1.0) -> EstimateResult:
    """Correlation-based variant of the low-frequency estimator.

    Normalizes the three sample covariances by the sample standard
    deviations and applies the corresponding closed-form coefficients;
    coincides with :func:`estimate_low_freq` when the sample variances
    equal the true ones.
    """
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    pp = rescale_pair(p, delta) if delta != 1.0 else p
    _check_hsum(pp)
    H = pp.Hsum
    n, S0, S12, S21 = _lagged_sums(y1, y2, s)
    v1 = float(np.dot(y1[1:], y1[1:])) / n
    v2 = float(np.dot(y2[1:], y2[1:])) / n
    norm = math.sqrt(v1 * v2)
    c = (math.sqrt(math.gamma(2 * pp.H1 + 1) * math.gamma(2 * pp.H2 + 1))
         / (2 * pp.alpha1 ** pp.H1 * pp.alpha2 ** pp.H2 * H * (H - 1.0)))
    J12 = kernels.J_integral(float(s), pp.alpha1, pp.alpha2, H)
    J21 = kernels.J_integral(float(s), pp.alpha2, pp.alpha1, H)
    e1 = math.exp(-pp.alpha1 * s)
    e2 = math.exp(-pp.alpha2 * s)
    # 1/I12 = e1/J12 and exp(alpha1 s)/I12 = 1/J12, all overflow-free
    corr0, corr12, corr21 = S0 / norm, S12 / norm, S21 / norm
    rho_hat = c * (-(e1 / J12 + e2 / J21) * corr0
                   + corr12 / J12 + corr21 / J21)
    eta_hat = c * (-(e1 / J12 - e2 / J21) * corr0
                   + corr12 / J12 - corr21 / J21)
    return EstimateResult(estimator="low-freq-corr", n=n, s=s, delta=delta,
                          rho_hat=rho_hat, eta_hat=eta_hat)


def rho_from_corr0(p: PairParams, corr0: float) -> float:
    """rho from the lag-zero correlation alone, valid when eta12 = 0."""
    _check_hsum(p)
    H = p.Hsum
    a1, a2 = p.alpha1, p.alpha2
    return (math.sqrt(math.gamma(2 * p.H1 + 1) * math.gamma(2 * p.H2 + 1))
            / math.gamma(H + 1)
            * (a1 + a2) / (a1 ** p.H1 * a2 ** p.H2
                           * (a1 ** (1 - H) + a2 ** (1 - H)))
            * corr0)


def estimate_high_freq(y1, y2, H1: float, H2: float, nu1: float, nu2: float,
                       delta: float) -> EstimateResult:
    """High-frequency (rho_tilde, eta_tilde); free of alpha.

    rho_tilde averages increment products scaled by delta^(H1+H2);
    eta_tilde averages the antisymmetric products Y1_k Y2_{k+1} -
    Y1_{k+1} Y2_k.  The eta estimate is flagged as unsupported by the
    consistency theory when H1 + H2 >= 1.
    """
    H = H1 + H2
    if abs(H - 1.0) <= HSUM_ONE_TOL:
        raise ValueError("singular H1+H2 = 1 scaling (s log s short-lag term)")
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    n = len(y1) - 1
    if n < 1:
        raise ValueError("need at least one increment")
    scale = nu1 * nu2 * n * delta ** H
    d1 = np.diff(y1)
    d2 = np.diff(y2)
    rho_hat = float(np.dot(d1, d2)) / scale
    eta_hat = float(np.dot(y1[:-1], y2[1:]) - np.dot(y1[1:], y2[:-1])) / scale
    advisory = "eta consistency unproven for H1+H2 >= 1" if H >= 1.0 else None
    return EstimateResult(estimator="high-freq", n=n, delta=delta,
                          rho_hat=rho_hat, eta_hat=eta_hat, advisory=advisory)


def estimate_nu_low(y, alpha: float, H: float, s: int = 1) -> EstimateResult:
    """Low-frequency squared-volatility estimator for a univariate path.

    Uses the collapsed-pair inversion coefficients
    abar1 = -1 / (H (2H - 1) I(s)), abar2 = 1 / (H (2H - 1) e^{-as} I(s))
    applied to the lag-0 and lag-s sample second moments.
    """
    if abs(H - 0.5) < 1e-9:
        raise ValueError("excluded Hurst value 1/2")
    if s < 1:
        raise ValueError("lag s must be a positive integer")
    y = np.asarray(y, dtype=float)
    n = len(y) - 1
    if n <= s:
        raise ValueError("insufficient observations: need n > s")
    J = kernels.J_integral(float(s), alpha, alpha, 2 * H)
    denom = H * (2 * H - 1.0)
    abar1 = -math.exp(-alpha * s) / (denom * J)
    abar2 = 1.0 / (denom * J)
    S0 = float(np.dot(y[:n], y[:n])) / n
    Ss = float(np.dot(y[s:n + 1], y[:n - s + 1])) / n
    return EstimateResult(estimator="nu-low", n=n, s=s,
                          nu2_hat=abar1 * S0 + abar2 * Ss)


def estimate_nu_high(y, H: float, delta: float) -> EstimateResult:
    """Quadratic-variation squared-volatility estimator."""
    if abs(H - 0.5) < 1e-9:
        raise ValueError("excluded Hurst value 1/2")
    y = np.asarray(y, dtype=float)
    n = len(y) - 1
    if n < 1:
        raise ValueError("need at least one increment")
    d = np.diff(y)
    return EstimateResult(estimator="nu-high", n=n, delta=delta,
                          nu2_hat=float(np.dot(d, d)) / (n * delta ** (2 * H)))
