"""Covariance kernels of fractional Brownian motions and their OU counterparts.

The central quantity is the lagged cross-covariance

    r12(s) = Cov(Y1_{t+s}, Y2_t),   s >= 0,

of a stationary bivariate fractional OU pair, together with its
building block

    J12(s) = exp(-alpha1 * s) * I12(s),
    I12(s) = int_0^s exp(alpha1 u) (int_{-inf}^0 exp(alpha2 v)
             (u - v)^(H-2) dv) du,        H = H1 + H2.

The inner integral reduces to a scaled upper incomplete gamma function,
and working with the exponentially damped J12 keeps every factor
bounded for arbitrarily large lags.  Negative lags follow from the
exchange symmetry r12(-s) = r21(s), where swapping the components
negates eta12.

All formulas carry an H = 1 branch (logarithmic kernels) selected when
H1 + H2 is within ``HSUM_ONE_TOL`` of one.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from .model import HSUM_ONE_TOL, PairParams

__all__ = [
    "scaled_upper_gamma",
    "fbm_auto_cov",
    "mfbm_cross_cov",
    "I_integral",
    "J_integral",
    "stationary_cov",
    "stationary_corr",
    "cross_cov",
    "cross_cov_table",
    "auto_cov",
    "auto_cov_table",
    "auto_cov_spectral",
    "fou_variance",
    "longlag_cross_cov",
    "shortlag_cross_cov",
    "longlag_auto_cov",
    "shortlag_auto_cov",
]


# ---------------------------------------------------------------------------
# scaled upper incomplete gamma
# ---------------------------------------------------------------------------

_CF_CUTOVER = 30.0


def _gamma_cf(a, x):
    """Continued fraction for exp(x) * x^(-a) * Gamma(a, x), x large.

    Modified Lentz iteration of the classical continued fraction; valid
    (and fast) for x >= a + 1, which the cutover guarantees here.
    """
    tiny = 1e-300
    b = x + 1.0 - a
    c = np.full_like(b, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, 400):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = b + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return h


def scaled_upper_gamma(a: float, x) -> np.ndarray:
    """exp(x) * Gamma(a, x) for a in (-1, 1], x > 0, without overflow.

    Gamma(a, x) is the (unregularized) upper incomplete gamma function.
    For large x the continued fraction is used directly on the scaled
    quantity; for small x the positive-parameter values come from the
    regularized routine and negative parameters from one step of the
    downward recurrence

        exp(x) Gamma(a, x) = (exp(x) Gamma(a+1, x) - x^a) / a.

    ``a = 0`` is the exponential integral: exp(x) * E1(x).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("x must be positive")
    out = np.empty_like(x)
    hi = x >= _CF_CUTOVER
    if np.any(hi):
        xx = x[hi]
        out[hi] = np.power(xx, a) * _gamma_cf(a, xx)
    lo = ~hi
    if np.any(lo):
        xx = x[lo]
        if a == 0.0:
            out[lo] = np.exp(xx) * special.exp1(xx)
        elif a > 0.0:
            out[lo] = np.exp(xx) * special.gamma(a) * special.gammaincc(a, xx)
        else:
            g1 = np.exp(xx) * special.gamma(a + 1.0) * special.gammaincc(a + 1.0, xx)
            out[lo] = (g1 - np.power(xx, a)) / a
    return out


# ---------------------------------------------------------------------------
# fractional Brownian motion covariances
# ---------------------------------------------------------------------------

def fbm_auto_cov(t, s, H: float):
    """Cov(B_t, B_s) of fBm with Hurst H and Var(B_1) = 1."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    return 0.5 * (np.abs(t) ** (2 * H) + np.abs(s) ** (2 * H) - np.abs(t - s) ** (2 * H))


def _sgn(x):
    # sign with the convention sign(0) = +1
    return np.where(np.asarray(x, dtype=float) >= 0.0, 1.0, -1.0)


def _xlogabs(x):
    # x * log|x| with the convention 0 * log 0 = 0
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = x * np.log(np.abs(x))
    return np.where(x == 0.0, 0.0, v)


def mfbm_cross_cov(t, s, H1: float, H2: float, rho: float, eta12: float):
    """Cov(B1_t, B2_s) of a cross-correlated fBm pair.

    Uses the power-law kernel for H1 + H2 != 1 and the logarithmic
    kernel on the singular line H1 + H2 = 1.
    """
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    H = H1 + H2
    if abs(H - 1.0) <= HSUM_ONE_TOL:
        return 0.5 * (
            rho * (np.abs(s) + np.abs(t) - np.abs(s - t))
            + eta12 * (_xlogabs(s) - _xlogabs(t) - _xlogabs(s - t))
        )
    return 0.5 * (
        (rho + _sgn(t) * eta12) * np.abs(t) ** H
        + (rho - _sgn(s) * eta12) * np.abs(s) ** H
        - (rho - _sgn(s - t) * eta12) * np.abs(s - t) ** H
    )


# ---------------------------------------------------------------------------
# the damped kernel integral J
# ---------------------------------------------------------------------------

# exp(alpha1 * (u - s)) below exp(-_WINDOW) is treated as zero.
_WINDOW = 80.0


def J_integral(s: float, alpha1: float, alpha2: float, H: float) -> float:
    """exp(-alpha1 s) * I12(s) for a single nonnegative lag s.

    Evaluates alpha2^(1-H) * int_0^s exp(alpha1 (u - s)) * G(H-1, alpha2 u) du
    with G the scaled upper incomplete gamma; the integrand is bounded
    uniformly in s, and for large s the integration window is clipped to
    the support of the exponential factor.
    """
    if s < 0:
        raise ValueError("lag must be nonnegative")
    if s == 0.0:
        return 0.0
    a = H - 1.0
    lo = max(0.0, s - _WINDOW / alpha1)

    def f(u):
        return math.exp(alpha1 * (u - s)) * float(scaled_upper_gamma(a, u * alpha2))

    if lo == 0.0 and a < 0.0:
        # remove the u^(H-1) endpoint singularity with u = w^(1/H)
        split = min(s, 1.0 / alpha2)

        def g(w):
            if w <= 0.0:
                return 0.0
            u = w ** (1.0 / H)
            return f(u) * w ** (1.0 / H - 1.0) / H

        val, _ = integrate.quad(g, 0.0, split ** H,
                                epsabs=1e-13, epsrel=1e-12, limit=200)
        if split < s:
            v2, _ = integrate.quad(f, split, s, epsabs=1e-13, epsrel=1e-12, limit=200)
            val += v2
    else:
        val, _ = integrate.quad(f, lo, s, epsabs=1e-13, epsrel=1e-12, limit=200)
    return alpha2 ** (1.0 - H) * val


def I_integral(t: float, alpha1: float, alpha2: float, H: float) -> float:
    """The undamped double integral I12(t); grows like exp(alpha1 t).

    Prefer :func:`J_integral` in downstream formulas — it carries the
    exp(-alpha1 t) damping that every covariance expression ends up
    multiplying back in anyway.
    """
    return math.exp(alpha1 * t) * J_integral(t, alpha1, alpha2, H)


def _J_table(delta: float, nlags: int, alpha1: float, alpha2: float, H: float) -> np.ndarray:
    """J12 at lags 0, delta, ..., nlags*delta via a panel recursion.

    Uses J(s + delta) = exp(-alpha1 delta) J(s) + (panel integral) with
    Gauss-Legendre panels evaluated vectorized over all lags; the first
    panel (which may contain an integrable singularity) falls back to
    adaptive quadrature.
    """
    a = H - 1.0
    # subdivide each step so the exponential factor stays well resolved
    nsub = max(1, int(math.ceil(delta * max(alpha1, alpha2, 1.0))))
    xg, wg = np.polynomial.legendre.leggauss(24)
    h = delta / nsub
    # nodes over (nlags * nsub) panels covering (0, nlags*delta]
    edges = np.arange(nlags * nsub) * h
    u = edges[:, None] + 0.5 * h * (xg[None, :] + 1.0)
    g = scaled_upper_gamma(a, alpha2 * np.maximum(u, 1e-300))
    # panel integral carrying the damping to the panel's right edge
    damp = np.exp(alpha1 * (u - (edges[:, None] + h)))
    panels = 0.5 * h * np.sum(wg[None, :] * damp * g, axis=1)
    # collapse subpanels into full steps (each damped to the step's right edge)
    dec_sub = math.exp(-alpha1 * h)
    steps = np.zeros(nlags)
    for k in range(nsub):
        steps += panels[k::nsub] * dec_sub ** (nsub - 1 - k)
    J = np.zeros(nlags + 1)
    dec = math.exp(-alpha1 * delta)
    for k in range(nlags):
        J[k + 1] = J[k] * dec + steps[k]
    # the first step contains the u -> 0 singularity: redo it accurately
    J1 = J_integral(delta, alpha1, alpha2, H) / alpha2 ** (1.0 - H)
    corr = J1 - steps[0]
    # propagate the first-panel correction down the recursion
    J[1:] += corr * dec ** np.arange(nlags)
    return alpha2 ** (1.0 - H) * J


# ---------------------------------------------------------------------------
# stationary covariances of the fractional OU pair
# ---------------------------------------------------------------------------

def _is_log_branch(p: PairParams) -> bool:
    return abs(p.Hsum - 1.0) <= HSUM_ONE_TOL


def stationary_cov(p: PairParams) -> float:
    """Lag-zero cross-covariance Cov(Y1_t, Y2_t)."""
    a1, a2 = p.alpha1, p.alpha2
    if _is_log_branch(p):
        return p.nu1 * p.nu2 / (a1 + a2) * (
            p.rho + 0.5 * p.eta12 * (math.log(a2) - math.log(a1))
        )
    H = p.Hsum
    return (
        math.gamma(H + 1) * p.nu1 * p.nu2 / (2 * (a1 + a2))
        * ((a1 ** (1 - H) + a2 ** (1 - H)) * p.rho
           + (a2 ** (1 - H) - a1 ** (1 - H)) * p.eta12)
    )


def stationary_corr(p: PairParams) -> float:
    """Lag-zero cross-correlation Corr(Y1_t, Y2_t)."""
    a1, a2 = p.alpha1, p.alpha2
    H1, H2 = p.H1, p.H2
    gg = math.sqrt(math.gamma(2 * H1 + 1) * math.gamma(2 * H2 + 1))
    if _is_log_branch(p):
        return (2 * a1 ** H1 * a2 ** H2 / (a1 + a2)) / gg * (
            p.rho + 0.5 * p.eta12 * (math.log(a2) - math.log(a1))
        )
    H = p.Hsum
    return (
        math.gamma(H + 1) / gg * (a1 ** H1 * a2 ** H2 / (a1 + a2))
        * ((a1 ** (1 - H) + a2 ** (1 - H)) * p.rho
           + (a2 ** (1 - H) - a1 ** (1 - H)) * p.eta12)
    )


def _cross_cov_pos(p: PairParams, s: float) -> float:
    """r12(s) for a single s >= 0."""
    c0 = stationary_cov(p)
    if s == 0.0:
        return c0
    J = J_integral(s, p.alpha1, p.alpha2, p.Hsum)
    damp = math.exp(-p.alpha1 * s)
    if _is_log_branch(p):
        return damp * c0 - p.nu1 * p.nu2 * 0.5 * p.eta12 * J
    H = p.Hsum
    kappa = 0.5 * (p.rho + p.eta12)
    return damp * c0 + p.nu1 * p.nu2 * H * (H - 1) * kappa * J


def cross_cov(p: PairParams, s) -> np.ndarray:
    """Cross-covariance r12(s) = Cov(Y1_{t+s}, Y2_t), any real lag(s).

    Negative lags use the exchange symmetry r12(-s) = r21(s).
    """
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    q = p.swapped()
    out = np.array([
        _cross_cov_pos(p, float(v)) if v >= 0 else _cross_cov_pos(q, float(-v))
        for v in s
    ])
    return out[0] if scalar else out


def cross_cov_table(p: PairParams, delta: float, nlags: int) -> tuple[np.ndarray, np.ndarray]:
    """(r12, r21) at lags 0, delta, ..., nlags*delta, computed in bulk.

    Equivalent to calling :func:`cross_cov` lag by lag but much faster:
    the damped kernel integral is advanced one panel at a time, so the
    whole table costs a single pass of vectorized quadrature.
    """
    c0 = stationary_cov(p)
    out = []
    for pp in (p, p.swapped()):
        J = _J_table(delta, nlags, pp.alpha1, pp.alpha2, pp.Hsum)
        damp = np.exp(-pp.alpha1 * delta * np.arange(nlags + 1))
        if _is_log_branch(pp):
            r = damp * c0 - pp.nu1 * pp.nu2 * 0.5 * pp.eta12 * J
        else:
            H = pp.Hsum
            kappa = 0.5 * (pp.rho + pp.eta12)
            r = damp * c0 + pp.nu1 * pp.nu2 * H * (H - 1) * kappa * J
        out.append(r)
    return out[0], out[1]


# ---------------------------------------------------------------------------
# univariate fractional OU: exact reduction of the pair formulas
# ---------------------------------------------------------------------------

def _diag_pair(H: float, alpha: float, nu: float) -> PairParams:
    return PairParams(H1=H, H2=H, alpha1=alpha, alpha2=alpha,
                      nu1=nu, nu2=nu, rho=1.0, eta12=0.0)


def fou_variance(H: float, alpha: float, nu: float) -> float:
    """Stationary variance nu^2 Gamma(2H+1) / (2 alpha^(2H))."""
    return nu ** 2 * math.gamma(2 * H + 1) / (2 * alpha ** (2 * H))


def auto_cov(H: float, alpha: float, nu: float, s) -> np.ndarray:
    """Autocovariance of the univariate fractional OU process.

    The univariate process is the diagonal of the pair formulas
    (rho = 1, eta = 0), so this is exact, not an approximation.
    """
    return cross_cov(_diag_pair(H, alpha, nu), np.abs(np.asarray(s, dtype=float)))


def auto_cov_table(H: float, alpha: float, nu: float, delta: float, nlags: int) -> np.ndarray:
    r, _ = cross_cov_table(_diag_pair(H, alpha, nu), delta, nlags)
    return r


def auto_cov_spectral(H: float, alpha: float, nu: float, s: float) -> float:
    """Autocovariance via the spectral representation (independent route).

    r(s) = nu^2 Gamma(2H+1) sin(pi H) / pi *
           int_0^inf cos(s x) x^(1-2H) / (alpha^2 + x^2) dx.

    Slower than :func:`auto_cov` but structurally unrelated to it; kept
    as a cross-check of the kernel-integral route.
    """
    s = abs(float(s))
    pref = nu ** 2 * math.gamma(2 * H + 1) * math.sin(math.pi * H) / math.pi

    def f(x):
        return x ** (1.0 - 2 * H) / (alpha ** 2 + x ** 2)

    if s == 0.0:
        v1, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
        v2, _ = integrate.quad(f, 1.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
        return pref * (v1 + v2)
    v1, _ = integrate.quad(lambda x: math.cos(s * x) * f(x), 0.0, 1.0,
                           epsabs=1e-13, epsrel=1e-12, limit=400)
    v2, _ = integrate.quad(f, 1.0, np.inf, weight="cos", wvar=s, limit=400)
    return pref * (v1 + v2)


# ---------------------------------------------------------------------------
# asymptotic expansions
# ---------------------------------------------------------------------------

def longlag_cross_cov(p: PairParams, s, N: int = 8) -> np.ndarray:
    """Large-lag expansion of r12(s), polynomial decay of order s^(H-2).

    On the line H1 + H2 = 1 the leading term is the pure 1/s decay
    driven by eta alone.
    """
    s = np.asarray(s, dtype=float)
    a1, a2 = p.alpha1, p.alpha2
    nn = p.nu1 * p.nu2
    if _is_log_branch(p):
        out = -nn * p.eta12 / (2 * a1 * a2) / s
        acc = np.zeros_like(s)
        for n in range(1, N + 1):
            prod = 1.0
            for k in range(n):
                prod *= (-k - 1.0)
            acc += ((-1.0) ** n / a1 ** (n + 1) + 1.0 / a2 ** (n + 1)) * prod * s ** (-1.0 - n)
        return out - nn * p.eta12 / (2 * (a1 + a2)) * acc
    H = p.Hsum
    pref = nn * (p.rho + p.eta12) / (2 * (a1 + a2))
    acc = np.zeros_like(s)
    for n in range(N + 1):
        prod = 1.0
        for k in range(n + 2):
            prod *= (H - k)
        acc += ((-1.0) ** n / a1 ** (n + 1) + 1.0 / a2 ** (n + 1)) * prod * s ** (H - 2.0 - n)
    return pref * acc


def shortlag_cross_cov(p: PairParams, s) -> np.ndarray:
    """Small-lag expansion of r12(s) through order s^2 (resp. s log s)."""
    s = np.asarray(s, dtype=float)
    c0 = stationary_cov(p)
    nn = p.nu1 * p.nu2
    if _is_log_branch(p):
        return c0 + nn * 0.5 * p.eta12 * _xlogabs(s)
    H = p.Hsum
    a1, a2 = p.alpha1, p.alpha2
    kappa = 0.5 * (p.rho + p.eta12)
    g = math.gamma(H + 1)
    return (
        c0
        - nn * kappa * s ** H
        + (-a1 * c0 + a2 ** (1 - H) * g * nn * kappa) * s
        + (a1 - a2) * nn * kappa / (H + 1) * s ** (1 + H)
        + (0.5 * a1 ** 2 * c0
           - 0.5 * nn * kappa * g * (a1 * a2 ** (1 - H) - a2 ** (2 - H))) * s ** 2
    )


def longlag_auto_cov(H: float, alpha: float, nu: float, s, N: int = 4) -> np.ndarray:
    """Large-lag autocovariance expansion: sum of s^(2H-2n) terms."""
    s = np.asarray(s, dtype=float)
    acc = np.zeros_like(s)
    for n in range(1, N + 1):
        prod = 1.0
        for k in range(2 * n):
            prod *= (2 * H - k)
        acc += alpha ** (-2 * n) * prod * s ** (2 * H - 2 * n)
    return 0.5 * nu ** 2 * acc


def shortlag_auto_cov(H: float, alpha: float, nu: float, s) -> np.ndarray:
    """Small-lag autocovariance expansion through order s^(2H+2)."""
    s = np.asarray(s, dtype=float)
    v = fou_variance(H, alpha, nu)
    return (
        v - 0.5 * nu ** 2 * s ** (2 * H) + 0.5 * alpha ** 2 * v * s ** 2
        - alpha ** 2 * nu ** 2 * s ** (2 * H + 2) / (4 * (H + 1) * (1 + 2 * H))
    )
