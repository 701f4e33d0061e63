"""Parameter records for the multivariate fractional processes.

A d-variate model is described by per-component Hurst exponents ``H``,
mean-reversion rates ``alpha``, volatility scales ``nu`` and the two
cross matrices ``rho`` (symmetric, unit diagonal) and ``eta``
(antisymmetric, zero diagonal).  The variance of each driving fBm at
time 1 is fixed to one.

Admissibility of a pair (rho, eta12) is an ellipse in the (rho, eta)
plane whose semi-axes depend on the two Hurst exponents; the coherence
functional below evaluates the corresponding quadratic form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

# Tolerances used across the package.
COHERENCE_TOL = 1e-12
HALF_EXCLUSION = 1e-9
HSUM_ONE_TOL = 1e-6


class InvalidModelError(ValueError):
    """Raised when a parameter set violates the model constraints."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def coherence(H1: float, H2: float, rho: float, eta12: float) -> float:
    """Coherence functional C12 of a cross-correlated fBm pair.

    The pair (rho, eta12) is admissible iff the returned value is <= 1.
    The quadratic form switches to a log-free variant on the singular
    line H1 + H2 = 1.
    """
    H = H1 + H2
    g = math.gamma(2 * H1 + 1) * math.gamma(2 * H2 + 1) * math.sin(math.pi * H1) * math.sin(math.pi * H2)
    if abs(H - 1.0) <= HSUM_ONE_TOL:
        return (rho ** 2 + (math.pi ** 2 / 4.0) * eta12 ** 2) / g
    num = rho ** 2 * math.sin(math.pi * H / 2) ** 2 + eta12 ** 2 * math.cos(math.pi * H / 2) ** 2
    return math.gamma(H + 1) ** 2 * num / g


def coherence_ellipse(H1: float, H2: float) -> tuple[float, float]:
    """Semi-axes (a, b) of the admissible (rho, eta) ellipse.

    ``a`` bounds rho (at eta = 0), ``b`` bounds eta (at rho = 0).

    Raises
    ------
    ValueError
        If H1 + H2 = 1, where the ellipse degenerates and the log-branch
        bound applies instead.
    """
    H = H1 + H2
    if abs(H - 1.0) <= HSUM_ONE_TOL:
        raise ValueError("H1+H2 = 1: use the log-branch coherence bound instead")
    g = math.gamma(2 * H1 + 1) * math.gamma(2 * H2 + 1) * math.sin(math.pi * H1) * math.sin(math.pi * H2)
    a = math.sqrt(g / (math.gamma(H + 1) ** 2 * math.sin(math.pi * H / 2) ** 2))
    b = math.sqrt(g / (math.gamma(H + 1) ** 2 * math.cos(math.pi * H / 2) ** 2))
    return a, b


@dataclass
class ModelParams:
    """Full parameter set of a d-variate fractional OU model."""

    H: np.ndarray
    alpha: np.ndarray
    nu: np.ndarray
    rho: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        self.H = np.atleast_1d(np.asarray(self.H, dtype=float))
        self.alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        self.nu = np.atleast_1d(np.asarray(self.nu, dtype=float))
        self.rho = np.atleast_2d(np.asarray(self.rho, dtype=float))
        self.eta = np.atleast_2d(np.asarray(self.eta, dtype=float))

    @property
    def d(self) -> int:
        return len(self.H)

    def validation_errors(self) -> list[str]:
        """All violated constraints, empty if the model is admissible."""
        errs = []
        d = self.d
        for name, arr, shape in (
            ("H", self.H, (d,)),
            ("alpha", self.alpha, (d,)),
            ("nu", self.nu, (d,)),
            ("rho", self.rho, (d, d)),
            ("eta", self.eta, (d, d)),
        ):
            if arr.shape != shape:
                errs.append(f"{name} has shape {arr.shape}, expected {shape}")
        if errs:
            return errs
        for i in range(d):
            if not (0.0 < self.H[i] < 1.0):
                errs.append(f"H[{i}]={self.H[i]} outside (0,1)")
            elif abs(self.H[i] - 0.5) < HALF_EXCLUSION:
                errs.append(f"H[{i}]={self.H[i]}: excluded Hurst value 1/2")
            if self.alpha[i] <= 0:
                errs.append(f"alpha[{i}]={self.alpha[i]} must be > 0")
            if self.nu[i] <= 0:
                errs.append(f"nu[{i}]={self.nu[i]} must be > 0")
        if not np.allclose(self.rho, self.rho.T, atol=1e-12):
            errs.append("rho is not symmetric")
        if not np.allclose(np.diag(self.rho), 1.0, atol=1e-12):
            errs.append("rho diagonal must be 1")
        if not np.allclose(self.eta, -self.eta.T, atol=1e-12):
            errs.append("eta is not antisymmetric")
        if errs:
            return errs
        for i in range(d):
            for j in range(i + 1, d):
                c = coherence(self.H[i], self.H[j], self.rho[i, j], self.eta[i, j])
                if c > 1.0 + COHERENCE_TOL:
                    errs.append(
                        f"inadmissible (rho,eta) pair ({i},{j}): coherence {c:.6g} > 1"
                    )
        return errs

    def validate(self) -> "ModelParams":
        """Return self if admissible, raise InvalidModelError otherwise."""
        errs = self.validation_errors()
        if errs:
            raise InvalidModelError(errs)
        return self

    def pair(self, i: int, j: int) -> "PairParams":
        """Extract the bivariate sub-model of components (i, j)."""
        return PairParams(
            H1=float(self.H[i]),
            H2=float(self.H[j]),
            alpha1=float(self.alpha[i]),
            alpha2=float(self.alpha[j]),
            nu1=float(self.nu[i]),
            nu2=float(self.nu[j]),
            rho=float(self.rho[i, j]),
            eta12=float(self.eta[i, j]),
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "d": self.d,
                "H": self.H.tolist(),
                "alpha": self.alpha.tolist(),
                "nu": self.nu.tolist(),
                "rho": self.rho.ravel().tolist(),
                "eta": self.eta.ravel().tolist(),
            }
        )

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelParams":
        d = int(doc["d"])
        return cls(
            H=np.asarray(doc["H"], dtype=float),
            alpha=np.asarray(doc["alpha"], dtype=float),
            nu=np.asarray(doc["nu"], dtype=float),
            rho=np.asarray(doc["rho"], dtype=float).reshape(d, d),
            eta=np.asarray(doc["eta"], dtype=float).reshape(d, d),
        )

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        return cls.from_dict(json.loads(text))


@dataclass
class PairParams:
    """Bivariate sub-model: the unit on which estimation operates."""

    H1: float
    H2: float
    alpha1: float
    alpha2: float
    nu1: float
    nu2: float
    rho: float
    eta12: float

    @property
    def Hsum(self) -> float:
        return self.H1 + self.H2

    def swapped(self) -> "PairParams":
        """Exchange the two components (negates eta12)."""
        return PairParams(
            H1=self.H2, H2=self.H1,
            alpha1=self.alpha2, alpha2=self.alpha1,
            nu1=self.nu2, nu2=self.nu1,
            rho=self.rho, eta12=-self.eta12,
        )

    def to_model(self) -> ModelParams:
        return ModelParams(
            H=[self.H1, self.H2],
            alpha=[self.alpha1, self.alpha2],
            nu=[self.nu1, self.nu2],
            rho=[[1.0, self.rho], [self.rho, 1.0]],
            eta=[[0.0, self.eta12], [-self.eta12, 0.0]],
        )

    def validate(self) -> "PairParams":
        self.to_model().validate()
        return self


def make_pair(H1, H2, alpha1, alpha2, nu1=1.0, nu2=1.0, rho=0.0, eta12=0.0) -> PairParams:
    """Convenience constructor with validation."""
    return PairParams(H1, H2, alpha1, alpha2, nu1, nu2, rho, eta12).validate()


# Bivariate parameter sets of the bundled reference experiments
# (configs/fig1.json etc.); figN matches the config file names.
FIG1_PAIR = PairParams(H1=0.1, H2=0.2, alpha1=0.5, alpha2=0.5,
                       nu1=1.0, nu2=1.0, rho=0.5, eta12=0.2)
FIG2_PAIR = PairParams(H1=0.8, H2=0.9, alpha1=0.5, alpha2=0.5,
                       nu1=1.0, nu2=1.0, rho=0.5, eta12=0.2)
FIG4_PAIR = PairParams(H1=0.2, H2=0.3, alpha1=0.1, alpha2=0.1,
                       nu1=1.0, nu2=1.0, rho=0.5, eta12=0.2)
