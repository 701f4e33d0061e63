"""Shared helpers for the test suite."""

import numpy as np
import pytest

from mfou.model import PairParams, coherence_ellipse

# component Hurst values kept away from the excluded 1/2 and the
# interval endpoints
SAFE_H = (0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9)


def random_admissible_pair(rng: np.random.Generator, avoid_hsum_one: bool = True,
                           hsum_max: float = 2.0, fill: float = 0.9) -> PairParams:
    """Random pair parameters strictly inside the admissible ellipse."""
    while True:
        H1, H2 = rng.choice(SAFE_H, size=2)
        Hsum = H1 + H2
        if avoid_hsum_one and abs(Hsum - 1.0) < 0.05:
            continue
        if Hsum >= hsum_max:
            continue
        break
    a, b = coherence_ellipse(H1, H2)
    f = fill * rng.uniform(0.1, 1.0)
    theta = rng.uniform(0.0, 2 * np.pi)
    return PairParams(
        H1=float(H1), H2=float(H2),
        alpha1=float(rng.uniform(0.1, 2.0)), alpha2=float(rng.uniform(0.1, 2.0)),
        nu1=float(rng.uniform(0.5, 2.0)), nu2=float(rng.uniform(0.5, 2.0)),
        rho=float(f * a * np.cos(theta)), eta12=float(f * b * np.sin(theta)),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
