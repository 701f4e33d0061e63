import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mfou.model import (
    FIG1_PAIR,
    InvalidModelError,
    ModelParams,
    PairParams,
    coherence,
    coherence_ellipse,
    make_pair,
)

from conftest import random_admissible_pair

# independently computed with 40-digit arithmetic
COHERENCE_FIG1 = 0.453333941359734791


def test_coherence_equal_hurst_unit_pair():
    assert coherence(0.3, 0.3, 1.0, 0.0) == pytest.approx(1.0, abs=1e-14)


def test_coherence_zero_parameters():
    assert coherence(0.17, 0.83, 0.0, 0.0) == 0.0


def test_coherence_reference_value():
    c = coherence(0.1, 0.2, 0.5, 0.2)
    assert c == pytest.approx(COHERENCE_FIG1, rel=1e-13)
    assert c < 1.0


def test_coherence_log_branch_continuity_along_rho_axis():
    # along eta = 0 the H1+H2 = 1 branch is the limit of the generic
    # branch (with eta != 0 the two parametrizations genuinely differ)
    lo = coherence(0.3, 0.7 - 1e-4, 0.4, 0.0)
    on = coherence(0.3, 0.7, 0.4, 0.0)
    hi = coherence(0.3, 0.7 + 1e-4, 0.4, 0.0)
    assert abs(on - 0.5 * (lo + hi)) < 1e-3 * on


@given(
    H1=st.sampled_from((0.1, 0.25, 0.4, 0.6, 0.75, 0.9)),
    H2=st.sampled_from((0.1, 0.25, 0.4, 0.6, 0.75, 0.9)),
    rho=st.floats(-1.0, 1.0),
    eta=st.floats(-1.0, 1.0),
)
def test_coherence_even_in_rho_and_eta(H1, H2, rho, eta):
    c = coherence(H1, H2, rho, eta)
    assert c == coherence(H1, H2, -rho, eta)
    assert c == coherence(H1, H2, rho, -eta)
    assert c >= 0.0


def test_ellipse_equal_hurst_rho_axis_is_one():
    for h in (0.1, 0.3, 0.45, 0.8):
        a, _ = coherence_ellipse(h, h)
        assert a == pytest.approx(1.0, abs=1e-12)


def test_ellipse_boundary_has_unit_coherence():
    for H1, H2 in ((0.1, 0.2), (0.3, 0.45), (0.8, 0.9)):
        a, b = coherence_ellipse(H1, H2)
        assert coherence(H1, H2, a, 0.0) == pytest.approx(1.0, rel=1e-10)
        assert coherence(H1, H2, 0.0, b) == pytest.approx(1.0, rel=1e-10)


def test_ellipse_rejects_hsum_one():
    with pytest.raises(ValueError):
        coherence_ellipse(0.4, 0.6)


def test_fig1_parameters_are_valid():
    FIG1_PAIR.validate()


def test_excluded_hurst_value():
    p = PairParams(H1=0.5, H2=0.2, alpha1=1.0, alpha2=1.0,
                   nu1=1.0, nu2=1.0, rho=0.0, eta12=0.0)
    with pytest.raises(InvalidModelError, match="excluded Hurst value"):
        p.validate()
    # the exclusion window extends 1e-9 around 1/2
    with pytest.raises(InvalidModelError):
        make_pair(0.5 + 1e-10, 0.2, 1.0, 1.0)


def test_inadmissible_rho_for_unequal_small_hurst():
    with pytest.raises(InvalidModelError, match="inadmissible"):
        make_pair(0.1, 0.2, 1.0, 1.0, rho=1.0)


def test_validation_collects_all_errors():
    m = ModelParams(H=[0.5, -0.1], alpha=[0.0, 1.0], nu=[1.0, -2.0],
                    rho=[[1.0, 0.3], [0.4, 1.0]], eta=[[0.0, 0.1], [0.1, 0.0]])
    errs = m.validation_errors()
    assert len(errs) >= 5
    assert any("symmetric" in e for e in errs)
    assert any("antisymmetric" in e for e in errs)


def test_boundary_coherence_tolerance():
    a, _ = coherence_ellipse(0.1, 0.2)
    make_pair(0.1, 0.2, 1.0, 1.0, rho=a)  # exact boundary admissible
    with pytest.raises(InvalidModelError):
        make_pair(0.1, 0.2, 1.0, 1.0, rho=a * (1 + 1e-9))


def test_json_round_trip():
    m = FIG1_PAIR.to_model()
    m2 = ModelParams.from_json(m.to_json())
    for f in ("H", "alpha", "nu", "rho", "eta"):
        np.testing.assert_array_equal(getattr(m, f), getattr(m2, f))


def test_pair_extraction_and_swap():
    m = FIG1_PAIR.to_model()
    p = m.pair(0, 1)
    assert p == FIG1_PAIR
    q = m.pair(1, 0)
    assert q.eta12 == -p.eta12 and q.rho == p.rho
    assert p.swapped() == q
    assert p.swapped().swapped() == p
    assert p.Hsum == pytest.approx(0.3)


def test_random_admissible_pairs_validate(rng):
    for _ in range(50):
        random_admissible_pair(rng).validate()
