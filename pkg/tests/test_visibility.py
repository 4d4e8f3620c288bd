import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from railnoise import DomainError, FitError, VisibilityModel, fit_visibility, visibility


def test_forward_values():
    np.testing.assert_allclose(visibility(VisibilityModel(0.98, 0.286), [1, 2, 3]), [0.849, 0.553, 0.271], atol=5e-4)
    np.testing.assert_allclose(visibility(VisibilityModel(0.85, 0.650), [1, 2, 3]), [0.614, 0.232, 0.046], atol=5e-4)


def test_order_zero_gives_v_max():
    assert visibility(VisibilityModel(0.9, 0.3), 0) == 0.9


def test_halving_the_phase_noise_raises_visibility():
    base, quieter = VisibilityModel(0.98, 0.286), VisibilityModel(0.98, 0.143)
    for p in (1, 2, 3):
        assert visibility(quieter, p) / visibility(base, p) == pytest.approx(math.exp(0.143 * p**2 / 2), rel=1e-12)


@given(st.floats(0.2, 1.0), st.floats(0.0, 1.5))
def test_fit_round_trips_model_data(v_max, phi1_sq):
    model = VisibilityModel(v_max, phi1_sq)
    p = np.arange(1, 5)
    fit = fit_visibility(list(zip(p, visibility(model, p))))
    assert fit.v_max == pytest.approx(v_max, rel=1e-10)
    assert fit.phi1_sq == pytest.approx(phi1_sq, rel=1e-10, abs=1e-12)
    resid = np.log(visibility(model, p)) - (math.log(fit.v_max) - fit.phi1_sq * p**2 / 2)
    assert np.max(np.abs(resid)) < 1e-12


def test_rounded_triple_recovers_parameters():
    fit = fit_visibility([(1, 0.849), (2, 0.553), (3, 0.271)])
    assert abs(fit.v_max - 0.98) <= 0.01
    assert abs(fit.phi1_sq - 0.286) <= 0.008
    assert fit.v_max_err is not None and fit.phi1_sq_err is not None


def test_weighted_fit_uses_absolute_errors():
    fit = fit_visibility([(1, 0.849, 0.01), (2, 0.553, 0.01), (3, 0.271, 0.01)])
    assert abs(fit.phi1_sq - 0.286) <= 0.008
    assert 0 < fit.phi1_sq_err < 0.05


def test_two_points_leave_errors_undefined():
    fit = fit_visibility([(1, 0.849), (3, 0.271)])
    assert fit.v_max_err is None and fit.phi1_sq_err is None


def test_degenerate_and_invalid_data():
    with pytest.raises(FitError):
        fit_visibility([(2, 0.5), (2, 0.4)])
    with pytest.raises(DomainError):
        fit_visibility([(1, 0.5), (2, 0.0)])
    with pytest.raises(FitError):
        fit_visibility([(1, 0.5), (2, 0.9)])
    with pytest.raises(DomainError):
        VisibilityModel(1.2, 0.3)
