import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvahedge.pricing import (EuropeanOption, MertonModel, bs_delta, bs_price, merton_delta,
                              merton_gamma, merton_jump_sensitivities, merton_price)
from cvahedge.pricing.merton import poisson_weights, weight_cutoff
from oracles.frozen import MERTON_CALL_ATM


def test_zero_intensity_reduces_to_black_scholes(call, merton_params):
    p = replace(merton_params, xi=0.0)
    for S in (80.0, 100.0, 120.0):
        assert abs(merton_price(call, S, p, 0.0)[0] - bs_price(call, S, 0.1, 0.2, 0.0)) < 1e-12
        assert abs(merton_delta(call, S, p, 0.0) - bs_delta(call, S, 0.1, 0.2, 0.0)) < 1e-12


def test_continuous_at_zero_intensity(call, merton_params):
    p = replace(merton_params, xi=1e-12)
    assert abs(merton_price(call, 100.0, p, 0.0)[0] - bs_price(call, 100.0, 0.1, 0.2, 0.0)) < 1e-8


def test_matches_frozen_monte_carlo(merton_params):
    atm = EuropeanOption("call", 100.0, 1.0)
    mean, se = MERTON_CALL_ATM
    price = float(merton_price(atm, 100.0, merton_params, 0.0)[0])
    assert abs(price - mean) < 3 * se
    assert price >= float(bs_price(atm, 100.0, 0.1, 0.2, 0.0))


def test_loose_tolerance_close_to_near_exact(call, merton_params):
    loose, diag = merton_price(call, 100.0, merton_params, 0.0, 1e-4)
    tight, diag_tight = merton_price(call, 100.0, merton_params, 0.0, 1e-15)
    assert abs(loose - tight) < 1e-4
    assert diag.terms_used <= diag_tight.terms_used


@pytest.mark.parametrize("S", [70.0, 100.0, 140.0])
def test_put_call_parity(call, put, merton_params, S):
    diff = merton_price(call, S, merton_params, 0.0)[0] - merton_price(put, S, merton_params, 0.0)[0]
    assert abs(diff - (S - 95.0 * math.exp(-0.1))) < 1e-10


@pytest.mark.parametrize("S", [80.0, 100.0, 125.0])
def test_delta_and_gamma_against_finite_differences(call, merton_params, S):
    h = 1e-4 * S
    up = merton_price(call, S + h, merton_params, 0.0)[0]
    dn = merton_price(call, S - h, merton_params, 0.0)[0]
    assert abs(merton_delta(call, S, merton_params, 0.0) / ((up - dn) / (2 * h)) - 1) < 1e-5
    fd_gamma = (merton_delta(call, S + h, merton_params, 0.0)
                - merton_delta(call, S - h, merton_params, 0.0)) / (2 * h)
    assert abs(merton_gamma(call, S, merton_params, 0.0) / fd_gamma - 1) < 1e-5


def test_call_delta_bounded(call, merton_params):
    assert 0 < merton_delta(call, 100.0, merton_params, 0.0) < 1


@pytest.mark.parametrize("kind", ["call", "put"])
@pytest.mark.parametrize("S", [90.0, 100.0, 115.0])
def test_jump_sensitivities_against_finite_differences(merton_params, kind, S):
    opt = EuropeanOption(kind, 95.0, 1.0)
    analytic = merton_jump_sensitivities(opt, S, merton_params, 0.0)
    h = 1e-5
    for name, value in zip(("mu_j", "sigma_j", "xi"), analytic):
        base = getattr(merton_params, name)
        up = merton_price(opt, S, replace(merton_params, **{name: base + h}), 0.0)[0]
        dn = merton_price(opt, S, replace(merton_params, **{name: base - h}), 0.0)[0]
        assert abs(value / ((up - dn) / (2 * h)) - 1) < 1e-4, name


def test_jump_sensitivities_equal_for_call_and_put(call, put, merton_params):
    c = merton_jump_sensitivities(call, 100.0, merton_params, 0.0)
    p = merton_jump_sensitivities(put, 100.0, merton_params, 0.0)
    assert np.allclose(c, p, rtol=0, atol=1e-12)


def test_intensity_sensitivity_positive_at_the_money(merton_params):
    atm = EuropeanOption("call", 100.0, 1.0)
    assert merton_jump_sensitivities(atm, 100.0, merton_params, 0.0)[2] > 0


def test_intensity_sensitivity_at_zero_is_one_sided_derivative(call, merton_params):
    p0 = replace(merton_params, xi=0.0)
    d_xi = merton_jump_sensitivities(call, 100.0, p0, 0.0)[2]
    h = 1e-7
    fwd = (merton_price(call, 100.0, replace(p0, xi=h), 0.0)[0]
           - merton_price(call, 100.0, p0, 0.0)[0]) / h
    assert d_xi == pytest.approx(fwd, rel=1e-5)


def test_weights_example():
    w = poisson_weights(0.1, 5)
    assert np.allclose(w, [0.905, 0.0905, 4.52e-3, 1.51e-4, 3.77e-6], rtol=3e-3)
    # w_3 = 1.5e-4 is kept, w_4 falls below the cutoff
    assert weight_cutoff(0.1, 1e-4) == 4


def test_tolerance_validation(call, merton_params):
    with pytest.raises(ValueError):
        merton_price(call, 100.0, merton_params, 0.0, 0.0)


def test_model_vectorised(call, merton_params):
    S = np.array([90.0, 100.0, 110.0])
    m = MertonModel(merton_params)
    assert np.allclose(m.price(call, S, 0.0), [merton_price(call, s, merton_params, 0.0)[0] for s in S])


@settings(max_examples=40, deadline=None)
@given(xi=st.floats(0.0, 3.0), sig_j=st.floats(0.0, 0.5), mu_j=st.floats(-0.5, 0.3),
       S=st.floats(60, 160))
def test_parity_and_bounds_property(xi, sig_j, mu_j, S):
    from cvahedge.market import MertonParams

    p = MertonParams(0.05, 0.2, mu_j, sig_j, xi)
    c = EuropeanOption("call", 100.0, 1.0)
    pt = EuropeanOption("put", 100.0, 1.0)
    cp = merton_price(c, S, p, 0.0)[0]
    pp = merton_price(pt, S, p, 0.0)[0]
    assert abs(cp - pp - (S - 100.0 * math.exp(-0.05))) < 1e-9 * max(1.0, S)
    assert max(S - 100.0 * math.exp(-0.05), 0.0) - 1e-9 <= cp <= S + 1e-9
