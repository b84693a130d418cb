import math
from types import SimpleNamespace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rainbow_nibble import curves, uniform
from rainbow_nibble.errors import OutOfDomain
from rainbow_nibble.report import CURVE_COLUMNS, curve_csv


def params(**kw):
    base = dict(q=1000, eps=0.25, delta=0.01, eta=0.5, dmax=1, error_scale=1.0)
    base.update(kw)
    return SimpleNamespace(**base)


@pytest.mark.parametrize("kind", curves.KINDS)
def test_curves_start_at_one(kind):
    assert curves.ideal(kind, params(), 0.0) == (1.0, 1.0)


def test_thm1_substitution():
    s, g = curves.ideal("thm1", params(eps=0.25), 0.5)
    assert s == pytest.approx(0.36) and g == pytest.approx(0.6)


def test_domain():
    with pytest.raises(OutOfDomain):
        curves.ideal("thm1", params(), 0.6)


def test_exponent_m():
    assert curves.exponent_m(0.1) == pytest.approx(2.045238, abs=1e-6)


@given(st.floats(0.001, 1.0))
def test_exponent_m_above_two(eps):
    assert curves.exponent_m(eps) > 2


def test_error_sequences_start_at_zero():
    for kind in curves.KINDS:
        s = curves.error_sequences(kind, params(), 5)
        assert (s.y[0], s.z[0], s.alpha[0], s.beta[0]) == (0, 0, 0, 0)


def test_thm1_first_error_term():
    p = uniform.default_params(10**6, 1)
    s = curves.error_sequences("thm1", p, 1)
    d, q, lq = p.delta, p.q, math.log(p.q)
    assert s.y[1] == pytest.approx(2 * d * d * q * lq * lq + 4 * p.dmax * math.sqrt(d * q) * lq)


def test_thm3_alpha_substitution():
    # growth factor 1.1 at delta=0.04: 10*0.04/(1-gamma*eta)^2 = 0.1
    gam_eta = 1 - 2.0
    assert curves.thm3_alpha(2, 0.04, 1.0, gam_eta) == pytest.approx(0.2 * 0.21)


def test_identity_residuals_example():
    assert curves.size_identity_residual(0.25, 0.01, 10, 1000) < 1e-9
    assert curves.degree_identity_residual(0.25, 0.01, 10, 1000) < 1e-9


def test_identity_grid():
    rep = curves.check_identities(curves.random_grid(500, seed=3))
    assert rep.max_size_residual < 1e-9 and rep.max_power_residual < 1e-12


def test_color_target_constant_is_finite():
    for delta in (1e-3, 5e-3, 1e-2):
        k, _ = curves.color_target_constants(0.1, delta, 10**4)
        assert math.isfinite(k)


def rec(t, size, deg, alpha=0.0, beta=0.0):
    return curves.TrajectoryRecord(t=t, empirical_size=size, empirical_degree=deg, matched=0,
                                   s_ideal=10, d_ideal=5, alpha=alpha, beta=beta)


def test_compare_exact_and_flagged():
    summary = curves.compare([rec(0, 10, 5), rec(1, 10, 5)])
    assert summary.max_abs_size == 0 and summary.flag_count == 0
    summary = curves.compare([rec(0, 10, 5), rec(1, 8, 6)])
    assert summary.flags == [1] and summary.size_deviation[1] == pytest.approx(-0.2)


def test_curve_csv_columns():
    p = uniform.default_params(400, 1, eps=0.5, delta=0.05, eta=0.6, error_scale=0.05)
    lines = curve_csv("thm1", p).splitlines()
    assert lines[0].split(",") == CURVE_COLUMNS
    assert len(lines) == 1 + curves.num_iterations(p) + 1
