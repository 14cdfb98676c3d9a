import numpy as np
import pytest
from hypothesis import given, strategies as st

from curved_landau.errors import DomainError, UnsupportedSeriesError
from curved_landau.hyp2f1 import TerminatingSeries, hypergeometric_ode_residual, poly_2f1

xs = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)
degrees = st.integers(0, 12)
reals = st.floats(-6.0, 6.0)
gammas = st.floats(0.3, 8.0)


def test_zero_parameter_is_one():
    for x in (0.0, 0.3, 2.0 + 1j):
        assert poly_2f1(0, 2.7, 1.3, x)[0] == 1.0


def test_one_term_series():
    val, der = poly_2f1(-1, 3, 2, 0.5)
    assert val == pytest.approx(0.25)
    assert der == pytest.approx(-1.5)


def test_three_term_series():
    assert poly_2f1(-2, 2, 1, 1.0)[0] == pytest.approx(0.0, abs=1e-15)


def test_non_terminating_rejected():
    with pytest.raises(UnsupportedSeriesError):
        TerminatingSeries.build(0.5, 1.5, 1.0)


def test_gamma_pole_rejected():
    with pytest.raises(DomainError):
        TerminatingSeries.build(-3, 1.0, -1.0)


def test_near_integer_snapped():
    s = TerminatingSeries.build(-2 + 1e-11, 1.0, 1.0)
    assert s.alpha == -2.0 and s.degree == 2


def test_degree_from_either_slot():
    assert TerminatingSeries.build(1.5, -4, 2.0).degree == 4
    assert TerminatingSeries.build(-1, -3, 2.0).degree == 1


@given(degrees, reals, gammas, xs)
def test_value_at_origin_and_symmetry(N, b, g, x):
    s = TerminatingSeries.build(-N, b, g)
    assert s(0.0) == 1.0
    t = TerminatingSeries.build(b, -N, g)
    # rounding is bounded by the sum of term magnitudes
    bound = sum(abs(c) * abs(x) ** k for k, c in enumerate(s.coefficients))
    assert abs(s(x) - t(x)) <= 1e-14 * max(1.0, bound)


@given(degrees, reals, gammas)
def test_satisfies_hypergeometric_equation(N, b, g):
    s = TerminatingSeries.build(-N, b, g)
    x = np.exp(1j * np.linspace(0, 2 * np.pi, 20)) * 0.6 + 0.3
    scale = max(1.0, float(np.max(np.abs(s.coefficients))))
    assert np.max(np.abs(hypergeometric_ode_residual(s, x))) < 1e-11 * scale * 10


@given(degrees, reals, gammas, st.floats(-1, 1))
def test_derivative_matches_difference(N, b, g, x):
    s = TerminatingSeries.build(-N, b, g)
    h = 1e-6
    f, d = s.evaluate(x, order=1)
    fd = (s(x + h) - s(x - h)) / (2 * h)
    assert d == pytest.approx(fd, rel=1e-5, abs=1e-5 * max(1.0, abs(f)))


def test_matches_scipy_on_real_axis():
    from scipy.special import hyp2f1

    s = TerminatingSeries.build(-5, 2.3, 1.7)
    x = np.linspace(-0.9, 0.9, 11)
    assert np.allclose(s(x), hyp2f1(-5, 2.3, 1.7, x), rtol=1e-12)
