from cmath import exp as cexp, pi
from math import inf, log

from pytest import approx, raises
import numpy as np

from inverse_singularities.errors import DegenerateError, DivisionDegenerateError, PreconditionError
from inverse_singularities.fnmodel import (
    LogComplex, SignedLogReal, term_log, truncation_index,
    signed_log_re_g, signed_log_re_g_grid, signed_log_less,
    zg_over_g, zg_over_g_grid, g_derivatives,
    PaperExample, Exp, Sinc, Polynomial, eval_fn, function_from_text
)


def direct_g(z, terms=12):
    return sum((z / 2 ** k) ** (2 ** k) for k in range(1, terms + 1))


def test_term_log():
    assert term_log(1, 2) == LogComplex(0, 0)

    fourth = term_log(2, 4j)
    assert fourth.log_magnitude == approx(0, abs=1e-12)
    assert fourth.argument == approx(0, abs=1e-12)

    third = term_log(3, 17)
    assert third.log_magnitude == approx(8 * log(17 / 8))
    assert third.argument == 0

    assert term_log(5, 0) == LogComplex.zero()


def test_term_log_doubling():
    z = 3.2 - 1.7j
    for k in range(1, 8):
        difference = term_log(k, 2 * z).log_magnitude - term_log(k, z).log_magnitude
        assert difference == approx(2 ** k * log(2), rel=1e-12)


def test_log_complex_invariants():
    with raises(ValueError):
        LogComplex(-inf, 1.0)
    with raises(ValueError):
        LogComplex(0.0, 4.0)
    # -pi is folded onto pi
    assert LogComplex.from_complex(-1).argument == approx(pi)

    product = LogComplex.from_complex(2j) * LogComplex.from_complex(3j)
    assert product.to_complex() == approx(-6)
    assert (LogComplex.from_complex(1j) ** 2).to_complex() == approx(-1)


def test_truncation_index():
    assert truncation_index(0) == 1
    assert truncation_index(17, -60) == 6
    # 2^8 = 256 > 200 and 256 * ln(100 / 256) is about -240
    assert truncation_index(100, -30) == 8

    with raises(PreconditionError):
        truncation_index(1, 0.5)


def test_signed_log_ordering():
    minus_tower = SignedLogReal.power_tower(4, sign=-1)
    assert minus_tower < SignedLogReal.from_float(-1)
    assert SignedLogReal.from_float(-70000) < minus_tower
    assert SignedLogReal.from_float(2) < SignedLogReal.from_float(3)
    assert SignedLogReal.from_float(-3) < SignedLogReal.from_float(-2)
    assert SignedLogReal.from_float(0) < SignedLogReal.from_float(1e-300)
    assert SignedLogReal.from_float(0) == SignedLogReal(0, -inf)
    assert float(SignedLogReal.power_tower(3)) == approx(256)
    assert float(SignedLogReal.power_tower(12)) == inf
    assert -SignedLogReal.from_float(5) == SignedLogReal.from_float(-5)

    with raises(ValueError):
        SignedLogReal(0, 1.0)
    with raises(ValueError):
        SignedLogReal(2, 1.0)


def test_signed_log_less_matches_scalar_order():
    values = [-1e6, -300, -2, 0, 1e-3, 5, 256, 1e5]
    reals = [SignedLogReal.from_float(v) for v in values]
    signs = np.array([r.sign for r in reals])
    log_abs = np.array([r.log_abs for r in reals])

    for threshold in [SignedLogReal.power_tower(3), SignedLogReal.power_tower(3, -1), SignedLogReal(0, -inf)]:
        expected = [r < threshold for r in reals]
        assert list(signed_log_less(signs, log_abs, threshold)) == expected


def test_signed_log_re_g():
    assert signed_log_re_g(0) == SignedLogReal(0, -inf)

    at_12 = signed_log_re_g(12)
    assert at_12.sign == 1
    assert at_12.log_abs == approx(log(direct_g(12).real), rel=1e-12)
    assert float(at_12) == approx(142.639, abs=1e-3)

    at_17 = signed_log_re_g(17)
    assert at_17 > SignedLogReal.power_tower(3)
    assert float(at_17) == approx(direct_g(17).real, rel=1e-9)
    assert float(at_17) == approx(816.9, abs=0.1)


def test_signed_log_re_g_against_direct_sum():
    for z in [3 + 1j, 7.5, 5j, -6 + 2.5j, 0.3 - 0.2j, 8 * cexp(0.7j)]:
        oracle = direct_g(z).real
        result = signed_log_re_g(z)
        assert result.sign == np.sign(oracle)
        assert float(result) == approx(oracle, rel=1e-9)


def test_signed_log_re_g_conjugation_symmetry():
    for z in [17 * cexp(0.3j), 40 - 11j, 2 + 7j]:
        assert signed_log_re_g(z) == signed_log_re_g(z.conjugate())


def test_degenerate_near_level_line():
    # Re g(t i) = -t^2 / 4 + t^4 / 256 - ..., which changes sign near t = 8
    # the bisection below lands on the sign change to double precision
    low, high = 7.0, 9.0
    f = lambda t: direct_g(1j * t, terms=20).real
    for _ in range(200):
        middle = (low + high) / 2
        if (f(middle) > 0) == (f(high) > 0):
            high = middle
        else:
            low = middle
    try:
        result = signed_log_re_g(1j * low)
    except DegenerateError:
        return
    # the normalized sum is tiny either way
    assert result.log_abs < -10


def test_grid_agrees_with_scalar():
    z = np.array([[12, 17 * cexp(1j * pi / 8)], [0, 3 + 1j]])
    signs, log_abs, degenerate = signed_log_re_g_grid(z)
    assert not degenerate.any()
    assert signs[1, 0] == 0 and log_abs[1, 0] == -inf
    for index in [(0, 0), (0, 1), (1, 1)]:
        scalar = signed_log_re_g(z[index])
        assert signs[index] == scalar.sign
        assert log_abs[index] == approx(scalar.log_abs, rel=1e-9)


def test_zg_over_g():
    terms = [(2 / 2 ** k) ** (2 ** k) for k in range(1, 6)]
    oracle = sum(2 ** k * t for k, t in zip(range(1, 6), terms)) / sum(terms)
    assert zg_over_g(2) == approx(oracle, rel=1e-12)
    assert zg_over_g(2) == approx(2.11773, abs=1e-5)

    with raises(DivisionDegenerateError):
        zg_over_g(0)


def test_zg_over_g_annulus_bound():
    for theta in np.linspace(0, 2 * pi, 37):
        assert abs(zg_over_g(96 * cexp(1j * theta)) - 32) <= 0.5


def test_zg_over_g_finite_difference():
    h = 1e-5
    for z in [3 + 2j, -5 + 1j, 6j + 1, 7.5]:
        derivative = (direct_g(z + h) - direct_g(z - h)) / (2 * h)
        assert zg_over_g(z) == approx(z * derivative / direct_g(z), rel=1e-5)

    values, degenerate = zg_over_g_grid(np.array([3 + 2j, 0]))
    assert list(degenerate) == [False, True]
    assert values[0] == approx(zg_over_g(3 + 2j))


def test_g_derivatives():
    assert g_derivatives(0) == (0, 0, 0.5, False)

    z = 2.5 - 1j
    g, first, second, overflow = g_derivatives(z)
    assert not overflow
    assert g == approx(direct_g(z), rel=1e-12)
    h = 1e-4
    assert first == approx((direct_g(z + h) - direct_g(z - h)) / (2 * h), rel=1e-6)
    assert second == approx((direct_g(z + h) - 2 * direct_g(z) + direct_g(z - h)) / h ** 2, rel=1e-4)

    assert g_derivatives(5000)[3]


def test_eval_fn_catalog():
    assert eval_fn(Exp(), 0) == (1, 1, False)

    sinc = eval_fn(Sinc(), pi)
    assert sinc.value == approx(0, abs=1e-12)
    assert sinc.derivative == approx(-1 / pi)
    assert eval_fn(Sinc(), 0) == (1, 0, False)
    assert complex(Sinc().second_derivative(0)) == approx(-1 / 3)

    square = eval_fn(Polynomial((0, 0, 1)), 1 + 1j)
    assert square.value == approx(2j)
    assert square.derivative == approx(2 + 2j)
    assert complex(Polynomial((0, 0, 1)).second_derivative(5)) == approx(2)

    assert eval_fn(Exp(), 800).overflow


def test_sinc_series_matches_closed_form():
    sinc = Sinc()
    for z in [0.0099, 0.0101, 0.0099j, 0.007 + 0.007j]:
        value, derivative = sinc.values(z)
        closed = np.sin(z) / z
        assert complex(value) == approx(closed, rel=1e-13)
        assert complex(derivative) == approx((z * np.cos(z) - np.sin(z)) / z ** 2, rel=1e-6)


def test_paper_example_plain_evaluation():
    example = PaperExample()
    result = eval_fn(example, 3 + 1j)
    assert result.value == approx(cexp(direct_g(3 + 1j)), rel=1e-12)
    assert not result.overflow

    with raises(PreconditionError):
        eval_fn(example, 9)


def test_polynomial_validation():
    with raises(ValueError):
        Polynomial((1,))
    with raises(ValueError):
        Polynomial((1, 0))
    assert Polynomial((0, 0, 1)).degree == 2


def test_function_from_text():
    assert function_from_text('exp') == Exp()
    assert function_from_text('sinc') == Sinc()
    assert function_from_text('poly:0,0,1') == Polynomial((0, 0, 1))
    assert function_from_text('example') == PaperExample()
    assert function_from_text('example:-40').truncation_tolerance == -40
    assert Exp().omits(0) and not Sinc().omits(0)

    with raises(ValueError):
        function_from_text('gamma')
