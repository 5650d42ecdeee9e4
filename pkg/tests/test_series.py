from fractions import Fraction

import mpmath as mp
import pytest

from urnlab.engines import kernel, series
from urnlab.engines.elliptic import canonical_spec
from urnlab.engines.moments import asymptotic_moments
from urnlab.engines.urn import T23, UrnSpec
from urnlab.errors import OutOfRange


@pytest.mark.parametrize("spec", [T23, canonical_spec("D"), canonical_spec("E"), UrnSpec(1, 1, 3, 2, 1)])
def test_psi_inverts_i(spec):
    # psi(I(u)) = J(u) coefficient by coefficient
    assert list(series.psi_of_i(spec, 15).coeffs) == list(series.j_series(spec, 15).coeffs)


def test_t23_psi_at_zero(t23):
    psi = series.psi_series_at_zero(t23, 10)
    assert (psi.offset, psi.step) == (1, 3)
    assert psi.coeffs[0] == 2
    assert str(psi.truncate(1)) == "2·z"


def test_psi_series_matches_quadrature_inversion(t23):
    psi = series.psi_series_at_zero(t23, 20)
    with mp.workdps(30):
        for z in (0.1, 0.3, 0.6):
            assert abs(psi.evaluate(z) - kernel.psi_numeric(t23, z)) < 1e-10


@pytest.mark.parametrize("start", [(2, 0), (2, 3), (4, 3)])
def test_factorization(start):
    spec = UrnSpec(a=2, b=3, s=1, a0=start[0], b0=start[1])
    first, second = series.factorize_psi(spec, 30)
    combined = series.recombine(spec, first, second)
    direct = series.psi_series_at_zero(spec, 30)
    assert combined.offset == direct.offset
    assert list(combined.coeffs) == list(direct.coeffs)


def test_t23_singular_expansion(t23):
    expansion = series.singular_expansion(t23, 6)
    assert expansion.a_k[:3] == (1, Fraction(-1, 7), Fraction(1, 637))
    assert expansion.prefactor_exponent == -2
    assert expansion.puiseux_step == 6
    assert expansion.to_dict()["a_k"][1] == "-1/7"


def test_pentagonal_singular_expansion(pentagonal):
    expansion = series.singular_expansion(pentagonal, 6)
    assert expansion.a_k[:3] == (1, Fraction(-1, 10), Fraction(-3, 650))
    assert expansion.puiseux_step == Fraction(5, 3)
    assert expansion.prefactor_exponent == Fraction(-1, 3)


def test_singular_expansion_near_rho(t23):
    expansion = series.singular_expansion(t23, 10)
    r = kernel.rho(t23)
    for distance in (0.2, 0.4):
        numeric = kernel.psi_numeric(t23, r - distance)
        assert abs(expansion.evaluate(distance) - numeric) < 1e-8 * abs(numeric)


def test_pentagonal_expansion_near_rho(pentagonal):
    expansion = series.singular_expansion(pentagonal, 20)
    r = kernel.rho(pentagonal)
    for distance in (0.05, 0.1):
        numeric = kernel.psi_numeric(pentagonal, r - distance)
        assert abs(expansion.evaluate(distance) - numeric) < 1e-10 * abs(numeric)


def test_k_series_at_one(t23):
    k = series.k_series_at_one(t23, 5)
    assert list(k.coeffs) == [1, Fraction(-4, 7), Fraction(10, 91), Fraction(300, 1729), Fraction(-1689, 8645)]


def test_k_series_log_derivative_is_mean_slope():
    for case in "ABCDEF":
        spec = canonical_spec(case)
        k = series.k_series_at_one(spec, 3).coeffs
        assert k[0] == Fraction(1, spec.s)
        assert k[1] == -Fraction(spec.s + spec.b, spec.s + spec.h)
        assert -k[1] / k[0] == asymptotic_moments(spec).mean_slope


def test_k_inverse_series(t23):
    with mp.workdps(40):
        r = kernel.rho(t23)
        inv = series.k_inverse_series(t23, 8).coeffs
        assert abs(inv[0] - 1 / r) < 1e-30
        assert abs(inv[1]) < 1e-30
        assert abs(inv[2] - 1 / (2 * r ** 2)) < 1e-30
        assert abs(inv[6] - (-mp.mpf(1) / 6 + 1 / (8 * r ** 3)) / r) < 1e-30


def test_formal_series_product_and_power(t23):
    psi = series.psi_series_at_zero(t23, 8)
    square = psi ** 2
    assert square.offset == 2
    assert list(square.coeffs) == list((psi * psi).coeffs)
    assert (psi ** 0).coeffs[0] == 1
    with pytest.raises(ValueError):
        psi * series.i_series(t23, 8)


def test_to_json_layout(t23):
    rows = series.j_series(t23, 2).to_json()
    assert rows == [[2, 1, 1, 1], [8, 1, 1, 3]]


@pytest.mark.parametrize("build", [
    series.i_series, series.j_series, series.psi_series_at_zero,
    series.singular_expansion, series.k_series_at_one, series.k_inverse_series,
])
def test_order_below_two_is_rejected(t23, build):
    for order in (0, 1):
        with pytest.raises(OutOfRange):
            build(t23, order)
