from fractions import Fraction

import pytest

from urnlab.engines.urn import (
    T23,
    UrnSpec,
    arithmetically_irreducible,
    history_count,
    history_count_binomial,
    is_tenable,
    rising_binomial,
    validate,
)
from urnlab.errors import NonPositiveParameter, SpecParseError, TenabilityViolation

from conftest import random_tenable_specs


def test_t23_constants(t23):
    constants = validate(t23)
    assert (constants.t0, constants.h, constants.balance_class) == (2, 6, 3)
    assert t23.matrix() == ((-2, 3), (4, -3))
    assert t23.label() == "(-2,3;4,-3) from (2,0)"


def test_tenability_violation_names_condition():
    with pytest.raises(TenabilityViolation, match="b\\+s"):
        validate(UrnSpec(a=2, b=2, s=1, a0=2, b0=0))
    assert not is_tenable(UrnSpec(a=2, b=3, s=1, a0=1, b0=0))


@pytest.mark.parametrize("fields", [
    dict(a=0, b=1, s=1, a0=0, b0=1),
    dict(a=1, b=1, s=0, a0=1, b0=0),
    dict(a=1, b=1, s=1, a0=-1, b0=2),
    dict(a=1, b=1, s=1, a0=0, b0=0),
])
def test_nonpositive_parameters(fields):
    with pytest.raises(NonPositiveParameter):
        validate(UrnSpec(**fields))


def test_from_dict():
    spec = UrnSpec.from_dict({"a": 2, "b": 3, "s": 1, "a0": 2, "b0": 0})
    assert spec == T23
    assert spec.to_dict() == {"a": 2, "b": 3, "s": 1, "a0": 2, "b0": 0}


@pytest.mark.parametrize("data, message", [
    ({"a": 2, "b": 3, "s": 1, "a0": 2}, "missing"),
    ({"a": 2, "b": 3, "s": 1, "a0": 2, "b0": 0, "c": 1}, "unknown"),
    ({"a": 2, "b": 3, "s": 1, "a0": True, "b0": 0}, "integer"),
    ({"a": 2, "b": "3", "s": 1, "a0": 2, "b0": 0}, "integer"),
])
def test_from_dict_rejects(data, message):
    with pytest.raises(SpecParseError, match=message):
        UrnSpec.from_dict(data)


def test_swapped_exchanges_colors(t23):
    white = t23.swapped()
    assert (white.a, white.b, white.a0, white.b0) == (3, 2, 0, 2)
    assert white.h == t23.h and white.t0 == t23.t0


def test_history_count_closed_form():
    for spec in random_tenable_specs(8, seed=3):
        for n in range(8):
            assert history_count(spec, n) == history_count_binomial(spec, n)
    assert history_count(T23, 4) == 2 * 3 * 4 * 5


def test_rising_binomial():
    assert rising_binomial(Fraction(1, 2), 2) == Fraction(3, 8)
    assert rising_binomial(Fraction(3), 0) == 1


def test_arithmetic_irreducibility(t23):
    assert arithmetically_irreducible(t23)
    assert not arithmetically_irreducible(UrnSpec(a=2, b=2, s=2, a0=2, b0=0))
