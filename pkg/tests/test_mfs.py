import math
from fractions import Fraction

import pytest

from mfs import (ArityMismatch, MFSeries, MultilinearMap, NonzeroConstantTerm, NotCompInvertible, OrderExceeded,
                 SizeGuardExceeded, compositions, from_scalars, geometric_series, identity_series, lower_degree,
                 one_series, random_series, series_comp_inverse, series_compose, series_mul_inverse, series_power,
                 to_scalars, zero_series)
from algebra import random_element
from utils import SchemaError


def comp_invertible(descriptor, rng, order=3):
    """Random series with zero constant term and linear term b -> 2b."""
    base = random_series(descriptor, order, rng, constant="zero")
    linear = MultilinearMap(descriptor, 1, tuple(e.scale(2) for e in descriptor.basis))
    return MFSeries(descriptor, (base[0], linear) + base.components[2:])


def test_compositions():
    assert list(compositions(4, 2)) == [(1, 3), (2, 2), (3, 1)]
    assert list(compositions(3, 3)) == [(1, 1, 1)]
    assert list(compositions(2, 3)) == []


def test_scalar_product_is_cauchy_product():
    assert to_scalars(from_scalars([1, 2, 3]) * from_scalars([1, 1, 1])) == [1, 3, 6]


def test_scalar_composition():
    assert to_scalars(from_scalars([5, 2, 3]).compose(from_scalars([0, 1, 1]))) == [5, 2, 5]


def test_multilinear_call_expands_linearly(matrix2, rng):
    alpha = random_series(matrix2, 2, rng)
    a, b = random_element(matrix2, rng), random_element(matrix2, rng)
    expected = matrix2.zero
    for i, x in a.support():
        for j, y in b.support():
            expected = expected + alpha[2].value_at((i, j)).scale(x * y)
    assert alpha[2](a, b) == expected


def test_product_associative_and_distributive(matrix2, rng):
    a, b, c = (random_series(matrix2, 3, rng) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) * c == a * c + b * c


def test_composition_laws(matrix2, rng):
    a = random_series(matrix2, 3, rng)
    b = random_series(matrix2, 3, rng, constant="zero")
    c = random_series(matrix2, 3, rng, constant="zero")
    d = random_series(matrix2, 3, rng)
    assert series_compose(series_compose(a, b), c) == series_compose(a, series_compose(b, c))
    assert series_compose(a + d, b) == series_compose(a, b) + series_compose(d, b)
    assert series_compose(a * d, b) == series_compose(a, b) * series_compose(d, b)
    I = identity_series(matrix2, 3)
    assert series_compose(a, I) == a
    assert series_compose(I, b) == b


def test_composition_needs_zero_constant(matrix2, rng):
    with pytest.raises(NonzeroConstantTerm):
        series_compose(random_series(matrix2, 2, rng), random_series(matrix2, 2, rng, constant="unit"))


def test_mul_inverse(matrix2, rng):
    a = random_series(matrix2, 3, rng, constant="unit")
    inv = series_mul_inverse(a)
    one = one_series(matrix2, 3)
    assert a * inv == one
    assert inv * a == one


def test_comp_inverse(matrix2, rng):
    a = comp_invertible(matrix2, rng)
    inv = series_comp_inverse(a)
    I = identity_series(matrix2, 3)
    assert series_compose(a, inv) == I
    assert series_compose(inv, a) == I


def test_comp_inverse_rejects_singular_linear_term(matrix2):
    with pytest.raises(NotCompInvertible):
        series_comp_inverse(zero_series(matrix2, 2))
    with pytest.raises(NonzeroConstantTerm):
        series_comp_inverse(one_series(matrix2, 2))


def test_geometric_series(matrix2, rng):
    a = random_series(matrix2, 3, rng, constant="zero")
    one = one_series(matrix2, 3)
    assert geometric_series(a) * (one - a) == one
    assert series_power(a, 2) == a * a


def test_lower_degree(matrix2, rng):
    assert lower_degree(zero_series(matrix2, 3)) == math.inf
    assert lower_degree(identity_series(matrix2, 3)) == 1
    assert lower_degree(series_power(random_series(matrix2, 3, rng, constant="zero"), 2)) >= 2


def test_truncation_to_smaller_order(matrix2, rng):
    a = random_series(matrix2, 3, rng)
    b = random_series(matrix2, 2, rng)
    assert (a * b).order == 2
    assert (a * b) == a.truncate(2) * b
    with pytest.raises(OrderExceeded):
        a.truncate(4)
    with pytest.raises(OrderExceeded):
        a[4]


def test_arity_mismatch(matrix2):
    with pytest.raises(ArityMismatch):
        identity_series(matrix2, 2)[1](matrix2.unit, matrix2.unit)


def test_size_guard(matrix2, monkeypatch):
    monkeypatch.setenv("MULFFS_MAX_CELLS", "10")
    with pytest.raises(SizeGuardExceeded):
        MultilinearMap.zero(matrix2, 2)
    MultilinearMap.zero(matrix2, 1)


def test_json_round_trip(matrix2, rng):
    a = random_series(matrix2, 2, rng)
    assert MFSeries.from_dict(a.to_dict()) == a
    assert a.to_dict()["components"][0] == [a[0].values[0].to_list()]


def test_schema_error_names_path(matrix2):
    data = one_series(matrix2, 1).to_dict()
    data["components"][1][2] = ["1", "2"]
    with pytest.raises(SchemaError) as e:
        MFSeries.from_dict(data)
    assert e.value.path == "$.components[1][2]"
    del data["components"]
    with pytest.raises(SchemaError) as e:
        MFSeries.from_dict(data)
    assert e.value.path == "$.components"


def test_from_scalars_values():
    alpha = from_scalars([1, Fraction(1, 2)])
    assert to_scalars(alpha) == [1, Fraction(1, 2)]
