from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from algebra import (AlgebraDescriptor, AlgebraElement, DescriptorMismatch, SingularError, alg_invert,
                     inverse_matrix, make_algebra, multiply, random_element)
from utils import SchemaError


def test_matrix_units_multiply_as_matrices(matrix2):
    a = matrix2.from_matrix([[1, 2], [3, 4]])
    b = matrix2.from_matrix([[0, 1], [1, 0]])
    assert (a * b).as_matrix() == [[2, 1], [4, 3]]
    assert (b * a).as_matrix() == [[3, 4], [1, 2]]


def test_unit_and_basis(matrix2, scalar):
    assert matrix2.dim == 4
    assert matrix2.unit.as_matrix() == [[1, 0], [0, 1]]
    assert len(matrix2.basis) == 4
    assert scalar.unit.coords == (Fraction(1),)
    assert matrix2.is_associative()
    assert scalar.is_associative()


def test_scalar_multiplication_by_rationals(matrix2):
    a = matrix2.from_matrix([[1, 2], [3, 4]])
    assert (a * Fraction(1, 2)).as_matrix() == [[Fraction(1, 2), 1], [Fraction(3, 2), 2]]
    assert (2 * a) == a + a


def test_inverse_matches_sympy_adjugate(matrix2, rng):
    for _ in range(20):
        x = random_element(matrix2, rng)
        m = sp.Matrix(x.as_matrix())
        if m.det() == 0:
            with pytest.raises(SingularError):
                alg_invert(x)
            continue
        expected = m.adjugate() / m.det()
        y = alg_invert(x)
        assert y.as_matrix() == [[Fraction(str(expected[i, j])) for j in range(2)] for i in range(2)]
        assert x * y == matrix2.unit
        assert y * x == matrix2.unit


def test_singular_element():
    desc = make_algebra("matrix", 2)
    with pytest.raises(SingularError):
        alg_invert(desc.from_matrix([[1, 2], [2, 4]]))
    with pytest.raises(SingularError):
        alg_invert(make_algebra("scalar").zero)


def test_inverse_matrix_with_row_swap():
    m = np.array([[Fraction(0), Fraction(1)], [Fraction(2), Fraction(3)]], dtype=object)
    inv = inverse_matrix(m)
    assert inv.dot(m).tolist() == [[1, 0], [0, 1]]


def test_descriptor_mismatch(scalar, matrix2):
    with pytest.raises(DescriptorMismatch):
        scalar.unit + matrix2.unit
    with pytest.raises(DescriptorMismatch):
        AlgebraElement(matrix2, (Fraction(1),))


def test_multiply_many(matrix2):
    a = matrix2.from_matrix([[1, 1], [0, 1]])
    assert multiply(a, a, a).as_matrix() == [[1, 3], [0, 1]]


def test_make_algebra_kinds():
    assert make_algebra("matrix3").dim == 9
    assert repr(make_algebra("matrix", 2)) == "M_2(Q)"
    assert repr(make_algebra("scalar")) == "Q"


def test_element_serialization_normalizes(matrix2):
    x = AlgebraElement.from_list(matrix2, ["2/4", 3, "-1/3", "0/5"])
    assert x.to_list() == ["1/2", "3/1", "-1/3", "0/1"]
    assert AlgebraDescriptor.from_dict(matrix2.to_dict()) == matrix2


def test_element_schema_errors(matrix2):
    with pytest.raises(SchemaError) as e:
        AlgebraElement.from_list(matrix2, ["1", "2", "x", "4"], "$.b")
    assert e.value.path == "$.b[2]"
    with pytest.raises(SchemaError):
        AlgebraElement.from_list(matrix2, [1, 2, 3])
    with pytest.raises(SchemaError):
        AlgebraElement.from_list(matrix2, [True, 2, 3, 4])
