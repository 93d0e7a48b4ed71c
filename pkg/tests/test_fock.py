from fractions import Fraction
from itertools import product

import pytest

from algebra import SingularError, random_element
from fock import (CapExceeded, FockError, FockVector, OperatorWord, V, additive_variable, annihilation, apply,
                  canonical_additive, canonical_multiplicative, creation, distribution_series, expectation, left,
                  multiplicative_variable, replacement, right)
from mfs import MFSeries, MultilinearMap, from_scalars, random_series, series_sum, to_scalars
from ncl import Mode, SValue, enumerate_partitions, k_encode, s_encode
from transforms import alpha_angle, alpha_bracket, scalar_t_coefficients


def with_constant(alpha, value):
    return MFSeries(alpha.descriptor, (MultilinearMap.constant(value),) + alpha.components[1:])


def test_creation_on_vacuum(scalar):
    v = apply(creation(1), FockVector.vacuum(scalar, cap=1))
    assert v.terms == {(((1, 0),), 0): 1}
    assert v.to_records() == [{"level": 1, "word": [[1, 1]], "slot": 1, "coeff": "1/1"}]


def test_annihilation_after_creation(matrix2, rng):
    alpha = random_series(matrix2, 1, rng)
    v = apply(creation(1), FockVector.vacuum(matrix2, cap=1))
    w = apply(annihilation(1, alpha[1]), v)
    assert w.level == 0
    assert w.project() == alpha[1](matrix2.unit)


def test_annihilation_needs_matching_index(matrix2, rng):
    alpha = random_series(matrix2, 1, rng)
    v = apply(creation(2), FockVector.vacuum(matrix2, cap=1))
    assert apply(annihilation(1, alpha[1]), v).is_zero()


def test_replacement_keeps_level(matrix2, rng):
    alpha = random_series(matrix2, 2, rng)
    v = apply(OperatorWord((creation(1), creation(1))), FockVector.vacuum(matrix2, cap=2))
    w = apply(replacement(1, alpha[2]), v)
    assert w.level == 1
    identity = MultilinearMap(matrix2, 1, tuple(matrix2.basis))
    assert apply(annihilation(1, identity), w).project() == alpha[2](matrix2.unit, matrix2.unit)


def test_left_and_right_commute(matrix2, rng):
    alpha = random_series(matrix2, 2, rng)
    b, b1, b2 = (random_element(matrix2, rng) for _ in range(3))
    word = OperatorWord((creation(1), b, additive_variable(alpha, 2), creation(2)))
    v = apply(word, FockVector.vacuum(matrix2, cap=3))
    assert not v.is_zero()
    assert apply(left(b1), apply(right(b2), v)) == apply(right(b2), apply(left(b1), v))


def test_expectation_basics(matrix2, rng):
    alpha = random_series(matrix2, 1, rng)
    b = random_element(matrix2, rng)
    assert expectation([left(b)]) == b
    assert expectation([creation(1)], matrix2) == matrix2.zero
    a0 = annihilation(1, alpha[0])
    assert expectation([a0, b, a0]) == alpha[0].values[0] * b * alpha[0].values[0]


def test_conditional_expectation_property(matrix2, rng):
    alpha = with_constant(random_series(matrix2, 2, rng), matrix2.from_matrix([[1, 1], [0, 2]]))
    b1, b2, b = (random_element(matrix2, rng) for _ in range(3))
    for X in (additive_variable(alpha), multiplicative_variable(alpha)):
        word = OperatorWord((X, b, X))
        assert expectation([b1, word, b2]) == b1 * expectation([word]) * b2


def test_cap_exceeded(matrix2):
    vacuum = FockVector.vacuum(matrix2, cap=0)
    with pytest.raises(CapExceeded):
        apply(creation(1), vacuum)
    assert apply(creation(1), vacuum, lossy=True).is_zero()


def test_index_outside_index_set(matrix2):
    with pytest.raises(FockError):
        apply(creation(3), FockVector.vacuum(matrix2, index_set_size=2, cap=1))


def test_distribution_of_multiplication_operator(matrix2, rng):
    b = random_element(matrix2, rng)
    phi = distribution_series(left(b), 2)
    basis = matrix2.basis
    for i, j in product(range(4), repeat=2):
        assert phi[2].value_at((i, j)) == b * basis[i] * b * basis[j] * b
    assert phi[0].values[0] == b


def test_canonical_additive_first_terms(matrix2, rng):
    beta = random_series(matrix2, 1, rng)
    alpha = canonical_additive(beta)
    b0 = beta[0].values[0]
    assert alpha[0] == beta[0]
    for e in matrix2.basis:
        assert alpha[1](e) == beta[1](e) - b0 * e * b0


def test_canonical_additive_round_trip(matrix2, rng):
    beta = random_series(matrix2, 3, rng)
    alpha = canonical_additive(beta)
    assert distribution_series(additive_variable(alpha), 3) == beta


def test_canonical_multiplicative_scalar_coefficients():
    m = [Fraction(2), Fraction(5), Fraction(-3, 2)]
    alpha = canonical_multiplicative(from_scalars(m))
    assert tuple(to_scalars(alpha)) == scalar_t_coefficients(m)


def test_canonical_multiplicative_of_unit_distribution():
    assert to_scalars(canonical_multiplicative(from_scalars([1, 1, 1, 1]))) == [1, 0, 0, 0]


def test_canonical_multiplicative_round_trip(matrix2, rng):
    beta = with_constant(random_series(matrix2, 3, rng), matrix2.from_matrix([[2, 1], [1, 1]]))
    alpha = canonical_multiplicative(beta)
    assert distribution_series(multiplicative_variable(alpha), 3) == beta


def test_canonical_multiplicative_needs_invertible_constant(matrix2, rng):
    beta = with_constant(random_series(matrix2, 2, rng), matrix2.from_matrix([[1, 2], [2, 4]]))
    with pytest.raises(SingularError):
        canonical_multiplicative(beta)


def centered_expectation(words):
    """E of the product of (a_j - E(a_j)), expanded over subsets."""
    means = [expectation([w]) for w in words]
    total = None
    for keep in product([True, False], repeat=len(words)):
        factors = [w if k else m for w, m, k in zip(words, means, keep)]
        term = expectation(factors)
        if keep.count(False) % 2:
            term = -term
        total = term if total is None else total + term
    return total


@pytest.mark.parametrize("variable", [additive_variable, multiplicative_variable])
@pytest.mark.parametrize("order", [1, 3])
def test_freeness_of_canonical_variables(variable, order, matrix2, rng):
    alpha = random_series(matrix2, order, rng)
    beta = random_series(matrix2, order, rng)
    X = {1: variable(alpha, 1), 2: variable(beta, 2)}
    for length in range(2, 5):
        for start in (1, 2):
            pattern = [start if j % 2 == 0 else 3 - start for j in range(length)]
            words = [X[i] * random_element(matrix2, rng) * X[i] for i in pattern]
            assert centered_expectation(words) == matrix2.zero


def test_sum_of_free_additive_variables(scalar, rng):
    alpha = random_series(scalar, 3, rng)
    beta = random_series(scalar, 3, rng)
    XY = additive_variable(alpha, 1) + additive_variable(beta, 2)
    assert distribution_series(XY, 3) == distribution_series(additive_variable(series_sum(alpha, beta)), 3)


def test_sum_of_free_additive_variables_matrix(matrix2, rng):
    alpha = random_series(matrix2, 2, rng)
    beta = random_series(matrix2, 2, rng)
    XY = additive_variable(alpha, 1) + additive_variable(beta, 2)
    assert distribution_series(XY, 2) == distribution_series(additive_variable(series_sum(alpha, beta)), 2)


def x_operator(alpha, k):
    return creation(1) if k == -1 else annihilation(1, alpha[k])


def test_x_words_evaluate_bracket_sums(matrix2, rng):
    alpha = random_series(matrix2, 3, rng)
    for n in range(0, 4):
        encodings = {tuple(k_encode(pi).values): pi for pi in enumerate_partitions(n + 1, Mode.NC)}
        slots = [random_element(matrix2, rng) for _ in range(n)]
        for k in product(range(-1, n + 1), repeat=n + 1):
            factors = [x_operator(alpha, k[0])]
            for j in range(n):
                factors += [slots[j], x_operator(alpha, k[j + 1])]
            value = expectation(factors, matrix2)
            if k in encodings:
                assert value == alpha_bracket(alpha, encodings[k], slots)
            else:
                assert value == matrix2.zero


def y_operator(alpha, s):
    form = alpha[s.k]
    return replacement(1, form) if s.starred else annihilation(1, form)


def test_y_words_evaluate_angle_sums(scalar, rng):
    alpha = with_constant(random_series(scalar, 3, rng), scalar.element([Fraction(3, 2)]))
    for n in range(0, 4):
        encodings = {s_encode(pi).values: pi for pi in enumerate_partitions(n + 1)}
        slots = [random_element(scalar, rng) for _ in range(n)]
        values = [SValue(k, starred) for k in range(n + 1) for starred in (False, True)]
        for s in product(values, repeat=n + 1):
            factors = [y_operator(alpha, s[0])]
            for j in range(n):
                factors += [slots[j], y_operator(alpha, s[j + 1])]
            value = expectation(factors, scalar)
            if s in encodings:
                assert value == alpha_angle(alpha, encodings[s], slots)
            else:
                assert value == scalar.zero


def test_series_operators_collect_components(matrix2, rng):
    alpha = random_series(matrix2, 3, rng)
    assert [p.degree for p in V(1, alpha).summands] == [0, 1, 2, 3]
    assert [p.raise_by for p in multiplicative_variable(alpha).summands] == [0, -1, -2, -3, 1, 0, -1, -2]
