from fractions import Fraction

from algebra import random_element
from mfs import MFSeries, MultilinearMap, identity_series, one_series, random_series, series_comp_inverse
from sym import (diagonal, is_symmetric, polarize, series_polynomial, sym_compose, sym_product, symmetrize,
                 symmetrize_map)


def supported_up_to(alpha, degree):
    comps = [c if c.degree <= degree else MultilinearMap.zero(alpha.descriptor, c.degree) for c in alpha.components]
    return MFSeries(alpha.descriptor, tuple(comps))


def test_symmetrize_idempotent(matrix2, rng):
    alpha = random_series(matrix2, 3, rng)
    once = symmetrize(alpha)
    assert symmetrize(once) == once
    assert is_symmetric(once)
    assert once[0] == alpha[0] and once[1] == alpha[1]


def test_symmetrize_is_identity_on_scalars(scalar, rng):
    alpha = random_series(scalar, 4, rng)
    assert symmetrize(alpha) == alpha


def test_symmetrized_product_map(matrix2):
    basis = matrix2.basis
    product_map = MultilinearMap.from_function(matrix2, 2, lambda t: basis[t[0]] * basis[t[1]])
    sym = symmetrize_map(product_map)
    for i in range(4):
        for j in range(4):
            expected = (basis[i] * basis[j] + basis[j] * basis[i]).scale(Fraction(1, 2))
            assert sym.value_at((i, j)) == expected


def test_symmetric_product(matrix2, rng):
    a = random_series(matrix2, 3, rng)
    b = random_series(matrix2, 3, rng)
    assert sym_product(a, one_series(matrix2, 3)) == symmetrize(a)
    assert sym_product(a, b) == sym_product(symmetrize(a), b) == sym_product(a, symmetrize(b))


def test_symmetric_composition(matrix2, rng):
    a = random_series(matrix2, 3, rng)
    b = random_series(matrix2, 3, rng, constant="zero")
    assert sym_compose(a, identity_series(matrix2, 3)) == symmetrize(a)
    expected = sym_compose(a, b)
    assert sym_compose(a, symmetrize(b)) == expected
    assert sym_compose(symmetrize(a), b) == expected


def test_symmetric_composition_associative(matrix2, rng):
    a = symmetrize(random_series(matrix2, 3, rng))
    b = symmetrize(random_series(matrix2, 3, rng, constant="zero"))
    c = symmetrize(random_series(matrix2, 3, rng, constant="zero"))
    assert sym_compose(sym_compose(a, b), c) == sym_compose(a, sym_compose(b, c))


def test_symmetrized_comp_inverse(matrix2, rng):
    base = random_series(matrix2, 3, rng, constant="zero")
    linear = MultilinearMap(matrix2, 1, tuple(e.scale(3) for e in matrix2.basis))
    alpha = symmetrize(MFSeries(matrix2, (base[0], linear) + base.components[2:]))
    inverse = symmetrize(series_comp_inverse(alpha))
    assert sym_compose(inverse, alpha) == identity_series(matrix2, 3)
    assert sym_compose(alpha, inverse) == identity_series(matrix2, 3)


def test_polarize_square_on_scalars(scalar):
    polar = polarize(lambda b: b * b, 2, scalar)
    h1, h2 = scalar.element([3]), scalar.element([Fraction(-1, 2)])
    assert polar(h1, h2) == h1 * h2


def test_polarize_linear_map(matrix2, rng):
    alpha_1 = random_series(matrix2, 1, rng)[1]
    assert polarize(diagonal(alpha_1), 1, matrix2) == alpha_1


def test_polarize_recovers_symmetric_part(matrix2, rng):
    alpha_2 = random_series(matrix2, 2, rng)[2]
    assert polarize(diagonal(alpha_2), 2, matrix2) == symmetrize_map(alpha_2)
    sym = symmetrize_map(alpha_2)
    assert polarize(diagonal(sym), 2, matrix2) == sym


def test_diagonal_homogeneous(matrix2, rng):
    alpha_3 = random_series(matrix2, 3, rng)[3]
    b = random_element(matrix2, rng)
    assert diagonal(alpha_3)(b.scale(2)) == diagonal(alpha_3)(b).scale(8)
    constant = random_series(matrix2, 0, rng)[0]
    assert diagonal(constant)(b) == constant.values[0]


def test_polynomial_product_and_composition(matrix2, rng):
    a = symmetrize(supported_up_to(random_series(matrix2, 4, rng), 2))
    b = symmetrize(supported_up_to(random_series(matrix2, 4, rng), 2))
    c = symmetrize(supported_up_to(random_series(matrix2, 4, rng, constant="zero"), 2))
    P, Q, R = series_polynomial(a), series_polynomial(b), series_polynomial(c)
    product = series_polynomial(sym_product(a, b))
    composite = series_polynomial(sym_compose(a, c))
    for _ in range(20):
        x = random_element(matrix2, rng)
        assert product(x) == P(x) * Q(x)
        assert composite(x) == P(R(x))
