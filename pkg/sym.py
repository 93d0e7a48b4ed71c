"""Symmetrization of formal series and the polar/diagonal correspondence."""
import logging
from fractions import Fraction
from itertools import combinations, permutations
from math import factorial
from typing import Callable, Tuple

from algebra import AlgebraDescriptor, AlgebraElement
from mfs import MFSeries, MultilinearMap, series_compose, series_product

logger = logging.getLogger(__name__)

Polynomial = Callable[[AlgebraElement], AlgebraElement]


def symmetrize_map(alpha_k: MultilinearMap) -> MultilinearMap:
    k = alpha_k.degree
    if k < 2:
        return alpha_k
    perms = list(permutations(range(k)))
    weight = Fraction(1, factorial(k))
    descriptor = alpha_k.descriptor

    def value(t: Tuple[int, ...]) -> AlgebraElement:
        total = descriptor.zero
        for sigma in perms:
            total = total + alpha_k.value_at(tuple(t[s] for s in sigma))
        return total.scale(weight)

    return MultilinearMap.from_function(descriptor, k, value)


def symmetrize(alpha: MFSeries) -> MFSeries:
    return MFSeries(alpha.descriptor, tuple(symmetrize_map(c) for c in alpha.components))


def is_symmetric(alpha: MFSeries) -> bool:
    return symmetrize(alpha) == alpha


def sym_product(alpha: MFSeries, beta: MFSeries) -> MFSeries:
    return symmetrize(series_product(alpha, beta))


def sym_compose(alpha: MFSeries, beta: MFSeries) -> MFSeries:
    return symmetrize(series_compose(alpha, beta))


def polarize(P: Polynomial, m: int, descriptor: AlgebraDescriptor) -> MultilinearMap:
    """Symmetric m-linear map whose diagonal is the degree-m homogeneous P.

    Evaluated on basis tuples by the finite-difference sum
    (1/m!) sum over nonempty S of (-1)^(m-|S|) P(sum_{i in S} e_{t_i}).
    """
    if m == 0:
        return MultilinearMap.constant(P(descriptor.zero))
    basis = descriptor.basis
    weight = Fraction(1, factorial(m))
    subsets = [s for r in range(1, m + 1) for s in combinations(range(m), r)]

    def value(t: Tuple[int, ...]) -> AlgebraElement:
        total = descriptor.zero
        for s in subsets:
            point = descriptor.zero
            for i in s:
                point = point + basis[t[i]]
            term = P(point)
            total = total + term if (m - len(s)) % 2 == 0 else total - term
        return total.scale(weight)

    return MultilinearMap.from_function(descriptor, m, value)


def diagonal(alpha_m: MultilinearMap) -> Polynomial:
    """The homogeneous polynomial b -> alpha_m(b, ..., b)."""
    m = alpha_m.degree

    def evaluate(b: AlgebraElement) -> AlgebraElement:
        return alpha_m(*([b] * m))

    return evaluate


def series_polynomial(alpha: MFSeries) -> Polynomial:
    """Sum of the diagonals of every retained component."""
    parts = [diagonal(c) for c in alpha.components]

    def evaluate(b: AlgebraElement) -> AlgebraElement:
        total = alpha.descriptor.zero
        for p in parts:
            total = total + p(b)
        return total

    return evaluate
