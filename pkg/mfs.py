"""Truncated formal multilinear function series over an AlgebraDescriptor.

A series alpha = (alpha_0, ..., alpha_N) stores each alpha_k as a dense table of
its values on basis tuples; tuple (i_1, ..., i_k) sits at the row-major index
sum(i_j * d**(k-j)) (0-based indices). Every binary operation truncates to the
smaller order of its operands.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from algebra import (AlgebraDescriptor, AlgebraElement, DescriptorMismatch, SingularError, make_algebra,
                     alg_invert, inverse_matrix, random_element)
from config import MulffsConfig
from utils import MulffsError, SchemaError, require_field, track_performance

logger = logging.getLogger(__name__)


class SeriesError(MulffsError):
    """Base exception for formal series operations."""


class NonzeroConstantTerm(SeriesError):
    """Raised when a series substituted into another has a nonzero constant term."""


class NotCompInvertible(SeriesError):
    """Raised when the linear term of a series is not an invertible map on B."""


class SizeGuardExceeded(SeriesError):
    """Raised when a dense table would exceed the configured cell cap."""


class ArityMismatch(SeriesError):
    """Raised when a multilinear map is evaluated on the wrong number of arguments."""


class OrderExceeded(SeriesError):
    """Raised when a component beyond the truncation order is requested."""


def check_size(descriptor: AlgebraDescriptor, degree: int) -> None:
    cap = MulffsConfig.max_cells()
    cells = descriptor.dim ** degree
    if cells > cap:
        raise SizeGuardExceeded(
            f"degree {degree} table over d={descriptor.dim} needs {cells} cells; "
            f"cap is {cap} (set MULFFS_MAX_CELLS to raise it)")


def basis_tuples(d: int, k: int) -> Iterator[Tuple[int, ...]]:
    """All k-tuples of 0-based basis indices in row-major order."""
    return product(range(d), repeat=k)


def tuple_index(indices: Sequence[int], d: int) -> int:
    idx = 0
    for i in indices:
        idx = idx * d + i
    return idx


def compositions(n: int, k: int) -> Iterator[Tuple[int, ...]]:
    """Ordered k-tuples of positive integers summing to n."""
    if k == 1:
        if n >= 1:
            yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class MultilinearMap:
    descriptor: AlgebraDescriptor
    degree: int
    values: Tuple[AlgebraElement, ...]

    def __post_init__(self):
        expected = self.descriptor.dim ** self.degree
        if len(self.values) != expected:
            raise SeriesError(f"degree {self.degree} table needs {expected} entries, got {len(self.values)}")

    @classmethod
    def from_function(cls, descriptor: AlgebraDescriptor, degree: int,
                      fn: Callable[[Tuple[int, ...]], AlgebraElement]) -> "MultilinearMap":
        """Tabulate fn, which receives a tuple of 0-based basis indices."""
        check_size(descriptor, degree)
        return cls(descriptor, degree, tuple(fn(t) for t in basis_tuples(descriptor.dim, degree)))

    @classmethod
    def zero(cls, descriptor: AlgebraDescriptor, degree: int) -> "MultilinearMap":
        check_size(descriptor, degree)
        return cls(descriptor, degree, (descriptor.zero,) * descriptor.dim ** degree)

    @classmethod
    def constant(cls, value: AlgebraElement) -> "MultilinearMap":
        return cls(value.descriptor, 0, (value,))

    def value_at(self, indices: Sequence[int]) -> AlgebraElement:
        return self.values[tuple_index(indices, self.descriptor.dim)]

    def __call__(self, *args: AlgebraElement) -> AlgebraElement:
        if len(args) != self.degree:
            raise ArityMismatch(f"degree {self.degree} map called with {len(args)} arguments")
        if self.degree == 0:
            return self.values[0]
        for a in args:
            if a.descriptor != self.descriptor:
                raise DescriptorMismatch(f"{a.descriptor!r} vs {self.descriptor!r}")

        d = self.descriptor.dim
        out = [Fraction(0)] * d
        for combo in product(*(a.support() for a in args)):
            idx = 0
            coef = Fraction(1)
            for i, c in combo:
                idx = idx * d + i
                coef *= c
            for k, v in enumerate(self.values[idx].coords):
                if v:
                    out[k] += coef * v
        return AlgebraElement(self.descriptor, tuple(out))

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values)

    def __add__(self, other: "MultilinearMap") -> "MultilinearMap":
        self._check(other)
        return MultilinearMap(self.descriptor, self.degree, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "MultilinearMap") -> "MultilinearMap":
        self._check(other)
        return MultilinearMap(self.descriptor, self.degree, tuple(a - b for a, b in zip(self.values, other.values)))

    def __neg__(self) -> "MultilinearMap":
        return MultilinearMap(self.descriptor, self.degree, tuple(-a for a in self.values))

    def scale(self, factor: Any) -> "MultilinearMap":
        return MultilinearMap(self.descriptor, self.degree, tuple(a.scale(factor) for a in self.values))

    def _check(self, other: "MultilinearMap") -> None:
        if other.descriptor != self.descriptor or other.degree != self.degree:
            raise DescriptorMismatch(
                f"cannot combine degree {self.degree} over {self.descriptor!r} "
                f"with degree {other.degree} over {other.descriptor!r}")

    def to_list(self) -> List[List[str]]:
        return [v.to_list() for v in self.values]


@dataclass(frozen=True)
class MFSeries:
    descriptor: AlgebraDescriptor
    components: Tuple[MultilinearMap, ...]

    def __post_init__(self):
        if not self.components:
            raise SeriesError("a series needs at least its constant term")
        for k, c in enumerate(self.components):
            if c.degree != k:
                raise SeriesError(f"component {k} has degree {c.degree}")
            if c.descriptor != self.descriptor:
                raise DescriptorMismatch(f"component {k} lives over {c.descriptor!r}, not {self.descriptor!r}")

    @property
    def order(self) -> int:
        return len(self.components) - 1

    def __getitem__(self, k: int) -> MultilinearMap:
        if k < 0 or k > self.order:
            raise OrderExceeded(f"component {k} requested from a series of order {self.order}")
        return self.components[k]

    def truncate(self, order: int) -> "MFSeries":
        if order > self.order:
            raise OrderExceeded(f"cannot extend a series of order {self.order} to {order}")
        return MFSeries(self.descriptor, self.components[:order + 1])

    def __add__(self, other: "MFSeries") -> "MFSeries":
        return series_sum(self, other)

    def __sub__(self, other: "MFSeries") -> "MFSeries":
        return series_sum(self, -other)

    def __neg__(self) -> "MFSeries":
        return MFSeries(self.descriptor, tuple(-c for c in self.components))

    def __mul__(self, other: "MFSeries") -> "MFSeries":
        return series_product(self, other)

    def scale(self, factor: Any) -> "MFSeries":
        return MFSeries(self.descriptor, tuple(c.scale(factor) for c in self.components))

    def compose(self, other: "MFSeries") -> "MFSeries":
        return series_compose(self, other)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algebra": self.descriptor.to_dict(),
            "order": self.order,
            "components": [c.to_list() for c in self.components],
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "$") -> "MFSeries":
        descriptor = AlgebraDescriptor.from_dict(require_field(data, "algebra", path), f"{path}.algebra")
        order = require_field(data, "order", path)
        if not isinstance(order, int) or isinstance(order, bool) or order < 0:
            raise SchemaError(f"{path}.order", "expected a non-negative integer")
        raw = require_field(data, "components", path)
        if not isinstance(raw, list) or len(raw) != order + 1:
            raise SchemaError(f"{path}.components", f"expected an array of {order + 1} components")

        d = descriptor.dim
        components = []
        for k, table in enumerate(raw):
            where = f"{path}.components[{k}]"
            check_size(descriptor, k)
            if not isinstance(table, list) or len(table) != d ** k:
                raise SchemaError(where, f"expected {d ** k} algebra elements")
            values = tuple(AlgebraElement.from_list(descriptor, v, f"{where}[{i}]") for i, v in enumerate(table))
            components.append(MultilinearMap(descriptor, k, values))
        return cls(descriptor, tuple(components))

    def __repr__(self) -> str:
        return f"MFSeries({self.descriptor!r}, order={self.order})"


def _common(alpha: MFSeries, beta: MFSeries) -> Tuple[AlgebraDescriptor, int]:
    if alpha.descriptor != beta.descriptor:
        raise DescriptorMismatch(f"{alpha.descriptor!r} vs {beta.descriptor!r}")
    return alpha.descriptor, min(alpha.order, beta.order)


def build_series(descriptor: AlgebraDescriptor, order: int,
                 fn: Callable[[int, Tuple[int, ...]], AlgebraElement]) -> MFSeries:
    """Tabulate fn(n, basis_tuple) for n = 0..order."""
    return MFSeries(descriptor, tuple(
        MultilinearMap.from_function(descriptor, n, lambda t, n=n: fn(n, t)) for n in range(order + 1)))


def zero_series(descriptor: AlgebraDescriptor, order: int) -> MFSeries:
    return MFSeries(descriptor, tuple(MultilinearMap.zero(descriptor, n) for n in range(order + 1)))


def constant_series(value: AlgebraElement, order: int) -> MFSeries:
    descriptor = value.descriptor
    comps = [MultilinearMap.constant(value)] + [MultilinearMap.zero(descriptor, n) for n in range(1, order + 1)]
    return MFSeries(descriptor, tuple(comps))


def one_series(descriptor: AlgebraDescriptor, order: int) -> MFSeries:
    return constant_series(descriptor.unit, order)


def identity_series(descriptor: AlgebraDescriptor, order: int) -> MFSeries:
    """The series I with I_1(b) = b and every other component zero."""
    comps = [MultilinearMap.zero(descriptor, n) for n in range(order + 1)]
    if order >= 1:
        comps[1] = MultilinearMap(descriptor, 1, descriptor.basis)
    return MFSeries(descriptor, tuple(comps))


def series_sum(alpha: MFSeries, beta: MFSeries) -> MFSeries:
    descriptor, order = _common(alpha, beta)
    return MFSeries(descriptor, tuple(alpha.components[n] + beta.components[n] for n in range(order + 1)))


def series_product(alpha: MFSeries, beta: MFSeries) -> MFSeries:
    """(alpha beta)_n(b_1..b_n) = sum_k alpha_k(b_1..b_k) beta_{n-k}(b_{k+1}..b_n)."""
    descriptor, order = _common(alpha, beta)

    def component(n: int, t: Tuple[int, ...]) -> AlgebraElement:
        total = descriptor.zero
        for k in range(n + 1):
            left = alpha.components[k].value_at(t[:k])
            if left.is_zero():
                continue
            right = beta.components[n - k].value_at(t[k:])
            if not right.is_zero():
                total = total + left * right
        return total

    return build_series(descriptor, order, component)


def series_compose(alpha: MFSeries, beta: MFSeries) -> MFSeries:
    """(alpha o beta)_n = sum over k and compositions (p_1..p_k) of n of
    alpha_k(beta_{p_1}(...), ..., beta_{p_k}(...)); requires beta_0 = 0."""
    descriptor, order = _common(alpha, beta)
    if not beta.components[0].is_zero():
        raise NonzeroConstantTerm("the inner series of a composition must have zero constant term")

    def component(n: int, t: Tuple[int, ...]) -> AlgebraElement:
        if n == 0:
            return alpha.components[0].values[0]
        total = descriptor.zero
        for k in range(1, n + 1):
            outer = alpha.components[k]
            if outer.is_zero():
                continue
            for parts in compositions(n, k):
                args = []
                start = 0
                for p in parts:
                    args.append(beta.components[p].value_at(t[start:start + p]))
                    start += p
                if any(a.is_zero() for a in args):
                    continue
                total = total + outer(*args)
        return total

    return build_series(descriptor, order, component)


@track_performance
def series_mul_inverse(alpha: MFSeries) -> MFSeries:
    """Multiplicative inverse; raises SingularError when alpha_0 is not invertible."""
    descriptor = alpha.descriptor
    a0_inv = alg_invert(alpha.components[0].values[0])
    comps: List[MultilinearMap] = [MultilinearMap.constant(a0_inv)]

    for n in range(1, alpha.order + 1):
        def value(t: Tuple[int, ...], n: int = n) -> AlgebraElement:
            total = descriptor.zero
            for k in range(n):
                left = comps[k].value_at(t[:k])
                if left.is_zero():
                    continue
                right = alpha.components[n - k].value_at(t[k:])
                if not right.is_zero():
                    total = total + left * right
            return -(total * a0_inv)
        comps.append(MultilinearMap.from_function(descriptor, n, value))
    return MFSeries(descriptor, tuple(comps))


def linear_map_matrix(alpha_1: MultilinearMap) -> np.ndarray:
    """Column j holds the coordinates of alpha_1(e_j)."""
    return np.array([v.coords for v in alpha_1.values], dtype=object).T


@track_performance
def series_comp_inverse(alpha: MFSeries) -> MFSeries:
    """Inverse for composition: alpha o alpha'' = alpha'' o alpha = I."""
    descriptor = alpha.descriptor
    if not alpha.components[0].is_zero():
        raise NonzeroConstantTerm("only series with zero constant term have a composition inverse")
    if alpha.order == 0:
        return zero_series(descriptor, 0)

    try:
        a1_inv = inverse_matrix(linear_map_matrix(alpha.components[1]))
    except SingularError:
        raise NotCompInvertible("the linear term is not an invertible map on the algebra") from None

    def apply_a1_inv(x: AlgebraElement) -> AlgebraElement:
        return descriptor.element(a1_inv.dot(np.array(x.coords, dtype=object)))

    comps: List[MultilinearMap] = [
        MultilinearMap.zero(descriptor, 0),
        MultilinearMap(descriptor, 1, tuple(apply_a1_inv(e) for e in descriptor.basis)),
    ]
    for n in range(2, alpha.order + 1):
        def value(t: Tuple[int, ...], n: int = n) -> AlgebraElement:
            total = descriptor.zero
            for k in range(2, n + 1):
                outer = alpha.components[k]
                if outer.is_zero():
                    continue
                for parts in compositions(n, k):
                    args = []
                    start = 0
                    for p in parts:
                        args.append(comps[p].value_at(t[start:start + p]))
                        start += p
                    if any(a.is_zero() for a in args):
                        continue
                    total = total + outer(*args)
            return -apply_a1_inv(total)
        comps.append(MultilinearMap.from_function(descriptor, n, value))
    return MFSeries(descriptor, tuple(comps))


def lower_degree(alpha: MFSeries) -> Union[int, float]:
    """Least n with alpha_n != 0, or math.inf when every retained component vanishes."""
    for n, c in enumerate(alpha.components):
        if not c.is_zero():
            return n
    return math.inf


def series_power(alpha: MFSeries, k: int) -> MFSeries:
    result = one_series(alpha.descriptor, alpha.order)
    for _ in range(k):
        result = series_product(result, alpha)
    return result


def geometric_series(alpha: MFSeries) -> MFSeries:
    """1 + alpha + alpha^2 + ... + alpha^N, the inverse of 1 - alpha when alpha_0 = 0."""
    result = one_series(alpha.descriptor, alpha.order)
    power = result
    for _ in range(alpha.order):
        power = series_product(power, alpha)
        result = series_sum(result, power)
    return result


def random_series(descriptor: AlgebraDescriptor, order: int, rng: np.random.Generator,
                  constant: Optional[str] = None) -> MFSeries:
    """Random series with small rational coordinates.

    constant: None leaves alpha_0 random, "unit" forces alpha_0 = 1, "zero" forces alpha_0 = 0.
    """
    def draw(_t: Tuple[int, ...]) -> AlgebraElement:
        return random_element(descriptor, rng, MulffsConfig.RANDOM_NUMERATOR_RANGE,
                              MulffsConfig.RANDOM_DENOMINATOR_POWERS)

    comps = [MultilinearMap.from_function(descriptor, n, draw) for n in range(order + 1)]
    if constant == "unit":
        comps[0] = MultilinearMap.constant(descriptor.unit)
    elif constant == "zero":
        comps[0] = MultilinearMap.zero(descriptor, 0)
    elif constant is not None:
        raise ValueError(f"unknown constant mode {constant!r}")
    return MFSeries(descriptor, tuple(comps))


def from_scalars(values: Sequence[Any]) -> MFSeries:
    """Scalar-algebra series whose k-th component is values[k] times the k-fold product."""
    descriptor = make_algebra("scalar")
    return MFSeries(descriptor, tuple(
        MultilinearMap(descriptor, k, (descriptor.element([v]),)) for k, v in enumerate(values)))


def to_scalars(alpha: MFSeries) -> List[Fraction]:
    if alpha.descriptor.kind != "scalar":
        raise DescriptorMismatch(f"expected a scalar series, got one over {alpha.descriptor!r}")
    return [c.values[0].coords[0] for c in alpha.components]
