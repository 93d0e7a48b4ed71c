"""Finite-dimensional unital algebras over the rationals.

An algebra is described by its structure constants c[i][j][k] with
e_i e_j = sum_k c[i][j][k] e_k. Only the scalar algebra Q and the full matrix
algebras M_m(Q) are offered; for M_m the basis is the matrix units E_ij in
row-major order, so E_ij has index (i-1)*m + (j-1).
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from itertools import product
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from utils import MulffsError, SchemaError, format_rational, parse_rational, require_field

logger = logging.getLogger(__name__)


class AlgebraError(MulffsError):
    """Base exception for algebra arithmetic."""


class DescriptorMismatch(AlgebraError):
    """Raised when operands live in different algebras or have the wrong size."""


class SingularError(AlgebraError):
    """Raised when an element or linear map that must be inverted is singular."""


def identity_matrix(n: int) -> np.ndarray:
    return np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)


def inverse_matrix(matrix: np.ndarray) -> np.ndarray:
    """Exact inverse of a square object array of Fractions.

    Gauss-Jordan elimination taking the first nonzero entry at or below the
    diagonal as pivot.
    """
    assert len(matrix.shape) == 2 and matrix.shape[0] == matrix.shape[1]
    n = matrix.shape[0]

    X = np.array([[Fraction(v) for v in row] for row in matrix], dtype=object).reshape(n, n)
    Y = identity_matrix(n)

    for i in range(n):
        for j in range(i, n):
            if X[j, i] != 0:
                if i != j:
                    X[[i, j]] = X[[j, i]]
                    Y[[i, j]] = Y[[j, i]]
                break
        else:
            raise SingularError(f"matrix is not invertible (no pivot in column {i + 1})")

        pivot = X[i, i]
        Y[i, :] = Y[i, :] / pivot
        X[i, :] = X[i, :] / pivot

        for j in range(n):
            if j != i and X[j, i] != 0:
                factor = X[j, i]
                Y[j, :] = Y[j, :] - factor * Y[i, :]
                X[j, :] = X[j, :] - factor * X[i, :]

    return Y


@dataclass(frozen=True)
class AlgebraDescriptor:
    kind: str
    m: int = 1

    def __post_init__(self):
        if self.kind not in ("scalar", "matrix"):
            raise AlgebraError(f"unknown algebra kind {self.kind!r}")
        if self.m < 1:
            raise AlgebraError(f"matrix size must be at least 1, got {self.m}")
        if self.kind == "scalar" and self.m != 1:
            raise AlgebraError("the scalar algebra has m = 1")

    @property
    def dim(self) -> int:
        return 1 if self.kind == "scalar" else self.m * self.m

    @cached_property
    def structure_constants(self) -> np.ndarray:
        d = self.dim
        c = np.full((d, d, d), Fraction(0), dtype=object)
        if self.kind == "scalar":
            c[0, 0, 0] = Fraction(1)
            return c
        m = self.m
        for i, j, l in product(range(m), repeat=3):
            # E_ij E_jl = E_il
            c[i * m + j, j * m + l, i * m + l] = Fraction(1)
        return c

    @cached_property
    def _mul_table(self) -> Tuple[Tuple[Tuple[int, int, Fraction], ...], ...]:
        c = self.structure_constants
        rows = []
        for i in range(self.dim):
            entries = [(int(j), int(k), c[i, j, k]) for j, k in np.argwhere(c[i] != 0)]
            rows.append(tuple(entries))
        return tuple(rows)

    @cached_property
    def unit(self) -> "AlgebraElement":
        if self.kind == "scalar":
            return self.element([1])
        return self.element([int(i == j) for i in range(self.m) for j in range(self.m)])

    @cached_property
    def basis(self) -> Tuple["AlgebraElement", ...]:
        d = self.dim
        return tuple(self.element([int(i == k) for i in range(d)]) for k in range(d))

    @cached_property
    def zero(self) -> "AlgebraElement":
        return self.element([0] * self.dim)

    def element(self, coords: Iterable[Any]) -> "AlgebraElement":
        return AlgebraElement(self, tuple(Fraction(c) for c in coords))

    def from_matrix(self, rows: Sequence[Sequence[Any]]) -> "AlgebraElement":
        if self.kind == "scalar":
            return self.element([rows[0][0]])
        return self.element([rows[i][j] for i in range(self.m) for j in range(self.m)])

    def is_associative(self) -> bool:
        c = self.structure_constants
        d = self.dim
        for i, j, k in product(range(d), repeat=3):
            left = np.dot(c[i, j, :], c[:, k, :])
            right = np.dot(c[j, k, :], c[i, :, :])
            if any(a != b for a, b in zip(left, right)):
                return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        if self.kind == "scalar":
            return {"kind": "scalar"}
        return {"kind": "matrix", "m": self.m}

    @classmethod
    def from_dict(cls, data: Any, path: str = "$") -> "AlgebraDescriptor":
        kind = require_field(data, "kind", path)
        if kind == "scalar":
            return make_algebra("scalar")
        if kind == "matrix":
            m = require_field(data, "m", path)
            if not isinstance(m, int) or isinstance(m, bool) or m < 1:
                raise SchemaError(f"{path}.m", "expected a positive integer")
            return make_algebra("matrix", m)
        raise SchemaError(f"{path}.kind", f"unknown algebra kind {kind!r}")

    def __repr__(self) -> str:
        return "Q" if self.kind == "scalar" else f"M_{self.m}(Q)"


@dataclass(frozen=True)
class AlgebraElement:
    descriptor: AlgebraDescriptor
    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != self.descriptor.dim:
            raise DescriptorMismatch(
                f"expected {self.descriptor.dim} coordinates for {self.descriptor!r}, got {len(self.coords)}")

    def _check(self, other: "AlgebraElement") -> None:
        if other.descriptor is not self.descriptor and other.descriptor != self.descriptor:
            raise DescriptorMismatch(f"{self.descriptor!r} vs {other.descriptor!r}")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.descriptor, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.descriptor, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.descriptor, tuple(-a for a in self.coords))

    def scale(self, factor: Any) -> "AlgebraElement":
        factor = Fraction(factor)
        return AlgebraElement(self.descriptor, tuple(factor * a for a in self.coords))

    def __mul__(self, other: Any) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            return alg_mul(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other: Any) -> "AlgebraElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not any(self.coords)

    def support(self) -> List[Tuple[int, Fraction]]:
        return [(i, c) for i, c in enumerate(self.coords) if c]

    def inverse(self) -> "AlgebraElement":
        return alg_invert(self)

    def as_matrix(self) -> List[List[Fraction]]:
        m = self.descriptor.m
        return [[self.coords[i * m + j] for j in range(m)] for i in range(m)]

    def to_list(self) -> List[str]:
        return [format_rational(c) for c in self.coords]

    @classmethod
    def from_list(cls, descriptor: AlgebraDescriptor, data: Any, path: str = "$") -> "AlgebraElement":
        if not isinstance(data, list):
            raise SchemaError(path, "expected an array of rationals")
        if len(data) != descriptor.dim:
            raise SchemaError(path, f"expected {descriptor.dim} coordinates, got {len(data)}")
        return AlgebraElement(descriptor, tuple(parse_rational(v, f"{path}[{i}]") for i, v in enumerate(data)))

    def __repr__(self) -> str:
        return f"AlgebraElement({', '.join(str(c) for c in self.coords)})"


def make_algebra(kind: str, m: int = 1) -> AlgebraDescriptor:
    """Build the scalar algebra ("scalar") or the matrix algebra M_m ("matrix")."""
    if kind == "scalar":
        return AlgebraDescriptor("scalar")
    if kind == "matrix":
        return AlgebraDescriptor("matrix", m)
    if kind.startswith("matrix") and kind[6:].isdigit():
        return AlgebraDescriptor("matrix", int(kind[6:]))
    raise AlgebraError(f"unknown algebra kind {kind!r}")


def alg_mul(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    x._check(y)
    descriptor = x.descriptor
    table = descriptor._mul_table
    out = [Fraction(0)] * descriptor.dim
    ycoords = y.coords
    for i, xi in enumerate(x.coords):
        if not xi:
            continue
        for j, k, c in table[i]:
            yj = ycoords[j]
            if yj:
                out[k] += c * xi * yj
    return AlgebraElement(descriptor, tuple(out))


def multiply(*factors: AlgebraElement) -> AlgebraElement:
    return reduce(alg_mul, factors)


def left_multiplication_matrix(x: AlgebraElement) -> np.ndarray:
    """Column j holds the coordinates of x e_j."""
    basis = x.descriptor.basis
    columns = [alg_mul(x, e).coords for e in basis]
    return np.array(columns, dtype=object).T


def alg_invert(x: AlgebraElement) -> AlgebraElement:
    """Two-sided inverse of x, or SingularError.

    Solves (left multiplication by x) y = unit exactly and then checks y x = unit.
    """
    descriptor = x.descriptor
    try:
        inverse = inverse_matrix(left_multiplication_matrix(x))
    except SingularError:
        raise SingularError(f"{x!r} is not invertible in {descriptor!r}") from None
    unit = np.array(descriptor.unit.coords, dtype=object)
    y = descriptor.element(inverse.dot(unit))
    if alg_mul(y, x) != descriptor.unit or alg_mul(x, y) != descriptor.unit:
        raise SingularError(f"{x!r} has a one-sided inverse only")
    return y


def random_element(descriptor: AlgebraDescriptor, rng: np.random.Generator,
                   numerator_range: int = 3, denominator_powers: int = 2) -> AlgebraElement:
    """Coordinates are integers in [-r, r] divided by 1, 2, ..., 2**(powers-1)."""
    numerators = rng.integers(-numerator_range, numerator_range + 1, size=descriptor.dim)
    exponents = rng.integers(0, denominator_powers, size=descriptor.dim)
    return descriptor.element(Fraction(int(a), 2 ** int(e)) for a, e in zip(numerators, exponents))
