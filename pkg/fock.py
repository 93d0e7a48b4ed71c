"""Truncated algebraic Fock space and its creation/annihilation operators.

A vector is a sparse map from (word, slot) to rationals. A word is a tuple of
letters (i, a): index i in {1..|I|} and 0-based basis index a of B, so the
letter stands for the function I -> B taking i to e_a and every other index to
zero. The slot j is the basis index of the trailing B factor; the empty word
is the B-Omega component.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from algebra import AlgebraDescriptor, AlgebraElement, alg_invert
from config import MulffsConfig
from mfs import MFSeries, MultilinearMap, build_series
from utils import MulffsError, format_rational, track_performance

logger = logging.getLogger(__name__)

Letter = Tuple[int, int]
Word = Tuple[Letter, ...]
Key = Tuple[Word, int]


class FockError(MulffsError):
    """Base exception for the Fock-space model."""


class CapExceeded(FockError):
    """Raised when a creation would leave the truncated space."""


class PrimitiveKind(str, Enum):
    LEFT = "lambda"
    RIGHT = "rho"
    CREATE = "L"
    ANNIHILATE = "V"
    REPLACE = "W"


@dataclass(frozen=True)
class Primitive:
    kind: PrimitiveKind
    index: int = 0
    element: Optional[AlgebraElement] = None
    form: Optional[MultilinearMap] = None

    @property
    def degree(self) -> int:
        return self.form.degree if self.form is not None else 0

    @property
    def raise_by(self) -> int:
        """Change in tensor level; annihilations are negative."""
        if self.kind is PrimitiveKind.CREATE:
            return 1
        if self.kind is PrimitiveKind.ANNIHILATE:
            return -self.degree
        if self.kind is PrimitiveKind.REPLACE:
            return 1 - self.degree
        return 0

    def __str__(self) -> str:
        if self.kind in (PrimitiveKind.LEFT, PrimitiveKind.RIGHT):
            return f"{self.kind.value}(b)"
        if self.kind is PrimitiveKind.CREATE:
            return f"L_{self.index}"
        return f"{self.kind.value}_{self.index},{self.degree}"


@dataclass(frozen=True)
class FockOperator:
    """A finite sum of primitives."""
    summands: Tuple[Primitive, ...]

    def __add__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.summands + other.summands)

    def __mul__(self, other: Union["FockOperator", AlgebraElement, "OperatorWord"]) -> "OperatorWord":
        return OperatorWord((self,)) * other

    def __rmul__(self, other: AlgebraElement) -> "OperatorWord":
        return OperatorWord((other, self))

    @property
    def max_raise(self) -> int:
        return max((p.raise_by for p in self.summands), default=0)

    def __str__(self) -> str:
        return " + ".join(str(p) for p in self.summands)


Factor = Union[FockOperator, AlgebraElement]


@dataclass(frozen=True)
class OperatorWord:
    """A product of operators and algebra elements, applied right to left."""
    factors: Tuple[Factor, ...]

    def __mul__(self, other: Union[Factor, "OperatorWord"]) -> "OperatorWord":
        if isinstance(other, OperatorWord):
            return OperatorWord(self.factors + other.factors)
        return OperatorWord(self.factors + (other,))

    def __rmul__(self, other: Factor) -> "OperatorWord":
        return OperatorWord((other,) + self.factors)

    @property
    def max_raise(self) -> int:
        return sum(max(f.max_raise, 0) for f in self.factors if isinstance(f, FockOperator))


@dataclass(frozen=True)
class FockVector:
    descriptor: AlgebraDescriptor
    index_set_size: int
    cap: int
    terms: Dict[Key, Fraction] = field(default_factory=dict)

    @classmethod
    def vacuum(cls, descriptor: AlgebraDescriptor, index_set_size: int = MulffsConfig.DEFAULT_INDEX_SET_SIZE,
               cap: int = 0) -> "FockVector":
        """Omega, the unit of B at level 0."""
        return cls.level0(descriptor.unit, index_set_size, cap)

    @classmethod
    def level0(cls, b: AlgebraElement, index_set_size: int = MulffsConfig.DEFAULT_INDEX_SET_SIZE,
               cap: int = 0) -> "FockVector":
        return cls(b.descriptor, index_set_size, cap, {((), j): c for j, c in b.support()})

    def with_cap(self, cap: int) -> "FockVector":
        return FockVector(self.descriptor, self.index_set_size, cap, self.terms)

    @property
    def level(self) -> int:
        return max((len(w) for w, _ in self.terms), default=0)

    def project(self) -> AlgebraElement:
        """The B-Omega component as an algebra element."""
        coords = [Fraction(0)] * self.descriptor.dim
        for (w, j), c in self.terms.items():
            if not w:
                coords[j] += c
        return AlgebraElement(self.descriptor, tuple(coords))

    def __add__(self, other: "FockVector") -> "FockVector":
        terms = dict(self.terms)
        for key, c in other.terms.items():
            _accumulate(terms, key, c)
        return FockVector(self.descriptor, self.index_set_size, max(self.cap, other.cap), terms)

    def scale(self, factor: Fraction) -> "FockVector":
        factor = Fraction(factor)
        terms = {k: c * factor for k, c in self.terms.items() if factor}
        return FockVector(self.descriptor, self.index_set_size, self.cap, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def to_records(self) -> List[Dict[str, object]]:
        records = []
        for (w, j), c in sorted(self.terms.items()):
            records.append({
                "level": len(w),
                "word": [[i, a + 1] for i, a in w],
                "slot": j + 1,
                "coeff": format_rational(c),
            })
        return records


def _accumulate(terms: Dict[Key, Fraction], key: Key, value: Fraction) -> None:
    total = terms.get(key, Fraction(0)) + value
    if total:
        terms[key] = total
    else:
        terms.pop(key, None)


def left(b: AlgebraElement) -> FockOperator:
    return FockOperator((Primitive(PrimitiveKind.LEFT, element=b),))


def right(b: AlgebraElement) -> FockOperator:
    return FockOperator((Primitive(PrimitiveKind.RIGHT, element=b),))


def creation(i: int) -> FockOperator:
    return FockOperator((Primitive(PrimitiveKind.CREATE, index=i),))


def annihilation(i: int, alpha_n: MultilinearMap) -> FockOperator:
    return FockOperator((Primitive(PrimitiveKind.ANNIHILATE, index=i, form=alpha_n),))


def replacement(i: int, alpha_n: MultilinearMap) -> FockOperator:
    return FockOperator((Primitive(PrimitiveKind.REPLACE, index=i, form=alpha_n),))


def V(i: int, alpha: MFSeries) -> FockOperator:
    """Sum of the n-fold annihilations V_{i,n}(alpha_n) for n up to the order of alpha."""
    return FockOperator(tuple(Primitive(PrimitiveKind.ANNIHILATE, index=i, form=c) for c in alpha.components))


def W(i: int, alpha: MFSeries) -> FockOperator:
    return FockOperator(tuple(Primitive(PrimitiveKind.REPLACE, index=i, form=c) for c in alpha.components))


def additive_variable(alpha: MFSeries, i: int = 1) -> FockOperator:
    """L_i + V_i(alpha)."""
    return creation(i) + V(i, alpha)


def multiplicative_variable(alpha: MFSeries, i: int = 1) -> FockOperator:
    """V_i(alpha) + W_i(alpha)."""
    return V(i, alpha) + W(i, alpha)


def _check_index(v: FockVector, i: int) -> None:
    if i < 1 or i > v.index_set_size:
        raise FockError(f"index {i} is outside the index set {{1..{v.index_set_size}}}")


def _admit(v: FockVector, terms: Dict[Key, Fraction], key: Key, value: Fraction, lossy: bool) -> None:
    if len(key[0]) > v.cap:
        if lossy:
            return
        raise CapExceeded(f"level {len(key[0])} exceeds the truncation cap {v.cap}")
    _accumulate(terms, key, value)


def _apply_primitive(p: Primitive, v: FockVector, lossy: bool) -> Dict[Key, Fraction]:
    descriptor = v.descriptor
    basis = descriptor.basis
    out: Dict[Key, Fraction] = {}
    kind = p.kind

    if kind is PrimitiveKind.ANNIHILATE and p.degree == 0:
        kind, element = PrimitiveKind.LEFT, p.form.values[0]
    else:
        element = p.element

    if kind is PrimitiveKind.LEFT:
        images = [(element * e).support() for e in basis]
        for (w, j), c in v.terms.items():
            if w:
                (i, a), rest = w[0], w[1:]
                for a2, coef in images[a]:
                    _accumulate(out, (((i, a2),) + rest, j), c * coef)
            else:
                for j2, coef in images[j]:
                    _accumulate(out, ((), j2), c * coef)
        return out

    if kind is PrimitiveKind.RIGHT:
        images = [(e * element).support() for e in basis]
        for (w, j), c in v.terms.items():
            for j2, coef in images[j]:
                _accumulate(out, (w, j2), c * coef)
        return out

    _check_index(v, p.index)
    i = p.index

    if kind is PrimitiveKind.CREATE or (kind is PrimitiveKind.REPLACE and p.degree == 0):
        prefix = descriptor.unit if kind is PrimitiveKind.CREATE else p.form.values[0]
        letters = prefix.support()
        for (w, j), c in v.terms.items():
            for a, coef in letters:
                _admit(v, out, (((i, a),) + w, j), c * coef, lossy)
        return out

    n = p.degree
    form = p.form
    for (w, j), c in v.terms.items():
        if len(w) < n or any(letter[0] != i for letter in w[:n]):
            continue
        val = form.value_at([a for _, a in w[:n]])
        if val.is_zero():
            continue
        rest = w[n:]
        if kind is PrimitiveKind.REPLACE:
            for a, coef in val.support():
                _admit(v, out, (((i, a),) + rest, j), c * coef, lossy)
        elif rest:
            (i2, a2), tail = rest[0], rest[1:]
            for a3, coef in (val * basis[a2]).support():
                _accumulate(out, (((i2, a3),) + tail, j), c * coef)
        else:
            for j2, coef in (val * basis[j]).support():
                _accumulate(out, ((), j2), c * coef)
    return out


def apply(op: Union[FockOperator, OperatorWord, AlgebraElement], v: FockVector, lossy: bool = False) -> FockVector:
    """Apply an operator, a product of operators, or lambda(b) for an algebra element."""
    if isinstance(op, OperatorWord):
        for factor in reversed(op.factors):
            v = apply(factor, v, lossy)
        return v
    if isinstance(op, AlgebraElement):
        op = left(op)
    terms: Dict[Key, Fraction] = {}
    for p in op.summands:
        for key, c in _apply_primitive(p, v, lossy).items():
            _accumulate(terms, key, c)
    return FockVector(v.descriptor, v.index_set_size, v.cap, terms)


def _as_word(factors: Union[OperatorWord, Sequence[Union[Factor, OperatorWord]]]) -> OperatorWord:
    if isinstance(factors, OperatorWord):
        return factors
    flat: List[Factor] = []
    for f in factors:
        if isinstance(f, OperatorWord):
            flat.extend(f.factors)
        else:
            flat.append(f)
    return OperatorWord(tuple(flat))


def expectation(factors: Union[OperatorWord, Sequence[Union[Factor, OperatorWord]]],
                descriptor: Optional[AlgebraDescriptor] = None,
                index_set_size: int = MulffsConfig.DEFAULT_INDEX_SET_SIZE,
                cap: Optional[int] = None, lossy: bool = False) -> AlgebraElement:
    """E(X) = P(X Omega) for the product of the given factors.

    The cap defaults to the largest level the word can reach.
    """
    word = _as_word(factors)
    if descriptor is None:
        descriptor = _find_descriptor(word)
    if cap is None:
        cap = word.max_raise
    vacuum = FockVector.vacuum(descriptor, index_set_size, cap)
    return apply(word, vacuum, lossy).project()


def _find_descriptor(word: OperatorWord) -> AlgebraDescriptor:
    for f in word.factors:
        if isinstance(f, AlgebraElement):
            return f.descriptor
        for p in f.summands:
            if p.element is not None:
                return p.element.descriptor
            if p.form is not None:
                return p.form.descriptor
    raise FockError("cannot infer the algebra of a word without elements or forms; pass descriptor")


@track_performance
def distribution_series(Z: Union[FockOperator, OperatorWord], N: int,
                        descriptor: Optional[AlgebraDescriptor] = None,
                        index_set_size: int = MulffsConfig.DEFAULT_INDEX_SET_SIZE,
                        cap: Optional[int] = None) -> MFSeries:
    """Moments E(Z e_{t_1} Z ... e_{t_n} Z) tabulated on basis tuples for n = 0..N.

    Vectors Z e_{t_1} ... Z Omega are shared between tuples with a common suffix.
    """
    word = _as_word([Z])
    if descriptor is None:
        descriptor = _find_descriptor(word)
    if cap is None:
        cap = (N + 1) * max(word.max_raise, 0)
    basis = descriptor.basis
    vacuum = FockVector.vacuum(descriptor, index_set_size, cap)
    states: Dict[Tuple[int, ...], FockVector] = {(): apply(word, vacuum)}

    def state(t: Tuple[int, ...]) -> FockVector:
        if t not in states:
            states[t] = apply(word, apply(basis[t[0]], state(t[1:])))
        return states[t]

    series = build_series(descriptor, N, lambda n, t: state(t).project())
    logger.debug(f"Distribution series to order {N} used {len(states)} Fock states")
    return series


def canonical_additive(beta: MFSeries, i: int = 1,
                       index_set_size: int = MulffsConfig.DEFAULT_INDEX_SET_SIZE) -> MFSeries:
    """The alpha with distribution of L_i + V_i(alpha) equal to beta."""
    descriptor = beta.descriptor
    comps: List[MultilinearMap] = [beta.components[0]]
    for N in range(1, beta.order + 1):
        partial = MFSeries(descriptor, tuple(comps) + (MultilinearMap.zero(descriptor, N),))
        lower = distribution_series(additive_variable(partial, i), N, descriptor, index_set_size)
        comps.append(beta.components[N] - lower.components[N])
    return MFSeries(descriptor, tuple(comps))


def canonical_multiplicative(beta: MFSeries, i: int = 1,
                             index_set_size: int = MulffsConfig.DEFAULT_INDEX_SET_SIZE) -> MFSeries:
    """The alpha with distribution of V_i(alpha) + W_i(alpha) equal to beta; beta_0 must be invertible."""
    descriptor = beta.descriptor
    a0 = beta.components[0].values[0]
    a0_inv = alg_invert(a0)
    basis = descriptor.basis
    comps: List[MultilinearMap] = [beta.components[0]]
    for N in range(1, beta.order + 1):
        partial = MFSeries(descriptor, tuple(comps) + (MultilinearMap.zero(descriptor, N),))
        lower = distribution_series(multiplicative_variable(partial, i), N, descriptor, index_set_size)
        gamma = beta.components[N] - lower.components[N]
        comps.append(MultilinearMap.from_function(
            descriptor, N, lambda t, gamma=gamma: gamma(*(basis[a] * a0_inv for a in t))))
    return MFSeries(descriptor, tuple(comps))
