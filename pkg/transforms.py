"""Partition-indexed moment evaluators and the unsymmetrized R-, T- and S-transforms.

alpha_pi[b_1..b_n] (noncrossing pi) and alpha_pi<b_1..b_n> (noncrossing linked
pi) are both evaluated by peeling the right-most interval block of pi, one
step at a time. The peel order only depends on pi, so it is compiled once into
a PeelPlan and cached; evaluation then replays the plan on the slot values.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import sympy as sp

from algebra import AlgebraElement, SingularError, alg_invert
from cache_manager import memoize
from config import MulffsConfig
from mfs import (ArityMismatch, MFSeries, OrderExceeded, build_series, identity_series, one_series,
                 series_comp_inverse, series_compose, series_mul_inverse, series_product, series_sum)
from ncl import (Mode, NCLPartition, PartitionError, PreconditionViolation, catalan_product, count_partitions,
                 enumerate_partitions, iter_partitions, schroder)
from utils import track_performance

logger = logging.getLogger(__name__)


class StepKind(str, Enum):
    FULL = "full"
    RIGHT = "right"
    INNER = "inner"
    LINKED = "linked"


@dataclass(frozen=True)
class PeelStep:
    kind: StepKind
    m: int
    length: int
    label: int


@dataclass(frozen=True)
class PeelPlan:
    n: int
    steps: Tuple[PeelStep, ...]


def _is_interval(block: Sequence[int]) -> bool:
    return block[-1] - block[0] + 1 == len(block)


@memoize("transforms.plans", MulffsConfig.PLAN_CACHE_SIZE)
def compile_plan(pi: NCLPartition) -> PeelPlan:
    """Peel order of pi.

    m and length refer to positions after earlier steps; label is the original
    point that was at position m, used to pick the series in indexed sums.
    """
    blocks = [list(b) for b in pi.blocks]
    elements = list(range(1, pi.n + 1))
    steps: List[PeelStep] = []
    while True:
        size = len(elements)
        J = max((b for b in blocks if _is_interval(b)), key=lambda b: b[0])
        m, ell = J[0], len(J)
        label = elements[m - 1]
        if m == 1:
            if ell != size:
                raise PartitionError(f"{pi} has no interval block to peel besides one starting at 1")
            steps.append(PeelStep(StepKind.FULL, 1, size, label))
            break
        if sum(m in b for b in blocks) == 2:
            kind = StepKind.LINKED
            removed = set(range(m + 1, m + ell))
        else:
            kind = StepKind.RIGHT if m + ell - 1 == size else StepKind.INNER
            removed = set(range(m, m + ell))
        steps.append(PeelStep(kind, m, ell, label))

        blocks.remove(J)
        blocks = [[p - sum(1 for r in removed if r < p) for p in b] for b in blocks]
        elements = [e for pos, e in enumerate(elements, 1) if pos not in removed]
    return PeelPlan(pi.n, tuple(steps))


SeriesFor = Callable[[int], MFSeries]


def _evaluate(plan: PeelPlan, slots: Sequence[AlgebraElement], series_for: SeriesFor, angle: bool) -> AlgebraElement:
    if len(slots) != plan.n - 1:
        raise ArityMismatch(f"a partition of {plan.n} points takes {plan.n - 1} slot values, got {len(slots)}")
    s = list(slots)
    inverses: Dict[int, AlgebraElement] = {}

    def args(alpha: MFSeries, xs: Sequence[AlgebraElement]) -> List[AlgebraElement]:
        if not angle:
            return list(xs)
        a0 = alpha.components[0].values[0]
        return [x * a0 for x in xs]

    suffix: Optional[AlgebraElement] = None
    for step in plan.steps:
        alpha = series_for(step.label)
        m, ell = step.m, step.length
        if step.kind is StepKind.FULL:
            value = alpha[ell - 1](*args(alpha, s))
            return value if suffix is None else value * suffix
        inner = alpha[ell - 1](*args(alpha, s[m - 1:m + ell - 2]))
        if step.kind is StepKind.RIGHT:
            tail = s[m - 2] * inner
            suffix = tail if suffix is None else tail * suffix
            s = s[:m - 2]
        elif step.kind is StepKind.INNER:
            merged = s[m - 2] * inner * s[m + ell - 2]
            s = s[:m - 2] + [merged] + s[m + ell - 1:]
        else:
            if step.label not in inverses:
                inverses[step.label] = alg_invert(alpha.components[0].values[0])
            merged = s[m - 2] * inner * inverses[step.label]
            s = s[:m - 2] + [merged] + s[m + ell - 2:]
    raise PartitionError("peel plan ended without a full block")


def alpha_bracket(alpha: MFSeries, pi: NCLPartition, slots: Sequence[AlgebraElement]) -> AlgebraElement:
    """alpha_pi[b_1, ..., b_n] for a noncrossing partition pi of n+1 points."""
    if not pi.is_noncrossing_partition():
        raise PreconditionViolation(f"{pi} is not a noncrossing partition")
    return _evaluate(compile_plan(pi), slots, lambda _label: alpha, angle=False)


def alpha_angle(alpha: MFSeries, pi: NCLPartition, slots: Sequence[AlgebraElement]) -> AlgebraElement:
    """alpha_pi<b_1, ..., b_n> for a noncrossing linked partition; needs alpha_0 invertible when pi links."""
    return _evaluate(compile_plan(pi), slots, lambda _label: alpha, angle=True)


def alpha_angle_indexed(family: Mapping[int, MFSeries], iota: Sequence[int], pi: NCLPartition,
                        slots: Sequence[AlgebraElement]) -> AlgebraElement:
    """alpha^iota_pi<b_1, ..., b_n>; zero unless iota is constant on every block of pi."""
    if len(iota) != pi.n:
        raise ArityMismatch(f"index map has {len(iota)} entries for {pi.n} points")
    if any(len({iota[p - 1] for p in b}) > 1 for b in pi.blocks):
        return next(iter(family.values())).descriptor.zero
    return _evaluate(compile_plan(pi), slots, lambda label: family[iota[label - 1]], angle=True)


def interval_product(alpha: MFSeries, pi: NCLPartition, slots: Sequence[AlgebraElement]) -> AlgebraElement:
    """Closed form of alpha_pi[b] for an interval partition: alpha(B_1) b_{q_1} alpha(B_2) ... alpha(B_k)."""
    if not pi.is_noncrossing_partition() or not all(_is_interval(b) for b in pi.blocks):
        raise PreconditionViolation(f"{pi} is not an interval partition")
    if len(slots) != pi.n - 1:
        raise ArityMismatch(f"a partition of {pi.n} points takes {pi.n - 1} slot values, got {len(slots)}")
    result: Optional[AlgebraElement] = None
    for b in pi.blocks:
        p, q = b[0], b[-1]
        factor = alpha[q - p](*slots[p - 1:q - 1])
        result = factor if result is None else result * slots[p - 2] * factor
    return result


def _clamp(alpha: MFSeries, N: Optional[int]) -> int:
    if N is None:
        return alpha.order
    if N > alpha.order:
        logger.warning(f"Requested order {N} exceeds series order {alpha.order}; truncating")
        return alpha.order
    return N


def _partition_sum(alpha: MFSeries, N: int, mode: Mode, angle: bool) -> MFSeries:
    descriptor = alpha.descriptor
    basis = descriptor.basis
    plans = {n: [compile_plan(pi) for pi in enumerate_partitions(n + 1, mode)] for n in range(N + 1)}

    def component(n: int, t: Tuple[int, ...]) -> AlgebraElement:
        slots = [basis[i] for i in t]
        total = descriptor.zero
        for plan in plans[n]:
            total = total + _evaluate(plan, slots, lambda _label: alpha, angle)
        return total

    return build_series(descriptor, N, component)


@track_performance
def moments_from_r(alpha: MFSeries, N: Optional[int] = None) -> MFSeries:
    """Distribution series of L_1 + V_1(alpha): sums of alpha_pi[b] over NC(n+1)."""
    return _partition_sum(alpha, _clamp(alpha, N), Mode.NC, angle=False)


@track_performance
def moments_from_t(alpha: MFSeries, N: Optional[int] = None) -> MFSeries:
    """Distribution series of V_1(alpha) + W_1(alpha): sums of alpha_pi<b> over NCL(n+1)."""
    _require_invertible(alpha, "moments from a T-transform")
    return _partition_sum(alpha, _clamp(alpha, N), Mode.NCL, angle=True)


def _require_invertible(beta: MFSeries, what: str) -> AlgebraElement:
    try:
        return alg_invert(beta.components[0].values[0])
    except SingularError:
        raise SingularError(f"{what} needs an invertible constant term") from None


def r_transform(beta: MFSeries) -> MFSeries:
    """((1 + beta I)^-1 beta) o (I + I beta I)^<-1>."""
    descriptor, N = beta.descriptor, beta.order
    I = identity_series(descriptor, N)
    one = one_series(descriptor, N)
    left = series_product(series_mul_inverse(series_sum(one, series_product(beta, I))), beta)
    inner = series_comp_inverse(series_sum(I, series_product(series_product(I, beta), I)))
    return series_compose(left, inner)


def r_characterization(beta: MFSeries, rho: MFSeries) -> bool:
    """True when (1 + I rho)^-1 I = I (1 + rho I)^-1 = (I + I beta I)^<-1>."""
    descriptor = beta.descriptor
    N = min(beta.order, rho.order)
    beta, rho = beta.truncate(N), rho.truncate(N)
    I = identity_series(descriptor, N)
    one = one_series(descriptor, N)
    target = series_comp_inverse(series_sum(I, series_product(series_product(I, beta), I)))
    first = series_product(series_mul_inverse(series_sum(one, series_product(I, rho))), I)
    second = series_product(I, series_mul_inverse(series_sum(one, series_product(rho, I))))
    return first == target and second == target


def r_inverse(rho: MFSeries, N: Optional[int] = None) -> MFSeries:
    return moments_from_r(rho, N)


def t_transform(beta: MFSeries) -> MFSeries:
    """(beta o (I beta)^<-1>) (1 + I)^-1."""
    _require_invertible(beta, "T-transform")
    descriptor, N = beta.descriptor, beta.order
    I = identity_series(descriptor, N)
    inner = series_comp_inverse(series_product(I, beta))
    return series_product(series_compose(beta, inner),
                          series_mul_inverse(series_sum(one_series(descriptor, N), I)))


def t_characterization(beta: MFSeries, tau: MFSeries) -> bool:
    """True when (tau o (I beta)) (1 + I beta) = beta."""
    descriptor = beta.descriptor
    N = min(beta.order, tau.order)
    beta, tau = beta.truncate(N), tau.truncate(N)
    I_beta = series_product(identity_series(descriptor, N), beta)
    lhs = series_product(series_compose(tau, I_beta), series_sum(one_series(descriptor, N), I_beta))
    return lhs == beta


def t_inverse(alpha: MFSeries, N: Optional[int] = None) -> MFSeries:
    return moments_from_t(alpha, N)


def s_transform(beta: MFSeries) -> MFSeries:
    _require_invertible(beta, "S-transform")
    return series_mul_inverse(t_transform(beta))


def s_inverse(sigma: MFSeries, N: Optional[int] = None) -> MFSeries:
    _require_invertible(sigma, "moments from an S-transform")
    return moments_from_t(series_mul_inverse(sigma), N)


def twisted_product(tau_x: MFSeries, tau_y: MFSeries) -> MFSeries:
    """(tau_x o (tau_y I tau_y^-1)) tau_y."""
    N = min(tau_x.order, tau_y.order)
    tau_x, tau_y = tau_x.truncate(N), tau_y.truncate(N)
    I = identity_series(tau_x.descriptor, N)
    twist = series_product(series_product(tau_y, I), series_mul_inverse(tau_y))
    return series_product(series_compose(tau_x, twist), tau_y)


def free_additive_convolution(beta1: MFSeries, beta2: MFSeries, N: Optional[int] = None) -> MFSeries:
    rho = series_sum(r_transform(beta1), r_transform(beta2))
    return r_inverse(rho, N)


def free_multiplicative_convolution(beta1: MFSeries, beta2: MFSeries, N: Optional[int] = None) -> MFSeries:
    """Distribution of xy for free x, y with distributions beta1, beta2."""
    tau = twisted_product(t_transform(beta1), t_transform(beta2))
    return t_inverse(tau, N)


def scalar_moments(alpha: Sequence[Fraction], n: int) -> Fraction:
    """phi(a^n) = sum over NCL(n) of alpha_0^(n - |pi|) prod alpha_{|B| - 1}."""
    alpha = [Fraction(a) for a in alpha]
    if not alpha or alpha[0] == 0:
        raise SingularError("scalar moments need a nonzero alpha_0")
    if len(alpha) < n:
        raise OrderExceeded(f"phi(a^{n}) needs alpha_0..alpha_{n - 1}, got {len(alpha)} coefficients")
    total = Fraction(0)
    for pi in iter_partitions(n, Mode.NCL):
        term = alpha[0] ** (n - len(pi))
        for b in pi.blocks:
            term *= alpha[len(b) - 1]
        total += term
    return total


def scalar_t_coefficients(m: Sequence[Fraction]) -> Tuple[Fraction, Fraction, Fraction]:
    """alpha_0, alpha_1, alpha_2 of the T-transform from moments m_1, m_2, m_3."""
    m1, m2, m3 = (Fraction(x) for x in m[:3])
    if m1 == 0:
        raise SingularError("the T-transform needs m_1 != 0")
    return (m1,
            m2 / m1 - m1,
            m3 / m1 ** 2 - m2 ** 2 / m1 ** 3 - m2 / m1 + m1)


def _schroder_series(max_n: int) -> List[int]:
    w = sp.symbols("w")
    expr = (1 - w - sp.sqrt(1 - 6 * w + w ** 2)) / (2 * w)
    expansion = sp.series(expr, w, 0, max_n).removeO()
    return [int(expansion.coeff(w, k)) for k in range(max_n)]


@track_performance
def schroder_identities(max_n: int) -> List[Dict[str, object]]:
    """Check the large Schroeder number identities for k = 1..max_n points.

    Each record names the identity, the number of points and whether the
    computed value equals r_{k-1}.
    """
    if max_n < 1 or max_n > MulffsConfig.NCL_MAX_N:
        raise PreconditionViolation(f"max_n must lie in 1..{MulffsConfig.NCL_MAX_N}, got {max_n}")
    generating = _schroder_series(max_n)
    records = []
    for k in range(1, max_n + 1):
        expected = schroder(k - 1)
        actual = {
            "ncl_count": count_partitions(k, Mode.NCL),
            "unit_moments": scalar_moments([1] * k, k),
            "generating_function": generating[k - 1],
            "catalan_sum": sum(catalan_product(sigma) for sigma in iter_partitions(k, Mode.NC)),
        }
        for identity, value in actual.items():
            records.append({"identity": identity, "n": k, "expected": expected,
                            "actual": int(value), "passed": value == expected})
    failed = [r for r in records if not r["passed"]]
    if failed:
        logger.warning(f"{len(failed)} Schroeder identity checks failed")
    return records
