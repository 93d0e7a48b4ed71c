"""Noncrossing linked partitions, their orders, encodings and decompositions.

Partitions are stored canonically: each block is an increasing tuple of
1-based elements and the blocks are sorted lexicographically, which for
valid partitions means sorted by minimum.
"""
import logging
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from itertools import combinations
from math import comb, prod
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from cache_manager import memoize
from config import MulffsConfig
from mfs import SizeGuardExceeded
from utils import MulffsError, SchemaError, require_field, track_performance

logger = logging.getLogger(__name__)

Block = Tuple[int, ...]


class PartitionError(MulffsError):
    """Base exception for partition combinatorics."""


class InvalidPartition(PartitionError):
    def __init__(self, clause: str, message: str):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


class NoPreimage(PartitionError):
    """Raised when an encoding is not the encoding of any partition."""


class PreconditionViolation(PartitionError):
    """Raised when an argument is outside the domain of an operation."""


class Mode(str, Enum):
    NCL = "ncl"
    NC = "nc"
    IP = "ip"


@dataclass(frozen=True, order=True)
class NCLPartition:
    n: int
    blocks: Tuple[Block, ...]

    @classmethod
    def canonical(cls, n: int, blocks: Iterable[Iterable[int]]) -> "NCLPartition":
        """Build without validation; callers guarantee the blocks are valid."""
        return cls(n, tuple(sorted(tuple(sorted(b)) for b in blocks)))

    @classmethod
    def parse(cls, text: str, n: Optional[int] = None, mode: "Mode" = Mode.NCL) -> "NCLPartition":
        """Read parenthesis notation such as "(1,2)(2,3)"."""
        compact = re.sub(r"\s+", "", text)
        groups = re.findall(r"\(([^()]*)\)", compact)
        if not groups or "".join(f"({g})" for g in groups) != compact:
            raise InvalidPartition("syntax", f"cannot read {text!r}")
        try:
            blocks = [[int(x) for x in g.split(",") if x] for g in groups]
        except ValueError:
            raise InvalidPartition("syntax", f"cannot read {text!r}") from None
        if n is None:
            n = max((max(b) for b in blocks if b), default=0)
        return validate(blocks, n, mode)

    @cached_property
    def cover_counts(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for b in self.blocks:
            for i in b:
                counts[i] = counts.get(i, 0) + 1
        return counts

    def is_doubly_covered(self, i: int) -> bool:
        return self.cover_counts.get(i, 0) == 2

    def block_starting_at(self, i: int) -> Optional[Block]:
        for b in self.blocks:
            if b[0] == i:
                return b
        return None

    def is_noncrossing_partition(self) -> bool:
        return all(c == 1 for c in self.cover_counts.values())

    def __len__(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return "".join("(" + ",".join(str(i) for i in b) + ")" for b in self.blocks)

    def to_dict(self) -> Dict[str, Any]:
        return {"blocks": [list(b) for b in self.blocks], "n": self.n}

    @classmethod
    def from_dict(cls, data: Any, path: str = "$", mode: "Mode" = Mode.NCL) -> "NCLPartition":
        n = require_field(data, "n", path)
        blocks = require_field(data, "blocks", path)
        if not isinstance(n, int) or isinstance(n, bool):
            raise SchemaError(f"{path}.n", "expected an integer")
        if not isinstance(blocks, list) or not all(
                isinstance(b, list) and all(isinstance(i, int) and not isinstance(i, bool) for i in b)
                for b in blocks):
            raise SchemaError(f"{path}.blocks", "expected an array of integer arrays")
        return validate(blocks, n, mode)


def crossing(E: Sequence[int], F: Sequence[int]) -> bool:
    """True when there are i1 < j1 < i2 < j2 with i1, i2 in E and j1, j2 in F."""
    lo, hi = min(E), max(F)
    return any(lo < j1 < i2 < hi for j1 in F for i2 in E)


def noncrossing(E: Sequence[int], F: Sequence[int]) -> bool:
    return not crossing(E, F) and not crossing(F, E)


def nearly_disjoint(E: Sequence[int], F: Sequence[int]) -> bool:
    min_e, min_f = min(E), min(F)
    for i in set(E) & set(F):
        if i == min_e and len(E) > 1 and i != min_f:
            continue
        if i != min_e and i == min_f and len(F) > 1:
            continue
        return False
    return True


def validate(blocks: Iterable[Iterable[int]], n: int, mode: Mode = Mode.NCL) -> NCLPartition:
    """Canonicalize blocks into a partition of {1..n}, or diagnose the violated clause."""
    mode = Mode(mode)
    if n < 1:
        raise InvalidPartition("ground_set", f"n must be at least 1, got {n}")

    canon: List[Block] = []
    for raw in blocks:
        block = list(raw)
        if not block:
            raise InvalidPartition("empty_block", "blocks must be nonempty")
        if len(set(block)) != len(block):
            raise InvalidPartition("duplicate_element", f"block {block} repeats an element")
        if any(i < 1 or i > n for i in block):
            raise InvalidPartition("out_of_range", f"block {block} leaves {{1..{n}}}")
        canon.append(tuple(sorted(block)))
    if len(set(canon)) != len(canon):
        raise InvalidPartition("duplicate_block", "a block is listed twice")

    counts: Dict[int, int] = {}
    for b in canon:
        for i in b:
            counts[i] = counts.get(i, 0) + 1
    missing = [i for i in range(1, n + 1) if i not in counts]
    if missing:
        raise InvalidPartition("coverage_gap", f"elements {missing} are not covered")
    tripled = [i for i, c in counts.items() if c > 2]
    if tripled:
        raise InvalidPartition("triple_cover", f"elements {sorted(tripled)} lie in more than two blocks")
    if mode is not Mode.NCL:
        shared = sorted(i for i, c in counts.items() if c > 1)
        if shared:
            raise InvalidPartition("shared_element", f"elements {shared} lie in two blocks")

    for E, F in combinations(canon, 2):
        if not noncrossing(E, F):
            raise InvalidPartition("crossing", f"blocks {E} and {F} cross")
        if not nearly_disjoint(E, F):
            raise InvalidPartition("nearly_disjoint", f"blocks {E} and {F} are not nearly disjoint")

    if mode is Mode.IP:
        for b in canon:
            if b[-1] - b[0] + 1 != len(b):
                raise InvalidPartition("non_interval", f"block {b} is not an interval")
    return NCLPartition(n, tuple(sorted(canon)))


def full_partition(n: int) -> NCLPartition:
    """1_n, the single block {1..n}."""
    return NCLPartition(n, (tuple(range(1, n + 1)),))


def singleton_partition(n: int) -> NCLPartition:
    """0_n, all singletons."""
    return NCLPartition(n, tuple((i,) for i in range(1, n + 1)))


def _check_guard(n: int) -> None:
    if n < 1:
        raise PreconditionViolation(f"n must be at least 1, got {n}")
    if n > MulffsConfig.NCL_MAX_N:
        raise SizeGuardExceeded(f"enumeration is limited to n <= {MulffsConfig.NCL_MAX_N}, got {n}")


def iter_partitions(n: int, mode: Mode = Mode.NCL) -> Iterator[NCLPartition]:
    """Generate every partition of the given kind once, scanning elements left to right.

    Open blocks sit on a stack. Element j either opens a block, joins an open
    block (closing every block opened after it), or, in NCL mode and for j < n,
    joins an open block and also opens a linked block starting at j. A linked
    block must end up with at least two elements.
    """
    mode = Mode(mode)
    _check_guard(n)
    blocks: List[List[int]] = []
    linked: List[bool] = []
    stack: List[int] = []

    def short(b: int) -> bool:
        return linked[b] and len(blocks[b]) < 2

    def walk(j: int) -> Iterator[NCLPartition]:
        if j > n:
            if not any(short(b) for b in stack):
                yield NCLPartition(n, tuple(sorted(tuple(b) for b in blocks)))
            return

        blocks.append([j])
        linked.append(False)
        stack.append(len(blocks) - 1)
        yield from walk(j + 1)
        stack.pop()
        linked.pop()
        blocks.pop()

        if mode is Mode.IP:
            targets = range(len(stack) - 1, len(stack)) if stack else range(0)
        else:
            targets = range(len(stack))
        for p in targets:
            closed = stack[p + 1:]
            if any(short(b) for b in closed):
                continue
            target = stack[p]
            del stack[p + 1:]
            blocks[target].append(j)
            yield from walk(j + 1)
            if mode is Mode.NCL and j < n:
                blocks.append([j])
                linked.append(True)
                stack.append(len(blocks) - 1)
                yield from walk(j + 1)
                stack.pop()
                linked.pop()
                blocks.pop()
            blocks[target].pop()
            stack.extend(closed)

    return walk(1)


def count_partitions(n: int, mode: Mode = Mode.NCL) -> int:
    """Size of the family without materializing it.

    Follows the same left-to-right construction as iter_partitions; the state
    is the stack of open blocks, each flagged when it is a linked block still
    waiting for its second element.
    """
    mode = Mode(mode)
    _check_guard(n)

    @lru_cache(maxsize=None)
    def count(j: int, flags: Tuple[bool, ...]) -> int:
        if j > n:
            return 0 if any(flags) else 1
        total = count(j + 1, flags + (False,))
        if mode is Mode.IP:
            targets = [len(flags) - 1] if flags else []
        else:
            targets = range(len(flags))
        for p in targets:
            if any(flags[p + 1:]):
                continue
            total += count(j + 1, flags[:p] + (False,))
            if mode is Mode.NCL and j < n:
                total += count(j + 1, flags[:p] + (False, True))
        return total

    return count(1, ())


@memoize("ncl.enumeration", MulffsConfig.ENUMERATION_CACHE_SIZE, key=lambda n, mode=Mode.NCL: (n, Mode(mode)))
@track_performance
def enumerate_partitions(n: int, mode: Mode = Mode.NCL) -> Tuple[NCLPartition, ...]:
    """All partitions of the given kind, in canonical lexicographic order."""
    result = tuple(sorted(iter_partitions(n, mode)))
    logger.debug(f"Enumerated {len(result)} {Mode(mode).value} partitions of {n}")
    return result


def brute_force_partitions(n: int, mode: Mode = Mode.NCL) -> List[NCLPartition]:
    """Filter every family of subsets of {1..n} through validate; n <= 4."""
    if n < 1 or n > 4:
        raise PreconditionViolation(f"brute force is limited to 1 <= n <= 4, got {n}")
    subsets = [s for r in range(1, n + 1) for s in combinations(range(1, n + 1), r)]
    everything = set(range(1, n + 1))
    found = []
    for r in range(1, len(subsets) + 1):
        for family in combinations(subsets, r):
            if set().union(*family) != everything:
                continue
            try:
                found.append(validate(family, n, mode))
            except InvalidPartition:
                continue
    return sorted(found)


def _blockwise_le(pi_blocks: Iterable[Block], sigma_blocks: Iterable[Block]) -> bool:
    sigma_sets = [set(F) for F in sigma_blocks]
    return all(any(set(E) <= F for F in sigma_sets) for E in pi_blocks)


def generated_nc(pi: NCLPartition) -> NCLPartition:
    """The noncrossing partition obtained by uniting intersecting blocks."""
    parent = list(range(len(pi.blocks)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    owner: Dict[int, int] = {}
    for idx, b in enumerate(pi.blocks):
        for i in b:
            if i in owner:
                parent[find(idx)] = find(owner[i])
            else:
                owner[i] = idx
    merged: Dict[int, set] = {}
    for idx, b in enumerate(pi.blocks):
        merged.setdefault(find(idx), set()).update(b)
    return NCLPartition.canonical(pi.n, merged.values())


def unlinking(pi: NCLPartition) -> NCLPartition:
    """Drop the minimum from each block whose minimum is doubly covered."""
    return NCLPartition.canonical(pi.n, (b[1:] if pi.is_doubly_covered(b[0]) else b for b in pi.blocks))


def refines(pi: NCLPartition, sigma: NCLPartition, order: str = "blockwise") -> bool:
    if pi.n != sigma.n:
        raise PreconditionViolation(f"cannot compare partitions of {pi.n} and {sigma.n}")
    if order == "blockwise":
        return _blockwise_le(pi.blocks, sigma.blocks)
    if order == "nc":
        pi_hat, sigma_hat = generated_nc(pi), generated_nc(sigma)
        if not _blockwise_le(pi_hat.blocks, sigma_hat.blocks):
            return False
        if pi_hat != sigma_hat:
            return True
        return _blockwise_le(unlinking(pi).blocks, unlinking(sigma).blocks)
    raise PreconditionViolation(f"unknown order {order!r}")


def restrict_renumber(pi: Union[NCLPartition, Iterable[Iterable[int]]], X: Iterable[int],
                      mode: Optional[Mode] = None) -> Union[Tuple[Block, ...], NCLPartition]:
    """Restriction of pi to X, renumbered order-preservingly onto {1..|X|}.

    Without a mode the raw set of blocks is returned, since the restriction of
    a linked partition need not be one. With a mode the result is validated.
    """
    keep = sorted(set(X))
    if not keep:
        raise PreconditionViolation("cannot restrict to the empty set")
    chi = {x: i + 1 for i, x in enumerate(keep)}
    blocks = pi.blocks if isinstance(pi, NCLPartition) else pi
    restricted = set()
    for b in blocks:
        part = tuple(sorted(chi[i] for i in b if i in chi))
        if part:
            restricted.add(part)
    result = tuple(sorted(restricted))
    if mode is None:
        return result
    return validate(result, len(keep), mode)


def shift(pi: NCLPartition, offset: int) -> Tuple[Block, ...]:
    return tuple(tuple(i + offset for i in b) for b in pi.blocks)


def oplus(pi: NCLPartition, sigma: NCLPartition) -> NCLPartition:
    """pi followed by sigma translated right by pi.n."""
    return NCLPartition.canonical(pi.n + sigma.n, pi.blocks + shift(sigma, pi.n))


def splits(J: Iterable[int], pi: NCLPartition) -> bool:
    J = set(J)
    return all(set(F) <= J or not (set(F) & J) for F in pi.blocks)


def is_nclo(pi: NCLPartition) -> bool:
    """True when 1 and n lie in the same block of the generated partition."""
    return any(b[0] == 1 and b[-1] == pi.n for b in generated_nc(pi).blocks)


@dataclass(frozen=True, order=True)
class SValue:
    k: int
    starred: bool = False

    def __str__(self) -> str:
        return f"{self.k}*" if self.starred else str(self.k)


ZERO_STAR = SValue(0, True)


@dataclass(frozen=True)
class SEncoding:
    n: int
    values: Tuple[SValue, ...]

    def __post_init__(self):
        if len(self.values) != self.n:
            raise PreconditionViolation(f"encoding of {self.n} points has {len(self.values)} values")

    @classmethod
    def parse(cls, text: str) -> "SEncoding":
        """Read a comma separated list such as "2,0*,0*"."""
        values = []
        for raw in text.split(","):
            raw = raw.strip()
            starred = raw.endswith("*")
            values.append(SValue(int(raw.rstrip("*")), starred))
        return cls(len(values), tuple(values))

    def __str__(self) -> str:
        return "(" + ", ".join(str(v) for v in self.values) + ")"


@dataclass(frozen=True)
class KEncoding:
    n: int
    values: Tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != self.n:
            raise PreconditionViolation(f"encoding of {self.n} points has {len(self.values)} values")


def s_encode(pi: NCLPartition) -> SEncoding:
    values = []
    for j in range(1, pi.n + 1):
        block = pi.block_starting_at(j)
        if block is None:
            values.append(ZERO_STAR)
        else:
            values.append(SValue(len(block) - 1, pi.is_doubly_covered(j)))
    return SEncoding(pi.n, tuple(values))


def _peel_s(values: Tuple[SValue, ...]) -> List[Block]:
    n = len(values)
    marked = [i for i, v in enumerate(values) if v != ZERO_STAR]
    if not marked:
        raise NoPreimage("no position carries a block")
    m = marked[-1]
    v = values[m]
    if m == 0:
        if v == SValue(n - 1):
            return [tuple(range(1, n + 1))]
        raise NoPreimage(f"value {v} at position 1 does not describe 1_{n}")
    k = v.k
    if m + k > n - 1:
        raise NoPreimage(f"block of size {k + 1} at position {m + 1} overruns {n}")
    J = tuple(range(m + 1, m + k + 2))
    if v.starred:
        if k == 0:
            raise NoPreimage(f"linked singleton at position {m + 1}")
        rest = _peel_s(values[:m] + (ZERO_STAR,) + values[m + k + 1:])
        return [tuple(x if x <= m + 1 else x + k for x in b) for b in rest] + [J]
    rest = _peel_s(values[:m] + values[m + k + 1:])
    return [tuple(x if x <= m else x + k + 1 for x in b) for b in rest] + [J]


def s_decode(encoding: SEncoding) -> NCLPartition:
    """The unique partition with the given S-encoding, or NoPreimage."""
    blocks = _peel_s(tuple(encoding.values))
    try:
        pi = validate(blocks, encoding.n, Mode.NCL)
    except InvalidPartition as e:
        raise NoPreimage(f"{encoding} peels to an invalid family ({e})") from None
    if s_encode(pi) != encoding:
        raise NoPreimage(f"{encoding} is not the encoding of {pi}")
    return pi


def k_encode(pi: NCLPartition) -> KEncoding:
    if not pi.is_noncrossing_partition():
        raise PreconditionViolation(f"{pi} has doubly covered elements")
    values = []
    for j in range(1, pi.n + 1):
        block = pi.block_starting_at(j)
        values.append(-1 if block is None else len(block) - 1)
    return KEncoding(pi.n, tuple(values))


def _peel_k(values: Tuple[int, ...]) -> List[Block]:
    n = len(values)
    marked = [i for i, v in enumerate(values) if v != -1]
    if not marked:
        raise NoPreimage("no position carries a block")
    m = marked[-1]
    k = values[m]
    if k < 0:
        raise NoPreimage(f"value {k} at position {m + 1}")
    if m == 0:
        if k == n - 1:
            return [tuple(range(1, n + 1))]
        raise NoPreimage(f"value {k} at position 1 does not describe 1_{n}")
    if m + k > n - 1:
        raise NoPreimage(f"block of size {k + 1} at position {m + 1} overruns {n}")
    rest = _peel_k(values[:m] + values[m + k + 1:])
    return [tuple(x if x <= m else x + k + 1 for x in b) for b in rest] + [tuple(range(m + 1, m + k + 2))]


def k_decode(encoding: KEncoding) -> NCLPartition:
    blocks = _peel_k(tuple(encoding.values))
    try:
        pi = validate(blocks, encoding.n, Mode.NC)
    except InvalidPartition as e:
        raise NoPreimage(f"{encoding.values} peels to an invalid family ({e})") from None
    if k_encode(pi) != encoding:
        raise NoPreimage(f"{encoding.values} is not the encoding of {pi}")
    return pi


def ncl1_partitions(n: int) -> List[NCLPartition]:
    """Partitions whose generated noncrossing partition is 1_n."""
    top = full_partition(n)
    return [pi for pi in enumerate_partitions(n) if generated_nc(pi) == top]


def ncl1_u(pi: NCLPartition) -> NCLPartition:
    if pi.n < 2 or generated_nc(pi) != full_partition(pi.n):
        raise PreconditionViolation(f"{pi} does not generate 1_{pi.n}")
    return restrict_renumber(unlinking(pi), range(2, pi.n + 1), Mode.NC)


def ncl1_v(tau: NCLPartition) -> NCLPartition:
    if not tau.is_noncrossing_partition():
        raise PreconditionViolation(f"{tau} is not a noncrossing partition")
    shifted = shift(tau, 1)
    return validate([(b[0] - 1,) + b for b in shifted], tau.n + 1, Mode.NCL)


def ncl1_bijection(direction: str, arg: NCLPartition) -> NCLPartition:
    """u maps {pi : generated 1_n} onto NC(n-1); v is its inverse."""
    if direction == "u":
        return ncl1_u(arg)
    if direction == "v":
        return ncl1_v(arg)
    raise PreconditionViolation(f"direction must be 'u' or 'v', got {direction!r}")


@dataclass(frozen=True)
class Decomposition:
    parts: Tuple[NCLPartition, ...]
    sigma: Optional[NCLPartition] = None

    @property
    def sizes(self) -> Tuple[int, ...]:
        sizes = tuple(p.n for p in self.parts)
        return sizes + ((self.sigma.n,) if self.sigma is not None else ())


def decompose_dc(pi: NCLPartition) -> Decomposition:
    """Split pi along the block F containing 1.

    Parts are renumbered restrictions to the gaps between consecutive maxima
    r(j) of the generated block of 1 below each element of F. When 1 and n are
    not linked, the remainder after max of that block is returned as sigma.
    """
    n = pi.n
    if n < 2:
        raise PreconditionViolation(f"decomposition needs n >= 2, got {n}")
    F = next(b for b in pi.blocks if b[0] == 1)
    F_hat = next(b for b in generated_nc(pi).blocks if b[0] == 1)
    ells = F[1:]
    r = [max(i for i in F_hat if i < ell) for ell in ells] + [F_hat[-1]]
    without_F = tuple(b for b in pi.blocks if b != F)

    parts = []
    for j, ell in enumerate(ells):
        base = without_F if pi.is_doubly_covered(ell) else pi.blocks
        parts.append(restrict_renumber(base, range(r[j] + 1, r[j + 1] + 1), Mode.NCL))
    sigma = None
    if r[-1] < n:
        sigma = restrict_renumber(pi, range(r[-1] + 1, n + 1), Mode.NCL)
    return Decomposition(tuple(parts), sigma)


def compose_dc(parts: Sequence[NCLPartition], sigma: Optional[NCLPartition] = None) -> NCLPartition:
    """Inverse of decompose_dc."""
    if sigma is not None:
        tau = compose_dc(parts) if parts else full_partition(1)
        return oplus(tau, sigma)
    if not parts:
        raise PreconditionViolation("at least one part is needed when sigma is absent")

    F = [1]
    blocks: List[Block] = []
    r = 1
    for part in parts:
        p = part.n
        E = next(b for b in generated_nc(part).blocks if p in b)
        F.append(r + E[0])
        kept = [b for b in part.blocks if not (len(E) == 1 and b == E)]
        blocks.extend(tuple(i + r for i in b) for b in kept)
        r += p
    return validate([tuple(F)] + blocks, r, Mode.NCL)


def catalan(k: int) -> int:
    if k == 0:
        return 1
    return comb(2 * k, k - 1) // k


def schroder(n: int) -> int:
    """Large Schroeder numbers 1, 2, 6, 22, 90, ..."""
    r = [1]
    for m in range(1, n + 1):
        r.append(r[m - 1] + sum(r[k] * r[m - 1 - k] for k in range(m)))
    return r[n]


def catalan_product(sigma: NCLPartition) -> int:
    return prod(catalan(len(b) - 1) for b in sigma.blocks)


def count_formulas(n: int) -> Dict[str, Any]:
    by_sigma = {sigma: catalan_product(sigma) for sigma in enumerate_partitions(n, Mode.NC)} if n >= 1 else {}
    return {"catalan": catalan(n), "schroder": schroder(n), "ncl_by_sigma": by_sigma}


def ncl_fiber(sigma: NCLPartition) -> List[NCLPartition]:
    """All partitions generating sigma."""
    return [pi for pi in enumerate_partitions(sigma.n) if generated_nc(pi) == sigma]
