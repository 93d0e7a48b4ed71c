"""Self-checks run by `mulffs ncl verify` and `mulffs oracle-check`."""
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List

import numpy as np

from algebra import AlgebraDescriptor, make_algebra
from fock import OperatorWord, additive_variable, distribution_series, multiplicative_variable
from mfs import MFSeries, random_series, series_sum
from ncl import (catalan, compose_dc, decompose_dc, enumerate_partitions, ncl1_partitions, ncl1_u, ncl1_v,
                 s_decode, s_encode)
from transforms import (moments_from_r, moments_from_t, r_characterization, r_inverse, r_transform,
                        schroder_identities, t_characterization, t_inverse, t_transform, twisted_product)
from utils import MulffsError, track_performance

logger = logging.getLogger(__name__)

DIM_KINDS = {"scalar": ("scalar", 1), "matrix2": ("matrix", 2)}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        if not passed:
            logger.warning(f"Check failed: {name} {detail}".rstrip())
        self.checks.append(CheckResult(name, bool(passed), detail))

    def run(self, name: str, check: Callable[[], bool]) -> None:
        """Record the outcome of check(); a library error counts as a failure."""
        try:
            self.add(name, check())
        except MulffsError as e:
            self.add(name, False, f"{type(e).__name__}: {e}")

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
            "status": "ok" if self.passed else "failed",
        }


@track_performance
def verify_ncl(max_n: int) -> VerificationReport:
    """Counting identities plus the round trips of the encodings and bijections."""
    report = VerificationReport()
    for record in schroder_identities(max_n):
        report.add(f"schroder.{record['identity']}[n={record['n']}]", record["passed"],
                   f"expected {record['expected']}, got {record['actual']}")

    for n in range(1, min(max_n, 6) + 1):
        family = enumerate_partitions(n)
        encodings = [s_encode(pi) for pi in family]
        report.add(f"s_encoding.injective[n={n}]", len(set(encodings)) == len(family))
        report.run(f"s_encoding.round_trip[n={n}]",
                   lambda: all(s_decode(e) == pi for e, pi in zip(encodings, family)))
        if n >= 2:
            report.run(f"decomposition.round_trip[n={n}]",
                       lambda: all(compose_dc(d.parts, d.sigma) == pi
                                   for pi, d in ((pi, decompose_dc(pi)) for pi in family)))

    for n in range(2, min(max_n, 7) + 1):
        linked = ncl1_partitions(n)
        report.add(f"ncl1.count[n={n}]", len(linked) == catalan(n - 1),
                   f"expected {catalan(n - 1)}, got {len(linked)}")
        report.run(f"ncl1.bijection[n={n}]", lambda: all(ncl1_v(ncl1_u(pi)) == pi for pi in linked))
    logger.info(f"NCL verification: {len(report.checks) - len(report.failures)}/{len(report.checks)} passed")
    return report


def descriptor_for(dim_kind: str) -> AlgebraDescriptor:
    if dim_kind not in DIM_KINDS:
        raise ValueError(f"dim kind must be one of {sorted(DIM_KINDS)}, got {dim_kind!r}")
    return make_algebra(*DIM_KINDS[dim_kind])


def _product_distribution(alpha: MFSeries, beta: MFSeries, N: int) -> MFSeries:
    word = OperatorWord((multiplicative_variable(alpha, 1), multiplicative_variable(beta, 2)))
    return distribution_series(word, N, alpha.descriptor)


@track_performance
def oracle_check(order: int, dim_kind: str = "matrix2", seed: int = 0, trials: int = 1) -> VerificationReport:
    """Compare partition sums and transforms against the Fock-space realization on random series.

    The twisted product check runs at order at most 2 outside the scalar case.
    """
    descriptor = descriptor_for(dim_kind)
    rng = np.random.default_rng(seed)
    product_order = order if descriptor.dim == 1 else min(order, 2)
    report = VerificationReport()

    for trial in range(trials):
        alpha = random_series(descriptor, order, rng)
        beta = random_series(descriptor, order, rng)
        alpha_u = random_series(descriptor, order, rng, constant="unit")
        beta_u = random_series(descriptor, order, rng, constant="unit")
        tag = f"[trial={trial}]"

        report.run(f"additive_oracle{tag}", lambda: distribution_series(
            additive_variable(alpha), order, descriptor) == moments_from_r(alpha, order))
        report.run(f"multiplicative_oracle{tag}", lambda: distribution_series(
            multiplicative_variable(alpha_u), order, descriptor) == moments_from_t(alpha_u, order))
        report.run(f"r_round_trip{tag}", lambda: r_transform(r_inverse(alpha, order)) == alpha)
        report.run(f"r_plug_back{tag}", lambda: r_characterization(beta, r_transform(beta)))
        report.run(f"t_round_trip{tag}", lambda: t_transform(t_inverse(alpha_u, order)) == alpha_u)
        report.run(f"t_plug_back{tag}", lambda: t_characterization(beta_u, t_transform(beta_u)))
        report.run(f"r_additivity{tag}", lambda: r_transform(distribution_series(
            additive_variable(alpha, 1) + additive_variable(beta, 2), order, descriptor)) == series_sum(alpha, beta))

        small_x, small_y = alpha_u.truncate(product_order), beta_u.truncate(product_order)
        report.run(f"t_twisted_multiplicativity{tag}", lambda: t_transform(
            _product_distribution(small_x, small_y, product_order)) == twisted_product(small_x, small_y))

    logger.info(f"Oracle check ({dim_kind}, order {order}, seed {seed}): "
                f"{len(report.checks) - len(report.failures)}/{len(report.checks)} passed")
    return report
