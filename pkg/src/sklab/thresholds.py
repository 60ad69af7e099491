"""Exact integrability thresholds and conjugate-index ranges.

For a kernel of decay degree h over the weighted measure ||x||^w dx, the
weighted L^p integral over an exterior domain is finite exactly on the open
interval p > p* with

    p* = (n + w) / (h + j)

(j = derivative order: each radial derivative deepens the decay by one). The
same fraction bounds the bounded-domain origin end from the other side
(finite for p < p*). All arithmetic here is exact rational; floats appear
only in the numeric witnesses. Endpoints are always open.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .domains import DomainKind, RadialDomain, WeightedMeasure, radial_reduction
from .kernels import KernelFamily, KernelSpec, homogeneity_degree
from .quadrature import (
    DoublingReport,
    DoublingStatus,
    detect_by_radius_doubling,
    power_integral,
)
from .rational import as_fraction


class IntegrationEnd(str, enum.Enum):
    AT_INFINITY = "at_infinity"
    AT_ORIGIN = "at_origin"


class NonDecayingKernelError(ValueError):
    """Kernel norm does not decay (h + j <= 0): no integrability threshold."""


@dataclass(frozen=True)
class ThresholdReport:
    """Critical exponent p*, conjugate q*, and space-viability flags.

    q_star is None when p* <= 1, where the conjugate range is all of
    (1, inf). Both range endpoints are always open (strict inequalities).
    """

    p_star: Fraction
    q_star: Fraction | None
    weight_exponent: Fraction
    derivative_order: int

    ENDPOINT_OPENNESS = "open"

    @property
    def p_range(self) -> tuple[Fraction, None]:
        """Open interval (p_star, inf) of admissible kernel exponents."""
        return (self.p_star, None)

    @property
    def q_range(self) -> tuple[Fraction, Fraction | None]:
        """Open interval (1, q_star) of admissible conjugate exponents."""
        return (Fraction(1), self.q_star)

    @property
    def hilbert_viable(self) -> bool:
        """Whether the index-2 (Hilbert) space sits inside the q-range."""
        return self.q_star is None or self.q_star > 2

    def admits_q(self, target_q) -> bool:
        q = as_fraction(target_q)
        if q <= 1:
            return False
        return self.q_star is None or q < self.q_star


def critical_exponent(
    spec: KernelSpec,
    weight_exponent=0,
    end: IntegrationEnd = IntegrationEnd.AT_INFINITY,
    derivative_order: int = 0,
) -> Fraction:
    """Exact p* = (n + w) / (h + j) for either integration end.

    Membership is p > p* at infinity and p < p* at the origin; the critical
    fraction itself is shared.
    """
    if derivative_order < 0:
        raise ValueError(f"derivative order must be >= 0, got {derivative_order}")
    end = IntegrationEnd(end)
    w = as_fraction(weight_exponent)
    if w < 0:
        raise ValueError(f"weight exponent must be nonnegative, got {w}")
    decay = homogeneity_degree(spec) + derivative_order
    if decay <= 0:
        raise NonDecayingKernelError(
            f"effective decay degree h + j = {decay} is not positive"
        )
    return (spec.n + w) / decay


def conjugate_range(p_star) -> Fraction | None:
    """Upper conjugate endpoint q* = p*/(p* - 1); None (i.e. inf) when p* <= 1."""
    p_star = as_fraction(p_star)
    if p_star <= 0:
        raise ValueError(f"critical exponent must be positive, got {p_star}")
    if p_star <= 1:
        return None
    return p_star / (p_star - 1)


def report_from_p_star(
    p_star,
    weight_exponent=0,
    derivative_order: int = 0,
) -> ThresholdReport:
    """Build a report from an externally supplied critical exponent.

    Used for degenerate boundary cases (e.g. iterate order l = n, where the
    odd-order vector numerator cancels all decay and the inverse-power
    exponent n - l + 1 is applied directly).
    """
    return ThresholdReport(
        p_star=as_fraction(p_star),
        q_star=conjugate_range(p_star),
        weight_exponent=as_fraction(weight_exponent),
        derivative_order=derivative_order,
    )


def threshold_report(
    spec: KernelSpec,
    weight_exponent=0,
    derivative_order: int = 0,
) -> ThresholdReport:
    p_star = critical_exponent(
        spec, weight_exponent, IntegrationEnd.AT_INFINITY, derivative_order
    )
    return report_from_p_star(p_star, weight_exponent, derivative_order)


def viability(
    spec: KernelSpec,
    weight_exponent,
    target_q,
) -> tuple[bool, ThresholdReport]:
    """Whether target_q lies in the open working range (1, q*), plus the report."""
    report = threshold_report(spec, weight_exponent)
    return report.admits_q(target_q), report


def full_order_boundary_p_star(n: int, l: int) -> Fraction:
    """Critical exponent for the boundary case l = n from the raw inverse power.

    At l = n (odd) the kernel norm is constant (no decay); the threshold
    quoted for this case comes from the printed inverse power n - l + 1, the
    even-order decay rate. Returns n / (n - l + 1).
    """
    if l != n:
        raise ValueError("boundary rule applies only to l == n")
    return Fraction(n, n - l + 1)


# ---------------------------------------------------------------------------
# Numeric witnesses


@dataclass(frozen=True)
class ThresholdWitness:
    """Radius-doubling verdicts just above and just below p*."""

    p_star: Fraction
    delta: float
    finite_side: DoublingReport
    divergent_side: DoublingReport

    @property
    def passed(self) -> bool:
        return (
            self.finite_side.status is DoublingStatus.CONVERGED
            and self.divergent_side.status is DoublingStatus.DIVERGENT
        )


def verify_threshold_numerically(
    spec: KernelSpec,
    weight_exponent=0,
    delta: float = 0.1,
    domain: RadialDomain | None = None,
    max_doublings: int = 20,
) -> ThresholdWitness:
    """Witness the threshold by observed growth under truncation doubling.

    Evaluates the weighted L^p kernel integral at p* + delta and p* - delta
    over the exterior domain, truncated at doubling radii; the detector must
    see stabilizing increments on the finite side and non-decaying increments
    on the divergent side. The verdicts come from the observed partial
    integrals, not from the threshold formula.
    """
    p_star = critical_exponent(spec, weight_exponent)
    if not 0 < delta < p_star / 2:
        raise ValueError(f"need 0 < delta < p*/2 = {p_star / 2}, got {delta}")
    if domain is None:
        domain = RadialDomain(kind=DomainKind.EXTERIOR, n=spec.n, r_in=1.0)
    if domain.kind is not DomainKind.EXTERIOR:
        raise ValueError("threshold witnesses run on exterior domains")
    measure = WeightedMeasure(as_fraction(weight_exponent))
    sides = []
    for p in (p_star + as_fraction(delta), p_star - as_fraction(delta)):
        form = radial_reduction(spec, p, measure, domain)

        def shell(lo: float, hi: float, _c=form.constant, _a=form.exponent):
            return _c * power_integral(_a, lo, hi).value

        sides.append(
            detect_by_radius_doubling(shell, domain.r_in, max_doublings=max_doublings)
        )
    return ThresholdWitness(
        p_star=p_star,
        delta=delta,
        finite_side=sides[0],
        divergent_side=sides[1],
    )


# ---------------------------------------------------------------------------
# Reference sweep: every printed threshold identity in executable form


@dataclass(frozen=True)
class SweepCase:
    label: str
    spec: KernelSpec
    weight_exponent: Fraction
    expected_p_star: Fraction
    expected_q_star: Fraction | None


def reference_sweep(max_n: int = 8) -> list[SweepCase]:
    """All threshold identities the suite verifies, with expected rationals.

    The expectations are written from the per-family decay formulas
    (n/(n-1) for the Cauchy kernel, n/(n+2) for the Laplacian iterate,
    1 + eps/(n+2) for its 2+eps weighting, n/(n-l) and n/(n+1-l) for odd and
    even Dirac iterates) rather than through `critical_exponent`, so the
    sweep checks the engine against independently coded fractions.
    """
    cases = []
    for n in range(2, max_n + 1):
        cases.append(
            SweepCase(
                label=f"cauchy n={n} exterior",
                spec=KernelSpec(KernelFamily.CAUCHY, n),
                weight_exponent=Fraction(0),
                expected_p_star=Fraction(n, n - 1),
                expected_q_star=Fraction(n),
            )
        )
    for n in range(1, max_n + 1):
        cases.append(
            SweepCase(
                label=f"laplace-iterate n={n} exterior",
                spec=KernelSpec(KernelFamily.LAPLACE_ITERATE, n),
                weight_exponent=Fraction(0),
                expected_p_star=Fraction(n, n + 2),
                expected_q_star=None,
            )
        )
    for n in (2, 3):
        for eps in (1, 2, 4):
            cases.append(
                SweepCase(
                    label=f"laplace-iterate n={n} weight 2+{eps}",
                    spec=KernelSpec(KernelFamily.LAPLACE_ITERATE, n),
                    weight_exponent=Fraction(2 + eps),
                    expected_p_star=1 + Fraction(eps, n + 2),
                    expected_q_star=1 + Fraction(n + 2, eps),
                )
            )
    for n in range(2, max_n + 1):
        for l in range(1, n):
            if l % 2:
                expected = Fraction(n, n - l)
                conj = Fraction(n, l)
            else:
                expected = Fraction(n, n + 1 - l)
                conj = Fraction(n, l - 1)
            cases.append(
                SweepCase(
                    label=f"dirac-iterate n={n} l={l} ({'odd' if l % 2 else 'even'})",
                    spec=KernelSpec(KernelFamily.DIRAC_ITERATE, n, l=l),
                    weight_exponent=Fraction(0),
                    expected_p_star=expected,
                    expected_q_star=conj,
                )
            )
    return cases
