"""Radially symmetric integration domains and radial power-weighted measures.

Every domain is centered at the kernel singularity (the origin). Because all
kernel norms in scope are radial, an L^p kernel integral over any of these
domains reduces exactly to a one-dimensional radial integral

    integral ||kernel||^p dmu  =  c * integral_{r0}^{r1} r^a dr

with the angular constant c and radial exponent a computed in closed form by
`radial_reduction`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .clifford import surface_area
from .kernels import KernelSpec, homogeneity_degree
from .rational import as_fraction


class DomainKind(str, enum.Enum):
    INTERVAL = "interval"
    ANNULUS = "annulus"
    PUNCTURED_BALL = "punctured_ball"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class WeightedMeasure:
    """d mu = ||x||^w dx with w >= 0; w = 0 is Lebesgue measure."""

    weight_exponent: Fraction = Fraction(0)

    def __post_init__(self):
        w = as_fraction(self.weight_exponent)
        if w < 0:
            raise ValueError(f"weight exponent must be nonnegative, got {w}")
        object.__setattr__(self, "weight_exponent", w)

    @property
    def w(self) -> float:
        return float(self.weight_exponent)


LEBESGUE = WeightedMeasure()


@dataclass(frozen=True)
class RadialDomain:
    """Annulus / punctured ball / punctured symmetric interval / exterior.

    INTERVAL is the n = 1 case (-r_out, r_out), optionally punctured at
    (-r_in, r_in); the other kinds require a positive puncture radius r_in.
    EXTERIOR is unbounded; numeric integrators require `truncation_radius`.
    """

    kind: DomainKind
    n: int
    r_in: float | None = None
    r_out: float | None = None
    truncation_radius: float | None = None

    def __post_init__(self):
        kind = DomainKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if kind is DomainKind.INTERVAL:
            if self.n != 1:
                raise ValueError("interval domains are one-dimensional")
            if self.r_out is None or self.r_out <= 0:
                raise ValueError("interval requires r_out > 0")
            if self.r_in is not None and not 0 < self.r_in < self.r_out:
                raise ValueError("interval puncture requires 0 < r_in < r_out")
        elif kind in (DomainKind.ANNULUS, DomainKind.PUNCTURED_BALL):
            if self.r_in is None or self.r_out is None:
                raise ValueError(f"{kind.value} requires both r_in and r_out")
            if not 0 < self.r_in < self.r_out:
                raise ValueError(f"{kind.value} requires 0 < r_in < r_out")
        else:  # EXTERIOR
            if self.r_in is None or self.r_in <= 0:
                raise ValueError("exterior requires r_in > 0")
            if self.r_out is not None:
                raise ValueError("exterior domains are unbounded; use truncation_radius for numerics")
        if self.truncation_radius is not None:
            inner = self.r_in if self.r_in is not None else 0.0
            if self.truncation_radius <= inner:
                raise ValueError("truncation_radius must exceed r_in")

    @property
    def radial_extent(self) -> tuple[float, float]:
        """(r0, r1) with r0 = 0 for an unpunctured interval, r1 = inf for exterior."""
        r0 = self.r_in if self.r_in is not None else 0.0
        r1 = math.inf if self.kind is DomainKind.EXTERIOR else self.r_out
        return r0, r1

    @property
    def is_bounded(self) -> bool:
        return self.kind is not DomainKind.EXTERIOR

    def truncated_extent(self) -> tuple[float, float]:
        """Radial extent with the exterior end replaced by the truncation radius."""
        r0, r1 = self.radial_extent
        if math.isinf(r1):
            if self.truncation_radius is None:
                raise ValueError("unbounded domain: set truncation_radius for numeric work")
            r1 = self.truncation_radius
        return r0, r1


@dataclass(frozen=True)
class RadialIntegralForm:
    """Exact 1-D reduction: integral ||kernel||^p dmu = constant * int r^exponent dr.

    The exponent is kept as an exact rational: it is affine in p with slope
    -h, and threshold queries compare it against -1 exactly.
    """

    constant: float
    exponent: Fraction
    domain: RadialDomain


def radial_reduction(
    spec: KernelSpec,
    p,
    measure: WeightedMeasure = LEBESGUE,
    domain: RadialDomain | None = None,
) -> RadialIntegralForm:
    """Reduce the weighted L^p kernel integral to its radial form.

    c = omega_n * m_u^p with m_u = ||kernel(u)|| on the unit sphere, and
    a = -h p + w + n - 1 (kernel decay h, measure weight w, Jacobian n - 1).
    """
    if domain is not None and domain.n != spec.n:
        raise ValueError(f"domain dimension {domain.n} != kernel dimension {spec.n}")
    p_exact = as_fraction(p)
    if p_exact <= 0:
        raise ValueError(f"integral exponent p must be positive, got {p}")
    h = homogeneity_degree(spec)
    a = -h * p_exact + measure.weight_exponent + spec.n - 1
    c = surface_area(spec.n) * spec.unit_norm ** float(p_exact)
    return RadialIntegralForm(constant=c, exponent=a, domain=domain)


def measure_of(domain: RadialDomain, measure: WeightedMeasure = LEBESGUE) -> float:
    """mu(domain) = omega_n (r_out^(n+w) - r_in^(n+w)) / (n+w); +inf for exterior."""
    if not domain.is_bounded:
        return math.inf
    r0, r1 = domain.radial_extent
    return radial_measure(domain.n, measure, r0, r1)


def radial_measure(n: int, measure: WeightedMeasure, r0: float, r1: float) -> float:
    """mu of the radial shell {r0 < ||x|| < r1} in R^n."""
    if not 0 <= r0 < r1 < math.inf:
        raise ValueError(f"need 0 <= r0 < r1 < inf, got ({r0}, {r1})")
    s = n + measure.w
    return surface_area(n) * (r1**s - r0**s) / s
