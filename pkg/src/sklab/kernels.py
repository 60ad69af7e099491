"""Generating kernels for Cauchy-type singular integral operators.

Four families, all radial in norm and homogeneous of a positive degree h
(meaning ||k(r u)|| = r^-h ||k(u)|| for unit u):

  CAUCHY           conj(x) / (omega_n ||x||^n)            h = n - 1 (grade 1)
  LAPLACE_ITERATE  -1 / (omega_n ||x||^(n+2))             h = n + 2 (grade 0)
  DIRAC_ITERATE    l odd:  theta x / (omega_n ||x||^(n-l+1))   h = n - l
                   l even: theta / (omega_n ||x||^(n-l+1))     h = n - l + 1
  POWER_MODEL      |x|^-alpha on the line (n = 1)         h = alpha (grade 0)

omega_n is the surface area of S^(n-1). The induced integral operator is
classified weak / singular / hyper singular by comparing the effective
degree h - w (w = radial weight exponent on the measure) with the dimension.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .clifford import (
    MAX_DIMENSION,
    Multivector,
    conjugate,
    surface_area,
    vector_from_point,
)
from .rational import as_fraction


class KernelFamily(str, enum.Enum):
    POWER_MODEL = "power_model"
    CAUCHY = "cauchy"
    LAPLACE_ITERATE = "laplace_iterate"
    DIRAC_ITERATE = "dirac_iterate"


class SingularityClass(str, enum.Enum):
    WEAK = "weak"
    SINGULAR = "singular"
    HYPER = "hyper"


class SingularPointError(ValueError):
    """Kernel evaluated at its singular point x = 0."""


@dataclass(frozen=True)
class KernelSpec:
    """Identifies one kernel: family, dimension, iterate order, normalization.

    `l` applies to DIRAC_ITERATE only and must satisfy 1 <= l < n. `alpha`
    applies to POWER_MODEL only (n = 1, alpha > 0) and is kept as an exact
    rational so thresholds derived from it stay exact. `theta` rescales the
    DIRAC_ITERATE family; every integrability threshold is theta-independent.
    """

    family: KernelFamily
    n: int
    l: int | None = None
    alpha: Fraction | None = None
    theta: float = 1.0

    def __post_init__(self):
        family = KernelFamily(self.family)
        object.__setattr__(self, "family", family)
        if not 1 <= self.n <= MAX_DIMENSION:
            raise ValueError(f"dimension must be in 1..{MAX_DIMENSION}, got {self.n}")
        if family is KernelFamily.CAUCHY and self.n < 2:
            # n = 1 would give decay degree n - 1 = 0: no singularity scale.
            raise ValueError("the Cauchy kernel needs n >= 2 (degree n - 1 must be positive)")
        if family is KernelFamily.DIRAC_ITERATE:
            if self.l is None:
                raise ValueError("dirac_iterate requires the iterate order l")
            if not 1 <= self.l < self.n:
                raise ValueError(f"iterate order must satisfy 1 <= l < n, got l={self.l}, n={self.n}")
        elif self.l is not None:
            raise ValueError(f"{family.value} does not take an iterate order")
        if family is KernelFamily.POWER_MODEL:
            if self.n != 1:
                raise ValueError("power_model is the one-dimensional model kernel (n = 1)")
            if self.alpha is None:
                raise ValueError("power_model requires the exponent alpha")
            alpha = as_fraction(self.alpha)
            if alpha <= 0:
                raise ValueError(f"alpha must be positive, got {alpha}")
            object.__setattr__(self, "alpha", alpha)
        elif self.alpha is not None:
            raise ValueError(f"{family.value} does not take an exponent alpha")
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")

    @property
    def omega(self) -> float:
        return surface_area(self.n)

    @property
    def unit_norm(self) -> float:
        """||kernel(u)|| at any unit vector u (constant over the sphere)."""
        if self.family is KernelFamily.POWER_MODEL:
            return 1.0
        if self.family is KernelFamily.DIRAC_ITERATE:
            return self.theta / self.omega
        return 1.0 / self.omega


def homogeneity_degree(spec: KernelSpec) -> Fraction:
    """Exact decay degree h with ||kernel(r u)|| = r^-h ||kernel(u)||."""
    if spec.family is KernelFamily.CAUCHY:
        return Fraction(spec.n - 1)
    if spec.family is KernelFamily.LAPLACE_ITERATE:
        return Fraction(spec.n + 2)
    if spec.family is KernelFamily.DIRAC_ITERATE:
        if spec.l % 2:
            return Fraction(spec.n - spec.l)
        return Fraction(spec.n - spec.l + 1)
    return Fraction(spec.alpha)


def evaluate(spec: KernelSpec, x) -> Multivector:
    """Kernel value at a nonzero point of R^n, as a multivector."""
    point = np.asarray(x, dtype=float).ravel()
    if point.size != spec.n:
        raise ValueError(f"expected a point of R^{spec.n}, got {point.size} coordinates")
    r = float(np.linalg.norm(point))
    if r == 0.0:
        raise SingularPointError("kernel is singular at x = 0")
    if spec.family is KernelFamily.CAUCHY:
        return conjugate(vector_from_point(point)) / (spec.omega * r**spec.n)
    if spec.family is KernelFamily.LAPLACE_ITERATE:
        return Multivector.scalar(spec.n, -1.0 / (spec.omega * r ** (spec.n + 2)))
    if spec.family is KernelFamily.DIRAC_ITERATE:
        scale = spec.theta / (spec.omega * r ** (spec.n - spec.l + 1))
        if spec.l % 2:
            return vector_from_point(point) * scale
        return Multivector.scalar(spec.n, scale)
    return Multivector.scalar(1, r ** -float(spec.alpha))


def kernel_values(spec: KernelSpec, points: np.ndarray) -> np.ndarray:
    """Batched kernel coefficients at points of shape (N, n) -> (N, 2**n)."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != spec.n:
        raise ValueError(f"expected points of shape (N, {spec.n}), got {points.shape}")
    r = np.linalg.norm(points, axis=1)
    if np.any(r == 0.0):
        raise SingularPointError("kernel is singular at x = 0")
    out = np.zeros((points.shape[0], 1 << spec.n))
    vector_idx = 1 << np.arange(spec.n)
    if spec.family is KernelFamily.CAUCHY:
        out[:, vector_idx] = -points / (spec.omega * r[:, None] ** spec.n)
    elif spec.family is KernelFamily.LAPLACE_ITERATE:
        out[:, 0] = -1.0 / (spec.omega * r ** (spec.n + 2))
    elif spec.family is KernelFamily.DIRAC_ITERATE:
        scale = spec.theta / (spec.omega * r ** (spec.n - spec.l + 1))
        if spec.l % 2:
            out[:, vector_idx] = points * scale[:, None]
        else:
            out[:, 0] = scale
    else:
        out[:, 0] = r ** -float(spec.alpha)
    return out


def kernel_norms(spec: KernelSpec, points: np.ndarray) -> np.ndarray:
    """Batched ||kernel(x)|| at points of shape (N, n), via the components."""
    return np.sqrt(np.sum(np.square(kernel_values(spec, points)), axis=-1))


def classify(spec: KernelSpec, weight_exponent=0) -> SingularityClass:
    """Weak / singular / hyper verdict for the induced integral operator.

    Compares the effective degree h - w against the dimension n; exact when
    the weight exponent is rational.
    """
    w = as_fraction(weight_exponent)
    if w < 0:
        raise ValueError(f"weight exponent must be nonnegative, got {w}")
    effective = homogeneity_degree(spec) - w
    if effective < spec.n:
        return SingularityClass.WEAK
    if effective == spec.n:
        return SingularityClass.SINGULAR
    return SingularityClass.HYPER


def homogeneity_check(spec: KernelSpec, x, lam: float) -> float:
    """Residual ||kernel(lam x) - lam^-h kernel(x)||; zero up to rounding."""
    if lam <= 0:
        raise ValueError(f"scaling factor must be positive, got {lam}")
    point = np.asarray(x, dtype=float)
    scaled = evaluate(spec, lam * point)
    predicted = evaluate(spec, point) * lam ** -float(homogeneity_degree(spec))
    return (scaled - predicted).norm()
