"""Weighted L^p / finite-difference Sobolev norms for kernels and grid functions.

Kernel norms are exact (radial reduction + closed-form power integral);
grid-function norms are trapezoid-weighted lattice sums with central-difference
derivatives (one-sided at box faces) up to order 2. Both accept the radial
power weight ||x||^w on the measure.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np

from .clifford import batch_geometric_product, batch_norm, Multivector
from .domains import LEBESGUE, RadialDomain, WeightedMeasure
from .kernels import KernelSpec
from .quadrature import DivergenceEnd, closed_form_lp_integral

MAX_DERIVATIVE_ORDER = 2

CONJUGATE_TOL = 1e-12
HOLDER_SLACK = 1e-9


class NormMethod(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    GRID = "grid"


@dataclass(frozen=True)
class GridFunction:
    """Multivector-valued samples on a regular axis-aligned lattice.

    `values` has shape (*shape, 2**n): one Clifford coefficient vector per
    node, nodes in row-major order. `boundary_band` marks how many layers at
    each face were produced by one-sided stencils (0 for raw data). Treat
    instances as immutable values.
    """

    n: int
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    shape: tuple[int, ...]
    values: np.ndarray = field(repr=False)
    boundary_band: int = 0

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        shape = tuple(int(s) for s in self.shape)
        if not (len(lo) == len(hi) == len(shape) == self.n):
            raise ValueError("box and shape must each have one entry per axis")
        if any(s < 2 for s in shape):
            raise ValueError(f"need at least 2 samples per axis, got {shape}")
        if any(h <= l for l, h in zip(lo, hi)):
            raise ValueError("box must have positive extent on every axis")
        values = np.asarray(self.values, dtype=float)
        if values.shape != (*shape, 1 << self.n):
            raise ValueError(
                f"values must have shape {(*shape, 1 << self.n)}, got {values.shape}"
            )
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "values", values)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(
            (h - l) / (s - 1) for l, h, s in zip(self.lo, self.hi, self.shape)
        )

    def axes(self) -> list[np.ndarray]:
        return [
            np.linspace(l, h, s) for l, h, s in zip(self.lo, self.hi, self.shape)
        ]

    def nodes(self) -> np.ndarray:
        """Node coordinates, shape (*shape, n)."""
        grids = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack(grids, axis=-1)

    def radii(self) -> np.ndarray:
        return np.linalg.norm(self.nodes(), axis=-1)

    def node_norms(self) -> np.ndarray:
        return batch_norm(self.values)

    def quadrature_weights(self) -> np.ndarray:
        """Tensor-product trapezoid weights, shape (*shape,)."""
        axis_weights = []
        for h, s in zip(self.spacing, self.shape):
            w = np.full(s, h)
            w[0] = w[-1] = h / 2.0
            axis_weights.append(w)
        return reduce(np.multiply.outer, axis_weights)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def value_at(self, index: tuple[int, ...]) -> Multivector:
        return Multivector(self.n, self.values[index])

    def with_values(self, values: np.ndarray, boundary_band: int | None = None) -> "GridFunction":
        return GridFunction(
            n=self.n,
            lo=self.lo,
            hi=self.hi,
            shape=self.shape,
            values=values,
            boundary_band=self.boundary_band if boundary_band is None else boundary_band,
        )

    def same_lattice(self, other: "GridFunction") -> bool:
        return (
            self.n == other.n
            and self.lo == other.lo
            and self.hi == other.hi
            and self.shape == other.shape
        )


def sample_scalar_field(fn, n: int, shape, lo, hi) -> GridFunction:
    """Sample fn(points)->(N,) into a grade-0 grid function."""
    shape = tuple(int(s) for s in shape)
    lo = tuple(float(v) for v in (lo if np.iterable(lo) else [lo] * n))
    hi = tuple(float(v) for v in (hi if np.iterable(hi) else [hi] * n))
    probe = GridFunction(n, lo, hi, shape, np.zeros((*shape, 1 << n)))
    points = probe.nodes().reshape(-1, n)
    values = np.zeros((points.shape[0], 1 << n))
    values[:, 0] = np.asarray(fn(points), dtype=float)
    return probe.with_values(values.reshape(*shape, 1 << n))


def smooth_bump(
    n: int, shape, radius: float = 0.5, lo=-1.0, hi=1.0, height: float = 1.0
) -> GridFunction:
    """Compactly supported C^inf bump exp(1 - 1/(1 - (r/radius)^2)), r < radius."""

    def bump(points):
        r2 = np.sum(np.square(points), axis=-1) / radius**2
        out = np.zeros(points.shape[0])
        inside = r2 < 1.0
        out[inside] = height * np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
        return out

    return sample_scalar_field(bump, n, shape, lo, hi)


def finite_difference(f: GridFunction, axis: int) -> GridFunction:
    """Partial derivative along one axis: central interior, one-sided faces."""
    if f.shape[axis] < 3:
        raise ValueError("need at least 3 samples per axis to differentiate")
    df = np.gradient(f.values, f.spacing[axis], axis=axis, edge_order=1)
    return f.with_values(df, boundary_band=max(f.boundary_band, 1))


def _derivative_values(f: GridFunction, beta: tuple[int, ...]) -> np.ndarray:
    out = f
    for axis, order in enumerate(beta):
        for _ in range(order):
            out = finite_difference(out, axis)
    return out.values


def multi_indices(n: int, max_order: int):
    """All derivative multi-indices beta in N^n with |beta| <= max_order."""
    for beta in itertools.product(range(max_order + 1), repeat=n):
        if sum(beta) <= max_order:
            yield beta


@dataclass(frozen=True)
class NormResult:
    p: float
    derivative_order: int
    weight_exponent: float
    value: float
    method: NormMethod
    divergence_end: DivergenceEnd = DivergenceEnd.NONE

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)


def grid_norm(
    f: GridFunction,
    p: float,
    k: int = 0,
    measure: WeightedMeasure = LEBESGUE,
) -> NormResult:
    """Weighted Sobolev norm (sum_{|beta|<=k} ||d^beta f||_p^p)^(1/p) on the grid.

    Derivatives are finite differences; all terms share the trapezoid lattice
    weights and the radial weight ||x||^w.
    """
    p = float(p)
    if p < 1:
        raise ValueError(f"norm exponent must satisfy p >= 1, got {p}")
    if not 0 <= k <= MAX_DERIVATIVE_ORDER:
        raise ValueError(f"derivative order must be in 0..{MAX_DERIVATIVE_ORDER}, got {k}")
    node_weight = f.quadrature_weights() * f.radii() ** measure.w
    total = 0.0
    for beta in multi_indices(f.n, k):
        magnitudes = batch_norm(_derivative_values(f, beta))
        total += float(np.sum(node_weight * magnitudes**p))
    return NormResult(
        p=p,
        derivative_order=k,
        weight_exponent=measure.w,
        value=total ** (1.0 / p),
        method=NormMethod.GRID,
    )


def kernel_lp_norm(
    spec: KernelSpec,
    p,
    measure: WeightedMeasure = LEBESGUE,
    domain: RadialDomain | None = None,
) -> NormResult:
    """Exact weighted L^p norm of a kernel over a radial domain.

    Divergence is a result: the value is +inf and the report carries which
    endpoint failed. For 0 < p < 1 (where ||.||_p is not a norm) use
    `closed_form_lp_integral` directly.
    """
    p_f = float(p)
    if p_f < 1:
        raise ValueError(f"norm exponent must satisfy p >= 1, got {p}")
    report = closed_form_lp_integral(spec, p, measure, domain)
    value = report.value ** (1.0 / p_f) if report.converges else math.inf
    return NormResult(
        p=p_f,
        derivative_order=0,
        weight_exponent=measure.w,
        value=value,
        method=NormMethod.CLOSED_FORM,
        divergence_end=report.divergence_end,
    )


@dataclass(frozen=True)
class HolderCheck:
    lhs: float
    rhs: float
    holds: bool
    p: float
    q: float


def holder_check(
    g: GridFunction,
    f: GridFunction,
    p: float,
    q: float,
    measure: WeightedMeasure = LEBESGUE,
) -> HolderCheck:
    """||g f||_1 <= ||g||_p ||f||_q on matching grids, conjugate (p, q).

    The pointwise product is the full geometric product; the inequality is
    exact (no dimension constant) when the factors are pure grade 0 or 1.
    """
    if not g.same_lattice(f):
        raise ValueError("grid mismatch: factors must share one lattice")
    if abs(1.0 / p + 1.0 / q - 1.0) > CONJUGATE_TOL:
        raise ValueError(f"(p, q) = ({p}, {q}) are not conjugate exponents")
    product = batch_geometric_product(g.values, f.values, g.n)
    node_weight = g.quadrature_weights() * g.radii() ** measure.w
    lhs = float(np.sum(node_weight * batch_norm(product)))
    rhs = grid_norm(g, p, 0, measure).value * grid_norm(f, q, 0, measure).value
    return HolderCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs * (1.0 + HOLDER_SLACK), p=p, q=q)


@dataclass(frozen=True)
class ScanRow:
    q: float
    p: float
    kernel_norm: float
    f_norm: float
    product: float


@dataclass(frozen=True)
class ScanTable:
    rows: tuple[ScanRow, ...]
    q_star: float

    @property
    def limit(self) -> float:
        """Product at the last grid point before q_star: the reported limit."""
        return self.rows[-1].product


def norm_limit_scan(
    spec: KernelSpec,
    f: GridFunction,
    measure: WeightedMeasure,
    domain: RadialDomain,
    q_star,
    steps: int = 8,
) -> ScanTable:
    """Products ||kernel||_p * ||f||_q on a q-grid increasing to q_star.

    Each row pairs q with its conjugate p = q/(q-1); the grid stays strictly
    inside (1, q_star), so every kernel norm is taken above its critical
    exponent and every row is finite whenever ||f||_q is.
    """
    q_star_f = float(q_star)
    if q_star_f <= 1:
        raise ValueError(f"q_star must exceed 1, got {q_star}")
    if steps < 1:
        raise ValueError("need at least one scan step")
    rows = []
    for j in range(1, steps + 1):
        q = 1.0 + (q_star_f - 1.0) * j / (steps + 1)
        p = q / (q - 1.0)
        kernel_norm = kernel_lp_norm(spec, p, measure, domain).value
        f_norm = grid_norm(f, q, 0, measure).value
        rows.append(
            ScanRow(q=q, p=p, kernel_norm=kernel_norm, f_norm=f_norm, product=kernel_norm * f_norm)
        )
    return ScanTable(rows=tuple(rows), q_star=q_star_f)
