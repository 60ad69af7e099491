"""Teodorescu transform and finite-difference Dirac operator on grid functions.

The transform convolves a lattice function with a generating kernel,

    (T psi)(x) = sum_cells kernel(x - y_cell) * psi(y_cell) * cell_volume,

with the singular self-cell replaced by a subgrid cell average (the kernel is
absolutely integrable near 0 for weak-class kernels) or excluded outright.
Applying the Dirac operator D = sum_j e_j d/dx_j to the transform recovers
psi at interior nodes, which the mapping probe measures as a residual.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.signal import fftconvolve

from .clifford import blade_tables, product_tensor
from .domains import LEBESGUE, WeightedMeasure
from .kernels import KernelSpec, SingularityClass, classify, kernel_values
from .norms import GridFunction, NormResult, grid_norm
from .rational import as_fraction
from .thresholds import ThresholdReport, threshold_report


class PunctureHandling(str, enum.Enum):
    SUBGRID_REFINE = "subgrid_refine"
    CELL_EXCLUDE = "cell_exclude"


class InadmissibleIndexError(ValueError):
    """Requested Sobolev index lies outside the kernel's working range."""

    def __init__(self, message: str, report: ThresholdReport):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class ConvolutionPlan:
    """How a kernel convolution treats the singular cell.

    SUBGRID_REFINE integrates the cell containing the target on a refine^n
    subgrid (weak-class kernels only; the factor must be even and >= 4 so no
    subcell center lands on the singularity). CELL_EXCLUDE drops the cell,
    the only option for singular/hyper-class kernels.
    """

    spec: KernelSpec
    refine: int = 8
    handling: PunctureHandling = PunctureHandling.SUBGRID_REFINE
    weight_exponent: Fraction = Fraction(0)
    source_shape: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "handling", PunctureHandling(self.handling))
        object.__setattr__(self, "weight_exponent", as_fraction(self.weight_exponent))
        if self.source_shape is not None:
            object.__setattr__(self, "source_shape", tuple(int(s) for s in self.source_shape))
        if self.refine < 1:
            raise ValueError(f"refinement factor must be >= 1, got {self.refine}")
        klass = classify(self.spec, self.weight_exponent)
        if self.handling is PunctureHandling.SUBGRID_REFINE:
            if klass is SingularityClass.WEAK and self.refine < 4:
                raise ValueError("weak-class subgrid refinement requires a factor >= 4")
            if self.refine % 2:
                raise ValueError("refinement factor must be even (keeps subcell centers off the singularity)")
        else:
            if klass is SingularityClass.WEAK:
                raise ValueError("cell exclusion is reserved for singular/hyper kernels")


def _displacement_kernel(psi: GridFunction, spec: KernelSpec, plan: ConvolutionPlan) -> np.ndarray:
    """Kernel coefficients on the (2m-1)^n lattice of node displacements."""
    spacing = psi.spacing
    axes = [
        np.arange(-(m - 1), m) * h for m, h in zip(psi.shape, spacing)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([g.ravel() for g in mesh], axis=-1)
    zero_row = np.flatnonzero(np.all(points == 0.0, axis=1))[0]
    points[zero_row] = spacing  # placeholder off the singularity
    table = kernel_values(spec, points)
    if plan.handling is PunctureHandling.CELL_EXCLUDE:
        table[zero_row] = 0.0
    else:
        table[zero_row] = _self_cell_average(spec, spacing, plan.refine)
    return table.reshape(*(2 * m - 1 for m in psi.shape), 1 << spec.n)


def _self_cell_average(spec: KernelSpec, spacing, refine: int) -> np.ndarray:
    """Cell average of the kernel on the cell centered at the singularity."""
    offsets = [
        ((np.arange(refine) + 0.5) / refine - 0.5) * h for h in spacing
    ]
    mesh = np.meshgrid(*offsets, indexing="ij")
    subpoints = np.stack([g.ravel() for g in mesh], axis=-1)
    return kernel_values(spec, subpoints).mean(axis=0)


def teodorescu(
    psi: GridFunction,
    spec: KernelSpec,
    plan: ConvolutionPlan | None = None,
    method: str = "fft",
) -> GridFunction:
    """Kernel convolution of a grid function, evaluated on its own lattice.

    Requires a weak-class kernel (under the plan's classification weight):
    the singularity is then absolutely integrable and the self-cell average
    converges. Linear in psi; deterministic.
    """
    if plan is None:
        plan = ConvolutionPlan(spec)
    if plan.spec != spec:
        raise ValueError("plan was built for a different kernel")
    if psi.n != spec.n:
        raise ValueError(f"grid dimension {psi.n} != kernel dimension {spec.n}")
    if plan.source_shape is not None and plan.source_shape != psi.shape:
        raise ValueError(f"plan expects source shape {plan.source_shape}, got {psi.shape}")
    klass = classify(spec, plan.weight_exponent)
    if klass is not SingularityClass.WEAK:
        raise ValueError(
            f"{klass.value}-class kernel: the lattice convolution needs a weak singularity"
        )
    kdisp = _displacement_kernel(psi, spec, plan)
    if method == "fft":
        out = _convolve_fft(kdisp, psi.values, psi.n, psi.shape)
    elif method == "direct":
        out = _convolve_direct(kdisp, psi.values, psi.n, psi.shape)
    else:
        raise ValueError(f"unknown method {method!r}; use 'fft' or 'direct'")
    return psi.with_values(out * psi.cell_volume)


def _convolve_fft(kdisp, values, n, shape):
    size = 1 << n
    target, sign = blade_tables(n)
    kernel_blades = [a for a in range(size) if np.any(kdisp[..., a])]
    source_blades = [b for b in range(size) if np.any(values[..., b])]
    out = np.zeros_like(values)
    # Target slice of the full linear convolution that corresponds to the
    # source lattice: offsets enter the table shifted by m - 1 per axis.
    window = tuple(slice(m - 1, 2 * m - 1) for m in shape)
    for a in kernel_blades:
        for b in source_blades:
            conv = fftconvolve(kdisp[..., a], values[..., b], mode="full")[window]
            out[..., target[a, b]] += sign[a, b] * conv
    return out


def _convolve_direct(kdisp, values, n, shape):
    tensor = product_tensor(n)
    reverse = (slice(None, None, -1),) * len(shape)
    size = 1 << n
    flat_values = values.reshape(-1, size)
    out = np.zeros_like(values)
    for idx in np.ndindex(*shape):
        window = kdisp[tuple(slice(i, i + m) for i, m in zip(idx, shape))][reverse]
        out[idx] = np.einsum(
            "na,nb,abc->c", window.reshape(-1, size), flat_values, tensor
        )
    return out


def dirac_apply(f: GridFunction) -> GridFunction:
    """D f = sum_j e_j * d_j f: central differences, one-sided at faces.

    The output's boundary_band marks the one-sided layer.
    """
    if any(s < 3 for s in f.shape):
        raise ValueError(f"need at least 3 samples per axis, got {f.shape}")
    target, sign = blade_tables(f.n)
    out = np.zeros_like(f.values)
    for j in range(f.n):
        df = np.gradient(f.values, f.spacing[j], axis=j, edge_order=1)
        bit = 1 << j
        # Left multiplication by e_j permutes blades: b -> bit ^ b with a sign.
        out[..., target[bit]] += sign[bit] * df
    return f.with_values(out, boundary_band=max(f.boundary_band, 1))


def interior_window(shape: tuple[int, ...], band: int) -> tuple[slice, ...]:
    if any(s <= 2 * band for s in shape):
        raise ValueError(f"band {band} leaves no interior on shape {shape}")
    return tuple(slice(band, s - band) for s in shape)


def left_inverse_residual(psi: GridFunction, transform: GridFunction, band: int = 1) -> float:
    """Relative interior L2 residual of D(T psi) - psi."""
    recovered = dirac_apply(transform)
    window = interior_window(psi.shape, max(band, recovered.boundary_band))
    diff = recovered.values[window] - psi.values[window]
    denom = np.linalg.norm(psi.values[window])
    if denom == 0.0:
        return float(np.linalg.norm(diff))
    return float(np.linalg.norm(diff) / denom)


@dataclass(frozen=True)
class MappingProbeReport:
    """Finite-norm witness for the regularity-raising property of the transform."""

    q: float
    threshold: ThresholdReport
    source_norm_k0: NormResult
    source_norm_k1: NormResult
    transform_norm_k0: NormResult
    transform_norm_k1: NormResult
    left_inverse_residual: float
    box: tuple[tuple[float, float], ...]

    @property
    def norms_finite(self) -> bool:
        return all(
            r.is_finite
            for r in (
                self.source_norm_k0,
                self.source_norm_k1,
                self.transform_norm_k0,
                self.transform_norm_k1,
            )
        )


def mapping_property_probe(
    psi: GridFunction,
    spec: KernelSpec,
    q: float,
    measure: WeightedMeasure = LEBESGUE,
    plan: ConvolutionPlan | None = None,
) -> MappingProbeReport:
    """Transform psi and report source/image Sobolev norms plus the residual.

    q must lie in the admissible conjugate range (1, q*) for the kernel and
    measure; outside it the probe is rejected with the threshold report
    attached. The box truncation is recorded in the report.
    """
    report = threshold_report(spec, measure.weight_exponent)
    if not report.admits_q(as_fraction(q)):
        raise InadmissibleIndexError(
            f"q = {q} is outside the open working range (1, {report.q_star}); "
            "the endpoint itself is excluded",
            report,
        )
    transform = teodorescu(psi, spec, plan)
    return MappingProbeReport(
        q=float(q),
        threshold=report,
        source_norm_k0=grid_norm(psi, float(q), 0, measure),
        source_norm_k1=grid_norm(psi, float(q), 1, measure),
        transform_norm_k0=grid_norm(transform, float(q), 0, measure),
        transform_norm_k1=grid_norm(transform, float(q), 1, measure),
        left_inverse_residual=left_inverse_residual(psi, transform),
        box=tuple(zip(psi.lo, psi.hi)),
    )
