"""sklab: a numerical laboratory for Cauchy-type singular integral kernels.

Evaluates the generating-kernel families, computes weighted L^p / Sobolev
norms over punctured and unbounded radial domains, determines exact rational
integrability thresholds and conjugate-index ranges, evaluates Cauchy
principal values by extrapolation, and applies the Teodorescu transform to
multivector-valued grid functions.
"""

from .clifford import (
    Multivector,
    conjugate,
    geometric_product,
    surface_area,
    vector_from_point,
)
from .domains import (
    LEBESGUE,
    DomainKind,
    RadialDomain,
    RadialIntegralForm,
    WeightedMeasure,
    measure_of,
    radial_reduction,
)
from .kernels import (
    KernelFamily,
    KernelSpec,
    SingularityClass,
    SingularPointError,
    classify,
    evaluate,
    homogeneity_check,
    homogeneity_degree,
)
from .norms import (
    GridFunction,
    HolderCheck,
    NormMethod,
    NormResult,
    ScanTable,
    grid_norm,
    holder_check,
    kernel_lp_norm,
    norm_limit_scan,
    sample_scalar_field,
    smooth_bump,
)
from .quadrature import (
    DEFAULT_SEED,
    ConvergenceReport,
    DivergenceEnd,
    DoublingReport,
    DoublingStatus,
    MonteCarloEstimate,
    closed_form_lp_integral,
    converges_at_zero,
    cpv_limit,
    detect_by_radius_doubling,
    geometric_schedule,
    numeric_lp_integral,
    power_integral,
    zero_end_integral,
)
from .thresholds import (
    IntegrationEnd,
    NonDecayingKernelError,
    ThresholdReport,
    ThresholdWitness,
    conjugate_range,
    critical_exponent,
    full_order_boundary_p_star,
    reference_sweep,
    report_from_p_star,
    threshold_report,
    verify_threshold_numerically,
    viability,
)
from .transforms import (
    ConvolutionPlan,
    InadmissibleIndexError,
    MappingProbeReport,
    PunctureHandling,
    dirac_apply,
    left_inverse_residual,
    mapping_property_probe,
    teodorescu,
)

__version__ = "0.1.0"
