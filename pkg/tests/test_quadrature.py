import math
from fractions import Fraction

import numpy as np
import pytest

from sklab import (
    DomainKind,
    DoublingStatus,
    KernelFamily,
    KernelSpec,
    RadialDomain,
    WeightedMeasure,
    closed_form_lp_integral,
    converges_at_zero,
    cpv_limit,
    detect_by_radius_doubling,
    geometric_schedule,
    numeric_lp_integral,
    power_integral,
    zero_end_integral,
)
from sklab.domains import LEBESGUE
from sklab.quadrature import DivergenceEnd

from conftest import random_kernel_spec


def punctured_interval(eps, r_out=1.0):
    return RadialDomain(DomainKind.INTERVAL, 1, r_in=eps, r_out=r_out)


def model_integral(alpha):
    """Punctured integral of |x|^-alpha over (-1,1) as a function of eps."""
    spec = KernelSpec(KernelFamily.POWER_MODEL, 1, alpha=Fraction(alpha))

    def evaluator(eps):
        return closed_form_lp_integral(spec, 1, LEBESGUE, punctured_interval(eps)).value

    return evaluator


# -- closed forms -----------------------------------------------------------


def test_inverse_square_tail():
    report = power_integral(-2, 1.0, math.inf)
    assert report.converges and report.value == pytest.approx(1.0, rel=1e-15)
    assert report.divergence_end is DivergenceEnd.NONE


def test_critical_exponent_diverges_at_infinity():
    report = power_integral(-1, 0.01, math.inf)
    assert not report.converges
    assert report.divergence_end is DivergenceEnd.AT_INFINITY
    assert not power_integral(Fraction(-1, 2), 1.0, math.inf).converges


def test_square_root_singularity_closed_form():
    for eps in (0.25, 0.01, 1e-6):
        report = power_integral(-0.5, eps, 1.0)
        assert report.value == pytest.approx(2 * (1 - math.sqrt(eps)), rel=1e-13)


def test_logarithmic_case_between_finite_bounds():
    report = power_integral(-1, 0.5, 2.0)
    assert report.value == pytest.approx(math.log(4.0), rel=1e-14)


def test_additivity_over_adjacent_intervals():
    rng = np.random.default_rng(21)
    for _ in range(50):
        a = rng.uniform(-4, 3)
        r0, rm, r1 = np.sort(rng.uniform(0.1, 10.0, size=3))
        if not (r0 < rm < r1):
            continue
        whole = power_integral(a, r0, r1).value
        split = power_integral(a, r0, rm).value + power_integral(a, rm, r1).value
        assert whole == pytest.approx(split, rel=1e-12, abs=1e-12)


def test_zero_endpoint_queries():
    assert converges_at_zero(-0.5)
    assert not converges_at_zero(-1)
    assert not converges_at_zero(-1.5)
    report = zero_end_integral(-0.5, 1.0)
    assert report.value == pytest.approx(2.0, rel=1e-14)
    assert zero_end_integral(-1.5, 1.0).divergence_end is DivergenceEnd.AT_ZERO


def test_power_integral_input_validation():
    with pytest.raises(ValueError):
        power_integral(-2, 0.0, 1.0)
    with pytest.raises(ValueError):
        power_integral(-2, -1.0, 1.0)
    with pytest.raises(ValueError):
        power_integral(-2, 2.0, 1.0)


# -- principal values -------------------------------------------------------


def test_cpv_weak_family_hits_closed_form():
    for alpha in [k / 10 for k in range(1, 10)]:
        report = cpv_limit(model_integral(alpha), geometric_schedule())
        assert report.converges
        assert report.value == pytest.approx(2.0 / (1.0 - alpha), abs=1e-6)


def test_cpv_singular_and_hyper_diverge():
    assert not cpv_limit(model_integral(1.0), geometric_schedule()).converges
    assert not cpv_limit(model_integral(1.5), geometric_schedule()).converges


def test_cpv_constant_evaluator_exact():
    report = cpv_limit(lambda eps: 7.0, geometric_schedule())
    assert report.converges and report.value == 7.0


def test_cpv_schedule_validation():
    with pytest.raises(ValueError):
        cpv_limit(lambda e: e, [0.1, 0.01, 0.001])  # too short
    with pytest.raises(ValueError):
        cpv_limit(lambda e: e, [0.1, 0.2, 0.01, 0.001])  # not decreasing
    with pytest.raises(ValueError):
        cpv_limit(lambda e: e, [0.1, 0.01, 0.0, -0.1])


# -- doubling detector ------------------------------------------------------


def closed_form_shell(a):
    return lambda lo, hi: power_integral(a, lo, hi).value


@pytest.mark.parametrize("a", [-1.0, -0.9, -0.5, 0.0, 1.0])
def test_doubling_detector_flags_divergence_within_20(a):
    report = detect_by_radius_doubling(closed_form_shell(a), 1.0)
    assert report.status is DoublingStatus.DIVERGENT
    assert report.doublings <= 20


@pytest.mark.parametrize("a", [-1.2, -2.0, -5.0])
def test_doubling_detector_converges_with_tail_estimate(a):
    report = detect_by_radius_doubling(closed_form_shell(a), 1.0)
    assert report.status is DoublingStatus.CONVERGED
    exact = power_integral(a, 1.0, math.inf).value
    assert report.estimate == pytest.approx(exact, rel=1e-6)


def test_doubling_detector_growth_rates():
    # Estimates grow like R^(a+1) (log R at a = -1): ratios match 2^(a+1).
    for a in (-0.5, 0.5):
        report = detect_by_radius_doubling(closed_form_shell(a), 1.0)
        assert report.last_ratio == pytest.approx(2.0 ** (a + 1), rel=1e-9)
    report = detect_by_radius_doubling(closed_form_shell(-1.0), 1.0)
    assert report.last_ratio == pytest.approx(1.0, rel=1e-12)


# -- Monte Carlo ------------------------------------------------------------


def test_monte_carlo_matches_closed_form_annulus():
    spec = KernelSpec(KernelFamily.CAUCHY, 2)
    domain = RadialDomain(DomainKind.ANNULUS, 2, r_in=1.0, r_out=10.0)
    closed = closed_form_lp_integral(spec, 3, LEBESGUE, domain).value
    assert closed == pytest.approx((2 * math.pi) ** -2 * (1 - 10.0**-1), rel=1e-13)
    mc = numeric_lp_integral(spec, 3, LEBESGUE, domain, budget=400_000)
    assert abs(mc.value - closed) <= 3 * mc.std_error


def test_monte_carlo_power_model_interval():
    spec = KernelSpec(KernelFamily.POWER_MODEL, 1, alpha=Fraction(1, 2))
    domain = punctured_interval(0.25)
    closed = closed_form_lp_integral(spec, 1, LEBESGUE, domain).value
    assert closed == pytest.approx(2.0, rel=1e-14)  # 2/(1-1/2) (1 - 0.25^(1/2))
    mc = numeric_lp_integral(spec, 1, LEBESGUE, domain, budget=200_000)
    assert abs(mc.value - closed) <= max(3 * mc.std_error, 1e-3)


def test_monte_carlo_vanishing_domain():
    spec = KernelSpec(KernelFamily.CAUCHY, 2)
    for width in (1e-3, 1e-6):
        domain = RadialDomain(DomainKind.ANNULUS, 2, r_in=1.0, r_out=1.0 + width)
        mc = numeric_lp_integral(spec, 2, LEBESGUE, domain, budget=10_000)
        assert mc.value == pytest.approx(0.0, abs=width * 10)


def test_monte_carlo_deterministic_and_thread_stable():
    spec = KernelSpec(KernelFamily.LAPLACE_ITERATE, 3)
    domain = RadialDomain(DomainKind.PUNCTURED_BALL, 3, r_in=0.5, r_out=2.0)
    a = numeric_lp_integral(spec, 2, LEBESGUE, domain, budget=600_000, max_workers=1)
    b = numeric_lp_integral(spec, 2, LEBESGUE, domain, budget=600_000, max_workers=4)
    assert a.value == b.value and a.std_error == b.std_error
    c = numeric_lp_integral(spec, 2, LEBESGUE, domain, budget=600_000, seed=1)
    assert c.value != a.value


def test_monte_carlo_requires_truncation_on_exterior():
    spec = KernelSpec(KernelFamily.CAUCHY, 2)
    exterior = RadialDomain(DomainKind.EXTERIOR, 2, r_in=1.0)
    with pytest.raises(ValueError):
        numeric_lp_integral(spec, 3, LEBESGUE, exterior, budget=1000)
    truncated = RadialDomain(DomainKind.EXTERIOR, 2, r_in=1.0, truncation_radius=4.0)
    closed = closed_form_lp_integral(spec, 3, LEBESGUE, RadialDomain(DomainKind.ANNULUS, 2, r_in=1.0, r_out=4.0)).value
    mc = numeric_lp_integral(spec, 3, LEBESGUE, truncated, budget=200_000)
    assert abs(mc.value - closed) <= 3 * mc.std_error


def test_oracle_equivalence_quick_sweep():
    # Ten random bounded-domain integrals; the full 100-case sweep runs in
    # the acceptance suite.
    rng = np.random.default_rng(31)
    for _ in range(10):
        spec = random_kernel_spec(rng)
        r_in = rng.uniform(0.5, 1.5)
        r_out = r_in * rng.uniform(1.3, 2.0)
        p = rng.uniform(1.0, 2.0)
        measure = WeightedMeasure(Fraction(int(rng.integers(0, 3))))
        kind = DomainKind.INTERVAL if spec.n == 1 else DomainKind.ANNULUS
        domain = RadialDomain(kind, spec.n, r_in=r_in, r_out=r_out)
        closed = closed_form_lp_integral(spec, p, measure, domain).value
        mc = numeric_lp_integral(spec, p, measure, domain, budget=200_000)
        assert abs(mc.value - closed) <= max(0.01 * closed, 3 * mc.std_error)
