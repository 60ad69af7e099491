import math
from fractions import Fraction

import numpy as np
import pytest

from sklab import (
    KernelFamily,
    KernelSpec,
    SingularityClass,
    SingularPointError,
    classify,
    evaluate,
    homogeneity_check,
    homogeneity_degree,
)
from sklab.kernels import kernel_norms, kernel_values

from conftest import random_kernel_spec, random_vector


def test_cauchy_value_at_unit_point():
    spec = KernelSpec(KernelFamily.CAUCHY, 2)
    k = evaluate(spec, (1.0, 0.0))
    # conj(e1) / (2 pi) = -e1 / (2 pi)
    assert k.coefficients[1] == pytest.approx(-1.0 / (2 * math.pi), rel=1e-15)
    assert k.norm() == pytest.approx(1.0 / (2 * math.pi), rel=1e-15)
    assert k.norm() == pytest.approx(0.15915494309189535, rel=1e-12)


def test_power_model_value():
    spec = KernelSpec(KernelFamily.POWER_MODEL, 1, alpha=Fraction(1, 2))
    assert evaluate(spec, (4.0,)).scalar_part == pytest.approx(0.5, rel=1e-15)


def test_laplace_iterate_value():
    spec = KernelSpec(KernelFamily.LAPLACE_ITERATE, 2)
    k = evaluate(spec, (1.0, 0.0))
    assert k.is_scalar()
    assert k.scalar_part == pytest.approx(-1.0 / (2 * math.pi), rel=1e-15)


def test_homogeneity_degrees_exact():
    assert homogeneity_degree(KernelSpec(KernelFamily.CAUCHY, 3)) == Fraction(2)
    assert homogeneity_degree(KernelSpec(KernelFamily.LAPLACE_ITERATE, 2)) == Fraction(4)
    assert homogeneity_degree(KernelSpec(KernelFamily.DIRAC_ITERATE, 5, l=2)) == Fraction(4)
    assert homogeneity_degree(KernelSpec(KernelFamily.DIRAC_ITERATE, 5, l=3)) == Fraction(2)
    assert homogeneity_degree(
        KernelSpec(KernelFamily.POWER_MODEL, 1, alpha=Fraction(3, 4))
    ) == Fraction(3, 4)


def test_all_degrees_positive():
    rng = np.random.default_rng(11)
    for _ in range(100):
        assert homogeneity_degree(random_kernel_spec(rng)) > 0


@pytest.mark.parametrize(
    "alpha,expected",
    [
        (Fraction(1, 2), SingularityClass.WEAK),
        (Fraction(1), SingularityClass.SINGULAR),
        (Fraction(3, 2), SingularityClass.HYPER),
    ],
)
def test_power_model_classification(alpha, expected):
    assert classify(KernelSpec(KernelFamily.POWER_MODEL, 1, alpha=alpha)) is expected


def test_weighted_classification_brute_force_rule():
    # h = 4 for the Laplacian iterate at n = 2; compare h - w with n.
    spec = KernelSpec(KernelFamily.LAPLACE_ITERATE, 2)
    assert classify(spec, 0) is SingularityClass.HYPER
    assert classify(spec, 2) is SingularityClass.SINGULAR
    assert classify(spec, 4) is SingularityClass.WEAK
    assert classify(spec, 6) is SingularityClass.WEAK


def test_classification_invariant_under_theta():
    for theta in (0.1, 1.0, 250.0):
        spec = KernelSpec(KernelFamily.DIRAC_ITERATE, 4, l=2, theta=theta)
        assert classify(spec, 1) is classify(KernelSpec(KernelFamily.DIRAC_ITERATE, 4, l=2), 1)


def test_homogeneity_identity_1000_random_checks():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        spec = random_kernel_spec(rng)
        x = random_vector(rng, spec.n)
        lam = rng.uniform(0.3, 3.0)
        residual = homogeneity_check(spec, x, lam)
        # Relative to the larger of the compared values: K(lam x) itself
        # grows like lam^-h, so normalizing by K(x) alone would compare
        # rounding noise against the wrong magnitude.
        scale = max(evaluate(spec, x).norm(), evaluate(spec, lam * np.asarray(x)).norm())
        assert residual <= 1e-12 * scale


def test_homogeneity_check_identity_scaling():
    spec = KernelSpec(KernelFamily.CAUCHY, 3)
    assert homogeneity_check(spec, (0.3, -1.2, 0.7), 1.0) == 0.0


def test_grade_structure():
    # Odd iterates are vector valued, even iterates and the Laplacian
    # iterate are scalar valued: all other blades exactly zero.
    rng = np.random.default_rng(12)
    x = random_vector(rng, 5)
    odd = evaluate(KernelSpec(KernelFamily.DIRAC_ITERATE, 5, l=3), x)
    assert odd.grades() <= {1}
    even = evaluate(KernelSpec(KernelFamily.DIRAC_ITERATE, 5, l=2), x)
    assert even.grades() <= {0}
    lap = evaluate(KernelSpec(KernelFamily.LAPLACE_ITERATE, 5), x)
    assert lap.grades() <= {0}
    cauchy = evaluate(KernelSpec(KernelFamily.CAUCHY, 5), x)
    assert cauchy.grades() <= {1}


def test_first_dirac_iterate_matches_cauchy_in_norm():
    rng = np.random.default_rng(13)
    psi1 = KernelSpec(KernelFamily.DIRAC_ITERATE, 4, l=1)
    cauchy = KernelSpec(KernelFamily.CAUCHY, 4)
    for _ in range(25):
        x = random_vector(rng, 4)
        a, b = evaluate(psi1, x).norm(), evaluate(cauchy, x).norm()
        assert a == pytest.approx(b, rel=1e-12)


def test_singular_point_rejected():
    with pytest.raises(SingularPointError):
        evaluate(KernelSpec(KernelFamily.CAUCHY, 2), (0.0, 0.0))
    with pytest.raises(SingularPointError):
        kernel_values(KernelSpec(KernelFamily.CAUCHY, 2), np.zeros((1, 2)))


def test_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec(KernelFamily.DIRAC_ITERATE, 3, l=3)  # l < n required
    with pytest.raises(ValueError):
        KernelSpec(KernelFamily.DIRAC_ITERATE, 3)  # l required
    with pytest.raises(ValueError):
        KernelSpec(KernelFamily.POWER_MODEL, 2, alpha=1)  # one-dimensional only
    with pytest.raises(ValueError):
        KernelSpec(KernelFamily.POWER_MODEL, 1, alpha=-1)
    with pytest.raises(ValueError):
        KernelSpec(KernelFamily.CAUCHY, 1)  # degree n - 1 must be positive
    with pytest.raises(ValueError):
        KernelSpec(KernelFamily.CAUCHY, 2, alpha=1)
    with pytest.raises(ValueError):
        KernelSpec(KernelFamily.CAUCHY, 2, theta=0.0)


def test_wrong_point_size_rejected():
    with pytest.raises(ValueError):
        evaluate(KernelSpec(KernelFamily.CAUCHY, 3), (1.0, 2.0))


def test_batched_values_match_scalar_evaluation():
    rng = np.random.default_rng(14)
    for _ in range(20):
        spec = random_kernel_spec(rng)
        points = np.array([random_vector(rng, spec.n) for _ in range(8)])
        table = kernel_values(spec, points)
        norms = kernel_norms(spec, points)
        for i, x in enumerate(points):
            mv = evaluate(spec, x)
            assert np.allclose(table[i], mv.coefficients, rtol=1e-13, atol=1e-300)
            assert norms[i] == pytest.approx(mv.norm(), rel=1e-13)
