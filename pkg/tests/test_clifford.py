import numpy as np
import pytest

from sklab import Multivector, conjugate, geometric_product, surface_area, vector_from_point
from sklab.clifford import DimensionMismatchError, batch_geometric_product, batch_norm

from conftest import random_multivector

TOL = 1e-12


def test_scalar_identity():
    one = Multivector.scalar(3, 1.0)
    rng = np.random.default_rng(1)
    b = random_multivector(rng, 3)
    assert np.allclose(geometric_product(one, b).coefficients, b.coefficients)


def test_generator_square_is_minus_one():
    e1 = Multivector.basis_vector(2, 1)
    out = geometric_product(e1, e1)
    assert out.scalar_part == -1.0
    assert out.is_scalar()


def test_generators_anticommute():
    e1 = Multivector.basis_vector(2, 1)
    e2 = Multivector.basis_vector(2, 2)
    e12 = geometric_product(e1, e2)
    e21 = geometric_product(e2, e1)
    assert e12.coefficients[0b11] == 1.0
    assert e21.coefficients[0b11] == -1.0
    assert np.allclose(e12.coefficients, -e21.coefficients)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_associativity(n):
    rng = np.random.default_rng(n)
    for _ in range(50):
        a, b, c = (random_multivector(rng, n) for _ in range(3))
        left = geometric_product(geometric_product(a, b), c)
        right = geometric_product(a, geometric_product(b, c))
        scale = max(left.norm(), 1.0)
        assert (left - right).norm() <= TOL * scale


def test_conjugation_is_involution_exact():
    rng = np.random.default_rng(2)
    for n in range(1, 6):
        a = random_multivector(rng, n)
        assert np.array_equal(conjugate(conjugate(a)).coefficients, a.coefficients)


def test_conjugation_fixes_scalars_negates_vectors():
    c = Multivector.scalar(3, 4.25)
    assert np.array_equal(conjugate(c).coefficients, c.coefficients)
    e1 = Multivector.basis_vector(3, 1)
    assert np.array_equal(conjugate(e1).coefficients, -e1.coefficients)


def test_conjugation_antiautomorphism_on_vectors():
    rng = np.random.default_rng(3)
    for n in (2, 3, 4, 5):
        x = vector_from_point(rng.standard_normal(n))
        y = vector_from_point(rng.standard_normal(n))
        lhs = conjugate(geometric_product(x, y))
        rhs = geometric_product(conjugate(y), conjugate(x))
        assert (lhs - rhs).norm() <= TOL * max(lhs.norm(), 1.0)


def test_vector_times_own_conjugate_is_squared_norm():
    # Hand expansion for x = 3 e1 + 4 e2:
    # x conj(x) = -(3e1 + 4e2)(3e1 + 4e2) = -(9 e1e1 + 16 e2e2) = 25.
    x = vector_from_point([3.0, 4.0])
    out = geometric_product(x, conjugate(x))
    assert out.is_scalar()
    assert out.scalar_part == pytest.approx(25.0, abs=TOL)

    rng = np.random.default_rng(4)
    for n in (2, 3, 4, 5):
        v = rng.standard_normal(n)
        x = vector_from_point(v)
        out = geometric_product(x, conjugate(x))
        assert out.is_scalar(tol=TOL * out.norm())
        assert out.scalar_part == pytest.approx(float(v @ v), rel=TOL)


def test_vector_from_point():
    assert vector_from_point((0.0, 0.0)).norm() == 0.0
    e1 = vector_from_point((1.0, 0.0, 0.0))
    assert np.array_equal(e1.coefficients, Multivector.basis_vector(3, 1).coefficients)
    rng = np.random.default_rng(5)
    x = rng.standard_normal(4)
    assert vector_from_point(x).norm() == pytest.approx(float(np.linalg.norm(x)), rel=TOL)


def test_dimension_mismatch_rejected():
    a = Multivector.scalar(2, 1.0)
    b = Multivector.scalar(3, 1.0)
    with pytest.raises(DimensionMismatchError):
        geometric_product(a, b)


def test_coefficient_length_enforced():
    with pytest.raises(ValueError):
        Multivector(2, np.zeros(3))


def test_batch_product_matches_scalar_path():
    rng = np.random.default_rng(6)
    n = 3
    a = rng.standard_normal((4, 1 << n))
    b = rng.standard_normal((4, 1 << n))
    batched = batch_geometric_product(a, b, n)
    for i in range(4):
        single = geometric_product(Multivector(n, a[i]), Multivector(n, b[i]))
        assert np.allclose(batched[i], single.coefficients, atol=1e-14)
    assert np.allclose(batch_norm(a), [Multivector(n, row).norm() for row in a])


def test_surface_area_values():
    assert surface_area(1) == pytest.approx(2.0, rel=TOL)
    assert surface_area(2) == pytest.approx(2 * np.pi, rel=TOL)
    assert surface_area(3) == pytest.approx(4 * np.pi, rel=TOL)
