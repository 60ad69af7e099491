import numpy as np
import pytest

from sklab import GridFunction, KernelFamily, KernelSpec, Multivector


@pytest.fixture
def rng():
    return np.random.default_rng(0x5EED)


def random_multivector(rng, n):
    return Multivector(n, rng.standard_normal(1 << n))


def random_vector(rng, n, scale=2.0):
    # Bounded away from 0 so kernel evaluations stay well-conditioned.
    x = rng.uniform(-scale, scale, size=n)
    while np.linalg.norm(x) < 0.1:
        x = rng.uniform(-scale, scale, size=n)
    return x


def random_kernel_spec(rng, max_n=5):
    families = (
        KernelFamily.CAUCHY,
        KernelFamily.LAPLACE_ITERATE,
        KernelFamily.DIRAC_ITERATE,
        KernelFamily.POWER_MODEL,
    )
    family = families[rng.integers(len(families))]
    if family == KernelFamily.POWER_MODEL:
        return KernelSpec(family, 1, alpha=rng.integers(1, 20) / 10)
    if family == KernelFamily.CAUCHY:
        return KernelSpec(family, int(rng.integers(2, max_n + 1)))
    if family == KernelFamily.LAPLACE_ITERATE:
        return KernelSpec(family, int(rng.integers(1, max_n + 1)))
    n = int(rng.integers(2, max_n + 1))
    return KernelSpec(family, n, l=int(rng.integers(1, n)))


def random_pure_grade_grid(rng, n, shape, grade):
    """Grid function whose values are pure grade 0 or pure grade 1."""
    size = 1 << n
    values = np.zeros((*shape, size))
    if grade == 0:
        values[..., 0] = rng.standard_normal(shape)
    else:
        for j in range(n):
            values[..., 1 << j] = rng.standard_normal(shape)
    return GridFunction(n=n, lo=(-1.0,) * n, hi=(1.0,) * n, shape=shape, values=values)
