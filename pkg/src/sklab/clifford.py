"""Dense universal Clifford algebra Cl_n with negative-definite generators.

Multivectors over R^n are stored as flat coefficient arrays of length 2**n,
one coefficient per basis blade. Blade index = subset of {1..n} encoded as a
bit mask (bit j-1 set means e_j participates), in ascending mask order, so
index 0 is the scalar part and index 1<<(j-1) is e_j.

Signature: e_j**2 = -1 for every generator. This makes x * conj(x) equal the
scalar ||x||**2 for pure vectors and makes the Dirac factorization positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_DIMENSION = 8


class DimensionMismatchError(ValueError):
    """Operands live in Clifford algebras of different dimension."""


def _product_sign(a: int, b: int) -> int:
    # Reordering sign: transpositions needed to interleave e_a past e_b,
    # then one factor of -1 per repeated generator (e_j^2 = -1).
    s = 0
    t = a >> 1
    while t:
        s += (t & b).bit_count()
        t >>= 1
    s += (a & b).bit_count()
    return -1 if s & 1 else 1


@lru_cache(maxsize=None)
def blade_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Blade product tables for Cl_n.

    Returns (target, sign), both of shape (2**n, 2**n):
    e_A * e_B = sign[A, B] * e_{target[A, B]}, target[A, B] = A ^ B.
    """
    if not 1 <= n <= MAX_DIMENSION:
        raise ValueError(f"dimension must be in 1..{MAX_DIMENSION}, got {n}")
    size = 1 << n
    masks = np.arange(size)
    target = (masks[:, None] ^ masks[None, :]).astype(np.intp)
    sign = np.empty((size, size), dtype=np.int8)
    for a in range(size):
        for b in range(size):
            sign[a, b] = _product_sign(a, b)
    target.setflags(write=False)
    sign.setflags(write=False)
    return target, sign


@lru_cache(maxsize=None)
def product_tensor(n: int) -> np.ndarray:
    """Dense structure tensor M with (x y)_c = sum_ab M[a, b, c] x_a y_b."""
    size = 1 << n
    target, sign = blade_tables(n)
    tensor = np.zeros((size, size, size))
    for a in range(size):
        for b in range(size):
            tensor[a, b, target[a, b]] = sign[a, b]
    tensor.setflags(write=False)
    return tensor


@lru_cache(maxsize=None)
def conjugation_signs(n: int) -> np.ndarray:
    """Per-blade signs of Clifford conjugation: grade r maps to (-1)^(r(r+1)/2)."""
    grades = np.array([m.bit_count() for m in range(1 << n)])
    signs = np.where(grades * (grades + 1) // 2 % 2, -1.0, 1.0)
    signs.setflags(write=False)
    return signs


@dataclass(frozen=True)
class Multivector:
    """Immutable element of Cl_n: dimension n and 2**n blade coefficients."""

    dimension: int
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 1 <= self.dimension <= MAX_DIMENSION:
            raise ValueError(
                f"dimension must be in 1..{MAX_DIMENSION}, got {self.dimension}"
            )
        coeffs = np.asarray(self.coefficients, dtype=float)
        if coeffs.shape != (1 << self.dimension,):
            raise ValueError(
                f"expected {1 << self.dimension} coefficients, got shape {coeffs.shape}"
            )
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(n: int) -> "Multivector":
        return Multivector(n, np.zeros(1 << n))

    @staticmethod
    def scalar(n: int, value: float) -> "Multivector":
        coeffs = np.zeros(1 << n)
        coeffs[0] = value
        return Multivector(n, coeffs)

    @staticmethod
    def basis_vector(n: int, j: int) -> "Multivector":
        """e_j for 1 <= j <= n."""
        if not 1 <= j <= n:
            raise ValueError(f"generator index must be in 1..{n}, got {j}")
        coeffs = np.zeros(1 << n)
        coeffs[1 << (j - 1)] = 1.0
        return Multivector(n, coeffs)

    # -- structure ------------------------------------------------------

    @property
    def scalar_part(self) -> float:
        return float(self.coefficients[0])

    @property
    def vector_part(self) -> np.ndarray:
        """Coefficients on e_1..e_n as a length-n array."""
        idx = 1 << np.arange(self.dimension)
        return self.coefficients[idx].copy()

    def grades(self) -> set[int]:
        """Grades carrying a nonzero coefficient."""
        masks = np.nonzero(self.coefficients)[0]
        return {int(m).bit_count() for m in masks}

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def is_scalar(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coefficients[1:]) <= tol))

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other: "Multivector") -> "Multivector":
        self._check_dimension(other)
        return Multivector(self.dimension, self.coefficients + other.coefficients)

    def __sub__(self, other: "Multivector") -> "Multivector":
        self._check_dimension(other)
        return Multivector(self.dimension, self.coefficients - other.coefficients)

    def __neg__(self) -> "Multivector":
        return Multivector(self.dimension, -self.coefficients)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        return Multivector(self.dimension, self.coefficients * float(other))

    def __rmul__(self, other):
        # Scalars commute with everything; Multivector * Multivector goes
        # through __mul__.
        return Multivector(self.dimension, self.coefficients * float(other))

    def __truediv__(self, scalar) -> "Multivector":
        return Multivector(self.dimension, self.coefficients / float(scalar))

    def _check_dimension(self, other: "Multivector") -> None:
        if self.dimension != other.dimension:
            raise DimensionMismatchError(
                f"dimension mismatch: {self.dimension} vs {other.dimension}"
            )

    def __repr__(self):
        terms = []
        for mask in np.nonzero(self.coefficients)[0]:
            c = self.coefficients[mask]
            if mask == 0:
                terms.append(f"{c:g}")
            else:
                name = "e" + "".join(
                    str(j + 1) for j in range(self.dimension) if mask >> j & 1
                )
                terms.append(f"{c:g}*{name}")
        body = " + ".join(terms) if terms else "0"
        return f"Multivector(n={self.dimension}: {body})"


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    """Geometric (Clifford) product under the signature e_j**2 = -1."""
    a._check_dimension(b)
    target, sign = blade_tables(a.dimension)
    terms = np.outer(a.coefficients, b.coefficients) * sign
    out = np.zeros(1 << a.dimension)
    np.add.at(out, target.ravel(), terms.ravel())
    return Multivector(a.dimension, out)


def conjugate(a: Multivector) -> Multivector:
    """Clifford conjugation: grade-r blades pick up (-1)^(r(r+1)/2).

    An involution; negates pure vectors, so x * conjugate(x) = ||x||^2.
    """
    return Multivector(a.dimension, a.coefficients * conjugation_signs(a.dimension))


def vector_from_point(x) -> Multivector:
    """Embed a point of R^n as the grade-1 multivector sum x_j e_j."""
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    coeffs = np.zeros(1 << n)
    coeffs[1 << np.arange(n)] = x
    return Multivector(n, coeffs)


def batch_geometric_product(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Geometric product over trailing coefficient axes of shape (..., 2**n)."""
    tensor = product_tensor(n)
    return np.einsum("...a,...b,abc->...c", a, b, tensor)


def batch_norm(coeffs: np.ndarray) -> np.ndarray:
    """Multivector norms over a trailing coefficient axis."""
    return np.sqrt(np.sum(np.square(coeffs), axis=-1))


def surface_area(n: int) -> float:
    """Surface area of the unit sphere S^(n-1) in R^n: 2 pi^(n/2) / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
