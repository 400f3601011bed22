"""Quadratic spaces, the sphere and null-cone quadrics, and complex rotations.

The ambient space is C^(d+1) equipped with a diagonal bilinear form
``pair(a, b) = sum_j signs_j a_j b_j``.  All-plus signs give the complex
sphere / null cone pair; signature (+, -, ..., -) gives the hyperboloid
setting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

DEFAULT_TOL = 1e-12


def as_coords(x) -> np.ndarray:
    """Coerce a point-like object (wrapper class or array) to a complex vector."""
    if hasattr(x, "coords"):
        x = x.coords
    return np.asarray(x, dtype=complex)


@dataclass(frozen=True)
class QuadraticSpace:
    """Ambient C^(d+1) with a diagonal +-1 bilinear form.

    ``dim`` is the dimension d of the quadric surfaces (the ambient space has
    d+1 coordinates).
    """

    dim: int
    signs: tuple

    def __post_init__(self):
        if self.dim < 2:
            raise ValidationError(f"quadric dimension must be >= 2, got {self.dim}")
        signs = tuple(int(s) for s in self.signs)
        if len(signs) != self.dim + 1:
            raise ValidationError(
                f"signature length {len(signs)} does not match ambient dimension {self.dim + 1}"
            )
        if any(s not in (-1, 1) for s in signs):
            raise ValidationError(f"signature entries must be +-1, got {signs}")
        object.__setattr__(self, "signs", signs)

    @property
    def ambient_dim(self) -> int:
        return self.dim + 1

    @property
    def sign_vector(self) -> np.ndarray:
        return np.array(self.signs, dtype=float)

    @property
    def is_euclidean(self) -> bool:
        return all(s == 1 for s in self.signs)


def euclidean_space(dim: int) -> QuadraticSpace:
    return QuadraticSpace(dim, (1,) * (dim + 1))


def lorentzian_space(dim: int) -> QuadraticSpace:
    return QuadraticSpace(dim, (1,) + (-1,) * dim)


def _check_length(space: QuadraticSpace, a: np.ndarray, name: str):
    if a.shape[-1] != space.ambient_dim:
        raise ValueError(
            f"{name} has length {a.shape[-1]}, expected {space.ambient_dim}"
        )


def pair(space: QuadraticSpace, a, b) -> complex:
    """Bilinear pairing sum_j signs_j a_j b_j (no conjugation)."""
    a = as_coords(a)
    b = as_coords(b)
    _check_length(space, a, "first argument")
    _check_length(space, b, "second argument")
    return complex(np.sum(space.sign_vector * a * b, axis=-1))


def pair_many(space: QuadraticSpace, points: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Pairing of each row of ``points`` with the single vector ``v``."""
    return (points * space.sign_vector) @ np.asarray(v, dtype=complex)


def delta(space: QuadraticSpace, a) -> complex:
    """The quadratic form pair(a, a)."""
    a = as_coords(a)
    _check_length(space, a, "argument")
    return complex(np.sum(space.sign_vector * a * a, axis=-1))


def _require_finite(coords: np.ndarray, what: str):
    if not np.all(np.isfinite(coords.view(float))):
        raise ValidationError(f"{what} has non-finite coordinates")


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """A point z with pair(z, z) = 1."""

    space: QuadraticSpace
    coords: np.ndarray

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.coords.imag) == 0))


@dataclass(frozen=True, eq=False)
class ConePoint:
    """A nonzero point zeta with pair(zeta, zeta) = 0."""

    space: QuadraticSpace
    coords: np.ndarray


@dataclass(frozen=True, eq=False)
class HyperboloidPoint:
    """A real point x on the upper sheet: pair(x, x) = 1, x_1 > 0 (Lorentzian form)."""

    space: QuadraticSpace
    coords: np.ndarray


def sphere_point(space: QuadraticSpace, coords, tol: float = DEFAULT_TOL) -> SpherePoint:
    c = as_coords(coords)
    _check_length(space, c, "sphere point")
    _require_finite(c, "sphere point")
    d = delta(space, c)
    if abs(d - 1) > tol * max(1.0, abs(d)):
        raise ValidationError(f"not on the unit quadric: pair(z, z) = {d}")
    return SpherePoint(space, c)


def cone_point(space: QuadraticSpace, coords, tol: float = DEFAULT_TOL) -> ConePoint:
    c = as_coords(coords)
    _check_length(space, c, "cone point")
    _require_finite(c, "cone point")
    scale = float(np.max(np.abs(c)))
    if scale == 0.0:
        raise ValidationError("cone points must be nonzero")
    d = delta(space, c)
    if abs(d) > tol * max(1.0, scale**2):
        raise ValidationError(f"not on the null cone: pair(zeta, zeta) = {d}")
    return ConePoint(space, c)


def hyperboloid_point(space: QuadraticSpace, coords, tol: float = DEFAULT_TOL) -> HyperboloidPoint:
    c = as_coords(coords)
    _check_length(space, c, "hyperboloid point")
    _require_finite(c, "hyperboloid point")
    if np.any(np.abs(c.imag) > 0):
        raise ValidationError("hyperboloid points must have real coordinates")
    d = delta(space, c)
    if abs(d - 1) > tol * max(1.0, abs(d)):
        raise ValidationError(f"not on the unit hyperboloid: form value {d}")
    if c[0].real <= 0:
        raise ValidationError("hyperboloid points must lie on the upper sheet (x_1 > 0)")
    return HyperboloidPoint(space, c)


def cone_point_from_frame(space: QuadraticSpace, a, b, scale: complex = 1.0) -> ConePoint:
    """Null vector scale * (a + i b) from a real pair orthonormal under the form.

    For the Euclidean form, pair(a, a) = pair(b, b) and pair(a, b) = 0 force
    pair(a + ib, a + ib) = 0 up to rounding, so no quadratic constraint needs
    solving.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return cone_point(space, scale * (a + 1j * b))


@dataclass(frozen=True, eq=False)
class ComplexRotation:
    """A matrix g with g^T Q g = Q, Q = diag(signs): the complex orthogonal group."""

    space: QuadraticSpace
    matrix: np.ndarray
    det_sign: int = field(default=1)


def complex_rotation(space: QuadraticSpace, matrix, tol: float = 1e-12) -> ComplexRotation:
    g = np.asarray(matrix, dtype=complex)
    n = space.ambient_dim
    if g.shape != (n, n):
        raise ValidationError(f"rotation matrix must be {n}x{n}, got {g.shape}")
    q = np.diag(space.sign_vector)
    residual = np.max(np.abs(g.T @ q @ g - q))
    if residual > tol:
        raise ValidationError(
            f"matrix does not preserve the form: max entrywise residual {residual:.3e}"
        )
    det = np.linalg.det(g)
    if abs(det - 1) <= 1e-8:
        sign = 1
    elif abs(det + 1) <= 1e-8:
        sign = -1
    else:
        raise ValidationError(f"orthogonal matrix with det {det}, expected +-1")
    return ComplexRotation(space, g, sign)


def in_xi_s(space: QuadraticSpace, zeta, tol: float = 1e-10) -> bool:
    """Membership of a cone point in the dual domain of the real sphere.

    True iff delta(Re zeta) < 1 (strict).  On the cone the real and imaginary
    parts automatically satisfy delta(xi) = delta(eta) and pair(xi, eta) = 0;
    both are asserted as a sanity check.
    """
    if not space.is_euclidean:
        raise ValueError("the dual sphere domain is defined for the Euclidean form")
    z = as_coords(zeta)
    _check_length(space, z, "cone point")
    xi = z.real
    eta = z.imag
    dxi = np.sum(xi * xi)
    deta = np.sum(eta * eta)
    cross = np.sum(xi * eta)
    if abs(dxi - deta) > tol * (1.0 + abs(dxi)) or abs(cross) > tol * (
        1.0 + np.linalg.norm(xi) * np.linalg.norm(eta)
    ):
        raise ValidationError(
            f"point is not on the null cone: delta(xi)={dxi}, delta(eta)={deta}, xi.eta={cross}"
        )
    return bool(dxi < 1.0)


# ---------------------------------------------------------------------------
# random generators (shared by tests and the experiment CLI)


def random_real_sphere_point(rng, dim: int = 2) -> np.ndarray:
    v = rng.normal(size=dim + 1)
    return v / np.linalg.norm(v)


def random_orthonormal_pair(rng, dim: int = 2):
    q, _ = np.linalg.qr(rng.normal(size=(dim + 1, 2)))
    return q[:, 0], q[:, 1]


def random_null_vector(rng, dim: int = 2, scale: complex = 1.0) -> np.ndarray:
    """Random a + ib with a, b real orthonormal; exactly null for the Euclidean form."""
    a, b = random_orthonormal_pair(rng, dim)
    return scale * (a + 1j * b)


def random_cone_point(space: QuadraticSpace, rng, scale: float = 0.5) -> ConePoint:
    return cone_point(space, random_null_vector(rng, space.dim, scale))


def so_generator(rng, dim: int = 2, magnitude: float = 0.1, complex_part: bool = True) -> np.ndarray:
    """Random antisymmetric generator with entries of the given magnitude."""
    n = dim + 1
    a = rng.normal(size=(n, n))
    if complex_part:
        a = a + 1j * rng.normal(size=(n, n))
    a = a - a.T
    norm = np.linalg.norm(a)
    if norm > 0:
        a *= magnitude / norm
    return a


def rotation_from_generator(space: QuadraticSpace, generator) -> ComplexRotation:
    """exp of an antisymmetric generator; lands in the identity component."""
    from scipy.linalg import expm

    return complex_rotation(space, expm(np.asarray(generator, dtype=complex)))


def random_complex_rotation(space: QuadraticSpace, rng, magnitude: float = 0.1) -> ComplexRotation:
    return rotation_from_generator(space, so_generator(rng, space.dim, magnitude, True))


def random_real_rotation(space: QuadraticSpace, rng, magnitude: float = 0.8) -> ComplexRotation:
    return rotation_from_generator(space, so_generator(rng, space.dim, magnitude, False))
