"""Oracle test functions with known harmonic-degree structure.

Null-vector harmonics (a.z)^m with pair(a, a) = 0 are exactly harmonic
polynomials of degree m, and serve as the eigenspace generators throughout;
rational Cauchy-type kernels and geodesic bump functions cover the analytic
and hyperbolic cases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, ValidationError
from .geometry import (
    QuadraticSpace,
    as_coords,
    delta,
    euclidean_space,
    lorentzian_space,
    pair_many,
    random_null_vector,
)

POLE_TOL = 1e-14


class TestFunction:
    """Callable on arrays of ambient points, shape (..., d+1) -> (...)."""

    name = "testfunction"
    degree = None    # exact harmonic degree when defined

    def __call__(self, z):
        raise NotImplementedError


@dataclass(eq=False)
class Constant(TestFunction):
    value: complex = 1.0

    def __post_init__(self):
        self.name = f"const:{self.value}"
        self.degree = 0

    def __call__(self, z):
        z = as_coords(z)
        return np.full(z.shape[:-1], complex(self.value))


@dataclass(eq=False)
class NullHarmonic(TestFunction):
    """(a.z)^m for a null vector a: a harmonic polynomial of exact degree m."""

    a: np.ndarray
    m: int
    space: QuadraticSpace = None

    def __post_init__(self):
        self.a = as_coords(self.a)
        self.space = self.space or euclidean_space(len(self.a) - 1)
        if self.m < 0:
            raise ValidationError("degree must be >= 0")
        d = delta(self.space, self.a)
        scale = float(np.max(np.abs(self.a))) ** 2
        if abs(d) > 1e-12 * max(1.0, scale):
            raise ValidationError(f"direction vector is not null: pair(a, a) = {d}")
        self.degree = self.m
        self.name = f"null_harmonic(m={self.m})"

    def __call__(self, z):
        z = as_coords(z)
        return pair_many(self.space, z, self.a) ** self.m


@dataclass(eq=False)
class RationalKernel(TestFunction):
    """1/(1 - beta.z), holomorphic near cycles where |beta.z| stays below 1."""

    beta: np.ndarray
    space: QuadraticSpace = None

    def __post_init__(self):
        self.beta = as_coords(self.beta)
        self.space = self.space or euclidean_space(len(self.beta) - 1)
        self.name = "rational"

    def __call__(self, z):
        z = as_coords(z)
        den = 1.0 - pair_many(self.space, z, self.beta)
        bad = np.abs(den) < POLE_TOL
        if np.any(bad):
            raise NumericalError("rational test function evaluated at a pole")
        return 1.0 / den


@dataclass(eq=False)
class Bump(TestFunction):
    """Smooth bump on the hyperboloid: exp(-q/(1-q)) of q = (dist/radius)^2,
    identically zero outside the geodesic ball."""

    center: np.ndarray
    radius: float
    space: QuadraticSpace = None

    def __post_init__(self):
        self.center = np.asarray(as_coords(self.center).real, dtype=float)
        self.space = self.space or lorentzian_space(len(self.center) - 1)
        if self.radius <= 0:
            raise ValidationError("bump radius must be positive")
        d = delta(self.space, self.center)
        if abs(d - 1) > 1e-10 or self.center[0] <= 0:
            raise ValidationError("bump center must lie on the upper hyperboloid sheet")
        self.name = f"bump(r={self.radius})"

    @property
    def support_radius_from_apex(self) -> float:
        """Geodesic radius around (1, 0, ..., 0) covering the support."""
        return float(np.arccosh(max(1.0, self.center[0]))) + self.radius

    def __call__(self, z):
        z = as_coords(z)
        b = np.real(pair_many(self.space, z, self.center))
        b = np.maximum(b, 1.0)
        q = (np.arccosh(b) / self.radius) ** 2
        out = np.zeros(z.shape[:-1], dtype=complex)
        inside = q < 1.0
        qi = q[inside]
        out[inside] = np.exp(-qi / (1.0 - qi))
        return out


@dataclass(eq=False)
class HarmonicCombo(TestFunction):
    """Linear combination of null harmonics; band-limited by construction."""

    terms: list = field(default_factory=list)   # [(coefficient, NullHarmonic), ...]

    def __post_init__(self):
        if not self.terms:
            raise ValidationError("combination needs at least one term")
        self.degree = max(h.m for _, h in self.terms)
        self.name = f"combo(max_degree={self.degree})"

    def __call__(self, z):
        z = as_coords(z)
        out = np.zeros(z.shape[:-1], dtype=complex)
        for c, h in self.terms:
            out = out + c * h(z)
        return out


def evaluate(f, z) -> complex:
    """Value of a test function at a single ambient point."""
    z = as_coords(z)
    return complex(np.asarray(f(z[None, :]))[0])


def null_vector(space: QuadraticSpace, j: int, k: int) -> np.ndarray:
    """e_j + i e_k (1-based indices), exactly null for the Euclidean form."""
    if j == k:
        raise ValueError("null vector directions must differ")
    n = space.ambient_dim
    if not (1 <= j <= n and 1 <= k <= n):
        raise ValueError(f"directions must be in 1..{n}")
    v = np.zeros(n, dtype=complex)
    v[j - 1] = 1.0
    v[k - 1] += 1j
    return v


def random_null_harmonic(rng, m: int, dim: int = 2, phase: bool = True) -> NullHarmonic:
    a = random_null_vector(rng, dim)
    if phase:
        a = np.exp(2j * np.pi * rng.random()) * a
    return NullHarmonic(a, m)


def random_band_limited(rng, max_degree: int, dim: int = 2) -> HarmonicCombo:
    terms = []
    for m in range(max_degree + 1):
        c = rng.normal() + 1j * rng.normal()
        terms.append((c, random_null_harmonic(rng, m, dim)))
    return HarmonicCombo(terms)


def parse_test_function(text: str, space: QuadraticSpace = None) -> TestFunction:
    """Parse CLI test-function specs.

    Formats: "const:<value>", "null:j=1,k=2,m=3",
    "rational:j=1,k=2,scale=0.3", "bump:r=0.5[,boost=0.3,angle=0.0]".
    """
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    fields = {}
    if rest:
        for chunk in rest.split(","):
            if "=" in chunk:
                key, _, val = chunk.partition("=")
                fields[key.strip()] = val.strip()
            else:
                fields[""] = chunk.strip()
    try:
        if kind == "const":
            return Constant(complex(fields.get("", "1")))
        if kind == "null":
            sp = space or euclidean_space(2)
            a = null_vector(sp, int(fields.get("j", 1)), int(fields.get("k", 2)))
            return NullHarmonic(a, int(fields.get("m", 1)), sp)
        if kind == "rational":
            sp = space or euclidean_space(2)
            a = null_vector(sp, int(fields.get("j", 1)), int(fields.get("k", 2)))
            return RationalKernel(float(fields.get("scale", 0.3)) * a, sp)
        if kind == "bump":
            boost = float(fields.get("boost", 0.0))
            angle = float(fields.get("angle", 0.0))
            center = np.array(
                [np.cosh(boost), np.sinh(boost) * np.cos(angle), np.sinh(boost) * np.sin(angle)]
            )
            return Bump(center, float(fields.get("r", 0.5)))
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad test function spec {text!r}: {exc}") from exc
    raise ValueError(f"unknown test function kind {kind!r}")
