"""Parameterized compact cycles with quadrature and determinant-form pullbacks.

A cycle is a chart from a k-dimensional parameter box into C^(d+1) together
with product quadrature nodes.  The two holomorphic volume forms used by the
transforms pull back to determinant densities on the chart:

  omega (k = d):      d!  * det[z(t), dz/dt_1, ..., dz/dt_d]
  nu_z  (k = d - 1):  (d-1)! * det[z, zeta(t), dzeta/dt_1, ..., dzeta/dt_(d-1)]

both multiplied by the cycle orientation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import FeatureError, NumericalError, ValidationError
from .geometry import (
    ComplexRotation,
    QuadraticSpace,
    as_coords,
    delta,
    euclidean_space,
    pair_many,
)

MANIFOLD_TOL = 1e-10
WEIGHT_SUM_TOL = 1e-12
FD_STEP = 1e-6


@dataclass(frozen=True, eq=False)
class FormSpec:
    """Selects the holomorphic form to pull back: "omega" or "nu".

    The nu form needs a basepoint (the first bracket column).  By default the
    basepoint must lie on the unit quadric; ``off_manifold_ok`` admits nearby
    points, used when probing harmonicity of the dual transform off the sphere.
    """

    kind: str
    basepoint: Optional[np.ndarray] = None
    space: Optional[QuadraticSpace] = None
    off_manifold_ok: bool = False

    def __post_init__(self):
        if self.kind not in ("omega", "nu"):
            raise ValidationError(f"unknown form kind {self.kind!r}")
        if self.kind == "nu":
            if self.basepoint is None:
                raise ValidationError("nu form requires a basepoint")
            bp = as_coords(self.basepoint)
            object.__setattr__(self, "basepoint", bp)
            if not self.off_manifold_ok:
                sp = self.space or euclidean_space(len(bp) - 1)
                d = delta(sp, bp)
                if abs(d - 1) > 1e-8:
                    raise ValidationError(
                        f"nu basepoint must satisfy pair(z, z) = 1, got {d}"
                    )


def omega_form() -> FormSpec:
    return FormSpec("omega")


def nu_form(basepoint, space: Optional[QuadraticSpace] = None, off_manifold_ok: bool = False) -> FormSpec:
    return FormSpec("nu", basepoint, space, off_manifold_ok)


@dataclass(eq=False)
class Cycle:
    """A compact k-cycle with product quadrature.

    ``point_fn`` maps parameter arrays of shape (..., k) to points of shape
    (..., d+1); ``jac_fn``, when provided, returns analytic chart derivatives
    of shape (..., d+1, k).  Charts without derivatives fall back to central
    differences with step 1e-6.
    """

    space: QuadraticSpace
    k: int
    point_fn: Callable
    params: np.ndarray          # (N, k)
    weights: np.ndarray         # (N,) positive, summing to the box volume
    param_bounds: tuple         # ((lo, hi), ...) per parameter
    orientation: int = 1
    jac_fn: Optional[Callable] = None
    target: Optional[str] = None    # "sphere" | "cone_section" | "hyperboloid"
    basepoint: Optional[np.ndarray] = None   # for cone_section cycles

    def __post_init__(self):
        self.params = np.atleast_2d(np.asarray(self.params, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float)
        if self.orientation not in (1, -1):
            raise ValidationError("orientation must be +-1")
        if len(self.params) == 0:
            raise ValidationError("cycle has no quadrature nodes")
        if np.any(self.weights <= 0):
            raise ValidationError("quadrature weights must be positive")
        volume = 1.0
        for lo, hi in self.param_bounds:
            volume *= hi - lo
        total = math.fsum(self.weights)
        if abs(total - volume) > WEIGHT_SUM_TOL * max(1.0, volume):
            raise ValidationError(
                f"weights sum to {total}, expected box volume {volume}"
            )
        self.points = np.asarray(self.point_fn(self.params), dtype=complex)
        if self.jac_fn is not None:
            self.jacs = np.asarray(self.jac_fn(self.params), dtype=complex)
        else:
            self.jacs = _fd_jacobian(self.point_fn, self.params)
        self._validate_target()
        self._density_cache = {}

    @property
    def n_nodes(self) -> int:
        return len(self.params)

    def _validate_target(self):
        if self.target is None:
            return
        if self.target == "sphere":
            dev = np.abs(_delta_rows(self.space, self.points) - 1.0)
            worst = float(dev.max())
            if worst > MANIFOLD_TOL:
                raise ValidationError(
                    f"cycle node leaves the unit quadric by {worst:.3e}"
                )
        elif self.target == "cone_section":
            dev = np.abs(_delta_rows(self.space, self.points))
            worst = float(dev.max())
            if worst > MANIFOLD_TOL:
                raise ValidationError(f"cycle node off the null cone by {worst:.3e}")
            if self.basepoint is None:
                raise ValidationError("cone_section cycles need a basepoint")
            inc = np.abs(pair_many(self.space, self.points, self.basepoint) - 1.0)
            worst = float(inc.max())
            if worst > 1e-12:
                raise ValidationError(
                    f"cycle node violates the incidence pair(zeta, x) = 1 by {worst:.3e}"
                )
        elif self.target == "hyperboloid":
            if np.max(np.abs(self.points.imag)) > 0:
                raise ValidationError("hyperboloid cycle points must be real")
            dev = np.abs(_delta_rows(self.space, self.points) - 1.0)
            worst = float(dev.max())
            if worst > MANIFOLD_TOL:
                raise ValidationError(
                    f"cycle node leaves the hyperboloid by {worst:.3e}"
                )
        else:
            raise ValidationError(f"unknown target manifold {self.target!r}")


def _delta_rows(space: QuadraticSpace, points: np.ndarray) -> np.ndarray:
    return np.sum(points * points * space.sign_vector, axis=-1)


def _fd_jacobian(point_fn, params: np.ndarray) -> np.ndarray:
    n, k = params.shape
    cols = []
    for j in range(k):
        step = np.zeros(k)
        step[j] = FD_STEP
        cols.append(
            (np.asarray(point_fn(params + step), dtype=complex)
             - np.asarray(point_fn(params - step), dtype=complex)) / (2 * FD_STEP)
        )
    return np.stack(cols, axis=-1)


# ---------------------------------------------------------------------------
# factories


def standard_sphere_cycle(d: int, n_polar: int, n_azimuthal: int) -> Cycle:
    """The real unit sphere S(0) with Gauss-Legendre x trapezoid quadrature.

    The chart uses equal-area coordinates (u, phi) with u = cos(theta), so
    the quadrature weights carry the surface measure directly and sum to the
    parameter-box volume 4*pi exactly.  On this chart det[z, z_u, z_phi] = -1;
    the recorded orientation -1 realizes the positive (theta, phi) frame
    convention, making the omega density the constant +2 (= 2 sin(theta) per
    unit theta).
    """
    if d != 2:
        raise FeatureError(f"standard sphere cycles are implemented for d = 2, got d = {d}")
    if n_polar < 2 or n_azimuthal < 2:
        raise ValidationError("need at least 2 nodes per direction")
    space = euclidean_space(2)
    u, wu = np.polynomial.legendre.leggauss(n_polar)
    phi = 2.0 * np.pi * np.arange(n_azimuthal) / n_azimuthal
    wphi = 2.0 * np.pi / n_azimuthal
    uu, pp = np.meshgrid(u, phi, indexing="ij")
    params = np.column_stack([uu.ravel(), pp.ravel()])
    weights = np.outer(wu, np.full(n_azimuthal, wphi)).ravel()

    def point_fn(t):
        t = np.asarray(t, dtype=float)
        u_, phi_ = t[..., 0], t[..., 1]
        s = np.sqrt(np.clip(1.0 - u_ * u_, 0.0, None))
        return np.stack([u_, s * np.cos(phi_), s * np.sin(phi_)], axis=-1)

    def jac_fn(t):
        t = np.asarray(t, dtype=float)
        u_, phi_ = t[..., 0], t[..., 1]
        s = np.sqrt(np.clip(1.0 - u_ * u_, 0.0, None))
        ds = np.where(s > 0, -u_ / np.where(s > 0, s, 1.0), 0.0)
        zu = np.stack([np.ones_like(u_), ds * np.cos(phi_), ds * np.sin(phi_)], axis=-1)
        zphi = np.stack([np.zeros_like(u_), -s * np.sin(phi_), s * np.cos(phi_)], axis=-1)
        return np.stack([zu, zphi], axis=-1)

    return Cycle(
        space=space,
        k=2,
        point_fn=point_fn,
        jac_fn=jac_fn,
        params=params,
        weights=weights,
        param_bounds=((-1.0, 1.0), (0.0, 2.0 * np.pi)),
        orientation=-1,
        target="sphere",
    )


def orthonormal_tangent_frame(x: np.ndarray):
    """Right-handed orthonormal basis (e, f) of the plane orthogonal to a real
    unit 3-vector x, with det[x, e, f] = +1."""
    x = np.asarray(x, dtype=float)
    j = int(np.argmin(np.abs(x)))
    e = np.zeros(3)
    e[j] = 1.0
    e = e - np.dot(e, x) * x
    e = e / np.linalg.norm(e)
    f = np.cross(x, e)
    return e, f


def l_cycle(x, n_nodes: int = 64) -> Cycle:
    """The real-form circle of the cone section through a real sphere point x:
    zeta(s) = x + i (cos(s) e + sin(s) f) with (e, f) spanning the plane
    orthogonal to x and det[x, e, f] = +1.  Trapezoid quadrature in s.
    """
    xc = as_coords(x)
    if np.any(np.abs(xc.imag) > 0):
        raise ValueError("the dual cycle basepoint must be a real sphere point")
    x = xc.real
    if len(x) != 3:
        raise FeatureError("dual cycles are implemented for d = 2 (circles)")
    if abs(np.dot(x, x) - 1.0) > 1e-10:
        raise ValidationError(f"basepoint is not on the unit sphere: |x|^2 = {np.dot(x, x)}")
    if n_nodes < 2:
        raise ValidationError("need at least 2 circle nodes")
    space = euclidean_space(2)
    e, f = orthonormal_tangent_frame(x)
    s = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    params = s[:, None]
    weights = np.full(n_nodes, 2.0 * np.pi / n_nodes)

    def point_fn(t):
        t = np.asarray(t, dtype=float)[..., 0]
        return x + 1j * (np.cos(t)[..., None] * e + np.sin(t)[..., None] * f)

    def jac_fn(t):
        t = np.asarray(t, dtype=float)[..., 0]
        d = 1j * (-np.sin(t)[..., None] * e + np.cos(t)[..., None] * f)
        return d[..., None]

    return Cycle(
        space=space,
        k=1,
        point_fn=point_fn,
        jac_fn=jac_fn,
        params=params,
        weights=weights,
        param_bounds=((0.0, 2.0 * np.pi),),
        orientation=1,
        target="cone_section",
        basepoint=x.astype(complex),
    )


def rotate_cycle(g: ComplexRotation, cycle: Cycle) -> Cycle:
    """Compose the chart with a form-preserving matrix; weights are unchanged."""
    if not isinstance(g, ComplexRotation):
        raise ValidationError("rotate_cycle expects a validated ComplexRotation")
    if g.space.ambient_dim != cycle.space.ambient_dim:
        raise ValueError("rotation and cycle dimensions do not match")
    m = g.matrix
    old_point, old_jac = cycle.point_fn, cycle.jac_fn

    def point_fn(t):
        return np.asarray(old_point(t), dtype=complex) @ m.T

    jac_fn = None
    if old_jac is not None:
        def jac_fn(t):
            return np.einsum("ij,...jk->...ik", m, np.asarray(old_jac(t), dtype=complex))

    basepoint = cycle.basepoint
    if basepoint is not None:
        basepoint = m @ basepoint
    return Cycle(
        space=cycle.space,
        k=cycle.k,
        point_fn=point_fn,
        jac_fn=jac_fn,
        params=cycle.params.copy(),
        weights=cycle.weights.copy(),
        param_bounds=cycle.param_bounds,
        orientation=cycle.orientation * g.det_sign,
        target=cycle.target,
        basepoint=basepoint,
    )


# ---------------------------------------------------------------------------
# separation


def horosphere_separation(zeta, cycle: Cycle, refine: bool = True) -> float:
    """min over the cycle of |1 - pair(zeta, z)|.

    The node minimum is refined by a local bounded minimization started from
    the best node; values below a caller-chosen threshold are read as "the
    horosphere meets the cycle".
    """
    z = as_coords(zeta)
    vals = np.abs(1.0 - pair_many(cycle.space, cycle.points, z))
    best = int(np.argmin(vals))
    node_min = float(vals[best])
    if not refine:
        return node_min
    from scipy.optimize import minimize

    signs = cycle.space.sign_vector

    def objective(t):
        pt = np.asarray(cycle.point_fn(np.asarray(t)[None, :]), dtype=complex)[0]
        return abs(1.0 - np.sum(signs * pt * z))

    res = minimize(
        objective,
        cycle.params[best],
        method="Nelder-Mead",
        bounds=cycle.param_bounds,
        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 200},
    )
    return float(min(node_min, res.fun))


# ---------------------------------------------------------------------------
# pullbacks and integration


def _bracket_matrices(form: FormSpec, cycle: Cycle) -> np.ndarray:
    n = cycle.space.ambient_dim
    if form.kind == "omega":
        if cycle.k != cycle.space.dim:
            raise ValueError(
                f"omega needs a cycle of dimension {cycle.space.dim}, got {cycle.k}"
            )
        cols = [cycle.points[:, :, None], cycle.jacs]
    else:
        if cycle.k != cycle.space.dim - 1:
            raise ValueError(
                f"nu needs a cycle of dimension {cycle.space.dim - 1}, got {cycle.k}"
            )
        bp = form.basepoint
        if bp is None and cycle.basepoint is not None:
            bp = cycle.basepoint
        if bp is None:
            raise ValueError("nu pullback needs a basepoint")
        first = np.broadcast_to(np.asarray(bp, dtype=complex), (cycle.n_nodes, n))
        cols = [first[:, :, None], cycle.points[:, :, None], cycle.jacs]
    return np.concatenate(cols, axis=2)


def pullback_densities(form: FormSpec, cycle: Cycle) -> np.ndarray:
    """Determinant density of the form on the chart, at every node."""
    key = (form.kind, None if form.basepoint is None else form.basepoint.tobytes())
    cached = cycle._density_cache.get(key)
    if cached is not None:
        return cached
    mats = _bracket_matrices(form, cycle)
    fact = math.factorial(cycle.space.dim if form.kind == "omega" else cycle.space.dim - 1)
    dens = fact * cycle.orientation * np.linalg.det(mats)
    cycle._density_cache[key] = dens
    return dens


def pullback_density(form: FormSpec, cycle: Cycle, node: int) -> complex:
    """Density at a single node (index into the cycle's node list)."""
    return complex(pullback_densities(form, cycle)[node])


def integrate(cycle: Cycle, integrand, form: Optional[FormSpec] = None) -> complex:
    """Quadrature sum of weight * density * integrand over the nodes.

    ``integrand`` is a callable on arrays of ambient points, shape (..., d+1)
    -> (...); ``form=None`` integrates against the bare parameter measure
    (the surface measure for the standard sphere chart).  Summation is
    compensated and follows node index order.
    """
    vals = np.asarray(integrand(cycle.points), dtype=complex)
    if vals.ndim == 0:
        vals = np.full(cycle.n_nodes, complex(vals))
    if vals.shape != (cycle.n_nodes,):
        raise ValueError(
            f"integrand returned shape {vals.shape}, expected ({cycle.n_nodes},)"
        )
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NumericalError(
            f"integrand is not finite at node {i}, parameters {cycle.params[i]}"
        )
    if form is not None:
        vals = vals * pullback_densities(form, cycle)
    vals = vals * cycle.weights
    return complex(math.fsum(vals.real), math.fsum(vals.imag))
