"""Forward and dual horospherical Cauchy transforms, Fourier components,
harmonic projectors, and the off-cone homogeneous extension.

Conventions (all verified by the test suite):
  forward:   fhat(zeta)   = int_S f(z) omega / (1 - zeta.z)
  component: ftilde(m)    = int_S f(z) (zeta.z)^m omega, homogeneous of degree m
  dual:      Fcheck(x)    = int_{L_R(x)} F(zeta) nu_x(dzeta)
  projector: f_m(x)       = dual of ftilde(m; .) at x
  extension: fhat(zeta,p) = int_S f(z) omega / (p - zeta.z), homogeneous of
             joint degree -1 in (zeta, p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cycles import (
    Cycle,
    horosphere_separation,
    l_cycle,
    nu_form,
    omega_form,
    pullback_densities,
    standard_sphere_cycle,
)
from .errors import DomainError, NumericalError, ValidationError
from .geometry import QuadraticSpace, as_coords, delta, pair_many


@dataclass(eq=False)
class TransformContext:
    """A choice of real integration sphere (the standard one or any rotate of
    it) plus the numerical guards shared by the transforms."""

    space: QuadraticSpace
    sphere_cycle: Cycle
    separation_threshold: float = 1e-6
    n_circle: int = 64

    def __post_init__(self):
        if self.sphere_cycle.k != self.space.dim:
            raise ValidationError(
                "the context cycle must have the full quadric dimension"
            )
        self._omega = omega_form()
        self._wdens = self.sphere_cycle.weights * pullback_densities(
            self._omega, self.sphere_cycle
        )


def standard_context(n_polar: int = 64, n_azimuthal: int = 64, n_circle: int = 64,
                     separation_threshold: float = 1e-6) -> TransformContext:
    cycle = standard_sphere_cycle(2, n_polar, n_azimuthal)
    return TransformContext(cycle.space, cycle, separation_threshold, n_circle)


def _values_on(f, points: np.ndarray) -> np.ndarray:
    vals = np.asarray(f(points), dtype=complex)
    if vals.ndim == 0:
        vals = np.full(points.shape[0], complex(vals))
    if vals.shape != (points.shape[0],):
        raise ValueError(f"integrand returned shape {vals.shape}")
    if not np.all(np.isfinite(vals)):
        i = int(np.argmax(~np.isfinite(vals)))
        raise NumericalError(f"integrand is not finite at cycle node {i}")
    return vals


def _csum(vals: np.ndarray) -> complex:
    return complex(math.fsum(vals.real), math.fsum(vals.imag))


def forward(ctx: TransformContext, f, zeta) -> complex:
    """Horospherical Cauchy transform of f at a cone point zeta.

    Requires the context cycle to be separated from the horosphere of zeta;
    the separation is measured as min |1 - zeta.z| over the cycle and must
    exceed the context threshold.
    """
    z = as_coords(zeta)
    dz = delta(ctx.space, z)
    scale = float(np.max(np.abs(z))) ** 2
    if abs(dz) > 1e-8 * max(1.0, scale):
        raise ValidationError(f"forward expects a null argument, pair(zeta, zeta) = {dz}")
    sep = horosphere_separation(z, ctx.sphere_cycle)
    if sep <= ctx.separation_threshold:
        raise DomainError(
            f"cycle meets the horosphere: refined separation {sep:.3e} "
            f"(threshold {ctx.separation_threshold})"
        )
    return forward_extended(ctx, f, z, 1.0)


def forward_extended(ctx: TransformContext, f, zeta, p) -> complex:
    """Off-cone extension int f omega / (p - zeta.z); no nullity required.

    Jointly homogeneous of degree -1: scaling (zeta, p) by c divides the
    value by c.
    """
    z = as_coords(zeta)
    cyc = ctx.sphere_cycle
    den = complex(p) - pair_many(ctx.space, cyc.points, z)
    worst = int(np.argmin(np.abs(den)))
    if abs(den[worst]) <= ctx.separation_threshold:
        raise DomainError(
            f"cycle meets the singular hyperplane: |p - zeta.z| = {abs(den[worst]):.3e} "
            f"at node {worst}, parameters {cyc.params[worst]}"
        )
    vals = _values_on(f, cyc.points)
    return _csum(ctx._wdens * vals / den)


def fourier_component(ctx: TransformContext, f, m: int, zeta) -> complex:
    """Degree-m component int f (zeta.z)^m omega; homogeneous of degree m in zeta."""
    if m < 0:
        raise ValueError("component degree must be >= 0")
    z = as_coords(zeta)
    cyc = ctx.sphere_cycle
    t = pair_many(ctx.space, cyc.points, z)
    vals = _values_on(f, cyc.points)
    return _csum(ctx._wdens * vals * t**m)


def series_sum(ctx: TransformContext, f, zeta, M: int) -> complex:
    """Partial geometric-series sum sum_{m<=M} ftilde(m; zeta).

    Valid only while |zeta.z| < 1 everywhere on the cycle; converges to
    forward(zeta) as M grows.
    """
    z = as_coords(zeta)
    cyc = ctx.sphere_cycle
    t = pair_many(ctx.space, cyc.points, z)
    tmax = float(np.max(np.abs(t)))
    if tmax >= 1.0:
        raise DomainError(
            f"geometric series invalid: max |zeta.z| = {tmax:.6f} >= 1 on the cycle"
        )
    vals = _values_on(f, cyc.points) * ctx._wdens
    total = 0.0 + 0.0j
    power = np.ones_like(t)
    for _ in range(M + 1):
        total += _csum(vals * power)
        power = power * t
    return total


def dual(F, x, lcycle: Cycle) -> complex:
    """Dual transform: integral of F against nu_x over the real-form cycle of x."""
    if lcycle.basepoint is None:
        raise ValueError("the dual transform needs a cone-section cycle")
    form = nu_form(lcycle.basepoint, lcycle.space)
    vals = _values_on(F, lcycle.points)
    dens = pullback_densities(form, lcycle)
    return _csum(lcycle.weights * dens * vals)


def dual_extended(F, lcycle: Cycle, z) -> complex:
    """Dual-transform integral with the bracket basepoint moved to z, the cycle
    held fixed; used to probe harmonicity off the sphere."""
    form = nu_form(as_coords(z), lcycle.space, off_manifold_ok=True)
    vals = _values_on(F, lcycle.points)
    dens = pullback_densities(form, lcycle)
    return _csum(lcycle.weights * dens * vals)


def fourier_on_circle(ctx: TransformContext, f, x, degrees):
    """ftilde(m; zeta(s)) at every circle node of L_R(x) for every requested
    degree.  Returns (matrix of shape (len(degrees), n_circle), the cycle).
    One sphere-quadrature pass covers all degrees."""
    lc = l_cycle(x, ctx.n_circle)
    return _fourier_matrix(ctx, f, lc, degrees), lc


def _fourier_matrix(ctx: TransformContext, f, lc: Cycle, degrees) -> np.ndarray:
    cyc = ctx.sphere_cycle
    P = (cyc.points * ctx.space.sign_vector) @ lc.points.T   # (N, n_circle)
    w = ctx._wdens * _values_on(f, cyc.points)
    mmax = max(degrees)
    out = np.empty((len(degrees), lc.n_nodes), dtype=complex)
    power = np.ones_like(P)
    row = {m: i for i, m in enumerate(degrees)}
    for m in range(mmax + 1):
        if m in row:
            out[row[m]] = w @ power
        power = power * P
    return out


def projector(ctx: TransformContext, f, m: int, x) -> complex:
    """Harmonic projector f_m(x): the dual transform of ftilde(m; .) at x.

    For f in the degree-l eigenspace this vanishes unless m = l, and equals a
    degree-dependent multiple of f (measured by the calibration module).
    """
    if m < 0:
        raise ValueError("projector degree must be >= 0")
    mat, lc = fourier_on_circle(ctx, f, x, [m])
    dens = pullback_densities(nu_form(lc.basepoint, lc.space), lc)
    return _csum(lc.weights * dens * mat[0])


def projector_series(ctx: TransformContext, f, x, M: int) -> np.ndarray:
    """All projectors f_m(x) for m = 0..M in one pass."""
    degrees = list(range(M + 1))
    mat, lc = fourier_on_circle(ctx, f, x, degrees)
    dens = pullback_densities(nu_form(lc.basepoint, lc.space), lc)
    wd = lc.weights * dens
    return mat @ wd
