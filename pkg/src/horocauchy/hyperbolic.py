"""Geometry and transforms of the noncompact restriction: the upper-sheet
hyperboloid, its CR parameter manifold of avoiding horospheres, boundary
values, hyperbolic cycles, and the forward/dual transforms for compactly
supported functions.

All formulas use the Lorentzian pairing zeta.z = zeta_1 z_1 - zeta_2 z_2 - ...
The parameter manifold consists of zeta = lambda * xi with lambda non-real and
xi a nonzero real null vector; its boundary is the real null cone itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cycles import Cycle, nu_form, pullback_densities
from .errors import DomainError, NumericalError, ValidationError
from .geometry import (
    QuadraticSpace,
    as_coords,
    delta,
    hyperboloid_point,
    lorentzian_space,
    pair_many,
)
from .spectral import EllOperator

DEFAULT_EPS_SEQUENCE = tuple(0.1 * 0.5**k for k in range(10))   # 1e-1 .. ~2e-4
SUPPORT_MARGIN = 0.1


@dataclass(frozen=True, eq=False)
class XiHPoint:
    """A horosphere parameter zeta = lambda * xi with xi real null.

    Interior points need Im(lambda) != 0; boundary points (lambda real) are
    flagged and only meaningful as limits, taken by boundary_value().
    """

    lam: complex
    xi: np.ndarray
    space: QuadraticSpace = None
    boundary: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        xi = np.asarray(as_coords(self.xi).real, dtype=float)
        object.__setattr__(self, "xi", xi)
        sp = self.space or lorentzian_space(len(xi) - 1)
        object.__setattr__(self, "space", sp)
        norm2 = float(np.max(np.abs(xi))) ** 2
        if norm2 == 0.0:
            raise ValidationError("xi must be nonzero")
        d = delta(sp, xi)
        if abs(d) > 1e-10 * max(1.0, norm2):
            raise ValidationError(f"xi is not a null vector: form value {d}")
        if not self.boundary and self.lam.imag == 0.0:
            raise ValidationError(
                "interior parameter points need Im(lambda) != 0; "
                "set boundary=True for boundary limits"
            )

    @property
    def zeta(self) -> np.ndarray:
        return self.lam * self.xi


def hyperboloid_patch_cycle(r_max: float, n_r: int, n_theta: int,
                            space: QuadraticSpace = None) -> Cycle:
    """Geodesic-polar quadrature patch of the upper hyperboloid sheet:
    z(r, theta) = (cosh r, sinh r cos theta, sinh r sin theta), Gauss-Legendre
    in r on [0, r_max] x trapezoid in theta.  The volume-form density is
    2 sinh(r), twice the hyperbolic area element."""
    space = space or lorentzian_space(2)
    if space.dim != 2:
        raise ValidationError("hyperboloid patches are implemented for d = 2")
    if r_max <= 0:
        raise ValidationError("r_max must be positive")
    u, wu = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * r_max * (u + 1.0)
    wr = 0.5 * r_max * wu
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    wtheta = 2.0 * np.pi / n_theta
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    params = np.column_stack([rr.ravel(), tt.ravel()])
    weights = np.outer(wr, np.full(n_theta, wtheta)).ravel()

    def point_fn(t):
        t = np.asarray(t, dtype=float)
        r_, th = t[..., 0], t[..., 1]
        return np.stack(
            [np.cosh(r_), np.sinh(r_) * np.cos(th), np.sinh(r_) * np.sin(th)], axis=-1
        )

    def jac_fn(t):
        t = np.asarray(t, dtype=float)
        r_, th = t[..., 0], t[..., 1]
        zr = np.stack(
            [np.sinh(r_), np.cosh(r_) * np.cos(th), np.cosh(r_) * np.sin(th)], axis=-1
        )
        zt = np.stack(
            [np.zeros_like(r_), -np.sinh(r_) * np.sin(th), np.sinh(r_) * np.cos(th)],
            axis=-1,
        )
        return np.stack([zr, zt], axis=-1)

    return Cycle(
        space=space,
        k=2,
        point_fn=point_fn,
        jac_fn=jac_fn,
        params=params,
        weights=weights,
        param_bounds=((0.0, r_max), (0.0, 2.0 * np.pi)),
        orientation=1,
        target="hyperboloid",
    )


@dataclass(frozen=True, eq=False)
class HGrid:
    """Quadrature request for the forward transform on the hyperboloid."""

    r_max: float
    n_r: int = 64
    n_theta: int = 64


_PATCH_CACHE = {}


def _patch_for(f, grid: HGrid) -> Cycle:
    """Effective integration patch: compact support makes truncation exact, so
    the radius is clamped to the support (plus margin) when the integrand
    advertises one.  Enlarging r_max beyond the support then changes nothing."""
    r_eff = grid.r_max
    support = getattr(f, "support_radius_from_apex", None)
    if support is not None:
        if support > grid.r_max:
            raise ValueError(
                f"support radius {support:.3f} exceeds the grid radius {grid.r_max:.3f}"
            )
        r_eff = min(grid.r_max, support + SUPPORT_MARGIN)
    key = (round(r_eff, 12), grid.n_r, grid.n_theta)
    patch = _PATCH_CACHE.get(key)
    if patch is None:
        patch = hyperboloid_patch_cycle(r_eff, grid.n_r, grid.n_theta)
        if len(_PATCH_CACHE) > 32:
            _PATCH_CACHE.clear()
        _PATCH_CACHE[key] = patch
    return patch


def _omega_weights(patch: Cycle) -> np.ndarray:
    from .cycles import omega_form

    return patch.weights * pullback_densities(omega_form(), patch)


def hyperbolic_forward(f, zeta: XiHPoint, grid: HGrid) -> complex:
    """Forward transform on the hyperboloid: int_H f(z) omega_H / (1 - zeta.z).

    For Im(lambda) != 0 the denominator is bounded away from zero uniformly
    on the sheet; boundary parameters must go through boundary_value().
    """
    if zeta.boundary:
        raise DomainError(
            "boundary parameter: evaluate through boundary_value(), not directly"
        )
    patch = _patch_for(f, grid)
    den = 1.0 - pair_many(patch.space, patch.points, zeta.zeta)
    worst = float(np.min(np.abs(den)))
    if worst <= 1e-10:
        raise DomainError(f"denominator collapses on the grid: min |1 - zeta.z| = {worst:.3e}")
    vals = np.asarray(f(patch.points), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise NumericalError("integrand is not finite on the hyperboloid patch")
    contrib = _omega_weights(patch) * vals / den
    return complex(math.fsum(contrib.real), math.fsum(contrib.imag))


def richardson_limit(values, ratio: float = 2.0):
    """Extrapolate a sequence v(eps_k) with eps_{k+1} = eps_k / ratio to eps = 0,
    assuming a power-series error expansion.  Returns (limit, increments of the
    raw sequence, increments of the extrapolant diagonal)."""
    vals = [complex(v) for v in values]
    if len(vals) < 2:
        raise ValueError("need at least two values to extrapolate")
    increments = [abs(vals[i + 1] - vals[i]) for i in range(len(vals) - 1)]
    noise_floor = 1e-13 * max(1.0, max(abs(v) for v in vals))
    for i in range(1, len(increments)):
        if (
            increments[i] > 10.0 * increments[i - 1]
            and increments[i - 1] > 0
            and increments[i] > noise_floor
        ):
            raise NumericalError(
                f"extrapolation sequence oscillates: increment {increments[i]:.3e} "
                f"after {increments[i - 1]:.3e}; raw values {vals}"
            )
    diagonal = [vals[-1]]
    table = vals
    for j in range(1, len(vals)):
        fac = ratio**j
        table = [
            (fac * table[i + 1] - table[i]) / (fac - 1.0)
            for i in range(len(table) - 1)
        ]
        diagonal.append(table[-1])
    diag_increments = [abs(diagonal[i + 1] - diagonal[i]) for i in range(len(diagonal) - 1)]
    return table[0], increments, diag_increments


def boundary_value(f, xi, eps_sequence=None, grid: HGrid = None):
    """Boundary limit of the forward transform at a real null xi, taken along
    lambda = 1 + i*eps with a decreasing eps sequence and Richardson
    extrapolation.

    Returns (extrapolated value, diagnostics dict with the raw values and the
    convergence increments).
    """
    xi = np.asarray(as_coords(xi).real, dtype=float)
    eps_sequence = tuple(eps_sequence) if eps_sequence is not None else DEFAULT_EPS_SEQUENCE
    if grid is None:
        support = getattr(f, "support_radius_from_apex", None)
        if support is None:
            raise ValueError("pass a grid when the integrand has no declared support")
        grid = HGrid(r_max=support + SUPPORT_MARGIN)
    vals = [
        hyperbolic_forward(f, XiHPoint(1.0 + 1j * e, xi), grid) for e in eps_sequence
    ]
    limit, increments, diag = richardson_limit(vals, ratio=eps_sequence[0] / eps_sequence[1])
    diagnostics = {
        "eps": list(eps_sequence),
        "values": vals,
        "increments": increments,
        "extrapolant_increments": diag,
        "tail_slope": increments[-1] / increments[-2] if len(increments) > 1 and increments[-2] > 0 else None,
    }
    return limit, diagnostics


def lorentz_orthonormal_frame(x: np.ndarray):
    """Vectors (e, f) completing a hyperboloid point to a Lorentz frame:
    both orthogonal to x with form value -1, plain det[x, e, f] = +1."""
    x = np.asarray(x, dtype=float)
    space = lorentzian_space(len(x) - 1)
    sign = space.sign_vector
    # Gram-Schmidt under the Lorentzian form on spacelike seeds
    basis = []
    for seed_idx in range(1, len(x)):
        v = np.zeros(len(x))
        v[seed_idx] = 1.0
        v = v - np.sum(sign * v * x) * x          # remove B(v,x)/B(x,x) * x, B(x,x) = 1
        for b in basis:
            v = v + np.sum(sign * v * b) * b      # remove B(v,b)/B(b,b) * b, B(b,b) = -1
        norm2 = -np.sum(sign * v * v)
        if norm2 <= 1e-12:
            continue
        basis.append(v / np.sqrt(norm2))
        if len(basis) == 2:
            break
    e, f = basis
    if np.linalg.det(np.column_stack([x, e, f])) < 0:
        f = -f
    return e, f


def hyperbolic_cycle(x, n_nodes: int = 64) -> Cycle:
    """The boundary cycle through a hyperboloid point x: xi(s) = x + mu(s) with
    mu(s) = cos(s) e + sin(s) f, so that mu.x = 0, mu.mu = -1 and xi is a real
    null vector with xi.x = 1 at every node."""
    space = lorentzian_space(2)
    xp = hyperboloid_point(space, x)
    x = xp.coords.real
    if n_nodes < 2:
        raise ValidationError("need at least 2 cycle nodes")
    e, f = lorentz_orthonormal_frame(x)
    s = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    params = s[:, None]
    weights = np.full(n_nodes, 2.0 * np.pi / n_nodes)

    def point_fn(t):
        t = np.asarray(t, dtype=float)[..., 0]
        return x + np.cos(t)[..., None] * e + np.sin(t)[..., None] * f

    def jac_fn(t):
        t = np.asarray(t, dtype=float)[..., 0]
        d = -np.sin(t)[..., None] * e + np.cos(t)[..., None] * f
        return d[..., None].astype(complex)

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


def hyperbolic_dual(F, x, n_nodes: int = 64) -> complex:
    """Dual transform over the boundary cycle of x against the nu_x bracket."""
    cyc = hyperbolic_cycle(x, n_nodes)
    vals = np.asarray(F(cyc.points), dtype=complex)
    if vals.ndim == 0:
        vals = np.full(cyc.n_nodes, complex(vals))
    if not np.all(np.isfinite(vals)):
        raise NumericalError("dual integrand is not finite on the cycle")
    dens = pullback_densities(nu_form(cyc.basepoint, cyc.space), cyc)
    contrib = cyc.weights * dens * vals
    return complex(math.fsum(contrib.real), math.fsum(contrib.imag))


# ---------------------------------------------------------------------------
# Lorentz group elements (identity component, upper-sheet preserving)


def lorentz_boost(t: float, axis: int = 1) -> np.ndarray:
    g = np.eye(3)
    g[0, 0] = g[axis, axis] = np.cosh(t)
    g[0, axis] = g[axis, 0] = np.sinh(t)
    return g


def lorentz_rotation(alpha: float) -> np.ndarray:
    g = np.eye(3)
    g[1, 1] = g[2, 2] = np.cos(alpha)
    g[1, 2] = -np.sin(alpha)
    g[2, 1] = np.sin(alpha)
    return g


def random_lorentz(rng, boost_scale: float = 0.6) -> np.ndarray:
    return (
        lorentz_rotation(2 * np.pi * rng.random())
        @ lorentz_boost(boost_scale * (2 * rng.random() - 1.0))
        @ lorentz_rotation(2 * np.pi * rng.random())
    )


# ---------------------------------------------------------------------------
# spectral post-processing and the exploratory inversion


def processed_kernel_weights(d: int):
    """Closed-form p-derivatives of the Cauchy kernel under the spectral
    operator: d^k/dp^k (p - t)^(-1) |_{p=1} = (-1)^k k! (1 - t)^(-k-1).
    Returns (c, [(power, scalar weight), ...]) so the processed kernel is
    c * sum_w weight * (1 - t)^(-power)."""
    op = EllOperator(d)
    terms = []
    for order, weight in op.coefficients:
        terms.append((order + 1, weight * (-1) ** order * math.factorial(order)))
    return op.c, terms


def processed_boundary_on_cycle(f, x, eps_sequence=None, grid: HGrid = None,
                                n_cycle: int = 32):
    """Boundary values of the spectrally processed forward transform at every
    node of the boundary cycle of x.

    The operator acts analytically under the integral (derivatives of the
    Cauchy kernel in the homogeneity parameter), and the boundary limit
    lambda -> 1 + i0 is Richardson-extrapolated per node.  Returns
    (values array over cycle nodes, the cycle).
    """
    space = lorentzian_space(2)
    xp = hyperboloid_point(space, x)
    eps_sequence = tuple(eps_sequence) if eps_sequence is not None else DEFAULT_EPS_SEQUENCE
    if grid is None:
        support = getattr(f, "support_radius_from_apex", None)
        if support is None:
            raise ValueError("pass a grid when the integrand has no declared support")
        grid = HGrid(r_max=support + SUPPORT_MARGIN)
    cyc = hyperbolic_cycle(xp.coords.real, n_cycle)
    patch = _patch_for(f, grid)
    wvals = _omega_weights(patch) * np.asarray(f(patch.points), dtype=complex)  # (N,)
    T = np.real(
        (patch.points.real * patch.space.sign_vector) @ cyc.points.real.T
    )                                                                           # (N, n_cycle)
    c, terms = processed_kernel_weights(2)
    ratio = eps_sequence[0] / eps_sequence[1]
    raw = np.empty((len(eps_sequence), cyc.n_nodes), dtype=complex)
    for i, e in enumerate(eps_sequence):
        lam = 1.0 + 1j * e
        den = 1.0 - lam * T
        kernel = np.zeros_like(den)
        for power, weight in terms:
            kernel += weight * den ** (-power)
        raw[i] = wvals @ (c * kernel)
    values = np.empty(cyc.n_nodes, dtype=complex)
    for j in range(cyc.n_nodes):
        values[j], _, _ = richardson_limit(raw[:, j], ratio=ratio)
    return values, cyc


def experimental_inversion(f, points, eps_sequence=None, grid: HGrid = None,
                           n_cycle: int = 32):
    """Compose dual-of-processed-boundary-values at each hyperboloid point and
    compare with f.  Returns (reconstructions, ratios to f, mean constant,
    relative spread); the global constant is measured, not assumed."""
    recon = []
    ratios = []
    for x in points:
        vals, cyc = processed_boundary_on_cycle(f, x, eps_sequence, grid, n_cycle)
        dens = pullback_densities(nu_form(cyc.basepoint, cyc.space), cyc)
        contrib = cyc.weights * dens * vals
        r = complex(math.fsum(contrib.real), math.fsum(contrib.imag))
        recon.append(r)
        fx = complex(np.asarray(f(np.asarray(x, dtype=float)[None, :]))[0])
        if abs(fx) < 1e-12:
            raise ValueError("evaluation points must lie inside the support of f")
        ratios.append(r / fx)
    ratios = np.array(ratios)
    mean = complex(np.mean(ratios))
    spread = float(np.max(np.abs(ratios / mean - 1.0))) if abs(mean) > 0 else float("inf")
    return np.array(recon), ratios, mean, spread
