"""The spectral operator of the inversion formula, its eigenvalues, the
calibration procedure, and the truncated inversion engine.

The operator acts on the degree-(-1) homogeneous extension F(zeta, p) through
p-derivatives at p = 1 and is diagonal on degree-m components, where the
extension restricts to p^(-m-1).  With c = d / (-2 pi i)^d the implemented
operator is

    L = c * ( (d-1) * d^(d-2)/dp^(d-2)  +  2 * d^(d-1)/dp^(d-1) ) |_{p=1},

whose eigenvalues L(m) = -c (-1)^d (2m + d - 1) (m+1)...(m+d-2) are
proportional to the dimension of the degree-m harmonic space on S^d.  That
proportionality is exactly what makes the inversion sum converge to f with a
single degree-independent calibration constant; the half-weight coefficient
pair ((d-1)/2, -2) fails this and is kept in the tests only as a rejected
variant.  The constant itself depends on the orientation conventions of the
cycle factories and is measured, never assumed: with this package's
conventions it comes out to -1/8 for d = 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, ValidationError
from .geometry import random_real_sphere_point
from .testfunctions import random_null_harmonic
from .transforms import TransformContext, projector_series


@dataclass(frozen=True)
class EllOperator:
    """Spectral operator data for quadric dimension d >= 2.

    d = 1 is rejected: the derivative order d-2 in the defining expression is
    negative there.
    """

    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValidationError(
                f"the spectral operator needs d >= 2 (derivative order d-2), got {self.d}"
            )

    @property
    def c(self) -> complex:
        return self.d / (-2j * np.pi) ** self.d

    @property
    def coefficients(self):
        """(derivative order, weight) pairs defining the operator."""
        return ((self.d - 2, float(self.d - 1)), (self.d - 1, 2.0))


def rising_product(m: int, length: int) -> float:
    """(m+1)(m+2)...(m+length); empty product = 1."""
    out = 1.0
    for k in range(1, length + 1):
        out *= m + k
    return out


def eigenvalue_from_coefficients(d: int, coeffs, m: int, c: complex = None) -> complex:
    """Closed-form action of c * sum_k a_k d^k/dp^k at p = 1 on p^(-m-1).

    Uses d^k/dp^k p^(-m-1) |_{p=1} = (-1)^k (m+1)...(m+k).
    """
    if c is None:
        c = d / (-2j * np.pi) ** d
    total = 0.0
    for order, weight in coeffs:
        if order < 0:
            raise ValidationError(f"negative derivative order {order}")
        total += weight * (-1) ** order * rising_product(m, order)
    return c * total


def ell_eigenvalue(op: EllOperator, m: int) -> complex:
    """L(m): the operator's scalar action on degree-m components."""
    if m < 0:
        raise ValueError("degree must be >= 0")
    return eigenvalue_from_coefficients(op.d, op.coefficients, m, op.c)


def _fd_derivative(fn, p0: float, order: int, h: float) -> float:
    """Central finite-difference derivative of the given order at p0."""
    if order == 0:
        return fn(p0)
    # binomial central stencil for the order-th derivative
    total = 0.0
    for i in range(order + 1):
        total += (-1) ** i * math.comb(order, i) * fn(p0 + (order / 2 - i) * h)
    return total / h**order


def eigenvalue_by_finite_differences(d: int, coeffs, m: int, h: float = 1e-3,
                                     levels: int = 3, c: complex = None) -> complex:
    """Independent check of the closed form: numerically differentiate
    p -> p^(-m-1) at p = 1 with Richardson-extrapolated central stencils."""
    if c is None:
        c = d / (-2j * np.pi) ** d

    def phi(p):
        return p ** (-(m + 1))

    total = 0.0
    for order, weight in coeffs:
        vals = [_fd_derivative(phi, 1.0, order, h / 2**j) for j in range(levels)]
        # central stencils have even-power error expansions: Richardson in h^2
        for col in range(1, levels):
            fac = 4.0**col
            vals = [
                (fac * vals[i + 1] - vals[i]) / (fac - 1.0)
                for i in range(len(vals) - 1)
            ]
        total += weight * vals[0]
    return c * total


@dataclass(eq=False)
class CalibrationReport:
    """Measured projector multipliers gamma(m) and the ratios
    kappa(m) = 1 / (gamma(m) * L(m)); the inversion theorem holds exactly when
    kappa is degree-independent."""

    d: int
    degrees: list
    gamma: list
    ell: list
    kappa: list
    kappa_mean: complex
    kappa_spread: float
    fit_residuals: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        pairs = lambda xs: [[float(np.real(x)), float(np.imag(x))] for x in xs]
        return {
            "d": self.d,
            "degrees": list(self.degrees),
            "gamma": pairs(self.gamma),
            "ell": pairs(self.ell),
            "kappa": pairs(self.kappa),
            "kappa_mean": [float(self.kappa_mean.real), float(self.kappa_mean.imag)],
            "kappa_spread": float(self.kappa_spread),
            "fit_residuals": [float(r) for r in self.fit_residuals],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def _measure_gamma(ctx: TransformContext, m: int, rng, points_per_fit: int,
                   retries: int = 5):
    """Least-squares multiplier of projector(h, m, .) against h(.) for a random
    degree-m null harmonic h, over random real sphere points."""
    for _ in range(retries):
        h = random_null_harmonic(rng, m, ctx.space.dim)
        xs = [random_real_sphere_point(rng, ctx.space.dim) for _ in range(points_per_fit)]
        hv = np.array([complex(np.asarray(h(x[None, :]))[0]) for x in xs])
        norm = float(np.max(np.abs(hv)))
        if norm < 1e-6:
            continue
        pv = np.array([projector_series(ctx, h, x, m)[m] for x in xs])
        gamma = np.vdot(hv, pv) / np.vdot(hv, hv)
        residual = float(np.max(np.abs(pv - gamma * hv)) / norm)
        return complex(gamma), residual
    raise NumericalError(
        f"degenerate calibration sample at degree {m}: harmonic vanished on "
        f"{retries} retries"
    )


def calibrate(ctx: TransformContext, degrees, trials_per_degree: int = 3,
              points_per_fit: int = 20, seed: int = 0,
              rng=None) -> CalibrationReport:
    """Measure gamma(m) and kappa(m) over the given degrees.

    Reports the mean kappa and the maximum relative deviation across degrees
    and trials (the spread is the empirical test of the operator's degree
    profile).
    """
    degrees = list(degrees)
    if not degrees:
        raise ValueError("need at least one degree")
    if ctx.space.dim != 2:
        raise ValidationError("calibration is implemented for d = 2")
    rng = rng if rng is not None else np.random.default_rng(seed)
    op = EllOperator(ctx.space.dim)

    gammas, kappas, residuals, ells = [], [], [], []
    all_kappas = []
    for m in degrees:
        trial_gammas = []
        for _ in range(trials_per_degree):
            g, res = _measure_gamma(ctx, m, rng, points_per_fit)
            trial_gammas.append(g)
            residuals.append(res)
        lm = ell_eigenvalue(op, m)
        ells.append(lm)
        g_mean = complex(np.mean(trial_gammas))
        gammas.append(g_mean)
        all_kappas.extend(1.0 / (g * lm) for g in trial_gammas)
        kappas.append(1.0 / (g_mean * lm))
    kappa_mean = complex(np.mean(all_kappas))
    spread = float(np.max(np.abs(np.array(all_kappas) / kappa_mean - 1.0)))
    return CalibrationReport(
        d=ctx.space.dim,
        degrees=degrees,
        gamma=gammas,
        ell=ells,
        kappa=kappas,
        kappa_mean=kappa_mean,
        kappa_spread=spread,
        fit_residuals=residuals,
    )


def invert(ctx: TransformContext, f, x, M: int, calibration: CalibrationReport = None) -> complex:
    """Truncated inversion sum_{m<=M} kappa * L(m) * f_m(x).

    kappa is the calibration's measured global constant, or 1 when no
    calibration is supplied (in which case the output is off by the fixed
    convention factor the calibration would measure).
    """
    if M < 0:
        raise ValueError("truncation degree must be >= 0")
    kappa = calibration.kappa_mean if calibration is not None else 1.0
    op = EllOperator(ctx.space.dim)
    proj = projector_series(ctx, f, x, M)
    ells = np.array([ell_eigenvalue(op, m) for m in range(M + 1)])
    vals = kappa * ells * proj
    return complex(math.fsum(vals.real), math.fsum(vals.imag))


def reconstruct_batch(ctx: TransformContext, fs, xs, M: int,
                      calibration: CalibrationReport = None) -> np.ndarray:
    """invert() for several functions at several points; shape (len(fs), len(xs)).

    Shares the circle geometry per point across all functions.
    """
    from .cycles import l_cycle, pullback_densities, nu_form
    from .transforms import _values_on

    kappa = calibration.kappa_mean if calibration is not None else 1.0
    op = EllOperator(ctx.space.dim)
    ells = np.array([ell_eigenvalue(op, m) for m in range(M + 1)])
    cyc = ctx.sphere_cycle
    fvals = np.stack([_values_on(f, cyc.points) for f in fs])      # (F, N)
    fw = fvals * ctx._wdens                                         # (F, N)
    out = np.empty((len(fs), len(xs)), dtype=complex)
    for j, x in enumerate(xs):
        lc = l_cycle(x, ctx.n_circle)
        P = (cyc.points * ctx.space.sign_vector) @ lc.points.T      # (N, n_c)
        wd = lc.weights * pullback_densities(nu_form(lc.basepoint, lc.space), lc)
        acc = np.zeros(len(fs), dtype=complex)
        power = np.ones_like(P)
        for m in range(M + 1):
            ftil = fw @ power                                       # (F, n_c)
            acc += kappa * ells[m] * (ftil @ wd)
            power = power * P
        out[:, j] = acc
    return out
