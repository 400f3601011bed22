"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Criterion 9 (exploratory hyperbolic inversion) reports its outcome
but does not fail the suite, matching its exploratory status.
"""

import time

import numpy as np
import pytest

from horocauchy import (
    Bump,
    Constant,
    EllOperator,
    HGrid,
    TransformContext,
    XiHPoint,
    boundary_value,
    calibrate,
    eigenvalue_by_finite_differences,
    eigenvalue_from_coefficients,
    ell_eigenvalue,
    euclidean_space,
    forward,
    forward_extended,
    hyperbolic_cycle,
    hyperbolic_forward,
    in_xi_s,
    l_cycle,
    lorentzian_space,
    projector,
    random_band_limited,
    random_complex_rotation,
    random_lorentz,
    random_null_harmonic,
    random_null_vector,
    random_real_sphere_point,
    reconstruct_batch,
    rotate_cycle,
    series_sum,
    standard_context,
)
from horocauchy.hyperbolic import experimental_inversion
from horocauchy.transforms import dual_extended

E2 = euclidean_space(2)
L2 = lorentzian_space(2)


def report(criterion: int, passed: bool, detail: str):
    status = "PASS" if passed else "FAIL"
    print(f"\n[criterion {criterion}] {status}: {detail}")
    return passed


@pytest.fixture(scope="module")
def ctx():
    return standard_context(64, 64, 64)


def test_criterion_1_forward_of_constant(ctx):
    # f == 1 transforms to d! * |S^d| = 8 pi everywhere on the dual domain.
    # Scales are drawn up to 0.8 (so delta(Re zeta) <= 0.64 <= 0.8, inside the
    # domain cap); at 64x64 nodes the kernel aliasing stays below 1e-7 exactly
    # up to that scale.
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    scales = [rng.uniform(0.05, 0.8) for _ in range(90)] + [0.8] * 10
    for s in scales:
        zeta = random_null_vector(rng, 2, s)
        assert in_xi_s(E2, zeta)
        assert float(np.sum(zeta.real**2)) <= 0.8
        val = forward(ctx, Constant(1.0), zeta)
        worst = max(worst, abs(val - 8 * np.pi) / (8 * np.pi))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-7 and elapsed < 10.0
    assert report(1, ok, f"forward-of-constant max rel err {worst:.3e} "
                         f"(tol 1e-7), {elapsed:.1f} s over 100 points")


def test_criterion_2_cycle_independence(ctx):
    rng = np.random.default_rng(202)
    start = time.perf_counter()
    f = random_null_harmonic(rng, 2)
    zeta = random_null_vector(rng, 2, 0.3)
    base = forward(ctx, f, zeta)
    worst = 0.0
    for _ in range(10):
        g = random_complex_rotation(E2, rng, magnitude=0.15)
        rotated = rotate_cycle(g, ctx.sphere_cycle)
        ctx_rot = TransformContext(E2, rotated, ctx.separation_threshold, ctx.n_circle)
        val = forward(ctx_rot, f, zeta)
        worst = max(worst, abs(val - base) / max(abs(base), 1e-30))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-7 and elapsed < 30.0
    assert report(2, ok, f"cycle independence max rel dev {worst:.3e} "
                         f"(tol 1e-7) over 10 rotated cycles, {elapsed:.1f} s")


def test_criterion_3_series_consistency(ctx):
    rng = np.random.default_rng(303)
    worst = 0.0
    for _ in range(20):
        m = int(rng.integers(0, 4))
        f = Constant(1.0) if m == 0 else random_null_harmonic(rng, m)
        zeta = random_null_vector(rng, 2, rng.uniform(0.05, 0.5))
        q = float(np.max(np.abs(ctx.sphere_cycle.points @ zeta)))
        assert q <= 0.5 + 1e-12
        err = abs(series_sum(ctx, f, zeta, 40) - forward(ctx, f, zeta))
        worst = max(worst, err)
    ok = worst <= 1e-8
    assert report(3, ok, f"series vs forward max abs err {worst:.3e} (tol 1e-8), 20 pairs")


def test_criterion_4_projector_orthogonality(ctx):
    rng = np.random.default_rng(404)
    worst = 0.0
    for ell in range(6):
        f = Constant(1.0) if ell == 0 else random_null_harmonic(rng, ell)
        norm = float(np.max(np.abs(f(ctx.sphere_cycle.points))))
        x = random_real_sphere_point(rng)
        for m in range(6):
            if m == ell:
                continue
            val = abs(projector(ctx, f, m, x))
            worst = max(worst, val / norm)
    ok = worst <= 1e-8
    assert report(4, ok, f"cross-degree projector max |f_m|/|f| {worst:.3e} "
                         f"(tol 1e-8), degrees <= 5")


def test_criterion_5_ell_eigenvalue_check():
    # closed form vs Richardson finite differences on p^(-m-1), for the
    # implemented coefficients and for the rejected half-weight pair
    half_weight = lambda d: ((d - 2, (d - 1) / 2.0), (d - 1, -2.0))
    worst = 0.0
    for d in (2, 3):
        op = EllOperator(d)
        for m in range(9):
            closed = ell_eigenvalue(op, m)
            fd = eigenvalue_by_finite_differences(d, op.coefficients, m)
            worst = max(worst, abs(fd - closed) / abs(closed))
            closed_h = eigenvalue_from_coefficients(d, half_weight(d), m)
            fd_h = eigenvalue_by_finite_differences(d, half_weight(d), m)
            worst = max(worst, abs(fd_h - closed_h) / abs(closed_h))
    ok = worst <= 1e-6
    assert report(5, ok, f"spectral multiplier closed form vs finite differences, "
                         f"max rel dev {worst:.3e} (tol 1e-6), m <= 8, d in {{2,3}}")


def test_criterion_6_inversion_theorem(ctx):
    rng = np.random.default_rng(606)
    start = time.perf_counter()
    cal = calibrate(ctx, range(5), trials_per_degree=2, points_per_fit=20, rng=rng)
    fs = [random_band_limited(rng, 4) for _ in range(50)]
    xs = [random_real_sphere_point(rng) for _ in range(50)]
    recon = reconstruct_batch(ctx, fs, xs, 4, cal)
    worst = 0.0
    for i, f in enumerate(fs):
        refs = np.array([complex(f(np.asarray(x)[None, :])[0]) for x in xs])
        err = np.abs(recon[i] - refs) / (1.0 + np.abs(refs))
        worst = max(worst, float(err.max()))
    elapsed = time.perf_counter() - start
    ok = cal.kappa_spread <= 1e-5 and worst <= 1e-5 and elapsed < 300.0
    assert report(
        6, ok,
        f"kappa flat to {cal.kappa_spread:.3e} (tol 1e-5) across m <= 4, "
        f"measured kappa = {cal.kappa_mean:.6g}, reconstruction max rel err "
        f"{worst:.3e} (tol 1e-5) over 50 functions x 50 points, {elapsed:.0f} s",
    )


def test_criterion_7_pde_identities(ctx):
    rng = np.random.default_rng(707)
    # wave-type identity for the homogeneous extension
    f = Constant(1.0)
    h = 1e-2
    worst_wave = 0.0
    for _ in range(10):
        zeta0 = (rng.normal(size=3) + 1j * rng.normal(size=3)) * 0.1
        lap = 0.0 + 0.0j
        for j in range(3):
            e = np.zeros(3)
            e[j] = 1.0
            lap += (
                forward_extended(ctx, f, zeta0 + h * e, 1.0)
                - 2 * forward_extended(ctx, f, zeta0, 1.0)
                + forward_extended(ctx, f, zeta0 - h * e, 1.0)
            ) / h**2
        pdd = (
            forward_extended(ctx, f, zeta0, 1.0 + h)
            - 2 * forward_extended(ctx, f, zeta0, 1.0)
            + forward_extended(ctx, f, zeta0, 1.0 - h)
        ) / h**2
        worst_wave = max(worst_wave, abs(lap - pdd) / max(abs(lap), abs(pdd)))
    # harmonicity of the dual extension off the sphere
    F = random_null_harmonic(rng, 3)
    hh = 1e-3
    worst_harm = 0.0
    for _ in range(10):
        x = random_real_sphere_point(rng)
        lc = l_cycle(x, 64)
        z0 = x * rng.uniform(0.95, 1.05)
        center = dual_extended(F, lc, z0)
        vals = [abs(center)]
        lap = 0.0 + 0.0j
        for j in range(3):
            e = np.zeros(3)
            e[j] = 1.0
            up = dual_extended(F, lc, z0 + hh * e)
            dn = dual_extended(F, lc, z0 - hh * e)
            vals += [abs(up), abs(dn)]
            lap += (up - 2 * center + dn) / hh**2
        worst_harm = max(worst_harm, abs(lap) / (1.0 + max(vals)))
    ok = worst_wave <= 1e-4 and worst_harm <= 1e-4
    assert report(7, ok, f"wave identity residual {worst_wave:.3e}, dual "
                         f"harmonicity residual {worst_harm:.3e} (tol 1e-4 rel "
                         f"to scale), 10 points each")


def test_criterion_8_hyperbolic_geometry():
    rng = np.random.default_rng(808)
    sign = L2.sign_vector
    # cycle constraints at 1e-12
    worst_constraint = 0.0
    for t in (0.0, 0.5, 1.1):
        x = np.array([np.cosh(t), np.sinh(t) * 0.6, np.sinh(t) * 0.8])
        cyc = hyperbolic_cycle(x, 64)
        mu = cyc.points.real - x
        worst_constraint = max(
            worst_constraint,
            float(np.max(np.abs(np.sum(mu * x * sign, axis=1)))),
            float(np.max(np.abs(np.sum(mu * mu * sign, axis=1) + 1))),
            float(np.max(np.abs(np.sum(cyc.points.real * x * sign, axis=1) - 1))),
        )
    # Lorentz covariance of the forward transform
    f = Bump(np.array([np.cosh(0.2), np.sinh(0.2), 0.0]), 0.6)
    worst_cov = 0.0
    for _ in range(3):
        xi = np.array([1.0, np.cos(2.0), np.sin(2.0)])
        lam = 0.9 + 0.7j
        g = random_lorentz(rng, boost_scale=0.35)
        grid = HGrid(r_max=f.support_radius_from_apex + 1.0, n_r=96, n_theta=160)
        base = hyperbolic_forward(f, XiHPoint(lam, xi), grid)
        fg = Bump(g @ f.center, f.radius)
        grid_g = HGrid(r_max=fg.support_radius_from_apex + 1.0, n_r=96, n_theta=160)
        moved = hyperbolic_forward(fg, XiHPoint(lam, g @ xi), grid_g)
        worst_cov = max(worst_cov, abs(moved - base) / abs(base))
    # monotone boundary-value extrapolation on a regular bump
    freg = Bump(np.array([np.cosh(1.2), np.sinh(1.2), 0.0]), 0.3)
    _, diag = boundary_value(
        freg, np.array([1.0, 1.0, 0.0]),
        grid=HGrid(r_max=freg.support_radius_from_apex + 0.2, n_r=48, n_theta=48),
    )
    inc = [d for d in diag["increments"] if d > 1e-15]
    monotone = all(b <= a for a, b in zip(inc, inc[1:]))
    ok = worst_constraint <= 1e-12 and worst_cov <= 1e-7 and monotone
    assert report(8, ok, f"cycle constraints {worst_constraint:.2e} (tol 1e-12), "
                         f"Lorentz covariance {worst_cov:.3e} (tol 1e-7), "
                         f"boundary extrapolation monotone: {monotone}")


def test_criterion_9_exploratory_hyperbolic_inversion():
    # exploratory: the measured constant's spread across points is reported;
    # per its exploratory status a miss is reported, not fatal
    rng = np.random.default_rng(909)
    f = Bump(np.array([1.0, 0.0, 0.0]), 0.9)
    pts = []
    while len(pts) < 10:
        r = rng.uniform(0.0, 0.4)
        th = 2 * np.pi * rng.random()
        x = np.array([np.cosh(r), np.sinh(r) * np.cos(th), np.sinh(r) * np.sin(th)])
        if abs(complex(f(x[None, :])[0])) > 0.25:
            pts.append(x)
    grid = HGrid(r_max=f.support_radius_from_apex + 0.3, n_r=160, n_theta=256)
    eps = tuple(0.2 * 2.0 ** (-0.5 * k) for k in range(7))
    recon, ratios, mean, spread = experimental_inversion(
        f, pts, eps_sequence=eps, grid=grid, n_cycle=32
    )
    ok = bool(np.isfinite(spread) and spread <= 1e-2)
    report(9, ok, f"hyperbolic inversion constant {mean:.6g}, spread {spread:.3e} "
                  f"(target 1e-2, exploratory) over 10 points")
    assert np.isfinite(spread)
