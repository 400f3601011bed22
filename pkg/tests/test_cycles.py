import math

import numpy as np
import pytest

from horocauchy import (
    Constant,
    FeatureError,
    ValidationError,
    complex_rotation,
    euclidean_space,
    horosphere_separation,
    integrate,
    l_cycle,
    nu_form,
    omega_form,
    pullback_densities,
    pullback_density,
    random_real_rotation,
    rotate_cycle,
    standard_sphere_cycle,
)
from horocauchy.cycles import Cycle
from horocauchy.errors import NumericalError

E2 = euclidean_space(2)


@pytest.fixture(scope="module")
def sphere32():
    return standard_sphere_cycle(2, 32, 64)


class TestSphereCycle:
    def test_area(self, sphere32):
        # constant against the bare surface measure
        val = integrate(sphere32, lambda z: np.ones(len(z)))
        assert val == pytest.approx(4 * np.pi, rel=1e-10)

    def test_node_count(self, sphere32):
        assert sphere32.n_nodes == 32 * 64

    def test_second_moment(self, sphere32):
        # int z_1^2 dsigma = 4 pi / 3 by symmetry
        val = integrate(sphere32, lambda z: z[:, 0] ** 2)
        assert val == pytest.approx(4 * np.pi / 3, rel=1e-10)

    def test_unsupported_dimension(self):
        with pytest.raises(FeatureError):
            standard_sphere_cycle(3, 16, 16)

    def test_omega_density_constant(self, sphere32):
        # on the equal-area chart the omega density is the constant 2
        # (equivalently 2 sin(theta) per unit polar angle)
        dens = pullback_densities(omega_form(), sphere32)
        assert np.allclose(dens, 2.0, atol=1e-8)
        assert pullback_density(omega_form(), sphere32, 17) == pytest.approx(2.0)

    def test_omega_integral(self, sphere32):
        val = integrate(sphere32, lambda z: np.ones(len(z)), omega_form())
        assert val == pytest.approx(8 * np.pi, rel=1e-8)

    def test_weight_sum_is_box_volume(self, sphere32):
        assert math.fsum(sphere32.weights) == pytest.approx(4 * np.pi, abs=1e-12)


class TestLCycle:
    def test_first_node_form(self):
        lc = l_cycle(np.array([1.0, 0, 0]), 16)
        assert np.allclose(lc.points[0], [1, 1j, 0])
        assert abs(np.sum(lc.points[0] ** 2)) < 1e-12            # on the cone
        assert np.sum(lc.points[0] * [1, 0, 0]) == pytest.approx(1)

    def test_incidence_everywhere(self, rng):
        x = rng.normal(size=3)
        x /= np.linalg.norm(x)
        lc = l_cycle(x, 64)
        inc = lc.points @ x
        assert np.max(np.abs(inc - 1)) <= 1e-12
        on_cone = np.abs(np.sum(lc.points**2, axis=1))
        assert np.max(on_cone) <= 1e-12

    def test_nu_density_constant_minus_one(self):
        lc = l_cycle(np.array([0.0, 0, 1.0]), 128)
        dens = pullback_densities(nu_form(lc.basepoint), lc)
        assert np.allclose(dens, -1.0, atol=1e-8)

    def test_nu_integral(self):
        lc = l_cycle(np.array([0.0, 0, 1.0]), 128)
        val = integrate(lc, lambda z: np.ones(len(z)), nu_form(lc.basepoint))
        assert val == pytest.approx(-2 * np.pi, rel=1e-10)

    def test_complex_basepoint_rejected(self):
        with pytest.raises(ValueError):
            l_cycle(np.array([1.0, 1e-3j, 0]), 8)

    def test_off_sphere_basepoint_rejected(self):
        with pytest.raises(ValidationError):
            l_cycle(np.array([1.1, 0, 0]), 8)


class TestRotateCycle:
    def test_identity(self, sphere32):
        g = complex_rotation(E2, np.eye(3))
        rotated = rotate_cycle(g, sphere32)
        assert np.allclose(rotated.points, sphere32.points)

    def test_boost_preserves_quadric(self, sphere32):
        t = 0.1
        g = np.eye(3, dtype=complex)
        g[0, 0] = g[1, 1] = np.cosh(t)
        g[0, 1] = 1j * np.sinh(t)
        g[1, 0] = -1j * np.sinh(t)
        rotated = rotate_cycle(complex_rotation(E2, g), sphere32)
        dev = np.abs(np.sum(rotated.points**2, axis=1) - 1)
        assert np.max(dev) < 1e-10

    def test_non_orthogonal_rejected(self):
        with pytest.raises(ValidationError):
            complex_rotation(E2, np.diag([2.0, 1.0, 1.0]))

    def test_rotation_covariance_of_integral(self, sphere32, rng):
        g = random_real_rotation(E2, rng)
        rotated = rotate_cycle(g, sphere32)
        ginv = np.linalg.inv(g.matrix)

        def f(z):
            return np.exp(0.3 * z[:, 0]) * np.cos(z[:, 1].real)

        base = integrate(sphere32, f, omega_form())
        moved = integrate(rotated, lambda z: f(z @ ginv.T), omega_form())
        assert moved == pytest.approx(base, rel=1e-9)


class TestSeparation:
    def test_interior_bound(self, sphere32):
        zeta = 0.5 * np.array([1, 1j, 0])
        sep = horosphere_separation(zeta, sphere32)
        # coarse bound 1 - sqrt(2 * delta(xi)); brute-force min is 0.5
        assert sep >= 1 - np.sqrt(0.5) - 1e-9
        dense = np.min(np.abs(1 - standard_sphere_cycle(2, 128, 256).points @ zeta))
        assert sep == pytest.approx(min(dense, 0.5), abs=1e-3)
        assert sep == pytest.approx(0.5, abs=1e-3)

    def test_tangent_horosphere(self, sphere32):
        # the horosphere of (1, i, 0) touches the sphere at (1, 0, 0)
        sep = horosphere_separation(np.array([1, 1j, 0]), sphere32)
        assert sep < 1e-4
        node_only = horosphere_separation(np.array([1, 1j, 0]), sphere32, refine=False)
        assert node_only < 0.1

    def test_small_scale(self, sphere32):
        sep = horosphere_separation(1e-6 * np.array([1, 1j, 0]), sphere32)
        assert sep == pytest.approx(1.0, abs=1e-5)

    def test_empty_integrand_guard(self, sphere32):
        with pytest.raises(NumericalError):
            integrate(sphere32, lambda z: np.full(len(z), np.nan))


class TestPullbackStructure:
    def test_degenerate_chart_density_zero(self):
        # a chart collapsing one direction has vanishing bracket density
        space = E2
        s = 2 * np.pi * np.arange(8) / 8

        def point_fn(t):
            t0 = np.asarray(t)[..., 0]
            out = np.zeros(t0.shape + (3,), dtype=complex)
            out[..., 0] = 1.0
            return out

        cyc = Cycle(
            space=space, k=1, point_fn=point_fn, params=s[:, None],
            weights=np.full(8, 2 * np.pi / 8), param_bounds=((0.0, 2 * np.pi),),
            orientation=1, target=None, basepoint=np.array([1.0, 0, 0], dtype=complex),
        )
        dens = pullback_densities(nu_form(np.array([0.0, 0, 1]), off_manifold_ok=True), cyc)
        assert np.allclose(dens, 0.0)

    def test_orientation_flip(self):
        # reversing the circle parameter negates the raw density; recording
        # orientation -1 restores the oriented integral
        x = np.array([0.0, 0, 1.0])
        lc = l_cycle(x, 64)

        def flipped_point(t):
            return lc.point_fn(-np.asarray(t))

        def flipped_jac(t):
            return -lc.jac_fn(-np.asarray(t))

        flipped = Cycle(
            space=lc.space, k=1, point_fn=flipped_point, jac_fn=flipped_jac,
            params=lc.params, weights=lc.weights, param_bounds=lc.param_bounds,
            orientation=-1, target="cone_section", basepoint=lc.basepoint,
        )
        form = nu_form(x)
        base_direct = pullback_densities(form, lc)
        flip_raw = pullback_densities(form, flipped) / flipped.orientation
        # same node set traversed backwards: densities negate node-by-node
        assert np.allclose(np.sort(flip_raw.real), np.sort(-base_direct.real))
        i_base = integrate(lc, lambda z: z[:, 2], form)
        i_flip = integrate(flipped, lambda z: z[:, 2], form)
        assert i_flip == pytest.approx(i_base, rel=1e-9)


class TestQuadratureConvergence:
    def test_doubling_converges(self):
        def f(z):
            return np.exp(0.3 * z[:, 0] + 0.1 * z[:, 1] * z[:, 2])

        vals = {}
        for n in (32, 64, 128):
            c = standard_sphere_cycle(2, n, n)
            vals[n] = integrate(c, f, omega_form())
        assert abs(vals[64] - vals[32]) / abs(vals[32]) < 1e-10
        assert abs(vals[128] - vals[64]) / abs(vals[64]) < 1e-12

    def test_weight_positivity(self):
        c = standard_sphere_cycle(2, 16, 16)
        assert np.all(c.weights > 0)
