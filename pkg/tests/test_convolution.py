"""Convolution engine: powers, chains, sup-convolution, Fourier transform."""

import math

import numpy as np
import pytest

from heatconv import (
    GridFunction,
    HeatInput,
    convolve,
    convolve_n,
    fourier_transform,
    gaussian,
    heat_chain,
    lp_norm,
    make_grid,
    mass,
    power,
    restrict,
    sup_convolution_pair,
    sup_convolve_n,
)
from heatconv.functionals import ExponentSystem, Regime
from heatconv.verification import TestDensitySpec


def indicator(grid, left, right):
    return GridFunction(grid, ((grid.nodes >= left) & (grid.nodes < right)).astype(float))


def mixture(grid, seed, **params):
    return TestDensitySpec(
        "seeded_random_mixture", {"components": 2, **params}, seed
    ).build(grid)


class TestPower:
    def test_identity(self, grid):
        f = gaussian(grid, 1.0)
        assert power(f, 1.0) is f

    def test_gaussian_power_is_scaled_gaussian(self, grid):
        # M_s^a = (2 pi s)^(-a/2) (2 pi s / a)^(1/2) M_{s/a}
        sigma, alpha = 1.0, 0.5
        f = power(gaussian(grid, sigma), alpha)
        c = (2 * math.pi * sigma) ** (-alpha / 2) * math.sqrt(2 * math.pi * sigma / alpha)
        np.testing.assert_allclose(
            f.values, c * gaussian(grid, sigma / alpha).values, rtol=1e-12
        )

    def test_indicator_fixed_point(self):
        g = make_grid(1.0, 32)
        f = indicator(g, 0.0, 1.0)
        np.testing.assert_array_equal(power(f, 0.7).values, f.values)

    def test_rejects_nonpositive_exponent(self, grid):
        with pytest.raises(ValueError):
            power(gaussian(grid, 1.0), 0.0)


class TestConvolve:
    def test_step_autoconvolution_is_triangle(self):
        # left-endpoint sums place half-open cell mass at the left edge, so
        # the discrete triangle appears shifted by one cell; its peak value
        # is exactly 1
        g = make_grid(1.0, 32)  # h = 1/16
        f = indicator(g, 0.0, 1.0)
        c = convolve(f, f)
        x = c.grid.nodes + g.spacing
        expected = np.maximum(1.0 - np.abs(x - 1.0), 0.0)
        np.testing.assert_allclose(c.values, expected, atol=1e-10)
        assert c.values.max() == pytest.approx(1.0, abs=1e-10)

    def test_gaussian_closure(self, grid):
        c = convolve(gaussian(grid, 1.0), gaussian(grid, 2.0))
        expected = gaussian(c.grid, 3.0)
        assert np.abs(c.values - expected.values).max() <= 1e-8

    def test_matches_direct_quadrature(self, coarse_grid):
        f = mixture(coarse_grid, 51)
        g = mixture(coarse_grid, 52)
        fast = convolve(f, g)
        direct = coarse_grid.spacing * np.convolve(f.values, g.values)
        err = np.abs(fast.values[:-1] - direct).max()
        assert err <= 1e-10 * direct.max()

    def test_mass_multiplicative(self, grid):
        f, g = mixture(grid, 53), gaussian(grid, 0.5)
        assert mass(convolve(f, g)) == pytest.approx(mass(f) * mass(g), rel=1e-10)

    def test_minkowski_domain(self, grid):
        c = convolve(gaussian(grid, 1.0), gaussian(grid, 1.0))
        assert c.grid.half_width == 2 * grid.half_width
        assert c.grid.count == 2 * grid.count
        assert c.grid.spacing == grid.spacing

    def test_young_infinity_bound(self, grid):
        # (f*g)(x) <= mass(g) * sup f, exact for the discrete quadrature
        f, g = mixture(grid, 54), mixture(grid, 55)
        bound = mass(g) * f.values.max()
        assert convolve(f, g).values.max() <= bound * (1.0 + 1e-10)

    def test_rejects_mismatched_spacing(self, grid):
        with pytest.raises(ValueError):
            convolve(gaussian(grid, 1.0), gaussian(make_grid(8.0, 2048), 1.0))


class TestConvolveN:
    def test_three_unit_gaussians(self, grid):
        c = convolve_n([gaussian(grid, 1.0)] * 3)
        expected = gaussian(c.grid, 3.0)
        assert np.abs(c.values - expected.values).max() <= 1e-8

    def test_order_invariance(self, coarse_grid):
        fs = [mixture(coarse_grid, s) for s in (61, 62, 63)]
        a = convolve_n(fs).values
        b = convolve_n([fs[2], fs[0], fs[1]]).values
        assert np.abs(a - b).max() <= 1e-10 * a.max()

    def test_single_input_identity(self, grid):
        f = gaussian(grid, 1.0)
        assert convolve_n([f]) is f

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            convolve_n([])

    def test_holder_ceiling(self, grid):
        # sup of the powered chain is bounded by the product of powered masses
        system = ExponentSystem(Regime.SUP, (1.5, 1.5, 1.5))
        fs = [mixture(grid, s) for s in (64, 65, 66)]
        chain = convolve_n([power(f, a) for f, a in zip(fs, system.powers)])
        bound = math.prod(mass(f) ** a for f, a in zip(fs, system.powers))
        assert chain.values.max() <= bound + 1e-8


class TestHeatChain:
    def test_time_zero_matches_static_chain(self, grid):
        system = ExponentSystem(Regime.SUP, (2.0, 2.0))
        fs = [mixture(grid, s) for s in (71, 72)]
        inputs = [HeatInput(f, k) for f, k in zip(fs, system.kappas)]
        at_zero = heat_chain(inputs, system.powers, 0.0)
        static = convolve_n([power(f, a) for f, a in zip(fs, system.powers)])
        np.testing.assert_array_equal(at_zero.values, static.values)

    def test_gaussian_system_peak_constant(self, grid):
        # equality-case data: the chain's peak is constant in time
        system = ExponentSystem(Regime.SUP, (1.5, 1.5, 1.5))
        inputs = [HeatInput(gaussian(grid, k), k) for k in system.kappas]
        peaks = [
            heat_chain(inputs, system.powers, t).values.max() for t in (0.0, 0.5, 2.0, 8.0)
        ]
        assert np.abs(np.diff(peaks)).max() <= 1e-6 * peaks[0]

    def test_fundamental_solutions_pointwise_nondecreasing(self, grid):
        # kernel chains with powers summing to n-1 grow pointwise in t
        alphas = (0.5, 0.5)
        kappas = (1.0, 2.0)
        prev = None
        for t in (0.25, 0.5, 1.0):
            chain = convolve_n(
                [power(gaussian(grid, 2 * k * t), a) for k, a in zip(kappas, alphas)]
            )
            if prev is not None:
                assert (prev - chain.values).max() <= 1e-6 * prev.max()
            prev = chain.values


class TestSupConvolutionPair:
    def test_gaussian_pair_analytic(self):
        # sup_y M_s(x-y)^(1/2) M_s(y)^(1/2) = (2 pi s)^(-1/2) exp(-x^2/(8s));
        # variance large enough that the grid-sup bias sits below 1e-6
        grid = make_grid(16.0, 2048)
        sigma = 32.0
        f = power(gaussian(grid, sigma), 0.5)
        s = sup_convolution_pair(f, f)
        x = s.grid.nodes
        expected = np.exp(-x * x / (8 * sigma)) / math.sqrt(2 * math.pi * sigma)
        core = np.abs(x) <= 8.0
        err = np.abs(s.values[core] - expected[core]).max()
        assert err <= 1e-6 * expected.max()

    def test_point_column_translates(self, coarse_grid):
        f = mixture(coarse_grid, 81)
        vals = np.zeros(coarse_grid.count)
        j = coarse_grid.count // 2 + 5
        vals[j] = 2.0
        point = GridFunction(coarse_grid, vals)
        s = sup_convolution_pair(f, point)
        np.testing.assert_allclose(s.values[j : j + coarse_grid.count], 2.0 * f.values)

    def test_matches_double_loop_oracle(self):
        grid = make_grid(2.0, 32)
        f = mixture(grid, 82, center_range=(0.1, 0.5), sigma_range=(0.05, 0.2))
        g = mixture(grid, 83, center_range=(0.1, 0.5), sigma_range=(0.05, 0.2))
        s = sup_convolution_pair(f, g)
        n = grid.count
        oracle = np.zeros(2 * n)
        for i in range(n):
            for j in range(n):
                oracle[i + j] = max(oracle[i + j], f.values[i] * g.values[j])
        np.testing.assert_array_equal(s.values, oracle)

    def test_dominates_every_sample(self, coarse_grid):
        f, g = mixture(coarse_grid, 84), mixture(coarse_grid, 85)
        s = sup_convolution_pair(f, g)
        rng = np.random.default_rng(0)
        n = coarse_grid.count
        for j in rng.integers(0, n, size=20):
            assert np.all(s.values[j : j + n] >= f.values * g.values[j] - 1e-15)


class TestSupConvolveN:
    def test_pair_matches_pairwise_op(self, coarse_grid):
        f, g = mixture(coarse_grid, 91), mixture(coarse_grid, 92)
        via_n = sup_convolve_n([f, g], (0.5, 0.5))
        via_pair = sup_convolution_pair(power(f, 0.5), power(g, 0.5))
        np.testing.assert_array_equal(via_n.values, via_pair.values)

    def test_single_function_identity(self, coarse_grid):
        f = mixture(coarse_grid, 93)
        assert sup_convolve_n([f], (1.0,)) is f

    def test_triple_matches_exhaustive_enumeration(self):
        grid = make_grid(4.0, 128)
        fs = [
            mixture(grid, s, center_range=(0.2, 1.0), sigma_range=(0.1, 0.3))
            for s in (94, 95, 96)
        ]
        powers = (1 / 3, 1 / 3, 1 / 3)
        fold = sup_convolve_n(fs, powers).values
        v1, v2, v3 = (f.values**w for f, w in zip(fs, powers))
        n = grid.count
        brute = np.zeros(3 * n - 2)
        for a in range(n):
            for b in range(n):
                p = v1[a] * v2[b]
                if p > 0.0:
                    np.maximum(brute[a + b : a + b + n], p * v3, out=brute[a + b : a + b + n])
        err = np.abs(fold[: len(brute)] - brute).max()
        assert err <= 1e-10 * brute.max()

    def test_rejects_exponent_sum_violation(self, coarse_grid):
        f = mixture(coarse_grid, 97)
        with pytest.raises(ValueError):
            sup_convolve_n([f, f], (0.5, 0.6))


class TestRestrict:
    def test_roundtrip_through_convolution(self, grid):
        f = gaussian(grid, 1.0)
        c = convolve(f, gaussian(grid, 1.0))
        back = restrict(c, grid)
        np.testing.assert_allclose(back.values, gaussian(grid, 2.0).values, atol=1e-8)

    def test_rejects_unaligned_grid(self, grid):
        f = gaussian(grid, 1.0)
        with pytest.raises(ValueError):
            restrict(f, make_grid(32.0, 4096))


class TestFourierTransform:
    def test_gaussian_transform(self, grid):
        spec = fourier_transform(gaussian(grid, 1.0))
        expected = np.exp(-2 * math.pi**2 * spec.freqs**2)
        assert np.abs(spec.values - expected).max() <= 1e-8

    def test_step_transform_is_sinc(self):
        # O(h) accuracy for jump data: resolved on a fine dedicated grid
        g = make_grid(1.0, 2**21)
        f = GridFunction(g, ((g.nodes >= -0.5) & (g.nodes < 0.5)).astype(float))
        spec = fourier_transform(f)
        xi = spec.freqs
        with np.errstate(invalid="ignore"):
            expected = np.where(xi == 0.0, 1.0, np.sin(math.pi * xi) / (math.pi * xi))
        band = np.abs(xi) <= 16.0
        assert np.abs(spec.values[band] - expected[band]).max() <= 1e-6

    def test_parseval_exact(self, grid):
        f = mixture(grid, 101)
        spec = fourier_transform(f)
        lhs = math.sqrt(spec.spacing * np.sum(np.abs(spec.values) ** 2))
        assert lhs == pytest.approx(lp_norm(f, 2.0), rel=1e-12)

    def test_convolution_theorem(self, grid):
        f, g = mixture(grid, 102), gaussian(grid, 0.5)
        c = convolve(f, g)
        sf, sg, sc = fourier_transform(f), fourier_transform(g), fourier_transform(c)
        # the doubled grid carries the original frequencies at even indices
        common = np.isin(sc.freqs, sf.freqs)
        idx = np.searchsorted(sf.freqs, sc.freqs[common])
        prod = sf.values[idx] * sg.values[idx]
        scale = np.abs(prod).max()
        assert np.abs(sc.values[common] - prod).max() <= 1e-8 * scale

    def test_hermitian_symmetry(self, grid):
        spec = fourier_transform(mixture(grid, 103))
        n = grid.count
        k = np.arange(1, n // 2)
        left = spec.values[n // 2 - k]
        right = spec.values[n // 2 + k]
        np.testing.assert_allclose(left, np.conj(right), atol=1e-12)
