"""Heat evolution: Gaussian closure, mass preservation, rescaling, PDE residual."""

import math

import numpy as np
import pytest

from heatconv import (
    DomainOverflowError,
    GridFunction,
    HeatInput,
    TimeGrid,
    evolve,
    evolve_at,
    gaussian,
    lp_norm,
    make_grid,
    mass,
    power_pde_residual,
    selfsimilar_rescale,
)
from heatconv.verification import TestDensitySpec

M5_AT_ZERO = 0.17841241161527711  # (2 pi 5)^(-1/2)


def mixture(grid, seed, components=2):
    return TestDensitySpec(
        "seeded_random_mixture", {"components": components}, seed
    ).build(grid)


class TestEvolve:
    def test_gaussian_closure(self, grid):
        # variance 1 plus 2*kappa*t = 1 gives variance 2
        u = evolve(HeatInput(gaussian(grid, 1.0), 0.5), 1.0)
        np.testing.assert_allclose(u.values, gaussian(grid, 2.0).values, atol=1e-8)

    def test_time_zero_is_identity(self, grid):
        f = gaussian(grid, 1.0)
        u = evolve(HeatInput(f, 0.5), 0.0)
        np.testing.assert_array_equal(u.values, f.values)

    @pytest.mark.parametrize("seed", [11, 12, 13])
    def test_mass_preservation_on_mixtures(self, grid, seed):
        f = mixture(grid, seed)
        for t in (0.5, 1.0, 2.0):
            u = evolve(HeatInput(f, 0.5), t)
            assert abs(mass(u) - mass(f)) <= 1e-8 * mass(f)

    def test_positivity(self, grid):
        u = evolve(HeatInput(mixture(grid, 21), 0.5), 1.0)
        assert np.all(u.values >= 0.0)

    def test_maximum_principle(self, grid):
        f = mixture(grid, 22)
        peak = f.values.max()
        for t in (0.1, 1.0, 4.0):
            u = evolve(HeatInput(f, 0.5), t)
            assert u.values.max() <= peak * (1.0 + 1e-10)

    def test_semigroup_property(self, grid):
        inp = HeatInput(mixture(grid, 23), 0.5)
        direct = evolve(inp, 2.0)
        composed = evolve(HeatInput(evolve(inp, 0.75), 0.5), 1.25)
        err = np.abs(direct.values - composed.values).max()
        assert err <= 1e-8 * direct.values.max()

    def test_negative_time_rejected(self, grid):
        with pytest.raises(ValueError):
            evolve(HeatInput(gaussian(grid, 1.0), 0.5), -1.0)

    def test_domain_overflow_guard(self, grid):
        # sqrt(2 kappa t) > L/4 = 4 at kappa = 1, t = 8.5
        with pytest.raises(DomainOverflowError):
            evolve(HeatInput(gaussian(grid, 1.0), 1.0), 8.5)


class TestEvolveAt:
    def test_matches_grid_path_inside_validity(self, grid):
        inp = HeatInput(mixture(grid, 31), 0.5)
        t = 2.0  # kernel std = sqrt(2) < L/8
        u = evolve(inp, t)
        direct = evolve_at(inp, t, grid.nodes)
        err = np.abs(u.values - direct).max()
        assert err <= 1e-10 * direct.max()

    def test_gaussian_closure_at_origin(self, grid):
        # variance 1 + 2*(1/2)*4 = 5
        inp = HeatInput(gaussian(grid, 1.0), 0.5)
        assert evolve_at(inp, 4.0, np.array([0.0]))[0] == pytest.approx(
            M5_AT_ZERO, abs=1e-10
        )

    def test_single_column_reproduces_kernel(self, grid):
        vals = np.zeros(grid.count)
        j = grid.count // 2 + 17
        vals[j] = 3.0
        inp = HeatInput(GridFunction(grid, vals), 0.5)
        q = np.array([0.0, 1.0, -2.5])
        t = 1.5
        var = 2.0 * 0.5 * t
        expected = (
            3.0
            * grid.spacing
            * np.exp(-((q - grid.nodes[j]) ** 2) / (2 * var))
            / math.sqrt(2 * math.pi * var)
        )
        np.testing.assert_allclose(evolve_at(inp, t, q), expected, rtol=1e-12)

    def test_rejects_nonpositive_time(self, grid):
        with pytest.raises(ValueError):
            evolve_at(HeatInput(gaussian(grid, 1.0), 0.5), 0.0, np.array([0.0]))


class TestSelfsimilarRescale:
    def test_gaussian_fixed_point(self, grid):
        # initial gaussian(kappa) is stationary under the rescaled flow
        for kappa in (0.25, 0.5):
            inp = HeatInput(gaussian(grid, kappa), kappa)
            for t in (1.0, 10.0, 1000.0):
                u = selfsimilar_rescale(inp, t, grid)
                np.testing.assert_allclose(
                    u.values, gaussian(grid, kappa).values, atol=1e-10
                )

    def test_mass_preserved(self, grid):
        inp = HeatInput(mixture(grid, 41), 0.5)
        for t in (1.0, 100.0):
            assert abs(mass(selfsimilar_rescale(inp, t, grid)) - 1.0) <= 1e-6

    def test_mixture_converges_to_gaussian_profile(self, grid):
        kappa = 0.5
        inp = HeatInput(mixture(grid, 42), kappa)
        u = selfsimilar_rescale(inp, 1000.0, grid)
        target = gaussian(grid, kappa)
        assert np.abs(u.values - target.values).max() <= 1e-3


class TestPowerPdeResidual:
    def test_plain_heat_equation(self, grid):
        inp = HeatInput(gaussian(grid, 1.0), 0.5)
        assert power_pde_residual(inp, 1.0, t=0.5, dt=1e-3) <= 1e-4

    @pytest.mark.parametrize("alpha", [0.5, 2.0])
    def test_power_equation(self, grid, alpha):
        inp = HeatInput(gaussian(grid, 1.0), 0.5)
        assert power_pde_residual(inp, alpha, t=0.5, dt=1e-3) <= 1e-3

    def test_rejects_bad_arguments(self, grid):
        inp = HeatInput(gaussian(grid, 1.0), 0.5)
        with pytest.raises(ValueError):
            power_pde_residual(inp, 0.0, t=0.5, dt=1e-3)
        with pytest.raises(ValueError):
            power_pde_residual(inp, 1.0, t=1e-4, dt=1e-3)


class TestTimeGrid:
    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            TimeGrid(np.array([0.0, 2.0, 1.0]))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            TimeGrid(np.array([-1.0, 1.0]))

    def test_uniform_spacing(self):
        assert TimeGrid.uniform(0.0, 1.0, 11).uniform_spacing == pytest.approx(0.1)
        with pytest.raises(ValueError):
            TimeGrid.log_spaced(0.01, 1.0, 5).uniform_spacing


class TestHeatInput:
    def test_rejects_nonpositive_kappa(self, grid):
        with pytest.raises(ValueError):
            HeatInput(gaussian(grid, 1.0), 0.0)

    def test_rejects_zero_mass(self, grid):
        with pytest.raises(ValueError):
            HeatInput(GridFunction(grid, np.zeros(grid.count)), 1.0)
