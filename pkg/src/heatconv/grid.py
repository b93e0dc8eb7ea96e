"""Uniform 1-D grids, sampled densities, and their integral functionals.

A density lives on a uniform symmetric grid with nodes x_i = -L + i*h,
i = 0..N-1, h = 2L/N.  All integrals are left-endpoint Riemann sums
h * sum(values), one convention throughout, so that discrete convolution
(scaled by h) is the exact quadrature of the continuous one and step
functions aligned to the grid integrate exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

# Entropy convention 0*log(0) = 0; values below this are treated as exact zeros.
ENTROPY_FLOOR = 1e-300

# Relative threshold masking near-zero values in the Fisher quotient (f')^2/f.
FISHER_THRESHOLD = 1e-12

# Boundary values above this fraction of the peak suggest the domain is too small.
BOUNDARY_ADVISORY = 1e-10

# FFT convolution leaves O(eps)-size dust in exactly-zero tails; quasi-norms
# with r < 1 amplify it, so outputs are floored at this fraction of their peak.
FFT_DUST = 1e-13


def clean_nonnegative(values: "np.ndarray") -> "np.ndarray":
    """Zero out FFT dust (including tiny negatives) relative to the peak."""
    peak = values.max()
    if peak <= 0.0:
        return np.zeros_like(values)
    values[values < FFT_DUST * peak] = 0.0
    return values


@dataclass(frozen=True)
class Grid:
    """Uniform symmetric grid on [-half_width, half_width) with ``count`` nodes."""

    half_width: float
    count: int

    def __post_init__(self):
        if self.half_width <= 0.0:
            raise ValueError(f"grid half-width must be positive, got {self.half_width}")
        if self.count < 2:
            raise ValueError(f"grid needs at least 2 nodes, got {self.count}")
        if self.count % 2 != 0:
            raise ValueError(f"grid node count must be even, got {self.count}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.count

    @cached_property
    def nodes(self) -> np.ndarray:
        x = -self.half_width + self.spacing * np.arange(self.count)
        x.setflags(write=False)
        return x

    def same_spacing(self, other: "Grid", rtol: float = 1e-12) -> bool:
        return math.isclose(self.spacing, other.spacing, rel_tol=rtol)


def make_grid(half_width: float, count: int) -> Grid:
    """Build a user-facing grid; ``count`` must be a power of two, >= 16.

    Derived grids (convolution results span the Minkowski sum of their
    factors' domains) are constructed internally and may have any even size.
    """
    if half_width <= 0.0:
        raise ValueError(f"grid half-width must be positive, got {half_width}")
    if count < 16 or (count & (count - 1)) != 0:
        raise ValueError(f"grid node count must be a power of two >= 16, got {count}")
    return Grid(float(half_width), int(count))


@dataclass(frozen=True)
class GridFunction:
    """Non-negative sampled density on a grid.  Values are immutable."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.grid.count,):
            raise ValueError(f"expected {self.grid.count} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        if np.any(v < 0.0):
            raise ValueError("grid function values must be non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def boundary_small(self) -> bool:
        """Advisory: endpoint values below BOUNDARY_ADVISORY * peak (not fatal)."""
        peak = float(self.values.max())
        if peak == 0.0:
            return True
        return max(self.values[0], self.values[-1]) <= BOUNDARY_ADVISORY * peak


@dataclass(frozen=True)
class DensityStats:
    mass: float
    second_moment: float
    entropy: float
    fisher: float


def gaussian(grid: Grid, sigma: float) -> GridFunction:
    """Centered Gaussian density with variance ``sigma``, sampled at the nodes."""
    if sigma <= 0.0:
        raise ValueError(f"gaussian variance must be positive, got {sigma}")
    x = grid.nodes
    vals = np.exp(-x * x / (2.0 * sigma)) / math.sqrt(2.0 * math.pi * sigma)
    return GridFunction(grid, vals)


def mass(f: GridFunction) -> float:
    return float(f.grid.spacing * f.values.sum())


def lp_norm(f: GridFunction, r: float) -> float:
    """(h * sum v^r)^(1/r); max of the values for r = inf.

    Valid for any r > 0, including the quasi-norm range r < 1.
    """
    if r == math.inf:
        return float(f.values.max())
    if r <= 0.0:
        raise ValueError(f"norm exponent must be positive or inf, got {r}")
    return float((f.grid.spacing * np.sum(f.values**r)) ** (1.0 / r))


def second_moment(f: GridFunction) -> float:
    x = f.grid.nodes
    return float(f.grid.spacing * np.sum(x * x * f.values))


def shannon_entropy(f: GridFunction) -> float:
    """-h * sum v*log(v) with the convention 0*log(0) = 0."""
    if mass(f) <= 0.0:
        raise ValueError("entropy needs positive mass")
    v = f.values
    pos = v > ENTROPY_FLOOR
    return float(-f.grid.spacing * np.sum(v[pos] * np.log(v[pos])))


def fisher_information(f: GridFunction) -> float:
    """h * sum (f'_i)^2 / v_i with second-order central differences.

    Boundary nodes are excluded and nodes with v_i below
    FISHER_THRESHOLD * max(v) contribute zero, which keeps the quotient
    finite in Gaussian tails at an exponentially small cost.
    """
    if mass(f) <= 0.0:
        raise ValueError("fisher information needs positive mass")
    v = f.values
    h = f.grid.spacing
    deriv = (v[2:] - v[:-2]) / (2.0 * h)
    interior = v[1:-1]
    keep = interior > FISHER_THRESHOLD * v.max()
    return float(h * np.sum(deriv[keep] ** 2 / interior[keep]))


def entropy_power(f: GridFunction, d: int = 1) -> float:
    """exp(2 H_d / d) with H_d = d * H for the product-form d-dim extension.

    The d factors cancel, so the value matches the 1-D exp(2 H).
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return float(math.exp(2.0 * d * shannon_entropy(f) / d))


def dilate(f: GridFunction, a: float) -> GridFunction:
    """Exact dilation f(x) -> a*f(a*x): new grid with half-width L/a, values a*v.

    No interpolation: node i of the result is x_i/a, carrying a*values[i]
    exactly.  Downstream binary operations must regrid explicitly if they
    need matching grids.
    """
    if a <= 0.0:
        raise ValueError(f"dilation factor must be positive, got {a}")
    new_grid = Grid(f.grid.half_width / a, f.grid.count)
    return GridFunction(new_grid, a * f.values)


def stats(f: GridFunction) -> DensityStats:
    return DensityStats(
        mass=mass(f),
        second_moment=second_moment(f),
        entropy=shannon_entropy(f),
        fisher=fisher_information(f),
    )
