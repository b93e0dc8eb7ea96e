"""Exponent systems, sharp constants, and the monotone heat-flow functionals.

Each functional pairs an exponent regime with the diffusion coefficients
that make it monotone along the heat flow, and has a closed-form large-time
limit determined by the sharp constants and the input masses:

===========  =========================  =========  ==========
regime       exponent condition         direction  kappa_j
===========  =========================  =========  ==========
sup          sum 1/p_j = n-1            up         1/(p_j p'_j)
forward      sum 1/p_j = n-1+1/r, r>1   up         1/(p_j p'_j)
reverse      sum 1/p_j = n-1+1/r, r<1   down       1/(p_j |p'_j|)
prekopa      sum 1/q_j = 1              down       1/q_j^2
entropy      sum g_j = 1                down       C g_j
===========  =========================  ==========  =========

All regimes admit a common positive multiple of the coefficients (exposed
as ``scale``); the Gaussian equality cases then have variances scale*kappa_j.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .convolution import convolve, convolve_n, heat_chain, power, sup_convolve_n
from .grid import (
    Grid,
    GridFunction,
    entropy_power,
    lp_norm,
    mass,
    second_moment,
    shannon_entropy,
)
from .heat import HeatInput, evolve, selfsimilar_rescale

SUM_TOL = 1e-12
MASS_TOL = 1e-6
KAPPA_RTOL = 1e-9


class Regime(enum.Enum):
    SUP = "sup"
    FORWARD = "forward"
    REVERSE = "reverse"
    PREKOPA = "prekopa"
    ENTROPY = "entropy"


def dual_exponent(p: float) -> float:
    """p' with 1/p + 1/p' = 1; negative for p in (0,1)."""
    if p <= 0.0:
        raise ValueError(f"exponent must be positive, got {p}")
    if p == 1.0:
        return math.inf
    if p == math.inf:
        return 1.0
    return p / (p - 1.0)


def _dual_any(p: float) -> float:
    # internal variant also defined for p < 0 (duals of r < 1)
    if p == 1.0:
        return math.inf
    if p == math.inf:
        return 1.0
    return p / (p - 1.0)


def sharp_constant(p: float, d: int = 1) -> float:
    """Sharp Young-type constant C_p^d, with C_p^2 = |p|^{1/p} / |p'|^{1/p'}.

    C_1 = C_inf = 1.  Gaussians attain it.  For p > 1 this is the classical
    forward constant; for 0 < p < 1 the reverse one; negative p (the dual of
    an r < 1) is evaluated by the same expression, which satisfies
    C_p * C_{p'} = 1 and reproduces the closed-form Gaussian limits.
    """
    if p == 0.0:
        raise ValueError("exponent must be nonzero")
    if p == 1.0 or p == math.inf:
        return 1.0
    pd = _dual_any(p)
    c_sq = abs(p) ** (1.0 / p) / abs(pd) ** (1.0 / pd)
    return float(math.sqrt(c_sq) ** d)


@dataclass(frozen=True)
class ExponentSystem:
    """Validated exponent vector with regime-specific derived coefficients.

    ``exponents`` holds p_j, q_j, or the entropy weights depending on the
    regime; ``r`` is required for forward/reverse, forbidden elsewhere.
    ``scale`` multiplies every diffusion coefficient (common-multiple
    freedom of the monotonicity statements).
    """

    regime: Regime
    exponents: tuple
    r: float | None = None
    d: int = 1
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(float(p) for p in self.exponents))
        p = self.exponents
        n = len(p)
        if n < 2:
            raise ValueError("an exponent system needs n >= 2")
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.scale <= 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")

        if self.regime is Regime.SUP:
            if self.r not in (None, math.inf):
                raise ValueError("sup regime has no finite norm exponent")
            if any(pj < 1.0 for pj in p):
                raise ValueError("sup regime needs p_j >= 1")
            self._check_sum(sum(1.0 / pj for pj in p), n - 1.0)
        elif self.regime is Regime.FORWARD:
            if self.r is None or not self.r > 1.0:
                raise ValueError("forward regime needs r > 1")
            if any(pj <= 1.0 for pj in p):
                raise ValueError("forward regime needs p_j > 1")
            self._check_sum(sum(1.0 / pj for pj in p), n - 1.0 + 1.0 / self.r)
        elif self.regime is Regime.REVERSE:
            if self.r is None or not 0.0 < self.r < 1.0:
                raise ValueError("reverse regime needs 0 < r < 1")
            if any(not 0.0 < pj < 1.0 for pj in p):
                raise ValueError("reverse regime needs 0 < p_j < 1")
            self._check_sum(sum(1.0 / pj for pj in p), n - 1.0 + 1.0 / self.r)
        elif self.regime is Regime.PREKOPA:
            if self.r is not None:
                raise ValueError("prekopa regime has no norm exponent")
            if any(pj <= 1.0 for pj in p):
                raise ValueError("prekopa regime needs q_j > 1")
            self._check_sum(sum(1.0 / pj for pj in p), 1.0)
        elif self.regime is Regime.ENTROPY:
            if self.r is not None:
                raise ValueError("entropy regime has no norm exponent")
            if any(pj <= 0.0 for pj in p):
                raise ValueError("entropy regime needs positive weights")
            self._check_sum(sum(p), 1.0)
        else:  # pragma: no cover
            raise ValueError(f"unknown regime {self.regime}")

    @staticmethod
    def _check_sum(observed: float, required: float) -> None:
        if abs(observed - required) > SUM_TOL:
            raise ValueError(
                f"exponent sum condition violated: {observed!r} != {required!r}"
            )

    @property
    def n(self) -> int:
        return len(self.exponents)

    @cached_property
    def duals(self) -> tuple:
        if self.regime in (Regime.PREKOPA, Regime.ENTROPY):
            raise ValueError(f"{self.regime.value} regime has no dual exponents")
        return tuple(dual_exponent(pj) for pj in self.exponents)

    @cached_property
    def powers(self) -> tuple:
        """Exponents alpha_j applied to the evolved densities."""
        if self.regime is Regime.ENTROPY:
            return (1.0,) * self.n
        return tuple(1.0 / pj for pj in self.exponents)

    @cached_property
    def kappas(self) -> tuple:
        if self.regime in (Regime.SUP, Regime.FORWARD, Regime.REVERSE):
            return tuple(
                self.scale / (pj * abs(dj)) if pj != math.inf else 0.0
                for pj, dj in zip(self.exponents, self.duals)
            )
        if self.regime is Regime.PREKOPA:
            return tuple(self.scale / (qj * qj) for qj in self.exponents)
        return tuple(self.scale * gj for gj in self.exponents)


@dataclass(frozen=True)
class FunctionalTrace:
    """Values of one functional along the flow, plus its analytic limit.

    ``limit_times``/``limit_values`` hold optional large-time evaluations
    computed through the self-similar rescaling; they refine the limit
    check without mixing evaluation paths inside the monotonicity trace.
    """

    label: str
    times: np.ndarray
    values: np.ndarray
    analytic_limit: float | None = None
    limit_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    limit_values: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have equal length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("trace values must be finite")

    @property
    def final_value(self) -> float:
        """Last available value, preferring the rescaled large-time tail."""
        if len(self.limit_values):
            return float(self.limit_values[-1])
        return float(self.values[-1])


def _check_regime(system: ExponentSystem, *allowed: Regime) -> None:
    if system.regime not in allowed:
        names = "/".join(r.value for r in allowed)
        raise ValueError(f"functional needs regime {names}, got {system.regime.value}")


def _check_kappas(inputs: Sequence[HeatInput], system: ExponentSystem) -> None:
    if len(inputs) != system.n:
        raise ValueError(f"expected {system.n} inputs, got {len(inputs)}")
    for inp, kj in zip(inputs, system.kappas):
        if not math.isclose(inp.kappa, kj, rel_tol=KAPPA_RTOL):
            raise ValueError(
                f"diffusion coefficient {inp.kappa!r} does not match the "
                f"regime assignment {kj!r}"
            )


def _profiles(
    inputs: Sequence[HeatInput], t: float, rescaled: bool, grid: Grid | None
) -> list[GridFunction]:
    if rescaled:
        g = grid if grid is not None else inputs[0].initial.grid
        return [selfsimilar_rescale(inp, t, g) for inp in inputs]
    return [evolve(inp, t) for inp in inputs]


def sup_functional(
    inputs: Sequence[HeatInput],
    system: ExponentSystem,
    t: float,
    *,
    rescaled: bool = False,
    grid: Grid | None = None,
) -> float:
    """Peak of the convolution chain of powered solutions (increasing in t)."""
    _check_regime(system, Regime.SUP)
    _check_kappas(inputs, system)
    if rescaled:
        chain = convolve_n(
            [power(u, a) for u, a in zip(_profiles(inputs, t, True, grid), system.powers)]
        )
    else:
        chain = heat_chain(inputs, system.powers, t)
    return float(chain.values.max())


def sup_functional_limit(masses: Sequence[float], system: ExponentSystem) -> float:
    """prod C_{p_j}^d * prod mass_j^{1/p_j}."""
    _check_regime(system, Regime.SUP)
    out = 1.0
    for m, pj in zip(masses, system.exponents):
        out *= sharp_constant(pj, system.d) * m ** (1.0 / pj)
    return out


def norm_functional(
    inputs: Sequence[HeatInput],
    system: ExponentSystem,
    t: float,
    *,
    rescaled: bool = False,
    grid: Grid | None = None,
) -> float:
    """L^r norm of the convolution chain (up in the forward regime, down in reverse)."""
    _check_regime(system, Regime.FORWARD, Regime.REVERSE)
    _check_kappas(inputs, system)
    profiles = _profiles(inputs, t, rescaled, grid)
    chain = convolve_n([power(u, a) for u, a in zip(profiles, system.powers)])
    return lp_norm(chain, system.r)


def norm_functional_limit(masses: Sequence[float], system: ExponentSystem) -> float:
    """C_{r'}^d * prod C_{p_j}^d * prod mass_j^{1/p_j}."""
    _check_regime(system, Regime.FORWARD, Regime.REVERSE)
    out = sharp_constant(_dual_any(system.r), system.d)
    for m, pj in zip(masses, system.exponents):
        out *= sharp_constant(pj, system.d) * m ** (1.0 / pj)
    return out


def supconv_functional(
    inputs: Sequence[HeatInput],
    system: ExponentSystem,
    t: float,
    *,
    rescaled: bool = False,
    grid: Grid | None = None,
) -> float:
    """Integral of the sup-convolution chain (decreasing in t)."""
    _check_regime(system, Regime.PREKOPA)
    _check_kappas(inputs, system)
    profiles = _profiles(inputs, t, rescaled, grid)
    return mass(sup_convolve_n(profiles, system.powers))


def supconv_functional_limit(masses: Sequence[float], system: ExponentSystem) -> float:
    """prod q_j^{d/q_j} * prod mass_j^{1/q_j}.

    This is the large-time value of the raw sup-convolution integral; the
    classical product-of-masses bound is recovered by feeding initial data
    pre-composed with x -> q_j x, whose masses absorb the q_j factors.
    """
    _check_regime(system, Regime.PREKOPA)
    out = 1.0
    for m, qj in zip(masses, system.exponents):
        out *= qj ** (system.d / qj) * m ** (1.0 / qj)
    return out


def entropy_functional(
    inputs: Sequence[HeatInput],
    system: ExponentSystem,
    t: float,
    *,
    rescaled: bool = False,
    grid: Grid | None = None,
) -> float:
    """Entropy of the plain convolution minus weighted entropies (decreasing)."""
    _check_regime(system, Regime.ENTROPY)
    _check_kappas(inputs, system)
    profiles = _profiles(inputs, t, rescaled, grid)
    h_chain = shannon_entropy(convolve_n(profiles))
    return h_chain - sum(
        gj * shannon_entropy(u) for gj, u in zip(system.exponents, profiles)
    )


def entropy_functional_limit(system: ExponentSystem) -> float:
    """-(d/2) * sum g_j log g_j."""
    _check_regime(system, Regime.ENTROPY)
    return float(
        -0.5 * system.d * sum(gj * math.log(gj) for gj in system.exponents)
    )


def entropy_moment_functional(
    inp: HeatInput,
    t: float,
    *,
    rescaled: bool = False,
    grid: Grid | None = None,
) -> float:
    """Scale-invariant entropy H(u(t)) - (1/2) log E(u(t)) of a unit-mass flow.

    Increasing in t; bounded above by the Gaussian value (1/2) log(2 pi e).
    """
    m = mass(inp.initial)
    if abs(m - 1.0) > MASS_TOL:
        raise ValueError(f"needs a probability density, mass is {m!r}")
    (u,) = _profiles([inp], t, rescaled, grid)
    return shannon_entropy(u) - 0.5 * math.log(second_moment(u))


def entropy_moment_limit(d: int = 1) -> float:
    """(d/2) log(2 pi e / d), attained by the unit Gaussian."""
    return 0.5 * d * math.log(2.0 * math.pi * math.e / d)


def lieb_bound(h_f: float, h_g: float, a: float, d: int = 1) -> float:
    """(1-a) H(f) + a H(g) - (d/2)(a log a + (1-a) log(1-a))."""
    if not 0.0 < a < 1.0:
        raise ValueError(f"weight must lie in (0,1), got {a}")
    return (1.0 - a) * h_f + a * h_g - 0.5 * d * (
        a * math.log(a) + (1.0 - a) * math.log(1.0 - a)
    )


def lieb_bound_maximizer(h_f: float, h_g: float, d: int = 1) -> float:
    """Weight maximizing the bound: exp(2(H_g-H_f)/d) / (1 + exp(2(H_g-H_f)/d))."""
    e = math.exp(2.0 * (h_g - h_f) / d)
    return e / (1.0 + e)


def lieb_bound_maximum(h_f: float, h_g: float, d: int = 1) -> float:
    """(d/2) log(exp(2 H_f/d) + exp(2 H_g/d)), the bound at its maximizer."""
    return 0.5 * d * math.log(math.exp(2.0 * h_f / d) + math.exp(2.0 * h_g / d))


def epi_gap(f: GridFunction, g: GridFunction, d: int = 1) -> float:
    """N(f*g) - N(f) - N(g); the entropy power inequality asserts >= 0."""
    for name, fn in (("first", f), ("second", g)):
        m = mass(fn)
        if abs(m - 1.0) > MASS_TOL:
            raise ValueError(f"{name} factor must have unit mass, got {m!r}")
    return (
        entropy_power(convolve(f, g), d)
        - entropy_power(f, d)
        - entropy_power(g, d)
    )
