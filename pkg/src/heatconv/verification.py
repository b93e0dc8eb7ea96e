"""Verification suites: traces, monotonicity/flatness/limit checks, and the
inequality test batteries (Young forward/reverse, Babenko, entropy power,
concavity, Fisher subadditivity, Gaussian closure).

Every suite is a deterministic function of its density specs (seeds
included), the grid, the time grid, and the tolerance table; reports are
byte-identical across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .convolution import (
    convolve,
    convolve_n,
    fourier_transform,
    power,
    sup_convolve_n,
)
from .functionals import (
    ExponentSystem,
    FunctionalTrace,
    Regime,
    dual_exponent,
    entropy_functional,
    entropy_functional_limit,
    entropy_moment_functional,
    entropy_moment_limit,
    epi_gap,
    lieb_bound,
    lieb_bound_maximizer,
    lieb_bound_maximum,
    norm_functional,
    norm_functional_limit,
    sharp_constant,
    sup_functional,
    sup_functional_limit,
    supconv_functional,
    supconv_functional_limit,
)
from .grid import (
    Grid,
    GridFunction,
    dilate,
    entropy_power,
    fisher_information,
    gaussian,
    lp_norm,
    make_grid,
    mass,
    shannon_entropy,
)
from .heat import HeatInput, TimeGrid, evolve, power_pde_residual

# Desk-scale defaults: every suite finishes in well under a minute.
DEFAULT_HALF_WIDTH = 16.0
DEFAULT_COUNT = 2048
DEFAULT_LIMIT_TIMES = (1e2, 1e3)

# Per-suite tolerance table.  Separates O(h^2) quadrature error, the O(h)
# sup-convolution bias, and finite-time truncation of the limits.
TOLERANCES = {
    "monotonicity": 1e-6,
    "flatness": 1e-4,
    "limit_gap": 2e-2,
    "oracle": 1e-10,
    "equality_limit": 1e-3,
    "entropy_limit": 1e-2,
    "entropy_margin": 1e-4,
    "prekopa_margin": 1e-6,
    "epi_gap": 1e-3,
    "epi_value": 1e-6,
    "blachman": 1e-3,
    "babenko_ratio": 1e-3,
    "babenko_dual": 1e-6,
    "concavity_gaussian": 1e-3,
    "concavity_band": 1e-4,
    "power_pde": 1e-3,
    "closure_match": 1e-6,
    "dilation": 1e-10,
}


def default_grid() -> Grid:
    return make_grid(DEFAULT_HALF_WIDTH, DEFAULT_COUNT)


def default_time_grid() -> TimeGrid:
    # log spacing: traces move fastest near t = 0
    return TimeGrid.log_spaced(1e-3, 10.0, 25)


def _py(value):
    """Numpy scalars/containers to plain Python, for JSON emission."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_py(v) for v in value]
    if isinstance(value, dict):
        return {k: _py(v) for k, v in value.items()}
    return value


@dataclass(frozen=True)
class VerificationReport:
    suite: str
    passed: bool
    direction: str | None
    max_violation: float
    limit_gap: float | None
    details: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": bool(self.passed),
            "direction": self.direction,
            "max_violation": float(self.max_violation),
            "limit_gap": None if self.limit_gap is None else float(self.limit_gap),
            "details": _py(self.details),
        }


def merge_reports(suite: str, parts: Sequence[VerificationReport]) -> VerificationReport:
    """Combine per-check reports into one suite-level verdict."""
    details = []
    for p in parts:
        details.extend(p.details)
    gaps = [p.limit_gap for p in parts if p.limit_gap is not None]
    return VerificationReport(
        suite=suite,
        passed=all(p.passed for p in parts),
        direction=next((p.direction for p in parts if p.direction is not None), None),
        max_violation=max((p.max_violation for p in parts), default=0.0),
        limit_gap=max(gaps) if gaps else None,
        details=details,
    )


# ---------------------------------------------------------------------------
# Test densities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestDensitySpec:
    """Seeded recipe for a unit-mass test density.

    kinds: gaussian(sigma) | gaussian_mixture(weights, centers, sigmas)
    | step(left, right) | bump(center, radius)
    | seeded_random_mixture(components, center_range, sigma_range, symmetric)

    ``symmetric`` mirrors every drawn component about 0, which pins the peak
    of any convolution chain to the central node; components=1 with
    symmetric=True is the seeded two-bump mixture used by the trace suites.
    """

    __test__ = False  # not a pytest class, despite the name

    kind: str
    params: dict
    seed: int | None = None

    def raw(self, x: np.ndarray) -> np.ndarray:
        """Un-normalized analytic values at arbitrary points (seed-stable)."""
        p = self.params
        if self.kind == "gaussian":
            return _bell(x, 0.0, p["sigma"])
        if self.kind == "gaussian_mixture":
            vals = np.zeros_like(x)
            for w, c, s in zip(p["weights"], p["centers"], p["sigmas"]):
                vals += w * _bell(x, c, s)
            return vals
        if self.kind == "step":
            return ((x >= p["left"]) & (x < p["right"])).astype(float)
        if self.kind == "bump":
            u = (x - p["center"]) / p["radius"]
            vals = np.zeros_like(x)
            inside = np.abs(u) < 1.0
            vals[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
            return vals
        if self.kind == "seeded_random_mixture":
            rng = np.random.default_rng(self.seed)
            vals = np.zeros_like(x)
            c_lo, c_hi = p.get("center_range", (0.5, 2.0))
            s_lo, s_hi = p.get("sigma_range", (0.3, 0.9))
            for _ in range(p.get("components", 2)):
                w = rng.uniform(0.5, 1.0)
                c = rng.uniform(c_lo, c_hi)
                s = rng.uniform(s_lo, s_hi)
                if p.get("symmetric", True):
                    vals += 0.5 * w * (_bell(x, c, s) + _bell(x, -c, s))
                else:
                    vals += w * _bell(x, rng.choice([-1.0, 1.0]) * c, s)
            return vals
        raise ValueError(f"unknown density kind {self.kind!r}")

    def build(self, grid: Grid) -> GridFunction:
        """Unit-mass density on ``grid`` (normalized by its Riemann mass)."""
        vals = self.raw(grid.nodes)
        total = grid.spacing * vals.sum()
        if total <= 0.0:
            raise ValueError(f"density spec {self.kind!r} produced zero mass")
        return GridFunction(grid, vals / total)

    def build_compressed(self, grid: Grid, factor: float) -> GridFunction:
        """The normalized density pre-composed with x -> factor*x, mass 1/factor.

        Same normalization constant as ``build``, so this is exactly
        g(factor*x) for the unit-mass g; no interpolation is involved since
        the recipe is analytic.
        """
        base = self.raw(grid.nodes)
        total = grid.spacing * base.sum()
        return GridFunction(grid, self.raw(factor * grid.nodes) / total)


def _bell(x: np.ndarray, center: float, sigma: float) -> np.ndarray:
    return np.exp(-((x - center) ** 2) / (2.0 * sigma)) / math.sqrt(2.0 * math.pi * sigma)


def two_bump_spec(seed: int) -> TestDensitySpec:
    return TestDensitySpec(
        "seeded_random_mixture",
        {"components": 1, "symmetric": True, "center_range": (0.5, 2.0),
         "sigma_range": (0.3, 0.9)},
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Traces and their reports
# ---------------------------------------------------------------------------

_TRACE_FUNCTIONALS = {
    "sup": (sup_functional, "increasing"),
    "norm": (norm_functional, None),  # direction depends on the regime
    "supconv": (supconv_functional, "decreasing"),
    "entropy": (entropy_functional, "decreasing"),
}


def expected_direction(functional: str, system: ExponentSystem | None) -> str:
    if functional == "norm":
        return "increasing" if system.regime is Regime.FORWARD else "decreasing"
    if functional == "entropy_moment":
        return "increasing"
    return _TRACE_FUNCTIONALS[functional][1]


def trace(
    functional: str,
    inputs: Sequence[HeatInput],
    system: ExponentSystem | None,
    times: TimeGrid,
    *,
    grid: Grid | None = None,
    limit_times: Sequence[float] = DEFAULT_LIMIT_TIMES,
    label: str | None = None,
) -> FunctionalTrace:
    """Evaluate one functional along the time grid and attach its limit.

    The limit is computed from measured (Riemann-sum) masses; the optional
    ``limit_times`` are evaluated through the self-similar rescaling, which
    stays accurate far beyond the grid-to-grid validity window.
    """
    masses = [mass(inp.initial) for inp in inputs]
    if functional == "entropy_moment":
        (inp,) = inputs
        evaluate = lambda t, rescaled: entropy_moment_functional(
            inp, t, rescaled=rescaled, grid=grid
        )
        analytic = entropy_moment_limit(d=1)
        label = label or "entropy_moment"
    else:
        fn, _ = _TRACE_FUNCTIONALS[functional]
        evaluate = lambda t, rescaled: fn(inputs, system, t, rescaled=rescaled, grid=grid)
        if functional == "sup":
            analytic = sup_functional_limit(masses, system)
        elif functional == "norm":
            analytic = norm_functional_limit(masses, system)
        elif functional == "supconv":
            analytic = supconv_functional_limit(masses, system)
        else:
            analytic = entropy_functional_limit(system)
        label = label or f"{functional}_{system.regime.value}_n{system.n}"
    values = np.array([evaluate(t, False) for t in times.times])
    lt = np.asarray(limit_times, dtype=np.float64)
    lv = np.array([evaluate(t, True) for t in lt])
    return FunctionalTrace(
        label=label,
        times=times.times,
        values=values,
        analytic_limit=analytic,
        limit_times=lt,
        limit_values=lv,
    )


def monotonicity_report(
    tr: FunctionalTrace, expected: str, tol_rel: float
) -> VerificationReport:
    """Largest wrong-direction step, normalized by the trace's value scale."""
    if len(tr.values) < 3:
        raise ValueError("monotonicity needs a trace of length >= 3")
    steps = np.diff(tr.values)
    scale = float(np.abs(tr.values).max()) or 1.0
    if expected == "increasing":
        worst = float(np.maximum(-steps, 0.0).max())
    elif expected == "decreasing":
        worst = float(np.maximum(steps, 0.0).max())
    elif expected == "constant":
        worst = float(np.abs(steps).max())
    else:
        raise ValueError(f"unknown direction {expected!r}")
    violation = worst / scale
    positive = steps[steps > 0.0] if expected == "increasing" else -steps[steps < 0.0]
    detail = {
        "check": f"{tr.label}:monotonicity",
        "direction": expected,
        "max_violation": violation,
        "min_forward_step": float(positive.min()) if len(positive) else 0.0,
        "tolerance": tol_rel,
        "passed": violation <= tol_rel,
    }
    return VerificationReport(
        suite=tr.label,
        passed=violation <= tol_rel,
        direction=expected,
        max_violation=violation,
        limit_gap=None,
        details=[detail],
    )


def limit_report(tr: FunctionalTrace, tol_rel: float) -> VerificationReport:
    """Relative gap between the last trace value and the analytic limit."""
    if tr.analytic_limit is None:
        raise ValueError("trace carries no analytic limit")
    gap = abs(tr.final_value - tr.analytic_limit) / abs(tr.analytic_limit)
    detail = {
        "check": f"{tr.label}:limit",
        "limit_gap": gap,
        "analytic_limit": tr.analytic_limit,
        "final_value": tr.final_value,
        "tolerance": tol_rel,
        "passed": gap <= tol_rel,
    }
    return VerificationReport(
        suite=tr.label,
        passed=gap <= tol_rel,
        direction=None,
        max_violation=0.0,
        limit_gap=gap,
        details=[detail],
    )


def trace_suite(
    name: str,
    functional: str,
    inputs: Sequence[HeatInput],
    system: ExponentSystem | None,
    times: TimeGrid,
    *,
    direction: str | None = None,
    mono_tol: float | None = None,
    gap_tol: float | None = None,
    grid: Grid | None = None,
    limit_times: Sequence[float] = DEFAULT_LIMIT_TIMES,
) -> tuple[VerificationReport, FunctionalTrace]:
    """Trace + monotonicity report + limit report, merged under ``name``."""
    tr = trace(
        functional, inputs, system, times, grid=grid, limit_times=limit_times, label=name
    )
    direction = direction or expected_direction(functional, system)
    mono = monotonicity_report(tr, direction, mono_tol or TOLERANCES["monotonicity"])
    lim = limit_report(tr, gap_tol or TOLERANCES["limit_gap"])
    return merge_reports(name, [mono, lim]), tr


# ---------------------------------------------------------------------------
# Inequality suites
# ---------------------------------------------------------------------------

def young_suite(
    f: GridFunction,
    g: GridFunction,
    p: float,
    q: float,
    r: float,
    tol: float = TOLERANCES["blachman"],
) -> VerificationReport:
    """Sharp Young inequality |f*g|_r vs C_p C_q C_{r'} |f|_p |g|_q.

    Forward exponents check <=, the reverse range (all below 1) checks >=.
    The ratio of the two sides is reported; Gaussian extremals give 1.
    """
    if abs(1.0 / p + 1.0 / q - 1.0 - 1.0 / r) > 1e-12:
        raise ValueError("Young exponents must satisfy 1/p + 1/q = 1 + 1/r")
    if p >= 1.0 and q >= 1.0 and r >= 1.0:
        forward = True
    elif p < 1.0 and q < 1.0 and r < 1.0:
        forward = False
    else:
        raise ValueError("exponents must be all >= 1 (forward) or all < 1 (reverse)")
    lhs = lp_norm(convolve(f, g), r)
    const = sharp_constant(p) * sharp_constant(q) * sharp_constant(_rdual(r))
    rhs = const * lp_norm(f, p) * lp_norm(g, q)
    violation = max(0.0, lhs - rhs) if forward else max(0.0, rhs - lhs)
    detail = {
        "check": f"young_{'forward' if forward else 'reverse'}",
        "p": p, "q": q, "r": r,
        "ratio": lhs / rhs,
        "lhs": lhs, "rhs": rhs,
        "tolerance": tol,
        "passed": violation <= tol,
    }
    return VerificationReport(
        suite="young", passed=violation <= tol, direction=None,
        max_violation=violation, limit_gap=None, details=[detail],
    )


def _rdual(r: float) -> float:
    if r == 1.0:
        return math.inf
    return r / (r - 1.0)


def babenko_suite(
    f: GridFunction,
    q_even: int,
    tol_ratio: float = TOLERANCES["babenko_ratio"],
    tol_dual: float = TOLERANCES["babenko_dual"],
) -> VerificationReport:
    """Hausdorff-Young at even exponents via the L^2 norm of self-convolutions.

    The left side (integral |Ff|^{2n})^(1/2), n = q/2, is computed twice --
    from the quadrature transform and as the L^2 norm of the n-fold
    self-convolution -- and both must agree before the inequality against
    C_{q'}^n |f|_{q'}^n is asserted.
    """
    if q_even not in (2, 4, 6, 8):
        raise ValueError(f"even exponent in {{2,4,6,8}} required, got {q_even}")
    n = q_even // 2
    spec = fourier_transform(f)
    cap = f.grid.count / (4.0 * f.grid.half_width)
    band = np.abs(spec.freqs) <= cap
    lhs_spectral = float(
        math.sqrt(spec.spacing * np.sum(np.abs(spec.values[band]) ** (2 * n)))
    )
    lhs_conv = lp_norm(convolve_n([f] * n), 2.0)
    dual_diff = abs(lhs_spectral - lhs_conv) / lhs_conv
    q_dual = dual_exponent(float(q_even))
    rhs = sharp_constant(q_dual) ** n * lp_norm(f, q_dual) ** n
    ratio = lhs_spectral / rhs
    violation = max(0.0, ratio - 1.0)
    passed = dual_diff <= tol_dual and violation <= tol_ratio
    detail = {
        "check": f"babenko_q{q_even}",
        "ratio": ratio,
        "dual_path_diff": dual_diff,
        "lhs_spectral": lhs_spectral,
        "lhs_convolution": lhs_conv,
        "rhs": rhs,
        "tolerance": tol_ratio,
        "passed": passed,
    }
    return VerificationReport(
        suite="babenko", passed=passed, direction=None,
        max_violation=max(violation, dual_diff), limit_gap=None, details=[detail],
    )


def epi_suite(
    f: GridFunction,
    g: GridFunction,
    d: int = 1,
    a_count: int = 199,
    tol_gap: float = TOLERANCES["epi_gap"],
    tol_value: float = TOLERANCES["epi_value"],
    tol_margin: float = TOLERANCES["entropy_margin"],
) -> VerificationReport:
    """Entropy power inequality battery.

    (i) N(f*g) >= N(f) + N(g); (ii) H(f*g) dominates the two-density entropy
    bound on a weight grid; (iii) the grid argmax sits at the closed-form
    maximizer and matches the closed-form maximum; (iv) the three-density
    bound holds on a simplex grid, with f*g itself as the third density.
    """
    h_f, h_g = shannon_entropy(f), shannon_entropy(g)
    fg = convolve(f, g)
    h_fg = shannon_entropy(fg)
    details = []

    gap = epi_gap(f, g, d)
    scale = entropy_power(f, d) + entropy_power(g, d)
    details.append({
        "check": "epi_gap", "gap": gap, "scale": scale,
        "tolerance": tol_gap, "passed": gap >= -tol_gap * scale,
    })

    a_grid = np.arange(1, a_count + 1) / (a_count + 1.0)
    bounds = np.array([lieb_bound(h_f, h_g, a, d) for a in a_grid])
    worst_margin = float((h_fg - bounds).min())
    details.append({
        "check": "entropy_bound_grid", "worst_margin": worst_margin,
        "tolerance": tol_margin, "passed": worst_margin >= -tol_margin,
    })

    a_star = lieb_bound_maximizer(h_f, h_g, d)
    k_max = int(np.argmax(bounds))
    step = a_grid[1] - a_grid[0]
    argmax_off = abs(a_grid[k_max] - a_star)
    value_err = abs(lieb_bound(h_f, h_g, a_star, d) - lieb_bound_maximum(h_f, h_g, d))
    details.append({
        "check": "maximizer", "argmax_offset": float(argmax_off),
        "grid_step": float(step), "value_error": value_err,
        "tolerance": tol_value,
        "passed": argmax_off <= step + 1e-15 and value_err <= tol_value,
    })

    triple = [f, g, fg]
    h_triple = [h_f, h_g, h_fg]
    h_conv3 = shannon_entropy(convolve_n(triple))
    worst3 = math.inf
    for gamma in _simplex_grid(3, 0.1):
        bound = sum(gj * hj for gj, hj in zip(gamma, h_triple))
        bound -= 0.5 * d * sum(gj * math.log(gj) for gj in gamma)
        worst3 = min(worst3, h_conv3 - bound)
    details.append({
        "check": "entropy_bound_triple", "worst_margin": worst3,
        "tolerance": tol_margin, "passed": worst3 >= -tol_margin,
    })

    return VerificationReport(
        suite="epi", passed=all(x["passed"] for x in details), direction=None,
        max_violation=max(0.0, -worst_margin, -worst3), limit_gap=None, details=details,
    )


def _simplex_grid(n: int, step: float):
    ticks = np.arange(step, 1.0, step)
    if n != 3:
        raise ValueError("simplex grid implemented for n = 3")
    for g1 in ticks:
        for g2 in ticks:
            g3 = 1.0 - g1 - g2
            if g3 >= step - 1e-12:
                yield (float(g1), float(g2), float(g3))


def concavity_suite(
    inp: HeatInput,
    times: TimeGrid,
    tol_band: float = TOLERANCES["concavity_band"],
) -> VerificationReport:
    """Second differences of the entropy power along the flow are <= 0.

    Gaussian flows give an exactly linear entropy power, so their second
    differences vanish to quadrature accuracy (reported as ``max_abs``).
    """
    times.uniform_spacing  # raises on a non-uniform grid
    n_vals = np.array([entropy_power(evolve(inp, t)) for t in times.times])
    second = n_vals[2:] - 2.0 * n_vals[1:-1] + n_vals[:-2]
    scale = float(np.abs(n_vals).max())
    worst = float(second.max()) / scale
    detail = {
        "check": "entropy_power_concavity",
        "max_second_difference": worst,
        "max_abs_second_difference": float(np.abs(second).max()) / scale,
        "tolerance": tol_band,
        "passed": worst <= tol_band,
    }
    return VerificationReport(
        suite="concavity", passed=worst <= tol_band, direction=None,
        max_violation=max(0.0, worst), limit_gap=None, details=[detail],
    )


def blachman_suite(
    inputs: Sequence[GridFunction],
    lambda_grid: Sequence[Sequence[float]],
    tol: float = TOLERANCES["blachman"],
) -> VerificationReport:
    """Fisher information of a convolution vs convex-square combinations.

    I(f_1 * ... * f_n) <= sum lambda_j^2 I(f_j) for every convex weight
    vector; equality at the Gaussian-optimal weights.
    """
    lhs = fisher_information(convolve_n(list(inputs)))
    fishers = [fisher_information(f) for f in inputs]
    details = []
    worst = 0.0
    for lam in lambda_grid:
        if abs(sum(lam) - 1.0) > 1e-12 or any(l <= 0.0 for l in lam):
            raise ValueError(f"weights must be positive and sum to 1, got {lam}")
        rhs = sum(l * l * i for l, i in zip(lam, fishers))
        margin = rhs - lhs
        worst = max(worst, -margin)
        details.append({
            "check": "fisher_subadditivity",
            "weights": [float(l) for l in lam],
            "margin": margin,
            "tolerance": tol,
            "passed": margin >= -tol,
        })
    return VerificationReport(
        suite="blachman", passed=worst <= tol, direction=None,
        max_violation=worst, limit_gap=None, details=details,
    )


def gaussian_closure_suite(
    system: ExponentSystem,
    kappas: Sequence[float],
    times: TimeGrid,
    grid: Grid,
    tol_match: float = TOLERANCES["closure_match"],
    tol_mono: float = TOLERANCES["monotonicity"],
) -> VerificationReport:
    """Fundamental-solution chains against their closed form.

    With exponents summing to n-1, the chain of powered heat kernels equals
    a time-independent constant times exp(-x^2 / (4 St)), S = sum kappa/alpha,
    for any diffusion coefficients; it is pointwise non-decreasing in t.
    """
    alphas = system.powers
    if abs(sum(alphas) - (system.n - 1.0)) > 1e-12:
        raise ValueError("closure requires the powers to sum to n-1")
    if len(kappas) != system.n:
        raise ValueError(f"expected {system.n} diffusion coefficients")
    big_s = sum(k / a for k, a in zip(kappas, alphas))
    const = 1.0 / math.sqrt(4.0 * math.pi * big_s)
    for k, a in zip(kappas, alphas):
        const *= (4.0 * math.pi * k) ** (-a / 2.0) * math.sqrt(4.0 * math.pi * k / a)

    worst_match = 0.0
    previous = None
    worst_step = 0.0
    for t in times.times:
        chain = convolve_n(
            [power(gaussian(grid, 2.0 * k * t), a) for k, a in zip(kappas, alphas)]
        )
        x = chain.grid.nodes
        exact = const * np.exp(-x * x / (4.0 * big_s * t))
        worst_match = max(worst_match, float(np.abs(chain.values - exact).max()) / const)
        if previous is not None:
            worst_step = max(worst_step, float((previous - chain.values).max()) / const)
        previous = chain.values
    passed = worst_match <= tol_match and worst_step <= tol_mono
    detail = {
        "check": "gaussian_closure",
        "kappas": [float(k) for k in kappas],
        "max_closed_form_error": worst_match,
        "max_pointwise_decrease": worst_step,
        "tolerance": tol_match,
        "passed": passed,
    }
    return VerificationReport(
        suite="gaussian_closure", passed=passed, direction="increasing",
        max_violation=max(worst_match, worst_step), limit_gap=None, details=[detail],
    )


# ---------------------------------------------------------------------------
# Cross-path oracles, dilation invariance, power-PDE residual
# ---------------------------------------------------------------------------

def _exhaustive_supconv3(fs: Sequence[GridFunction], powers: Sequence[float]) -> np.ndarray:
    """Brute-force triple sup-convolution by direct index enumeration.

    Independent of the pairwise fold: every (a, b) index pair is visited and
    the third factor handled as a vector, out[a+b+c] = max f1^w1[a] f2^w2[b] f3^w3[c].
    """
    v1, v2, v3 = (f.values ** w for f, w in zip(fs, powers))
    n1, n2, n3 = len(v1), len(v2), len(v3)
    out = np.zeros(n1 + n2 + n3 - 2)
    for a in range(n1):
        if v1[a] == 0.0:
            continue
        for b in range(n2):
            prod = v1[a] * v2[b]
            if prod > 0.0:
                np.maximum(out[a + b : a + b + n3], prod * v3, out=out[a + b : a + b + n3])
    return out


def oracle_equivalence_suite(seed: int, tol: float = TOLERANCES["oracle"]) -> VerificationReport:
    """Fast paths against independent slow paths.

    FFT convolution vs direct O(N^2) summation, pairwise sup-convolution vs
    exhaustive triple enumeration, and the semigroup composition identity.
    """
    details = []

    grid_s = make_grid(8.0, 512)
    f = TestDensitySpec("seeded_random_mixture", {"components": 2}, seed).build(grid_s)
    g = TestDensitySpec("seeded_random_mixture", {"components": 2}, seed + 1).build(grid_s)
    fast = convolve(f, g).values
    direct = np.zeros_like(fast)
    direct[:-1] = grid_s.spacing * np.convolve(f.values, g.values)
    conv_err = float(np.abs(fast - direct).max()) / float(direct.max())
    details.append({"check": "convolution_vs_direct", "error": conv_err,
                    "tolerance": tol, "passed": conv_err <= tol})

    grid_t = make_grid(4.0, 128)
    fs = [
        TestDensitySpec(
            "seeded_random_mixture",
            {"components": 2, "center_range": (0.2, 1.0), "sigma_range": (0.1, 0.3)},
            seed + 10 + j,
        ).build(grid_t)
        for j in range(3)
    ]
    powers = (1.0 / 3.0,) * 3
    fold = sup_convolve_n(fs, powers).values
    brute = _exhaustive_supconv3(fs, powers)
    sup_err = float(np.abs(fold[: len(brute)] - brute).max()) / float(brute.max())
    details.append({"check": "supconv_vs_exhaustive", "error": sup_err,
                    "tolerance": tol, "passed": sup_err <= tol})

    grid = default_grid()
    mix = TestDensitySpec("seeded_random_mixture", {"components": 2}, seed + 20).build(grid)
    inp = HeatInput(mix, 0.5)
    one_step = evolve(inp, 1.5).values
    two_step = evolve(HeatInput(evolve(inp, 0.5), 0.5), 1.0).values
    semi_err = float(np.abs(one_step - two_step).max()) / float(one_step.max())
    semi_tol = 1e-8
    details.append({"check": "semigroup_composition", "error": semi_err,
                    "tolerance": semi_tol, "passed": semi_err <= semi_tol})

    return VerificationReport(
        suite="oracles", passed=all(d["passed"] for d in details), direction=None,
        max_violation=max(d["error"] for d in details), limit_gap=None, details=details,
    )


def dilation_invariance_suite(
    seed: int,
    factors: Sequence[float] = (0.5, 2.0),
    tol: float = TOLERANCES["dilation"],
) -> VerificationReport:
    """All five functionals under joint exact dilation of their initial data.

    The exact-dilate construction makes the discrete functionals invariant
    to floating-point accuracy, because values and spacings rescale by
    reciprocal powers that cancel under each regime's exponent condition.
    """
    grid = default_grid()
    mixes = [
        TestDensitySpec("seeded_random_mixture", {"components": 2}, seed + j).build(grid)
        for j in range(3)
    ]

    systems = {
        "sup": ExponentSystem(Regime.SUP, (1.5, 1.5, 1.5)),
        "norm_forward": ExponentSystem(Regime.FORWARD, (4.0 / 3.0, 4.0 / 3.0), r=2.0),
        "norm_reverse": ExponentSystem(Regime.REVERSE, (2.0 / 3.0, 2.0 / 3.0), r=0.5),
        "supconv": ExponentSystem(Regime.PREKOPA, (2.0, 2.0)),
        "entropy": ExponentSystem(Regime.ENTROPY, (0.5, 0.5)),
    }
    evaluators = {
        "sup": sup_functional,
        "norm_forward": norm_functional,
        "norm_reverse": norm_functional,
        "supconv": supconv_functional,
        "entropy": entropy_functional,
    }

    details = []
    worst = 0.0
    for name, system in systems.items():
        fs = mixes[: system.n]
        base_inputs = [HeatInput(f, k) for f, k in zip(fs, system.kappas)]
        base = evaluators[name](base_inputs, system, 0.0)
        for a in factors:
            dil_inputs = [HeatInput(dilate(f, a), k) for f, k in zip(fs, system.kappas)]
            dil = evaluators[name](dil_inputs, system, 0.0)
            err = abs(dil - base) / abs(base)
            worst = max(worst, err)
            details.append({"check": f"dilation_{name}", "factor": a, "error": err,
                            "tolerance": tol, "passed": err <= tol})

    base_inp = HeatInput(mixes[0], 0.5)
    gamma_base = entropy_moment_functional(base_inp, 0.0)
    for a in factors:
        dil = entropy_moment_functional(HeatInput(dilate(mixes[0], a), 0.5), 0.0)
        err = abs(dil - gamma_base) / abs(gamma_base)
        worst = max(worst, err)
        details.append({"check": "dilation_entropy_moment", "factor": a, "error": err,
                        "tolerance": tol, "passed": err <= tol})

    return VerificationReport(
        suite="dilation", passed=worst <= tol, direction=None,
        max_violation=worst, limit_gap=None, details=details,
    )


def power_pde_suite(
    alphas: Sequence[float] = (0.5, 1.0, 2.0),
    tol: float = TOLERANCES["power_pde"],
) -> VerificationReport:
    """Residual of the evolution equation for powers of a Gaussian flow."""
    grid = default_grid()
    inp = HeatInput(gaussian(grid, 1.0), 0.5)
    details = []
    for a in alphas:
        res = power_pde_residual(inp, a, t=0.5, dt=1e-3)
        details.append({"check": f"power_pde_alpha_{a:g}", "residual": res,
                        "tolerance": tol, "passed": res <= tol})
    worst = max(d["residual"] for d in details)
    return VerificationReport(
        suite="power_pde", passed=worst <= tol, direction=None,
        max_violation=worst, limit_gap=None, details=details,
    )


def equality_case_suite(
    name: str,
    functional: str,
    system: ExponentSystem,
    grid: Grid,
    times: TimeGrid,
    flat_tol: float | None = None,
    limit_tol: float | None = None,
) -> tuple[VerificationReport, FunctionalTrace]:
    """Gaussian equality case: flat trace whose value equals the limit.

    Initial data gaussian(kappa_j) with the regime's coefficients (any common
    multiple via ``system.scale``); both checkable clauses of the equality
    characterizations -- flatness and limit attainment at t = 0 -- are gated.
    """
    flat_tol = TOLERANCES["flatness"] if flat_tol is None else flat_tol
    limit_tol = TOLERANCES["equality_limit"] if limit_tol is None else limit_tol
    inputs = [HeatInput(gaussian(grid, k), k) for k in system.kappas]
    tr = trace(functional, inputs, system, times, label=name)
    flat = monotonicity_report(tr, "constant", flat_tol)
    lim = limit_report(tr, limit_tol)
    fn = _TRACE_FUNCTIONALS[functional][0]
    at_zero = fn(inputs, system, 0.0)
    zero_gap = abs(at_zero - tr.analytic_limit) / abs(tr.analytic_limit)
    zero_detail = {
        "check": f"{tr.label}:value_at_zero", "gap": zero_gap,
        "tolerance": limit_tol, "passed": zero_gap <= limit_tol,
    }
    zero_rep = VerificationReport(
        suite=tr.label, passed=zero_gap <= limit_tol, direction=None,
        max_violation=0.0, limit_gap=zero_gap, details=[zero_detail],
    )
    return merge_reports(name, [flat, lim, zero_rep]), tr
