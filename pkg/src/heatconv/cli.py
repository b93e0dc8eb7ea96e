"""Command-line front end: config parsing, suite orchestration, CSV/JSON output.

Commands
--------
constants  print dual exponents, diffusion coefficients, and sharp constants
trace      run one suite and write its functional traces as CSV
verify     run the configured suites and write a JSON report

Exit codes: 0 all checks passed, 1 verification failure, 2 usage or
configuration error.  All outputs are deterministic functions of the
configuration (seeds included) and are written atomically.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .convolution import sup_convolve_n
from .functionals import ExponentSystem, Regime, dual_exponent, sharp_constant
from .grid import Grid, gaussian, make_grid, mass
from .heat import HeatInput, TimeGrid
from .verification import (
    TOLERANCES,
    FunctionalTrace,
    TestDensitySpec,
    VerificationReport,
    babenko_suite,
    blachman_suite,
    concavity_suite,
    dilation_invariance_suite,
    epi_suite,
    equality_case_suite,
    gaussian_closure_suite,
    merge_reports,
    oracle_equivalence_suite,
    power_pde_suite,
    trace_suite,
    two_bump_spec,
    young_suite,
)

DEFAULT_SEED = 20130916


class ConfigError(ValueError):
    """Malformed run configuration."""


@dataclass
class RunConfig:
    grid_half_width: float = 16.0
    grid_count: int = 2048
    time_start: float = 1e-3
    time_stop: float = 10.0
    time_count: int = 25
    limit_times: tuple = (1e2, 1e3)
    seed: int = DEFAULT_SEED
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCES))
    output_dir: str = "out"
    suites: list = field(default_factory=lambda: [dict(s) for s in DEFAULT_SUITES])

    def to_dict(self) -> dict:
        return {
            "grid": {"half_width": self.grid_half_width, "count": self.grid_count},
            "time_grid": {
                "start": self.time_start,
                "stop": self.time_stop,
                "count": self.time_count,
            },
            "limit_times": list(self.limit_times),
            "seed": self.seed,
            "tolerances": dict(self.tolerances),
            "output_dir": self.output_dir,
            "suites": [dict(s) for s in self.suites],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        try:
            known = {"grid", "time_grid", "limit_times", "seed", "tolerances",
                     "output_dir", "suites"}
            unknown = set(data) - known
            if unknown:
                raise ConfigError(f"unknown config keys: {sorted(unknown)}")
            cfg = cls(
                grid_half_width=float(data["grid"]["half_width"]),
                grid_count=int(data["grid"]["count"]),
                time_start=float(data["time_grid"]["start"]),
                time_stop=float(data["time_grid"]["stop"]),
                time_count=int(data["time_grid"]["count"]),
                limit_times=tuple(float(t) for t in data["limit_times"]),
                seed=int(data["seed"]),
                tolerances=dict(data["tolerances"]),
                output_dir=str(data["output_dir"]),
                suites=[dict(s) for s in data["suites"]],
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed configuration: {exc}") from exc
        for s in cfg.suites:
            if "name" not in s:
                raise ConfigError(f"suite entry without a name: {s}")
            if s["name"] not in SUITE_RUNNERS:
                raise ConfigError(f"unknown suite {s['name']!r}")
        return cfg

    def grid(self) -> Grid:
        return make_grid(self.grid_half_width, self.grid_count)

    def times(self) -> TimeGrid:
        return TimeGrid.log_spaced(self.time_start, self.time_stop, self.time_count)

    def tol(self, key: str) -> float:
        return float(self.tolerances.get(key, TOLERANCES[key]))


DEFAULT_SUITES = (
    {"name": "sup_young"},
    {"name": "norm_forward"},
    {"name": "norm_reverse"},
    {"name": "prekopa"},
    {"name": "entropy"},
    {"name": "epi"},
    {"name": "concavity"},
    {"name": "blachman"},
    {"name": "babenko"},
    {"name": "young_static"},
    {"name": "oracles"},
    {"name": "dilation"},
    {"name": "power_pde"},
    {"name": "closure"},
)


def default_config() -> RunConfig:
    return RunConfig()


# ---------------------------------------------------------------------------
# Suite runners (deterministic given the config)
# ---------------------------------------------------------------------------

def _mixture_inputs(cfg: RunConfig, system: ExponentSystem, offset: int):
    grid = cfg.grid()
    return [
        HeatInput(two_bump_spec(cfg.seed + offset + j).build(grid), k)
        for j, k in enumerate(system.kappas)
    ]


def _run_sup_young(cfg: RunConfig, params: dict):
    system = ExponentSystem(Regime.SUP, params.get("p", (1.5, 1.5, 1.5)))
    inputs = _mixture_inputs(cfg, system, offset=100)
    rep, tr = trace_suite(
        "sup_young", "sup", inputs, system, cfg.times(),
        mono_tol=cfg.tol("monotonicity"), gap_tol=cfg.tol("limit_gap"),
        limit_times=cfg.limit_times,
    )
    parts, traces = [rep], [tr]
    for scale in (1.0, 2.0):
        sys_c = ExponentSystem(Regime.SUP, system.exponents, scale=scale)
        rep_c, tr_c = equality_case_suite(
            f"sup_young_equality_c{scale:g}", "sup", sys_c, cfg.grid(), cfg.times(),
            flat_tol=cfg.tol("flatness"), limit_tol=cfg.tol("equality_limit"),
        )
        parts.append(rep_c)
        traces.append(tr_c)
    return [merge_reports("sup_young", parts)], traces


def _run_norm_forward(cfg: RunConfig, params: dict):
    system = ExponentSystem(
        Regime.FORWARD, params.get("p", (4.0 / 3.0, 4.0 / 3.0)), r=params.get("r", 2.0)
    )
    inputs = _mixture_inputs(cfg, system, offset=200)
    rep, tr = trace_suite(
        "norm_forward", "norm", inputs, system, cfg.times(),
        mono_tol=cfg.tol("monotonicity"), gap_tol=cfg.tol("limit_gap"),
        limit_times=cfg.limit_times,
    )
    return [rep], [tr]


def _run_norm_reverse(cfg: RunConfig, params: dict):
    system = ExponentSystem(
        Regime.REVERSE, params.get("p", (2.0 / 3.0, 2.0 / 3.0)), r=params.get("r", 0.5)
    )
    inputs = _mixture_inputs(cfg, system, offset=300)
    rep, tr = trace_suite(
        "norm_reverse", "norm", inputs, system, cfg.times(),
        mono_tol=cfg.tol("monotonicity"), gap_tol=cfg.tol("limit_gap"),
        limit_times=cfg.limit_times,
    )
    rep_eq, tr_eq = equality_case_suite(
        "norm_reverse_equality", "norm", system, cfg.grid(), cfg.times(),
        flat_tol=cfg.tol("flatness"), limit_tol=cfg.tol("equality_limit"),
    )
    return [merge_reports("norm_reverse", [rep, rep_eq])], [tr, tr_eq]


def _run_prekopa(cfg: RunConfig, params: dict):
    system = ExponentSystem(Regime.PREKOPA, params.get("q", (2.0, 2.0)))
    grid = cfg.grid()
    specs = [two_bump_spec(cfg.seed + 400 + j) for j in range(system.n)]
    inputs = [
        HeatInput(spec.build_compressed(grid, qj), kj)
        for spec, qj, kj in zip(specs, system.exponents, system.kappas)
    ]
    rep, tr = trace_suite(
        "prekopa", "supconv", inputs, system, cfg.times(),
        mono_tol=cfg.tol("monotonicity"), gap_tol=cfg.tol("limit_gap"),
        limit_times=cfg.limit_times,
    )
    rep_eq, tr_eq = equality_case_suite(
        "prekopa_equality", "supconv", system, grid, cfg.times(),
        flat_tol=cfg.tol("flatness"), limit_tol=cfg.tol("equality_limit"),
    )

    # direct two-density inequality: integral of the sup-convolution chain of
    # the pre-composed data dominates the product of the original masses
    margin_tol = cfg.tol("prekopa_margin")
    details = []
    worst = 0.0
    for k in range(int(params.get("pairs", 10))):
        pair = [two_bump_spec(cfg.seed + 450 + 2 * k + j) for j in range(2)]
        compressed = [
            s.build_compressed(grid, qj) for s, qj in zip(pair, system.exponents)
        ]
        lhs = mass(sup_convolve_n(compressed, system.powers))
        rhs = math.prod(
            mass(s.build(grid)) ** (1.0 / qj) for s, qj in zip(pair, system.exponents)
        )
        margin = lhs - rhs
        worst = max(worst, -margin)
        details.append({"check": "prekopa_direct", "pair": k, "margin": margin,
                        "tolerance": margin_tol, "passed": margin >= -margin_tol})
    direct = VerificationReport(
        suite="prekopa_direct", passed=worst <= margin_tol, direction=None,
        max_violation=worst, limit_gap=None, details=details,
    )
    return [merge_reports("prekopa", [rep, rep_eq, direct])], [tr, tr_eq]


def _run_entropy(cfg: RunConfig, params: dict):
    system = ExponentSystem(Regime.ENTROPY, params.get("gammas", (0.5, 0.5)))
    inputs = _mixture_inputs(cfg, system, offset=500)
    rep, tr = trace_suite(
        "entropy", "entropy", inputs, system, cfg.times(),
        mono_tol=cfg.tol("monotonicity"), gap_tol=cfg.tol("entropy_limit"),
        limit_times=cfg.limit_times,
    )
    rep_g, tr_g = trace_suite(
        "entropy_moment", "entropy_moment", inputs[:1], None, cfg.times(),
        direction="increasing",
        mono_tol=cfg.tol("monotonicity"), gap_tol=cfg.tol("entropy_limit"),
        limit_times=cfg.limit_times,
    )
    return [merge_reports("entropy", [rep, rep_g])], [tr, tr_g]


def _run_epi(cfg: RunConfig, params: dict):
    grid = cfg.grid()
    f = two_bump_spec(cfg.seed + 600).build(grid)
    g = TestDensitySpec("gaussian", {"sigma": 1.0}).build(grid)
    rep = epi_suite(
        f, g,
        tol_gap=cfg.tol("epi_gap"), tol_value=cfg.tol("epi_value"),
        tol_margin=cfg.tol("entropy_margin"),
    )
    g1 = TestDensitySpec("gaussian", {"sigma": 1.0}).build(grid)
    g2 = TestDensitySpec("gaussian", {"sigma": 2.0}).build(grid)
    rep_gauss = epi_suite(
        g1, g2,
        tol_gap=cfg.tol("epi_gap"), tol_value=cfg.tol("epi_value"),
        tol_margin=cfg.tol("entropy_margin"),
    )
    return [merge_reports("epi", [rep, rep_gauss])], []


def _run_concavity(cfg: RunConfig, params: dict):
    grid = cfg.grid()
    times = TimeGrid.uniform(0.05, 2.05, 41)
    gauss = concavity_suite(
        HeatInput(gaussian(grid, 1.0), params.get("kappa", 0.5)), times,
        tol_band=cfg.tol("concavity_gaussian"),
    )
    mix = concavity_suite(
        HeatInput(two_bump_spec(cfg.seed + 700).build(grid), params.get("kappa", 0.5)),
        times, tol_band=cfg.tol("concavity_band"),
    )
    return [merge_reports("concavity", [gauss, mix])], []


def _run_blachman(cfg: RunConfig, params: dict):
    grid = cfg.grid()
    mixes = [
        TestDensitySpec(
            "seeded_random_mixture",
            {"components": 2, "center_range": (0.3, 1.2), "sigma_range": (0.4, 0.9)},
            cfg.seed + 800 + j,
        ).build(grid)
        for j in range(3)
    ]
    rng = np.random.default_rng(cfg.seed + 850)
    lam_grid = [rng.dirichlet(np.ones(3)) for _ in range(int(params.get("count", 5)))]
    lam_grid.append(np.ones(3) / 3.0)
    rep = blachman_suite(mixes, lam_grid, tol=cfg.tol("blachman"))

    pair = [gaussian(grid, 1.0), gaussian(grid, 1.0)]
    rep_eq = blachman_suite(pair, [(0.5, 0.5), (0.99, 0.01)], tol=cfg.tol("blachman"))
    return [merge_reports("blachman", [rep, rep_eq])], []


def _run_babenko(cfg: RunConfig, params: dict):
    grid = cfg.grid()
    reports = []
    mix = two_bump_spec(cfg.seed + 900).build(grid)
    gauss = TestDensitySpec("gaussian", {"sigma": 0.25}).build(grid)
    for q in params.get("exponents", (2, 4)):
        reports.append(babenko_suite(gauss, q, tol_ratio=cfg.tol("babenko_ratio"),
                                     tol_dual=cfg.tol("babenko_dual")))
        reports.append(babenko_suite(mix, q, tol_ratio=cfg.tol("babenko_ratio"),
                                     tol_dual=cfg.tol("babenko_dual")))
    return [merge_reports("babenko", reports)], []


def _run_young_static(cfg: RunConfig, params: dict):
    grid = cfg.grid()
    reports = []
    # Gaussian extremals: variances 1/|p'| make the ratio 1
    for p, q, r in ((4.0 / 3.0, 4.0 / 3.0, 2.0), (2.0 / 3.0, 2.0 / 3.0, 0.5)):
        f = gaussian(grid, 1.0 / abs(dual_exponent(p)))
        g = gaussian(grid, 1.0 / abs(dual_exponent(q)))
        reports.append(young_suite(f, g, p, q, r, tol=cfg.tol("blachman")))
    f = two_bump_spec(cfg.seed + 950).build(grid)
    g = two_bump_spec(cfg.seed + 951).build(grid)
    reports.append(young_suite(f, g, 4.0 / 3.0, 4.0 / 3.0, 2.0, tol=cfg.tol("blachman")))
    reports.append(young_suite(f, g, 2.0 / 3.0, 2.0 / 3.0, 0.5, tol=cfg.tol("blachman")))
    return [merge_reports("young_static", reports)], []


def _run_oracles(cfg: RunConfig, params: dict):
    return [oracle_equivalence_suite(cfg.seed + 1000, tol=cfg.tol("oracle"))], []


def _run_dilation(cfg: RunConfig, params: dict):
    return [dilation_invariance_suite(cfg.seed + 1100, tol=cfg.tol("dilation"))], []


def _run_power_pde(cfg: RunConfig, params: dict):
    return [power_pde_suite(tuple(params.get("alphas", (0.5, 1.0, 2.0))),
                            tol=cfg.tol("power_pde"))], []


def _run_closure(cfg: RunConfig, params: dict):
    # powered kernels must stay inside the domain: std sqrt(2 kappa t/alpha) << L
    times = TimeGrid(np.array([0.125, 0.25, 0.5]))
    grid = cfg.grid()
    reports = [
        gaussian_closure_suite(
            ExponentSystem(Regime.SUP, (2.0, 2.0)), (1.0, 2.0), times, grid,
            tol_match=cfg.tol("closure_match"), tol_mono=cfg.tol("monotonicity"),
        ),
        gaussian_closure_suite(
            ExponentSystem(Regime.SUP, (1.5, 1.5, 1.5)), (0.5, 1.0, 1.5), times, grid,
            tol_match=cfg.tol("closure_match"), tol_mono=cfg.tol("monotonicity"),
        ),
    ]
    return [merge_reports("closure", reports)], []


SUITE_RUNNERS = {
    "sup_young": _run_sup_young,
    "norm_forward": _run_norm_forward,
    "norm_reverse": _run_norm_reverse,
    "prekopa": _run_prekopa,
    "entropy": _run_entropy,
    "epi": _run_epi,
    "concavity": _run_concavity,
    "blachman": _run_blachman,
    "babenko": _run_babenko,
    "young_static": _run_young_static,
    "oracles": _run_oracles,
    "dilation": _run_dilation,
    "power_pde": _run_power_pde,
    "closure": _run_closure,
}


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def trace_csv(tr: FunctionalTrace) -> str:
    lines = ["t,value,analytic_limit"]
    limit = "" if tr.analytic_limit is None else _fmt(tr.analytic_limit)
    for t, v in zip(tr.times, tr.values):
        lines.append(f"{_fmt(t)},{_fmt(v)},{limit}")
    return "\n".join(lines) + "\n"


def report_json(reports: list, cfg: RunConfig) -> str:
    doc = {
        "passed": all(r.passed for r in reports),
        "suites": [r.to_dict() for r in reports],
        "config": cfg.to_dict(),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_constants(args) -> int:
    header = f"{'p':>12} {'dual':>12} {'kappa':>12} {'C_p^d':>20}"
    print(header)
    print("-" * len(header))
    for raw in args.p:
        p = math.inf if raw in ("inf", "oo") else float(raw)
        try:
            pd = dual_exponent(p)
            c = sharp_constant(p, args.d)
        except ValueError as exc:
            print(f"invalid exponent {raw!r}: {exc}", file=sys.stderr)
            return 2
        kappa = 0.0 if p == math.inf or pd == math.inf else 1.0 / (p * abs(pd))
        flag = "  degenerate" if kappa == 0.0 else ""
        print(f"{p:>12g} {pd:>12g} {kappa:>12g} {c:>20.12g}{flag}")
    return 0


def _load_config(args) -> RunConfig:
    if args.config:
        with open(args.config) as handle:
            cfg = RunConfig.from_dict(json.load(handle))
    else:
        cfg = default_config()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out:
        cfg.output_dir = args.out
    return cfg


def _run_suites(cfg: RunConfig, only: str | None):
    names = [s["name"] for s in cfg.suites]
    if only is not None and only not in names:
        raise ConfigError(f"suite {only!r} is not configured (have {names})")
    reports, traces = [], []
    for suite in cfg.suites:
        if only is not None and suite["name"] != only:
            continue
        runner = SUITE_RUNNERS[suite["name"]]
        reps, trs = runner(cfg, suite)
        reports.extend(reps)
        traces.extend(trs)
    return reports, traces


def cmd_trace(args) -> int:
    try:
        cfg = _load_config(args)
        reports, traces = _run_suites(cfg, args.suite)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    if not traces:
        print(f"suite {args.suite!r} produces no traces", file=sys.stderr)
        return 2
    summary = []
    for tr in traces:
        path = os.path.join(cfg.output_dir, f"{tr.label}_trace.csv")
        _atomic_write(path, trace_csv(tr))
        summary.append(
            f"{tr.label}: first={tr.values[0]:.9g} last={tr.values[-1]:.9g} "
            f"limit={tr.analytic_limit:.9g} final={tr.final_value:.9g}"
        )
        print(f"wrote {path}")
    _atomic_write(os.path.join(cfg.output_dir, "summary.txt"), "\n".join(summary) + "\n")
    return 0


def cmd_verify(args) -> int:
    try:
        cfg = _load_config(args)
        reports, _ = _run_suites(cfg, args.suite)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    path = os.path.join(cfg.output_dir, "report.json")
    _atomic_write(path, report_json(reports, cfg))
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        gap = "-" if rep.limit_gap is None else f"{rep.limit_gap:.3g}"
        print(f"{status} {rep.suite}: max_violation={rep.max_violation:.3g} limit_gap={gap}")
    print(f"wrote {path}")
    return 0 if all(r.passed for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heatconv",
        description="Verify monotone heat-flow functionals and their sharp limits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_const = sub.add_parser("constants", help="print sharp-constant table")
    p_const.add_argument("p", nargs="+", help="exponents (numbers or 'inf')")
    p_const.add_argument("--d", type=int, default=1, help="dimension parameter")
    p_const.set_defaults(func=cmd_constants)

    for name, fn, needs_suite in (
        ("trace", cmd_trace, True),
        ("verify", cmd_verify, False),
    ):
        p_cmd = sub.add_parser(name)
        p_cmd.add_argument("--config", help="JSON config path (defaults built in)")
        p_cmd.add_argument("--out", help="output directory override")
        p_cmd.add_argument("--seed", type=int, help="seed override")
        if needs_suite:
            p_cmd.add_argument("--suite", required=True, help="suite to trace")
        else:
            p_cmd.add_argument("--suite", help="run a single suite")
        p_cmd.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
