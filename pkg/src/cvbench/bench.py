"""Matched-energy experiments: landscape, sweeps, polar report, self-checks."""

from __future__ import annotations

import dataclasses
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, export, fock, response
from ._accel import USE_NUMBA
from .matching import FAMILIES, MatchSolution, solve
from .statespec import StateSpec, build_escalating
from .wigner import (
    PhaseGrid,
    Setting,
    WindowWarning,
    convergence_probe,
    integrated_negativity,
    wigner_at_origin,
    wigner_field,
)

DEFAULT_TARGETS = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0)
DEFAULT_FAMILIES = FAMILIES + ("fock",)
# r values spanning 0 dB .. the 12.5 dB cap
INVARIANCE_RS = (0.0, 0.3, 0.69078, 1.0, 1.4391)
CAT_TARGETS = (2.0, 3.0, 4.0)


@dataclass(frozen=True)
class RunConfig:
    cutoff: int = 80
    grid_points: int = 201
    window: float = 7.0
    threshold: float = response.DEFAULT_THRESHOLD
    eps_max: float = response.DEFAULT_EPS_MAX
    eps_steps: int = response.DEFAULT_EPS_STEPS
    angles: int = response.DEFAULT_ANGLES
    targets: tuple[float, ...] = DEFAULT_TARGETS
    families: tuple[str, ...] = DEFAULT_FAMILIES
    polar_target: float = 3.0
    eta: float = 0.9
    out: str = "cvbench-out"
    format: str = "csv"

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(float(t) for t in self.targets))
        object.__setattr__(self, "families", tuple(self.families))
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must lie in (0, 1)")

    @property
    def grid(self) -> PhaseGrid:
        return PhaseGrid.square(self.window, self.grid_points)

    def provenance(self) -> dict:
        return {
            "grid": self.grid.describe(),
            "threshold": self.threshold,
            "eps_max": self.eps_max,
            "eps_steps": self.eps_steps,
        }

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["targets"] = list(self.targets)
        d["families"] = list(self.families)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def worker_count() -> int:
    env = os.environ.get("CVBENCH_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_jobs(func, items):
    """Ordered parallel map over a bounded thread pool."""
    items = list(items)
    workers = min(worker_count(), max(len(items), 1))
    if workers == 1:
        return [func(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _quiet_field(state, grid):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WindowWarning)
        return wigner_field(state, grid)


# ---------------------------------------------------------------- landscape


@dataclass(frozen=True, eq=False)
class LandscapeEntry:
    panel: str
    label: str
    spec: StateSpec
    mean_photon: float
    w_origin: float
    w_origin_parity: float
    delta: float
    normalization: float
    window_limited: bool
    field: object = field(repr=False)


def landscape_specs(r_db: float = 6.0, theta: float = 0.0, cat_alpha: float = 1.6, cutoff: int = 80):
    return [
        ("a", "S(r)|0>", StateSpec.make("squeezed_fock", cutoff, r_db=r_db, theta=theta, n=0)),
        ("b", "aS(r)|0>", StateSpec.make("subtracted_squeezed", cutoff, r_db=r_db, theta=theta, k=1)),
        ("c", "a^2S(r)|0>", StateSpec.make("subtracted_squeezed", cutoff, r_db=r_db, theta=theta, k=2)),
        ("d", "|1>", StateSpec.make("fock", cutoff, n=1)),
        ("e", "|2>", StateSpec.make("fock", cutoff, n=2)),
        ("f", "Cat-(alpha)", StateSpec.make("odd_cat", cutoff, alpha=cat_alpha)),
    ]


def landscape_snapshot(
    r_db: float = 6.0, theta: float = 0.0, cat_alpha: float = 1.6, config: RunConfig | None = None
) -> list[LandscapeEntry]:
    config = config or RunConfig()
    grid = config.grid

    def one(item):
        panel, label, spec = item
        state = build_escalating(spec)
        fld = _quiet_field(state, grid)
        return LandscapeEntry(
            panel,
            label,
            spec.with_cutoff(state.cutoff),
            fock.mean_photon(state),
            fld.origin_value,
            wigner_at_origin(state),
            integrated_negativity(fld),
            fld.normalization,
            fld.window_limited,
            fld,
        )

    return run_jobs(one, landscape_specs(r_db, theta, cat_alpha, config.cutoff))


LANDSCAPE_HEADER = (
    "panel", "label", "spec", "mean_photon", "w_origin", "w_origin_parity", "delta",
    "normalization", "window_limited", "cutoff", "grid",
)


def landscape_rows(entries, config: RunConfig):
    for e in entries:
        yield (
            e.panel, e.label, e.spec.to_text(), e.mean_photon, e.w_origin, e.w_origin_parity,
            e.delta, e.normalization, e.window_limited, e.spec.cutoff, config.grid.describe(),
        )


# ---------------------------------------------------------------- sweeps


RECORD_HEADER = (
    "family", "target_n", "feasible", "reason", "spec", "parameter", "r_db_or_alpha",
    "achieved_n", "mean_photon", "delta", "delta_per_n", "window_limited",
    "R_x", "R_x_lower_bound", "R_p", "R_p_lower_bound", "anisotropy", "anisotropy_defined",
    "cutoff", "grid", "threshold", "eps_max", "eps_steps", "angles",
)


@dataclass(frozen=True)
class BenchmarkRecord:
    family: str
    target_n: float
    feasible: bool
    reason: str = ""
    spec: str = ""
    parameter: float | None = None
    r_db_or_alpha: float | None = None
    achieved_n: float | None = None
    mean_photon: float | None = None
    delta: float | None = None
    delta_per_n: float | None = None
    window_limited: bool | None = None
    R_x: float | None = None
    R_x_lower_bound: bool | None = None
    R_p: float | None = None
    R_p_lower_bound: bool | None = None
    anisotropy: float | None = None
    anisotropy_defined: bool | None = None
    cutoff: int = 0
    grid: str = ""
    threshold: float = response.DEFAULT_THRESHOLD
    eps_max: float = response.DEFAULT_EPS_MAX
    eps_steps: int = response.DEFAULT_EPS_STEPS
    angles: int | None = None

    def row(self) -> dict:
        return dataclasses.asdict(self)


def sweep_points(config: RunConfig):
    """(family, target) pairs; Fock markers appear at integer targets only."""
    points = []
    for target in config.targets:
        for family in config.families:
            if family == "fock" and not float(target).is_integer():
                continue
            points.append((family, target))
    return points


def _base_record(sol: MatchSolution, config: RunConfig) -> dict:
    row = sol.csv_row()
    return dict(
        family=sol.family,
        target_n=sol.target_n,
        feasible=sol.feasible,
        reason=sol.reason,
        parameter=row["parameter"],
        r_db_or_alpha=row["r_db_or_alpha"],
        achieved_n=sol.achieved_n,
        cutoff=config.cutoff,
        **config.provenance(),
    )


def _scalar_point(point, config: RunConfig) -> BenchmarkRecord:
    family, target = point
    sol = solve(family, target, config.cutoff)
    base = _base_record(sol, config)
    if not sol.feasible:
        return BenchmarkRecord(**base)
    state = build_escalating(sol.state_spec(config.cutoff))
    fld = _quiet_field(state, config.grid)
    delta = integrated_negativity(fld)
    nbar = fock.mean_photon(state)
    base.update(
        spec=sol.state_spec(state.cutoff).to_text(),
        cutoff=state.cutoff,
        mean_photon=nbar,
        delta=delta,
        delta_per_n=delta / sol.achieved_n if sol.achieved_n > 0 else None,
        window_limited=fld.window_limited,
    )
    return BenchmarkRecord(**base)


def scalar_sweep(config: RunConfig | None = None) -> list[BenchmarkRecord]:
    config = config or RunConfig()
    return run_jobs(lambda p: _scalar_point(p, config), sweep_points(config))


def _radii_point(point, config: RunConfig) -> BenchmarkRecord:
    family, target = point
    sol = solve(family, target, config.cutoff)
    base = _base_record(sol, config)
    if not sol.feasible:
        return BenchmarkRecord(**base, angles=config.angles)
    state = build_escalating(sol.state_spec(config.cutoff))
    r_x, r_p = response.axis_radii(state, config.threshold, config.eps_max, config.eps_steps)
    contour = response.polar_contour(state, config.angles, config.threshold, config.eps_max, config.eps_steps)
    base.update(
        spec=sol.state_spec(state.cutoff).to_text(),
        cutoff=state.cutoff,
        mean_photon=fock.mean_photon(state),
        R_x=r_x.radius,
        R_x_lower_bound=r_x.is_lower_bound,
        R_p=r_p.radius,
        R_p_lower_bound=r_p.is_lower_bound,
        anisotropy=contour.anisotropy,
        anisotropy_defined=not contour.has_lower_bounds,
        angles=config.angles,
    )
    return BenchmarkRecord(**base)


def radii_sweep(config: RunConfig | None = None) -> list[BenchmarkRecord]:
    config = config or RunConfig()
    return run_jobs(lambda p: _radii_point(p, config), sweep_points(config))


# ---------------------------------------------------------------- polar report


@dataclass(frozen=True, eq=False)
class PolarReport:
    target_n: float
    contours: dict
    solutions: dict
    sectors: list  # (test, reference, predicate, measure, bin_width)


def polar_report(
    config: RunConfig | None = None,
    target_n: float | None = None,
    references=("fock", "even_cat", "odd_cat"),
) -> PolarReport:
    config = config or RunConfig()
    target = config.polar_target if target_n is None else float(target_n)
    families = [f for f in config.families if f != "fock" or float(target).is_integer()]
    sols = {f: solve(f, target, config.cutoff) for f in families}
    feasible = [f for f, s in sols.items() if s.feasible]

    def one(fam):
        state = build_escalating(sols[fam].state_spec(config.cutoff))
        return response.polar_contour(state, config.angles, config.threshold, config.eps_max, config.eps_steps)

    contours = dict(zip(feasible, run_jobs(one, feasible)))
    sectors = []
    for ref in references:
        if ref not in contours:
            continue
        for test in contours:
            if test == ref:
                continue
            adv = response.advantage_sector(contours[test], contours[ref])
            tol = response.tolerance_sector(contours[test], contours[ref], config.eta)
            for s in (adv, tol):
                sectors.append((test, ref, s.predicate, s.sector_measure, s.bin_width))
    return PolarReport(target, contours, sols, sectors)


POLAR_HEADER = ("family", "target_n", "phi", "radius", "is_lower_bound", "threshold")
SECTOR_HEADER = ("test", "reference", "predicate", "measure", "bin_width")


def polar_rows(report: PolarReport):
    for fam, contour in report.contours.items():
        for phi, radius, lb in export.contour_rows(contour):
            yield (fam, report.target_n, phi, radius, lb, contour.radii[0].threshold)


# ---------------------------------------------------------------- consistency


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    bound: float
    detail: str = ""

    @property
    def margin(self) -> float:
        return self.bound - self.measured


CHECK_HEADER = ("name", "passed", "measured", "bound", "margin", "detail")


def _check_subtraction(r: float = 0.69078, cutoff: int = 80) -> CheckResult:
    parent = fock.make_squeezed_fock(r, 0.0, 0, cutoff)
    one = fock.subtract_photons(parent, 1)
    target = fock.make_squeezed_fock(r, 0.0, 1, cutoff)
    infid = 1.0 - fock.state_fidelity(one, target)
    return CheckResult(
        "subtraction_identity", bool(infid <= 1e-10), max(infid, 0.0), 1e-10,
        f"1 - F(aS|0>, S|1>) at r={r}",
    )


def _check_invariance(config: RunConfig) -> CheckResult:
    def one(r):
        state = build_escalating(StateSpec.make("squeezed_fock", config.cutoff, r=r, n=1))
        return integrated_negativity(_quiet_field(state, config.grid))

    deltas = run_jobs(one, INVARIANCE_RS)
    spread = max(deltas) - min(deltas)
    detail = "delta(S(r)|1>) " + " ".join(f"r={r}:{d:.6f}" for r, d in zip(INVARIANCE_RS, deltas))
    return CheckResult("gaussian_unitary_invariance", bool(spread <= 6e-3), spread, 6e-3, detail)


def _check_fock_isotropy(config: RunConfig) -> CheckResult:
    worst = 0.0
    for n in (1, 2, 3):
        state = fock.make_fock(n, config.cutoff)
        contour = response.polar_contour(state, config.angles, config.threshold, config.eps_max, config.eps_steps)
        worst = max(worst, contour.anisotropy - 1.0)
    return CheckResult("fock_isotropy", bool(worst <= 1e-3), worst, 1e-3, "max over |1>,|2>,|3> of R_max/R_min - 1")


def cat_gaps(config: RunConfig, targets=CAT_TARGETS) -> list[float]:
    """Max relative even/odd contour difference at each matched target."""

    def one(target):
        cs = []
        for fam in ("even_cat", "odd_cat"):
            state = build_escalating(solve(fam, target).state_spec(config.cutoff))
            cs.append(response.polar_contour(state, config.angles, config.threshold, config.eps_max, config.eps_steps))
        even, odd = cs
        return float(np.max(np.abs(even.values - odd.values) / odd.values))

    return run_jobs(one, targets)


def _check_cat_convergence(config: RunConfig) -> CheckResult:
    gaps = cat_gaps(config)
    monotone = all(b < a for a, b in zip(gaps, gaps[1:]))
    last = gaps[-1]
    detail = "gap " + " ".join(f"n={t:g}:{g:.5f}" for t, g in zip(CAT_TARGETS, gaps))
    if not monotone:
        detail += " (not monotone)"
    return CheckResult("cat_convergence", bool(monotone and last <= 1e-2), last, 1e-2, detail)


def _check_lower_bounds(config: RunConfig) -> CheckResult:
    vac = fock.make_fock(0, config.cutoff)
    short = response.threshold_radius(response.fidelity_scan(vac, 0.0, 0.2, 64), config.threshold)
    full = response.threshold_radius(response.fidelity_scan(vac, 0.0, config.eps_max, config.eps_steps), config.threshold)
    ok = short.is_lower_bound and short.radius == 0.2 and not full.is_lower_bound
    return CheckResult("lower_bound_bookkeeping", bool(ok), 0.0 if ok else 1.0, 0.0,
                       "non-crossing scan flagged with radius = eps_max; crossing scan not flagged")


def consistency_suite(config: RunConfig | None = None) -> list[CheckResult]:
    config = config or RunConfig()
    checks = [
        ("subtraction_identity", lambda: _check_subtraction(cutoff=config.cutoff)),
        ("gaussian_unitary_invariance", lambda: _check_invariance(config)),
        ("fock_isotropy", lambda: _check_fock_isotropy(config)),
        ("cat_convergence", lambda: _check_cat_convergence(config)),
        ("lower_bound_bookkeeping", lambda: _check_lower_bounds(config)),
    ]
    results = []
    for name, check in checks:
        try:
            results.append(check())
        except Exception as exc:  # a crashing check is a failure, never a pass
            results.append(CheckResult(name, False, math.nan, math.nan, repr(exc)))
    return results


def check_rows(results):
    for c in results:
        yield (c.name, c.passed, c.measured, c.bound, c.margin, c.detail)


# ---------------------------------------------------------------- convergence


CONVERGE_HEADER = (
    "panel", "spec", "probe", "base", "refined", "base_cutoff_used", "refined_cutoff_used",
    "delta_base", "delta_refined", "delta_change", "delta_per_n_change", "window_limited",
)


def convergence_probes(config: RunConfig | None = None, specs=None):
    """Cutoff, grid-density and window refinements for every landscape state."""
    config = config or RunConfig()
    specs = specs or [(p, s) for p, _, s in landscape_specs(cutoff=config.cutoff)]
    base = Setting(config.grid, config.cutoff)
    step = 2 * config.window / (config.grid_points - 1)
    wide_half = config.window + 2.0
    wide_points = 2 * int(round(wide_half / step)) + 1
    fine = PhaseGrid.square(config.window, 3 * (config.grid_points - 1) // 2 + 1)
    probes = [
        ("cutoff", Setting(config.grid, config.cutoff + 40)),
        ("grid", Setting(fine, config.cutoff)),
        ("cutoff+grid", Setting(fine, config.cutoff + 40)),
        ("window", Setting(PhaseGrid.square(wide_half, wide_points), config.cutoff)),
    ]
    jobs = [(panel, spec, name, refined) for panel, spec in specs for name, refined in probes]

    def one(job):
        panel, spec, name, refined = job
        return panel, name, convergence_probe(spec, base, refined)

    return run_jobs(one, jobs)


def convergence_rows(results):
    for panel, name, rep in results:
        yield (
            panel, rep.spec, name,
            f"{rep.base.grid.describe()}/c{rep.base.cutoff}",
            f"{rep.refined.grid.describe()}/c{rep.refined.cutoff}",
            rep.base_cutoff_used, rep.refined_cutoff_used,
            rep.delta_base, rep.delta_refined, rep.delta_change, rep.delta_per_n_change, rep.window_limited,
        )


# ---------------------------------------------------------------- output


def write_table(out_dir, name: str, header, rows, fmt: str = "csv") -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [r if not isinstance(r, dict) else [r.get(h) for h in header] for r in rows]
    if fmt == "json":
        return export.write_json(out_dir / f"{name}.json", [dict(zip(header, r)) for r in rows])
    return export.write_csv(out_dir / f"{name}.csv", header, rows)


def manifest(config: RunConfig, command: str, files) -> dict:
    return {
        "tool": "cvbench",
        "version": __version__,
        "command": command,
        "numba": USE_NUMBA,
        "config": config.to_dict(),
        "files": sorted(Path(f).name for f in files),
    }


def write_manifest(config: RunConfig, command: str, files) -> Path:
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    return export.write_json(out_dir / "run.json", manifest(config, command, files))
