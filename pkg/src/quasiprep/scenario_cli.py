"""Reproducible scenario runner: Wigner galleries, metric sweeps, cat surfaces.

Everything is a deterministic function of a ScenarioConfig (JSON file and/or
command-line flags; flags win).  Grids are written as CSV matrices with a JSON
sidecar holding extent, ordering parameter, normalization and the resolved
case parameters; sweeps and surfaces are flat CSV tables.  Run metadata that
would break determinism (timestamps, versions) goes into a separate
``run_meta.json``.

Exit codes: 0 success, 1 validation failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import __version__
from . import fock_oracle as fo
from .heralding import (
    herald_prob_squeeze,
    herald_report,
    herald_saturation,
    solve_window,
)
from .metrics import (
    SINGLE_QUANTA_NEGATIVITY,
    cat_fidelity,
    nonclassical_depth,
    squeezed_fock_fidelity,
    wigner_negativity,
)
from .ops_algebra import (
    CaseSpec,
    FixedOutcome,
    NormalFormState,
    OpCase,
    Window,
    chi_from_xi,
    normal_form,
)
from .quasiprob import (
    _FAULT_INJECTION,
    PhaseSpaceGrid,
    ThermalState,
    eval_R,
    eval_R_windowed,
    sample_grid,
)

__all__ = [
    "ScenarioConfig",
    "ConfigError",
    "cmd_wigner",
    "cmd_sweep_metrics",
    "cmd_cat_surface",
    "cmd_validate",
    "main",
]

THERMAL_CASE = "thermal"
ALL_CASES = [c.value for c in OpCase]

# Probabilities below this are treated as exactly zero heralding (they only
# arise from roundoff in analytically-vanishing coefficients).
_ZERO_HERALD = 1e-15


class ConfigError(ValueError):
    """Invalid scenario configuration."""


@dataclass
class ScenarioConfig:
    """All knobs of the scenario commands; JSON keys mirror field names."""

    cases: List[str] = field(default_factory=lambda: list(ALL_CASES))
    nbar: List[float] = field(default_factory=lambda: [0.0, 1.0])
    r: float = 0.5
    r_min: float = 0.0
    r_max: float = 2.0
    r_count: int = 81
    nbar_min: float = 0.0
    nbar_max: float = 3.0
    nbar_count: int = 31
    link_chi: bool = True
    chi: Optional[float] = None
    amplitude_f: float = 1e-2
    herald_p: float = 1e-4
    window: Optional[float] = None
    grid_extent: float = 6.0
    grid_n: int = 241
    tau_th: float = 0.0
    out_dir: str = "out"
    output_format: str = "csv"
    fault_inject: Optional[str] = None
    jobs: int = 1

    def validate(self) -> None:
        known = set(ALL_CASES) | {THERMAL_CASE}
        for case in self.cases:
            if case not in known:
                raise ConfigError(f"cases: unknown case {case!r}; pick from {sorted(known)}")
        if not self.cases:
            raise ConfigError("cases: at least one case is required")
        for nb in self.nbar:
            if nb < 0.0:
                raise ConfigError(f"nbar: occupations must be non-negative, got {nb}")
        if self.r_count < 1 or self.nbar_count < 1:
            raise ConfigError("r_count/nbar_count: sweep counts must be >= 1")
        if not self.amplitude_f > 0.0:
            raise ConfigError(f"amplitude_f: must be positive, got {self.amplitude_f}")
        if not self.herald_p > 0.0:
            raise ConfigError(f"herald_p: must be positive, got {self.herald_p}")
        if self.window is not None and not self.window > 0.0:
            raise ConfigError(f"window: must be positive, got {self.window}")
        if not self.grid_extent > 0.0:
            raise ConfigError(f"grid_extent: must be positive, got {self.grid_extent}")
        if self.grid_n < 3 or self.grid_n % 2 == 0:
            raise ConfigError(f"grid_n: must be odd and >= 3, got {self.grid_n}")
        if self.tau_th < 0.0:
            raise ConfigError(f"tau_th: must be non-negative, got {self.tau_th}")
        if self.chi is not None and self.chi < 0.0:
            raise ConfigError(f"chi: must be non-negative, got {self.chi}")
        if self.output_format != "csv":
            raise ConfigError(f"output_format: only 'csv' is supported, got {self.output_format!r}")
        if self.jobs < 1:
            raise ConfigError(f"jobs: must be >= 1, got {self.jobs}")

    @classmethod
    def from_file(cls, path: str) -> "ScenarioConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {path}: {err}") from err
        fields = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - fields
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)


# ---------------------------------------------------------------------------
# Shared resolution helpers
# ---------------------------------------------------------------------------

@dataclass
class ResolvedCell:
    """One (case, nbar) cell with its window/heralding fully solved."""

    case: str
    nbar: float
    r: float
    chi: Optional[float]
    window_w: Optional[float]
    herald_p: float
    state: object  # NormalFormState or ThermalState
    skip_reason: Optional[str] = None


def _resolve_cell(config: ScenarioConfig, case: str, nbar: float, r: float) -> ResolvedCell:
    if case == THERMAL_CASE:
        return ResolvedCell(case, nbar, r, None, None, 1.0, ThermalState(nbar))
    op = OpCase(case)
    if not op.uses_measurement:
        spec = CaseSpec(op, nbar=nbar, squeeze_r=r, amplitude_f=config.amplitude_f)
        state = normal_form(spec)
        p = herald_prob_squeeze(
            config.amplitude_f, state.constants.nu, state.constants.mu, nbar
        )
        if p <= _ZERO_HERALD:
            return ResolvedCell(case, nbar, r, None, None, 0.0, state, "zero heralding")
        return ResolvedCell(case, nbar, r, None, None, p, state)
    chi = config.chi if (config.chi is not None and not config.link_chi) else chi_from_xi(r, nbar)
    spec = CaseSpec(op, nbar=nbar, chi=chi, amplitude_f=config.amplitude_f)
    state = normal_form(spec)
    saturation = herald_saturation(
        config.amplitude_f, state.constants, state.sigma_l_sq, state.mbar
    )
    if saturation <= _ZERO_HERALD:
        return ResolvedCell(case, nbar, r, chi, None, 0.0, state, "zero heralding")
    if config.window is not None:
        w = config.window
    else:
        if config.herald_p >= saturation:
            return ResolvedCell(
                case, nbar, r, chi, None, 0.0, state,
                f"herald target {config.herald_p:g} exceeds saturation {saturation:g}",
            )
        w = solve_window(config.herald_p, state)
    spec = replace(spec, outcome=Window(w))
    state = normal_form(spec)
    p = herald_report(state).probability
    return ResolvedCell(case, nbar, r, chi, w, p, state)


def _fmt(x) -> str:
    if x is None:
        return "nan"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _run_meta(config: ScenarioConfig) -> dict:
    return {
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "config": asdict(config),
    }


def _map_ordered(fn: Callable, items: Sequence, jobs: int) -> list:
    """Apply fn over items, optionally in a thread pool, preserving order."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _cell_tag(case: str, nbar: float) -> str:
    nb = format(nbar, "g").replace(".", "p").replace("-", "m")
    return f"{case}_nbar{nb}"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_wigner(config: ScenarioConfig) -> int:
    """One normalized tau = 1/2 (+ tau_th) grid file per (case, nbar) cell."""
    config.validate()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tau = 0.5 + config.tau_th
    cells = [(case, nbar) for case in config.cases for nbar in config.nbar]

    def build(cell):
        case, nbar = cell
        return _resolve_cell(config, case, nbar, config.r)

    resolved = _map_ordered(build, cells, config.jobs)
    for cell in resolved:
        tag = _cell_tag(cell.case, cell.nbar)
        if cell.skip_reason is not None:
            _write_json(out / f"wigner_{tag}.skip.json", {
                "case": cell.case,
                "nbar": cell.nbar,
                "reason": cell.skip_reason,
            })
            continue
        grid = sample_grid(
            cell.state, tau,
            extent=config.grid_extent, nx=config.grid_n, ny=config.grid_n,
        )
        raw_norm = grid.norm
        grid = grid.normalized()
        _write_csv(
            out / f"wigner_{tag}.csv",
            [_fmt(y) for y in grid.ys()],
            grid.values,
        )
        _write_json(out / f"wigner_{tag}.json", {
            "case": cell.case,
            "nbar": cell.nbar,
            "r": cell.r,
            "chi": cell.chi,
            "window_w": cell.window_w,
            "herald_probability": cell.herald_p,
            "amplitude_f": config.amplitude_f,
            "tau": tau,
            "tau_th": config.tau_th,
            "extent": [grid.x_min, grid.x_max, grid.y_min, grid.y_max],
            "nx": grid.nx,
            "ny": grid.ny,
            "normalized": True,
            "raw_integral": raw_norm,
            "values_file": f"wigner_{tag}.csv",
        })
    _write_json(out / "run_meta.json", _run_meta(config))
    return 0


def _sweep_row(config: ScenarioConfig, case: str, nbar: float, r: float):
    cell = _resolve_cell(config, case, nbar, r)
    if cell.skip_reason is not None:
        return [case, nbar, r, cell.chi, math.nan, math.nan, math.nan, 0.0]
    tau_w = 0.5 + config.tau_th
    grid = sample_grid(cell.state, tau_w).normalized()
    delta = wigner_negativity(grid)
    tau_inf = nonclassical_depth(cell.state, tau_th=config.tau_th)
    return [
        case, nbar, r, cell.chi,
        delta, delta / SINGLE_QUANTA_NEGATIVITY, tau_inf, cell.herald_p,
    ]


def cmd_sweep_metrics(config: ScenarioConfig) -> int:
    """CSV of (case, nbar, r, chi, delta, delta ratio, tau_inf, herald p)."""
    config.validate()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rs = np.linspace(config.r_min, config.r_max, config.r_count)
    points = [
        (case, nbar, float(r))
        for case in config.cases
        for nbar in config.nbar
        for r in rs
    ]
    rows = _map_ordered(lambda p: _sweep_row(config, *p), points, config.jobs)
    _write_csv(
        out / "sweep_metrics.csv",
        ["case", "nbar", "r", "chi", "delta", "delta_ratio", "tau_inf", "herald_p"],
        rows,
    )
    _write_json(out / "run_meta.json", _run_meta(config))
    return 0


def _surface_row(config: ScenarioConfig, case: str, nbar: float, r: float):
    cell = _resolve_cell(config, case, nbar, r)
    if cell.skip_reason is not None:
        return [r, nbar, cell.chi, math.nan, math.nan, math.nan, 0]
    res = cat_fidelity(cell.state)
    fs1 = math.nan
    if cell.case == OpCase.MEASURE_THEN_ADD.value:
        zero_outcome = normal_form(CaseSpec(
            OpCase.MEASURE_THEN_ADD, nbar=nbar, chi=cell.chi,
            amplitude_f=config.amplitude_f, outcome=FixedOutcome(0.0),
        ))
        fs1 = squeezed_fock_fidelity(zero_outcome)
    return [r, nbar, cell.chi, res.fidelity, res.cat_separation, fs1, 0]


def cmd_cat_surface(config: ScenarioConfig) -> int:
    """Cat-fidelity (and squeezed-single-quantum) surface over (r, nbar).

    Runs on the first configured case; the per-nbar fidelity maximum over r is
    flagged in the ``is_max`` column.
    """
    config.validate()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    case = config.cases[0]
    if case == THERMAL_CASE:
        raise ConfigError("cat-surface requires an operation case, not 'thermal'")
    rs = np.linspace(config.r_min, config.r_max, config.r_count)
    nbars = np.linspace(config.nbar_min, config.nbar_max, config.nbar_count)
    points = [(case, float(nb), float(r)) for nb in nbars for r in rs]
    rows = _map_ordered(lambda p: _surface_row(config, *p), points, config.jobs)
    # flag the argmax row per nbar slice
    for i_nb in range(len(nbars)):
        block = rows[i_nb * len(rs):(i_nb + 1) * len(rs)]
        cats = [row[3] for row in block]
        if all(math.isnan(c) for c in cats):
            continue
        best = int(np.nanargmax(cats))
        block[best][6] = 1
    _write_csv(
        out / "cat_surface.csv",
        ["r", "nbar", "chi", "f_cat", "p_cat", "f_squeezed_fock", "is_max"],
        rows,
    )
    _write_json(out / "run_meta.json", _run_meta(config))
    return 0


# ---------------------------------------------------------------------------
# Validation battery
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


def _check_oracle_grids(config: ScenarioConfig) -> CheckResult:
    xs = np.linspace(-config.grid_extent, config.grid_extent, config.grid_n)
    worst = 0.0
    worst_tag = ""
    for case in config.cases:
        if case == THERMAL_CASE:
            continue
        for nbar in config.nbar:
            cell = _resolve_cell(config, case, nbar, config.r)
            if cell.skip_reason is not None:
                continue
            spec = CaseSpec(
                OpCase(case), nbar=nbar,
                squeeze_r=None if cell.chi is not None else cell.r,
                chi=cell.chi,
                amplitude_f=config.amplitude_f,
                outcome=Window(cell.window_w) if cell.window_w is not None else None,
            )
            rho = fo.compose_case(spec)
            for tau, oracle_grid in ((0.5, fo.wigner_grid), (1.0, fo.q_grid)):
                if cell.window_w is not None:
                    ana = eval_R_windowed(
                        cell.state, tau, xs[:, None], xs[None, :], cell.window_w
                    )
                else:
                    ana = eval_R(cell.state, tau, xs[:, None], xs[None, :])
                dev = float(np.max(np.abs(ana - oracle_grid(rho, xs, xs))))
                if dev > worst:
                    worst, worst_tag = dev, f"{case} nbar={nbar:g} tau={tau}"
    return CheckResult("oracle_grid_equivalence", worst < 1e-6, worst, 1e-6, worst_tag)


def _check_window_normalization(config: ScenarioConfig) -> CheckResult:
    worst = 0.0
    for case in (OpCase.MEASURE_THEN_ADD, OpCase.MEASURE_THEN_SUB):
        chi = chi_from_xi(config.r, 1.0)
        for w in (1e-3, 1e-2, 1e-1, 1.0, 10.0):
            spec = CaseSpec(case, nbar=1.0, chi=chi, outcome=Window(w),
                            amplitude_f=config.amplitude_f)
            state = normal_form(spec)
            p = herald_report(state).probability
            grid = sample_grid(state, 0.5)
            worst = max(worst, abs(grid.norm - p) / p)
    return CheckResult("window_normalization_identity", worst < 1e-8, worst, 1e-8)


def _check_squeeze_heralds(config: ScenarioConfig) -> CheckResult:
    worst = 0.0
    for case in (OpCase.SUB_THEN_SQUEEZE, OpCase.ADD_THEN_SQUEEZE,
                 OpCase.SQUEEZE_THEN_SUB, OpCase.SQUEEZE_THEN_ADD):
        spec = CaseSpec(case, nbar=1.0, squeeze_r=config.r, amplitude_f=config.amplitude_f)
        state = normal_form(spec)
        p = herald_prob_squeeze(config.amplitude_f, state.constants.nu,
                                state.constants.mu, 1.0)
        rho = fo.compose_case(spec)
        worst = max(worst, abs(rho.trace - p) / max(p, 1e-300))
    return CheckResult("squeeze_herald_oracle", worst < 1e-8, worst, 1e-8)


def _check_chi_roundtrip(config: ScenarioConfig) -> CheckResult:
    from .ops_algebra import effective_params

    worst = 0.0
    for chi in np.linspace(0.0, 10.0, 41):
        for nbar in (0.0, 1.0, 3.0):
            xi = effective_params(float(chi), nbar).xi
            worst = max(worst, abs(chi_from_xi(xi, nbar) - chi))
    return CheckResult("chi_inversion_roundtrip", worst < 1e-10, worst, 1e-10)


def _check_mbar_asymptote(config: ScenarioConfig) -> CheckResult:
    from .ops_algebra import effective_params

    mbar = effective_params(1e3, 10.0).mbar
    return CheckResult("mbar_asymptote", mbar < 1e-3, mbar, 1e-3)


def _check_symmetries(config: ScenarioConfig) -> CheckResult:
    worst = 0.0
    chi = chi_from_xi(config.r, 1.0)
    states = []
    spec = CaseSpec(OpCase.MEASURE_THEN_ADD, nbar=1.0, chi=chi, outcome=Window(0.3),
                    amplitude_f=config.amplitude_f)
    states.append(normal_form(spec))
    states.append(normal_form(CaseSpec(OpCase.SQUEEZE_THEN_SUB, nbar=1.0,
                                       squeeze_r=config.r, amplitude_f=config.amplitude_f)))
    for state in states:
        grid = sample_grid(state, 0.5)
        v = grid.values
        scale = float(np.max(np.abs(v)))
        worst = max(worst, float(np.max(np.abs(v - v[:, ::-1]))) / scale)
        worst = max(worst, float(np.max(np.abs(v - v[::-1, :]))) / scale)
    return CheckResult("grid_reflection_symmetry", worst < 1e-12, worst, 1e-12)


def _check_q_nonnegative(config: ScenarioConfig) -> CheckResult:
    worst = 0.0
    chi = chi_from_xi(config.r, 1.0)
    for case in (OpCase.MEASURE_THEN_ADD, OpCase.SQUEEZE_THEN_ADD):
        if case.uses_measurement:
            spec = CaseSpec(case, nbar=1.0, chi=chi, outcome=Window(0.05),
                            amplitude_f=config.amplitude_f)
        else:
            spec = CaseSpec(case, nbar=1.0, squeeze_r=config.r,
                            amplitude_f=config.amplitude_f)
        grid = sample_grid(normal_form(spec), 1.0).normalized()
        worst = min(worst, float(np.min(grid.values)))
    return CheckResult("q_function_nonnegative", worst >= -1e-9, abs(worst), 1e-9)


def _check_tau_norm_independence(config: ScenarioConfig) -> CheckResult:
    worst = 0.0
    chi = chi_from_xi(config.r, 1.0)
    spec = CaseSpec(OpCase.MEASURE_THEN_ADD, nbar=1.0, chi=chi, outcome=Window(0.05),
                    amplitude_f=config.amplitude_f)
    state = normal_form(spec)
    norms = [sample_grid(state, tau).norm for tau in (0.5, 0.75, 1.0)]
    worst = max(abs(n - norms[0]) for n in norms)
    return CheckResult("tau_normalization_independence", worst < 1e-6, worst, 1e-6)


def _check_window_zero_limit(config: ScenarioConfig) -> CheckResult:
    chi = chi_from_xi(config.r, 1.0)
    w = 1e-6
    spec = CaseSpec(OpCase.MEASURE_THEN_ADD, nbar=1.0, chi=chi, outcome=Window(w),
                    amplitude_f=config.amplitude_f)
    state = normal_form(spec)
    worst = 0.0
    for (x, y) in ((0.0, 0.0), (0.8, -0.5), (1.6, 1.2)):
        lhs = eval_R_windowed(state, 0.5, x, y, w) / (2.0 * w)
        rhs = eval_R(state, 0.5, x, y, 0.0)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return CheckResult("window_zero_width_limit", worst < 1e-3, worst, 1e-3)


def _check_heating_depth(config: ScenarioConfig) -> CheckResult:
    tau_th = config.tau_th if config.tau_th > 0.0 else 0.1
    chi = chi_from_xi(config.r, 1.0)
    spec0 = CaseSpec(OpCase.MEASURE_THEN_ADD, nbar=1.0, chi=chi,
                     amplitude_f=config.amplitude_f)
    w = solve_window(config.herald_p, normal_form(spec0))
    spec = CaseSpec(OpCase.MEASURE_THEN_ADD, nbar=1.0, chi=chi, outcome=Window(w),
                    amplitude_f=config.amplitude_f)
    state = normal_form(spec)
    drop = nonclassical_depth(state) - nonclassical_depth(state, tau_th=tau_th)
    dev = abs(drop - tau_th)
    return CheckResult("heating_depth_reduction", dev < 2e-3, dev, 2e-3,
                       f"tau_th={tau_th:g} drop={drop:.6f}")


def _check_negativity_landmark(config: ScenarioConfig) -> CheckResult:
    spec = CaseSpec(OpCase.SQUEEZE_THEN_ADD, nbar=0.0, squeeze_r=config.r,
                    amplitude_f=config.amplitude_f)
    grid = sample_grid(normal_form(spec), 0.5).normalized()
    dev = abs(wigner_negativity(grid) - SINGLE_QUANTA_NEGATIVITY)
    return CheckResult("single_quantum_negativity", dev < 1e-3, dev, 1e-3)


_CHECKS = [
    _check_chi_roundtrip,
    _check_mbar_asymptote,
    _check_negativity_landmark,
    _check_symmetries,
    _check_q_nonnegative,
    _check_tau_norm_independence,
    _check_window_zero_limit,
    _check_window_normalization,
    _check_squeeze_heralds,
    _check_heating_depth,
    _check_oracle_grids,
]


def cmd_validate(config: ScenarioConfig) -> int:
    """Run the oracle / invariant battery and write a pass-fail report."""
    config.validate()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _FAULT_INJECTION.clear()
    if config.fault_inject:
        _FAULT_INJECTION[config.fault_inject] = 1.01
    try:
        results = [check(config) for check in _CHECKS]
    finally:
        _FAULT_INJECTION.clear()
    report = {
        "all_passed": all(r.passed for r in results),
        "fault_inject": config.fault_inject,
        "checks": [r.as_dict() for r in results],
    }
    _write_json(out / "validation_report.json", report)
    _write_json(out / "run_meta.json", _run_meta(config))
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: deviation {r.max_deviation:.3g} "
              f"(tolerance {r.tolerance:.3g}) {r.detail}")
    return 0 if report["all_passed"] else 1


# ---------------------------------------------------------------------------
# CLI plumbing
# ---------------------------------------------------------------------------

def _parse_values(text: str) -> List[float]:
    """Comma list ("0,1") or range ("0:2:81") of floats."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range syntax is min:max:count, got {text!r}")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        return [float(v) for v in np.linspace(lo, hi, count)]
    return [float(v) for v in text.split(",") if v.strip()]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quasiprep",
        description="Conditional non-classical state preparation: scenario data generator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("wigner", "normalized Wigner grid per (case, nbar) cell"),
        ("sweep-metrics", "negativity/depth/heralding sweep over r"),
        ("cat-surface", "cat and squeezed-single-quantum fidelity over (r, nbar)"),
        ("validate", "oracle cross-validation battery"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file; flags override its keys")
        p.add_argument("--out", help="output directory")
        p.add_argument("--case", help="comma-separated case list")
        p.add_argument("--nbar", help="comma list or min:max:count of occupations")
        p.add_argument("--r", help="squeeze parameter (wigner/validate) or min:max:count sweep")
        p.add_argument("--chi", type=float, help="explicit measurement strength (unlinks xi = r)")
        p.add_argument("--herald-p", type=float, help="window herald-probability target")
        p.add_argument("--window", type=float, help="explicit window half-width")
        p.add_argument("--grid-extent", type=float, help="half-width of the square grid")
        p.add_argument("--grid-n", type=int, help="odd sample count per axis")
        p.add_argument("--tau-th", type=float, help="thermal decoherence shift")
        p.add_argument("--fault-inject", help="perturb a named coefficient (validate only)")
        p.add_argument("--jobs", type=int, help="worker threads for sweep points")
    return parser


def _apply_flags(config: ScenarioConfig, args: argparse.Namespace) -> ScenarioConfig:
    if args.out is not None:
        config.out_dir = args.out
    if args.case is not None:
        config.cases = [c.strip() for c in args.case.split(",") if c.strip()]
    if args.nbar is not None:
        values = _parse_values(args.nbar)
        config.nbar = values
        config.nbar_min, config.nbar_max = min(values), max(values)
        config.nbar_count = len(values)
    if args.r is not None:
        values = _parse_values(args.r)
        if len(values) == 1:
            config.r = values[0]
        else:
            config.r_min, config.r_max, config.r_count = values[0], values[-1], len(values)
    if args.chi is not None:
        config.chi = args.chi
        config.link_chi = False
    if args.herald_p is not None:
        config.herald_p = args.herald_p
    if args.window is not None:
        config.window = args.window
    if args.grid_extent is not None:
        config.grid_extent = args.grid_extent
    if args.grid_n is not None:
        config.grid_n = args.grid_n
    if args.tau_th is not None:
        config.tau_th = args.tau_th
    if args.fault_inject is not None:
        config.fault_inject = args.fault_inject
    if args.jobs is not None:
        config.jobs = args.jobs
    return config


_COMMANDS = {
    "wigner": cmd_wigner,
    "sweep-metrics": cmd_sweep_metrics,
    "cat-surface": cmd_cat_surface,
    "validate": cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = ScenarioConfig.from_file(args.config) if args.config else ScenarioConfig()
        config = _apply_flags(config, args)
        config.validate()
        return _COMMANDS[args.command](config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
