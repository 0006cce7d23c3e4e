"""Non-classicality figures of merit.

Three measures, all defined on the tau-ordered quasi-probability family:

* Wigner negativity: half the excess of the integrated |W| over 1.
* Non-classical depth: the smallest tau at which R_tau is an acceptable
  (existing, non-negative) probability distribution.
* Optimal fidelity with an odd cat state, computed from the Q-function and
  its analytic continuation, maximised over the cat amplitude.

Plus the closed-form fidelity with a squeezed single-quantum state for the
measure-then-add case at zero outcome.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .heralding import herald_report
from .ops_algebra import FixedOutcome, NormalFormState, OpCase, Outcome, Window
from .quasiprob import (
    PhaseSpaceGrid,
    State,
    apply_thermal_heating,
    auto_axes,
    eval_R,
    eval_R_windowed,
    is_representable,
    sample_grid,
)

__all__ = [
    "SINGLE_QUANTA_NEGATIVITY",
    "CatFidelityResult",
    "MetricsReport",
    "wigner_negativity",
    "nonclassical_depth",
    "cat_fidelity",
    "squeezed_fock_fidelity",
]

# Negativity of a single-quantum Fock state, the natural yardstick.
SINGLE_QUANTA_NEGATIVITY = 2.0 * math.exp(-0.5) - 1.0

_DEPTH_FLOOR = 1e-9  # relative acceptability floor absorbing quadrature noise


@dataclass(frozen=True)
class CatFidelityResult:
    fidelity: float
    cat_q: float          # Im(beta) of the optimal cat
    cat_separation: float  # P_cat = sqrt(2) * cat_q
    degenerate: bool      # optimum stuck at the small-amplitude boundary


@dataclass(frozen=True)
class MetricsReport:
    """The bundle the sweep commands emit per parameter point."""

    wigner_negativity: float
    negativity_ratio: float
    nonclassical_depth: float
    cat_fidelity: Optional[float] = None
    cat_amplitude: Optional[float] = None
    cat_separation: Optional[float] = None
    squeezed_fock_fidelity: Optional[float] = None


def wigner_negativity(grid: PhaseSpaceGrid) -> float:
    """Total integrated negativity of a normalized Wigner grid.

    delta = (integral |W| - 1) / 2 using the same trapezoid rule as the
    normalization, so non-negative grids give exactly zero; sub-1e-9 results
    are clamped as quadrature noise.
    """
    if abs(grid.norm - 1.0) > 1e-6:
        raise ValueError(
            f"wigner_negativity needs a normalized grid (norm = {grid.norm:.6g}); "
            "call .normalized() first"
        )
    delta = 0.5 * (grid.integral(np.abs(grid.values)) - 1.0)
    return 0.0 if abs(delta) < 1e-9 else delta


def _grid_acceptable(state: State, tau: float, outcome: Optional[Outcome],
                     points_per_sigma: float) -> bool:
    if not is_representable(state, tau):
        return False
    grid = sample_grid(state, tau, outcome=outcome, points_per_sigma=points_per_sigma)
    lo = float(np.min(grid.values))
    hi = float(np.max(grid.values))
    return lo >= -_DEPTH_FLOOR * max(hi, 0.0)


def nonclassical_depth(
    state: State,
    outcome: Optional[Outcome] = None,
    tau_th: float = 0.0,
    tol: float = 1e-3,
    points_per_sigma: float = 16.0,
) -> float:
    """Bisect for the smallest tau with an acceptable distribution.

    Acceptable means both tau-shifted variances are strictly positive and the
    sampled minimum clears a small relative floor.  tau = 1 is always
    acceptable (the Husimi function exists and is non-negative), so the
    bisection runs on [0, 1]; thermal heating shifts every probe by tau_th.
    """
    outcome = outcome if outcome is not None else getattr(state, "outcome", None)

    def acceptable(tau: float) -> bool:
        return _grid_acceptable(
            state, apply_thermal_heating(tau, tau_th), outcome, points_per_sigma
        )

    if acceptable(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if acceptable(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _q_value(state: State, x, y, outcome: Optional[Outcome], tau: float):
    if isinstance(outcome, Window):
        return eval_R_windowed(state, tau, x, y, outcome.w)
    p_l = outcome.p_l if isinstance(outcome, FixedOutcome) else 0.0
    return eval_R(state, tau, x, y, p_l)


def _assert_x_symmetric(state: State, outcome: Optional[Outcome], tau: float) -> bool:
    xs = np.array([0.35, 0.9, 1.7])
    left = np.array([_q_value(state, -x, 0.4, outcome, tau) for x in xs])
    right = np.array([_q_value(state, x, 0.4, outcome, tau) for x in xs])
    scale = float(np.max(np.abs(right))) + 1e-300
    return float(np.max(np.abs(left - right))) <= 1e-9 * scale


def _golden_max(fun, lo: float, hi: float, xtol: float) -> float:
    """Golden-section maximiser; returns the abscissa."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fun(c), fun(d)
    while (b - a) > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def cat_fidelity(
    state: State,
    outcome: Optional[Outcome] = None,
    tau_th: float = 0.0,
    q_min: float = 1e-3,
    q_max: float = 4.0,
) -> CatFidelityResult:
    """Optimal fidelity with an odd cat state (opposite coherent amplitudes).

    By the state's reflection symmetry the optimal cat sits on the imaginary
    axis with phase pi, so a single amplitude q = Im(beta_cat) is optimised:

        F(q) = (pi / N) [Q(iq) + Q(-iq) - 2 Re e^(-2 q^2) Q_ext(iq)],
        N = 2 (1 - e^(-2 q^2)),

    where Q_ext continues the Husimi expansion to the complex point x = iq,
    y = 0 (the conjugate-flip that turns diagonal coherent overlaps into the
    off-diagonal interference term).  Coarse scan then golden-section.
    """
    outcome = outcome if outcome is not None else getattr(state, "outcome", None)
    tau = apply_thermal_heating(1.0, tau_th)
    p = herald_report(state).probability if isinstance(state, NormalFormState) else 1.0
    if p <= 0.0:
        raise ValueError("cat fidelity undefined for a zero-heralding state")

    symmetric = _assert_x_symmetric(state, outcome, tau)
    if not symmetric:
        warnings.warn(
            "state is not reflection-symmetric in x; cat search falls back to a "
            "2-D scan over the cat amplitude's axis and the result may be a local optimum",
            stacklevel=2,
        )

    def fidelity(q: float) -> float:
        n_cat = 2.0 * (1.0 - math.exp(-2.0 * q * q))
        q_plus = float(np.real(_q_value(state, 0.0, q, outcome, tau)))
        q_minus = float(np.real(_q_value(state, 0.0, -q, outcome, tau)))
        cross = _q_value(state, complex(0.0, q), 0.0, outcome, tau)
        cross = 2.0 * math.exp(-2.0 * q * q) * float(np.real(cross))
        return math.pi / n_cat * (q_plus + q_minus - cross) / p

    qs = np.arange(q_min, q_max + 1e-12, 0.05)
    values = [fidelity(q) for q in qs]
    best = int(np.argmax(values))
    lo = qs[max(best - 1, 0)]
    hi = qs[min(best + 1, len(qs) - 1)]
    q_opt = _golden_max(fidelity, lo, hi, 1e-4)
    return CatFidelityResult(
        fidelity=fidelity(q_opt),
        cat_q=q_opt,
        cat_separation=math.sqrt(2.0) * q_opt,
        degenerate=q_opt <= q_min + 2e-4,
    )


def squeezed_fock_fidelity(state: NormalFormState) -> float:
    """Fidelity with the best squeezed single-quantum state, measure-then-add only.

    The optimal squeeze equals the effective squeeze, leaving

        F = [cosh^2 xi + 2 (mbar/(1+mbar))^2 sinh^2 xi]
            / [(1+mbar) cosh^2 xi + mbar sinh^2 xi].

    Valid for the measure-then-add case at zero outcome (non-zero outcomes are
    assumed redressed by feedback, so no window is involved).
    """
    if state.case is not OpCase.MEASURE_THEN_ADD:
        raise ValueError(
            f"squeezed_fock_fidelity applies to {OpCase.MEASURE_THEN_ADD.value} only, "
            f"got {state.case.value}"
        )
    if state.outcome is not None and not (
        isinstance(state.outcome, FixedOutcome) and state.outcome.p_l == 0.0
    ):
        raise ValueError("squeezed_fock_fidelity requires the zero-outcome state")
    ch_sq = math.cosh(state.xi) ** 2
    sh_sq = math.sinh(state.xi) ** 2
    mb = state.mbar
    frac = mb / (1.0 + mb)
    return (ch_sq + 2.0 * frac * frac * sh_sq) / ((1.0 + mb) * ch_sq + mb * sh_sq)
