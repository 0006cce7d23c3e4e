"""Heralding probabilities, window solving, and the thermal decoherence budget."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .ops_algebra import CaseConstants, FixedOutcome, NormalFormState, Window

__all__ = [
    "HeraldReport",
    "outcome_density",
    "herald_prob_squeeze",
    "herald_prob_window",
    "herald_saturation",
    "solve_window",
    "thermal_decoherence_budget",
    "herald_report",
]


@dataclass(frozen=True)
class HeraldReport:
    """Success weight of a conditional preparation.

    ``mode`` records what the number means: a probability for windowed
    measurement and deterministic-squeeze cases, a probability *density* over
    the outcome for a fixed outcome.
    """

    probability: float
    mode: str  # "deterministic-squeeze" | "windowed" | "fixed-outcome density"
    window_w: Optional[float] = None


def outcome_density(sigma_l_sq: float, p_l: float) -> float:
    """Gaussian density of the measurement outcome (unit total integral)."""
    return math.exp(-p_l * p_l / (2.0 * sigma_l_sq)) / math.sqrt(2.0 * math.pi * sigma_l_sq)


def herald_prob_squeeze(f: float, nu: float, mu: float, nbar: float) -> float:
    """p = f [nu^2 nbar + mu^2 (1 + nbar)] for the deterministic-squeeze cases."""
    return f * (nu * nu * nbar + mu * mu * (1.0 + nbar))


def herald_prob_window(
    f: float, constants: CaseConstants, sigma_l_sq: float, mbar: float, w: float
) -> float:
    """Probability of an outcome inside (-w, w) for a measurement case.

    p(w) = f {[nu^2 mbar + mu^2 (1+mbar) + lam^2 sigma_L^2] erf(w / sqrt(2 sigma_L^2))
              - 2 lam^2 sigma_L^2 w f_out(w)}
    """
    if not w > 0.0:
        raise ValueError(f"window half-width must be positive, got {w}")
    nu, mu, lam = constants.nu, constants.mu, constants.lam
    body = nu * nu * mbar + mu * mu * (1.0 + mbar) + lam * lam * sigma_l_sq
    return f * (
        body * math.erf(w / math.sqrt(2.0 * sigma_l_sq))
        - 2.0 * lam * lam * sigma_l_sq * w * outcome_density(sigma_l_sq, w)
    )


def herald_saturation(f: float, constants: CaseConstants, sigma_l_sq: float, mbar: float) -> float:
    """The w -> infinity limit of the windowed heralding probability."""
    nu, mu, lam = constants.nu, constants.mu, constants.lam
    return f * (nu * nu * mbar + mu * mu * (1.0 + mbar) + lam * lam * sigma_l_sq)


def solve_window(target_p: float, state: NormalFormState, rel_tol: float = 1e-10) -> float:
    """The window half-width w with herald probability target_p.

    Plain bisection on the strictly monotone p(w); the bracket starts at the
    natural outcome scale sigma_L and doubles until it straddles the target.
    """
    if not state.uses_measurement:
        raise ValueError("solve_window applies to measurement cases only")
    if not target_p > 0.0:
        raise ValueError(f"target probability must be positive, got {target_p}")
    f, c, s2, mb = state.amplitude_f, state.constants, state.sigma_l_sq, state.mbar
    saturation = herald_saturation(f, c, s2, mb)
    if target_p >= saturation:
        raise ValueError(
            f"target probability {target_p:.6g} is unreachable; "
            f"the windowed probability saturates at {saturation:.6g}"
        )

    def p_of(w: float) -> float:
        return herald_prob_window(f, c, s2, mb, w)

    hi = math.sqrt(s2)
    lo = 0.0
    while p_of(hi) < target_p:
        lo, hi = hi, 2.0 * hi
    while (hi - lo) > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if p_of(mid) < target_p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def thermal_decoherence_budget(n_periods: float, nbar_bath: float, q_factor: float) -> float:
    """Thermal quanta added while the slow (sideband) operation runs.

    tau_th = N_T * nbar_bath / Q: interaction time in mechanical periods times
    the per-period rethermalisation.
    """
    if not n_periods > 0.0:
        raise ValueError(f"n_periods must be positive, got {n_periods}")
    if nbar_bath < 0.0:
        raise ValueError(f"nbar_bath must be non-negative, got {nbar_bath}")
    if not q_factor > 0.0:
        raise ValueError(f"q_factor must be positive, got {q_factor}")
    return n_periods * nbar_bath / q_factor


def herald_report(state: NormalFormState) -> HeraldReport:
    """Heralding weight of a normal-form state under its own outcome mode."""
    if not state.uses_measurement:
        p = herald_prob_squeeze(
            state.amplitude_f, state.constants.nu, state.constants.mu, state.mbar
        )
        return HeraldReport(probability=p, mode="deterministic-squeeze")
    outcome = state.outcome
    if isinstance(outcome, Window):
        p = herald_prob_window(
            state.amplitude_f, state.constants, state.sigma_l_sq, state.mbar, outcome.w
        )
        return HeraldReport(probability=p, mode="windowed", window_w=outcome.w)
    p_l = outcome.p_l if isinstance(outcome, FixedOutcome) else 0.0
    c = state.constants
    body = (
        c.nu * c.nu * state.mbar
        + c.mu * c.mu * (1.0 + state.mbar)
        + c.lam * c.lam * p_l * p_l
    )
    density = state.amplitude_f * outcome_density(state.sigma_l_sq, p_l) * body
    return HeraldReport(probability=density, mode="fixed-outcome density")
