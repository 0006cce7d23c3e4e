"""Closed-form evaluation of generalized quasi-probability (R-) functions.

The R-function of a state is the Gaussian smoothing of its P-function with
ordering parameter tau; tau = 0, 1/2, 1 give the P-, Wigner and Q-functions.
For every normal-form state produced by :mod:`quasiprep.ops_algebra` the
R-function is a short sum of Gaussian derivatives,

    R(x, y) = sum_{n,m} c_{n,m} d^n/dx^n d^m/dy^m g(x; mean, sx) g(y; 0, sy),

with sparse coefficient tables for a fixed measurement outcome and for a
symmetric outcome window (where integration over the window produces boundary
terms plus an erf primitive).  Phase-space coordinates are x = Re(beta),
y = Im(beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.special import erf

from .ops_algebra import (
    CaseConstants,
    FixedOutcome,
    NormalFormState,
    Outcome,
    Window,
)

__all__ = [
    "NonRepresentableError",
    "ThermalState",
    "GaussianDerivativeExpansion",
    "PhaseSpaceGrid",
    "gaussian_derivative",
    "gaussian_primitive",
    "pnm_coefficients",
    "rnml_coefficients",
    "tau_variances",
    "is_representable",
    "eval_R",
    "eval_R_windowed",
    "apply_thermal_heating",
    "sample_grid",
    "auto_axes",
]


class NonRepresentableError(ValueError):
    """Raised when a tau-ordered distribution does not exist (variance <= 0)."""


@dataclass(frozen=True)
class ThermalState:
    """A bare thermal state of occupation nbar (no conditional operation).

    Its R-function is the normalized Gaussian with per-axis variance
    (tau + nbar)/2.
    """

    nbar: float

    def __post_init__(self):
        if self.nbar < 0.0:
            raise ValueError(f"nbar must be non-negative, got {self.nbar}")

    # Shares the field subset the evaluators read from NormalFormState.
    xi = 0.0
    zeta_xi = 0.0
    amplitude_f = 1.0
    sigma_l_sq = None
    outcome = None

    @property
    def mbar(self) -> float:
        return self.nbar

    @property
    def uses_measurement(self) -> bool:
        return False


State = Union[NormalFormState, ThermalState]

# Fault-injection hook for the validation CLI's negative controls: maps a
# coefficient name ("p20", "r101", ...) to a multiplicative perturbation.
_FAULT_INJECTION: Dict[str, float] = {}


def _faulted(name: str, value: float) -> float:
    scale = _FAULT_INJECTION.get(name)
    return value if scale is None else value * scale


# ---------------------------------------------------------------------------
# Gaussian derivative basis
# ---------------------------------------------------------------------------

def _hermite(order: int, t):
    """Physicists' Hermite polynomial H_n(t), stable recurrence, complex-safe."""
    t = np.asarray(t)
    h_prev = np.ones_like(t)
    if order == 0:
        return h_prev
    h = 2.0 * t
    for k in range(1, order):
        h, h_prev = 2.0 * t * h - 2.0 * k * h_prev, h
    return h


def gaussian_derivative(order: int, mean, var2: float, x):
    """n-th derivative of the normalized Gaussian with variance var2/2.

    g(x) = (pi var2)^(-1/2) exp[-(x - mean)^2 / var2] and

        d^n g / dx^n = (-1)^n var2^(-n/2) H_n((x - mean)/sqrt(var2)) g(x).

    Accepts complex x (and complex mean) for analytic continuation.
    """
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    if not var2 > 0.0:
        raise NonRepresentableError(f"variance parameter must be positive, got {var2}")
    x = np.asarray(x)
    t = (x - mean) / math.sqrt(var2)
    g = np.exp(-t * t) / math.sqrt(math.pi * var2)
    if order == 0:
        return g
    sign = -1.0 if order % 2 else 1.0
    return sign * var2 ** (-0.5 * order) * _hermite(order, t) * g


def gaussian_primitive(mean, var2: float, x):
    """Antiderivative of the normalized Gaussian: erf[(x - mean)/sqrt(var2)] / 2."""
    if not var2 > 0.0:
        raise NonRepresentableError(f"variance parameter must be positive, got {var2}")
    x = np.asarray(x)
    return 0.5 * erf((x - mean) / math.sqrt(var2))


# ---------------------------------------------------------------------------
# Coefficient tables
# ---------------------------------------------------------------------------

def pnm_coefficients(mbar: float, nu: float, mu: float, lam: float, p_l: float) -> Dict[Tuple[int, int], float]:
    """Coefficients of the P-function expansion of (nu b + mu b^dag + lam P_L) on a thermal state.

    Only (0,0), (1,0), (2,0) and (0,2) are non-zero.
    """
    if mbar < 0.0:
        raise ValueError(f"mbar must be non-negative, got {mbar}")
    occ = 1.0 + mbar
    p00 = nu * nu * mbar + mu * mu * occ + lam * lam * p_l * p_l
    p10 = -nu * lam * p_l * mbar - mu * lam * p_l * occ
    sym = 0.25 * nu * nu * mbar * mbar + 0.25 * mu * mu * occ * occ
    cross = 0.5 * nu * mu * mbar * occ
    return {
        (0, 0): _faulted("p00", p00),
        (1, 0): _faulted("p10", p10),
        (2, 0): _faulted("p20", sym + cross),
        (0, 2): _faulted("p02", sym - cross),
    }


def rnml_coefficients(
    mbar: float, nu: float, mu: float, lam: float, xi: float, sigma_l_sq: float
) -> Dict[Tuple[int, int, int], float]:
    """Coefficients of the window-integrated expansion (outcome density folded in).

    These absorb the squeeze rescaling e^(-(n-m) xi) and the rewrite of the
    outcome polynomial against derivatives of the outcome Gaussian; only five
    index triples survive.
    """
    if mbar < 0.0:
        raise ValueError(f"mbar must be non-negative, got {mbar}")
    occ = 1.0 + mbar
    sym = 0.25 * nu * nu * mbar * mbar + 0.25 * mu * mu * occ * occ
    cross = 0.5 * nu * mu * mbar * occ
    return {
        (0, 0, 0): _faulted("r000", nu * nu * mbar + mu * mu * occ + lam * lam * sigma_l_sq),
        (0, 0, 2): _faulted("r002", lam * lam * sigma_l_sq * sigma_l_sq),
        (1, 0, 1): _faulted("r101", math.exp(-xi) * lam * (nu * mbar + mu * occ) * sigma_l_sq),
        (2, 0, 0): _faulted("r200", math.exp(-2.0 * xi) * (sym + cross)),
        (0, 2, 0): _faulted("r020", math.exp(2.0 * xi) * (sym - cross)),
    }


@dataclass(frozen=True, eq=False)
class GaussianDerivativeExpansion:
    """Means, variances and sparse coefficients driving closed-form evaluation.

    ``coeffs`` is keyed (n, m) for a fixed outcome and (n, m, l) for a window;
    ``sigx_sq``/``sigy_sq`` are the per-axis variances at the stored tau.
    """

    tau: float
    sigx_sq: float
    sigy_sq: float
    mean_x_gain: float
    coeffs: Dict[tuple, float] = field(default_factory=dict)
    sigma_l_sq: Optional[float] = None


def tau_variances(state: State, tau: float) -> Tuple[float, float]:
    """Per-axis variances (sigma_x^2, sigma_y^2) of the tau-ordered Gaussian core."""
    half = 0.5 + state.mbar
    sigx_sq = 0.5 * (half * math.exp(-2.0 * state.xi) + tau - 0.5)
    sigy_sq = 0.5 * (half * math.exp(2.0 * state.xi) + tau - 0.5)
    return sigx_sq, sigy_sq


def is_representable(state: State, tau: float) -> bool:
    """Whether the tau-ordered distribution exists (both variances positive)."""
    sigx_sq, sigy_sq = tau_variances(state, tau)
    return sigx_sq > 0.0 and sigy_sq > 0.0


def apply_thermal_heating(tau_query: float, tau_th: float) -> float:
    """Ordering parameter after adding tau_th thermal quanta of decoherence.

    Heating maps every R_tau onto R_(tau + tau_th), so callers simply evaluate
    at the shifted tau (heated Wigner function = R at 1/2 + tau_th).
    """
    if tau_th < 0.0:
        raise ValueError(f"tau_th must be non-negative, got {tau_th}")
    return tau_query + tau_th


def _expansion_fixed(state: State, tau: float, p_l: float) -> GaussianDerivativeExpansion:
    sigx_sq, sigy_sq = tau_variances(state, tau)
    if not (sigx_sq > 0.0 and sigy_sq > 0.0):
        raise NonRepresentableError(
            f"tau = {tau} distribution does not exist for this state "
            f"(variances {2*sigx_sq:.3g}, {2*sigy_sq:.3g} must be positive)"
        )
    if isinstance(state, ThermalState):
        coeffs = {(0, 0): 1.0}
    else:
        c = state.constants
        pnm = pnm_coefficients(state.mbar, c.nu, c.mu, c.lam, p_l)
        coeffs = {
            (n, m): math.exp(-(n - m) * state.xi) * v for (n, m), v in pnm.items()
        }
    return GaussianDerivativeExpansion(
        tau=tau,
        sigx_sq=sigx_sq,
        sigy_sq=sigy_sq,
        mean_x_gain=state.zeta_xi,
        coeffs=coeffs,
        sigma_l_sq=state.sigma_l_sq,
    )


def _expansion_windowed(state: NormalFormState, tau: float) -> GaussianDerivativeExpansion:
    sigx_sq, sigy_sq = tau_variances(state, tau)
    if not (sigx_sq > 0.0 and sigy_sq > 0.0):
        raise NonRepresentableError(
            f"tau = {tau} distribution does not exist for this state"
        )
    c = state.constants
    coeffs = rnml_coefficients(state.mbar, c.nu, c.mu, c.lam, state.xi, state.sigma_l_sq)
    return GaussianDerivativeExpansion(
        tau=tau,
        sigx_sq=sigx_sq,
        sigy_sq=sigy_sq,
        mean_x_gain=state.zeta_xi,
        coeffs=coeffs,
        sigma_l_sq=state.sigma_l_sq,
    )


# ---------------------------------------------------------------------------
# Evaluators
# ---------------------------------------------------------------------------

def _x_factors_fixed(exp_: GaussianDerivativeExpansion, prefactor: float, p_l: float, x):
    """Collapse the fixed-outcome x-dependence onto the two y-basis functions.

    Returns (A, B) with R = A(x) g(y) + B(x) g''(y).
    """
    var2x = 2.0 * exp_.sigx_sq
    mean = exp_.mean_x_gain * p_l
    g0 = gaussian_derivative(0, mean, var2x, x)
    g1 = gaussian_derivative(1, mean, var2x, x)
    g2 = gaussian_derivative(2, mean, var2x, x)
    cf = exp_.coeffs
    a = prefactor * (
        cf.get((0, 0), 0.0) * g0 + cf.get((1, 0), 0.0) * g1 + cf.get((2, 0), 0.0) * g2
    )
    b = prefactor * cf.get((0, 2), 0.0) * g0
    return a, b


def _dGg(order: int, mu_g: float, var2_g: float, var2_env: float, x):
    """order-th x-derivative of [primitive(x; mu_g, var2_g) * g(x; 0, var2_env)].

    Leibniz expansion: the j = 0 term keeps the primitive, every other term
    turns it into a Gaussian derivative of order j - 1.
    """
    total = gaussian_primitive(mu_g, var2_g, x) * gaussian_derivative(order, 0.0, var2_env, x)
    for j in range(1, order + 1):
        total = total + math.comb(order, j) * gaussian_derivative(j - 1, mu_g, var2_g, x) * gaussian_derivative(order - j, 0.0, var2_env, x)
    return total


def _windowed_x_factor(n: int, l: int, exp_: GaussianDerivativeExpansion, w: float, x):
    """x-dependence of one (n, l) window term, already evaluated between -w and w."""
    zx = exp_.mean_x_gain
    var2x = 2.0 * exp_.sigx_sq
    var2l = 2.0 * exp_.sigma_l_sq
    # Geometry of the outcome/x joint Gaussian.
    var2_env = var2x + 2.0 * zx * zx * exp_.sigma_l_sq   # envelope in x
    vsig_sq = 1.0 + var2x / (2.0 * zx * zx * exp_.sigma_l_sq)  # erf-primitive scale factor^2
    total = 0.0
    for p_l, sign in ((w, 1.0), (-w, -1.0)):
        boundary = 0.0
        for k in range(l):
            boundary = boundary + (
                zx ** k
                * gaussian_derivative(l - 1 - k, 0.0, var2l, p_l)
                * gaussian_derivative(k + n, zx * p_l, var2x, x)
            )
        erf_term = (zx ** l) * _dGg(n + l, vsig_sq * zx * p_l, vsig_sq * var2x, var2_env, x)
        total = total + sign * (boundary - erf_term)
    return total


def _x_factors_windowed(exp_: GaussianDerivativeExpansion, prefactor: float, w: float, x):
    """Collapse the windowed x-dependence onto the two y-basis functions."""
    cf = exp_.coeffs
    if abs(exp_.mean_x_gain) * math.sqrt(exp_.sigma_l_sq) < 1e-13 * math.sqrt(exp_.sigx_sq):
        # No x-outcome coupling: the window integral factorizes into an erf
        # weight times the fixed-outcome profile (lam vanishes with zeta_xi,
        # so only the l = 0 coefficients survive).
        weight = erf(w / math.sqrt(2.0 * exp_.sigma_l_sq))
        var2x = 2.0 * exp_.sigx_sq
        g0 = gaussian_derivative(0, 0.0, var2x, x)
        g2 = gaussian_derivative(2, 0.0, var2x, x)
        a = prefactor * weight * (cf[(0, 0, 0)] * g0 + cf[(2, 0, 0)] * g2)
        b = prefactor * weight * cf[(0, 2, 0)] * g0
        return a, b
    a = prefactor * (
        cf[(0, 0, 0)] * _windowed_x_factor(0, 0, exp_, w, x)
        + cf[(0, 0, 2)] * _windowed_x_factor(0, 2, exp_, w, x)
        + cf[(1, 0, 1)] * _windowed_x_factor(1, 1, exp_, w, x)
        + cf[(2, 0, 0)] * _windowed_x_factor(2, 0, exp_, w, x)
    )
    b = prefactor * cf[(0, 2, 0)] * _windowed_x_factor(0, 0, exp_, w, x)
    return a, b


def _outcome_density(sigma_l_sq: float, p_l: float) -> float:
    return math.exp(-p_l * p_l / (2.0 * sigma_l_sq)) / math.sqrt(2.0 * math.pi * sigma_l_sq)


def eval_R(state: State, tau: float, x, y, p_l: float = 0.0):
    """Unnormalized R_tau at phase-space point(s) (x, y) for a fixed outcome.

    For measurement cases the value includes the amplitude and the outcome
    density, so the full integral over the plane is the joint outcome density;
    for squeeze cases it includes the amplitude, so the integral is the
    heralding probability.  x and y broadcast; complex values are accepted for
    analytic continuation.
    """
    exp_ = _expansion_fixed(state, tau, p_l)
    prefactor = state.amplitude_f
    if state.uses_measurement:
        prefactor *= _outcome_density(state.sigma_l_sq, p_l)
    a, b = _x_factors_fixed(exp_, prefactor, p_l, x)
    var2y = 2.0 * exp_.sigy_sq
    out = a * gaussian_derivative(0, 0.0, var2y, y) + b * gaussian_derivative(2, 0.0, var2y, y)
    return out if np.ndim(out) else out.item()


def eval_R_windowed(state: NormalFormState, tau: float, x, y, w: float):
    """Unnormalized R_tau of the mixture over outcomes in (-w, w).

    The integral over the plane equals the windowed heralding probability.
    Only measurement-case states are meaningful here; the zeta_xi = 0 corner
    (zero measurement strength) degenerates to an erf-weighted fixed-outcome
    profile and is handled explicitly.
    """
    if not w > 0.0:
        raise ValueError(f"window half-width must be positive, got {w}")
    if not isinstance(state, NormalFormState) or not state.uses_measurement:
        raise ValueError("windowed evaluation requires a measurement-case state")
    exp_ = _expansion_windowed(state, tau)
    a, b = _x_factors_windowed(exp_, state.amplitude_f, w, x)
    var2y = 2.0 * exp_.sigy_sq
    out = a * gaussian_derivative(0, 0.0, var2y, y) + b * gaussian_derivative(2, 0.0, var2y, y)
    return out if np.ndim(out) else out.item()


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class PhaseSpaceGrid:
    """Rectangular grid of R-function samples with normalization metadata.

    ``values[i, j]`` is the sample at (xs[i], ys[j]); ``norm`` is the composite
    trapezoid integral over the grid at construction (the heralding weight for
    unnormalized states, 1 after ``normalized()``).
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int
    values: np.ndarray
    tau: float
    norm: float

    def __post_init__(self):
        for n, tag in ((self.nx, "nx"), (self.ny, "ny")):
            if n < 3 or n % 2 == 0:
                raise ValueError(f"{tag} must be odd and >= 3, got {n}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / (self.ny - 1)

    def integral(self, values: Optional[np.ndarray] = None) -> float:
        """Composite 2-D trapezoid integral of ``values`` (default: own samples)."""
        v = self.values if values is None else values
        wx = np.ones(self.nx)
        wx[0] = wx[-1] = 0.5
        wy = np.ones(self.ny)
        wy[0] = wy[-1] = 0.5
        return float(wx @ v @ wy * self.dx * self.dy)

    def normalized(self) -> "PhaseSpaceGrid":
        """Same grid scaled to unit integral."""
        if self.norm <= 0.0:
            raise ValueError("cannot normalize a grid with non-positive integral")
        return PhaseSpaceGrid(
            self.x_min, self.x_max, self.y_min, self.y_max,
            self.nx, self.ny, self.values / self.norm, self.tau, 1.0,
        )

    def marginal_x(self) -> np.ndarray:
        """Trapezoid integral over y, one value per x sample."""
        wy = np.ones(self.ny)
        wy[0] = wy[-1] = 0.5
        return self.values @ wy * self.dy


def auto_axes(
    state: State,
    tau: float,
    outcome: Optional[Outcome] = None,
    nsig: float = 8.5,
    points_per_sigma: float = 16.0,
    min_points: int = 241,
    max_points: int = 4001,
) -> Tuple[np.ndarray, np.ndarray]:
    """Axis vectors covering the state's support at this tau.

    The x half-extent adds the outcome-displacement span |zeta_xi| * w_eff to
    nsig standard deviations; point counts follow points_per_sigma but stay
    within [min_points, max_points] and odd (origin and axes sampled).
    """
    sigx_sq, sigy_sq = tau_variances(state, tau)
    if not (sigx_sq > 0.0 and sigy_sq > 0.0):
        raise NonRepresentableError(f"tau = {tau} distribution does not exist for this state")
    sigx, sigy = math.sqrt(sigx_sq), math.sqrt(sigy_sq)
    outcome = outcome if outcome is not None else state.outcome
    span = 0.0
    if getattr(state, "uses_measurement", False) and outcome is not None:
        sig_l = math.sqrt(state.sigma_l_sq)
        if isinstance(outcome, Window):
            span = abs(state.zeta_xi) * min(outcome.w, nsig * sig_l)
        else:
            span = abs(state.zeta_xi * outcome.p_l)
    half_x = nsig * sigx + span
    half_y = nsig * sigy

    def _npts(half, sig):
        n = int(math.ceil(2.0 * half * points_per_sigma / sig)) + 1
        n = min(max(n, min_points), max_points)
        return n if n % 2 else n + 1

    xs = np.linspace(-half_x, half_x, _npts(half_x, sigx))
    ys = np.linspace(-half_y, half_y, _npts(half_y, sigy))
    return xs, ys


def _grid_values(state: State, tau: float, xs: np.ndarray, ys: np.ndarray,
                 outcome: Optional[Outcome]) -> np.ndarray:
    """Separable evaluation: two outer products instead of a full 2-D sweep."""
    if isinstance(outcome, Window):
        exp_ = _expansion_windowed(state, tau)
        a, b = _x_factors_windowed(exp_, state.amplitude_f, outcome.w, xs)
    else:
        p_l = outcome.p_l if isinstance(outcome, FixedOutcome) else 0.0
        exp_ = _expansion_fixed(state, tau, p_l)
        prefactor = state.amplitude_f
        if state.uses_measurement:
            prefactor *= _outcome_density(state.sigma_l_sq, p_l)
        a, b = _x_factors_fixed(exp_, prefactor, p_l, xs)
    var2y = 2.0 * exp_.sigy_sq
    y0 = gaussian_derivative(0, 0.0, var2y, ys)
    y2 = gaussian_derivative(2, 0.0, var2y, ys)
    return np.outer(a, y0) + np.outer(b, y2)


def sample_grid(
    state: State,
    tau: float,
    extent=None,
    nx: Optional[int] = None,
    ny: Optional[int] = None,
    outcome: Optional[Outcome] = None,
    nsig: float = 8.5,
    points_per_sigma: float = 16.0,
) -> PhaseSpaceGrid:
    """Sample the (windowed or fixed-outcome) R-function on a rectangular grid.

    ``extent`` is a half-width (symmetric square), a 4-tuple
    (x_min, x_max, y_min, y_max), or None for automatic support-covering axes.
    The grid's ``norm`` records the trapezoid integral.
    """
    outcome = outcome if outcome is not None else getattr(state, "outcome", None)
    if extent is None and (nx is None or ny is None):
        xs, ys = auto_axes(state, tau, outcome, nsig=nsig, points_per_sigma=points_per_sigma)
        if nx is not None or ny is not None:
            raise ValueError("give both nx and ny when overriding automatic axes")
    else:
        if extent is None:
            raise ValueError("explicit nx/ny require an explicit extent")
        if np.isscalar(extent):
            x_min, x_max, y_min, y_max = -extent, extent, -extent, extent
        else:
            x_min, x_max, y_min, y_max = extent
        nx = 241 if nx is None else nx
        ny = 241 if ny is None else ny
        xs = np.linspace(x_min, x_max, nx)
        ys = np.linspace(y_min, y_max, ny)
    values = _grid_values(state, tau, xs, ys, outcome)
    grid = PhaseSpaceGrid(
        x_min=float(xs[0]), x_max=float(xs[-1]),
        y_min=float(ys[0]), y_max=float(ys[-1]),
        nx=len(xs), ny=len(ys),
        values=values, tau=tau, norm=0.0,
    )
    grid.norm = grid.integral()
    return grid
