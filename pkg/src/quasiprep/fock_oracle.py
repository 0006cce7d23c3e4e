"""Brute-force verification path in a truncated number basis.

Everything the closed-form modules compute can be re-derived here the slow
way: build the density matrix, apply the ladder/squeeze/measurement operators
as explicit matrices, and read quasi-probability values off displaced-parity
and coherent-state overlaps.  The two paths share no formulas, which is the
point: agreement to ~1e-6 on full phase-space grids is the acceptance gate
for the analytic machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import expm

from .ops_algebra import CaseSpec, FixedOutcome, OpCase, Window

__all__ = [
    "TruncationError",
    "FockDensityMatrix",
    "annihilation",
    "position",
    "thermal_dm",
    "apply_ladder",
    "apply_squeeze",
    "apply_measurement",
    "apply_measurement_window",
    "compose_case",
    "wigner_at",
    "wigner_grid",
    "q_at",
    "q_grid",
    "coherent_vector",
    "coherent_element",
    "displaced_parity_wigner",
]

_TAIL_FRACTION = 0.1
_TAIL_GATE = 1e-8


class TruncationError(RuntimeError):
    """Raised when the truncated basis cannot support the requested operation."""


@dataclass(eq=False)
class FockDensityMatrix:
    """A (possibly unnormalized) density matrix in the number basis."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.ndim != 2 or self.data.shape[0] != self.data.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {self.data.shape}")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.data)))

    def normalized(self) -> "FockDensityMatrix":
        tr = self.trace
        if tr <= 0.0:
            raise ValueError("cannot normalize a matrix with non-positive trace")
        return FockDensityMatrix(self.data / tr)

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.data))

    def tail_mass(self, fraction: float = _TAIL_FRACTION) -> float:
        """Occupation in the top ``fraction`` of levels, relative to the trace."""
        start = self.dim - max(1, int(self.dim * fraction))
        scale = max(abs(self.trace), 1e-300)
        return float(np.sum(self.populations()[start:])) / scale

    def purity(self) -> float:
        tr = self.trace
        return float(np.real(np.trace(self.data @ self.data))) / (tr * tr)

    def mean_occupation(self) -> float:
        return float(np.arange(self.dim) @ self.populations()) / self.trace

    def entropy(self) -> float:
        """von Neumann entropy (natural log) of the normalized state."""
        evals = np.linalg.eigvalsh(self.data / self.trace)
        evals = evals[evals > 1e-300]
        return float(-np.sum(evals * np.log(evals)))

    def check_physical(self, atol: float = 1e-10) -> None:
        """Assert hermiticity and positive semidefiniteness within tolerance."""
        herm = np.max(np.abs(self.data - self.data.conj().T))
        if herm > 1e-12 * max(1.0, abs(self.trace)):
            raise ValueError(f"matrix is not Hermitian (deviation {herm:.3g})")
        lowest = float(np.linalg.eigvalsh(self.data)[0])
        if lowest < -atol * max(1.0, abs(self.trace)):
            raise ValueError(f"matrix has negative eigenvalue {lowest:.3g}")


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, dim)), 1)


def position(dim: int) -> np.ndarray:
    a = annihilation(dim)
    return (a + a.T) / math.sqrt(2.0)


def _check_tail(rho: FockDensityMatrix, context: str) -> FockDensityMatrix:
    if rho.trace > 1e-300 and rho.tail_mass() > _TAIL_GATE:
        raise TruncationError(
            f"{context}: tail mass {rho.tail_mass():.3g} exceeds {_TAIL_GATE:g}; "
            f"increase the truncation (dim = {rho.dim})"
        )
    return rho


def thermal_dm(nbar: float, dim: int) -> FockDensityMatrix:
    """Truncated thermal state; trace is 1 minus the (tiny) discarded tail."""
    if nbar < 0.0:
        raise ValueError(f"nbar must be non-negative, got {nbar}")
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    if nbar == 0.0:
        data = np.zeros((dim, dim))
        data[0, 0] = 1.0
        return FockDensityMatrix(data)
    ratio = nbar / (1.0 + nbar)
    if ratio**dim >= 1e-12:
        raise TruncationError(
            f"dim = {dim} leaves a thermal tail of {ratio**dim:.3g} at nbar = {nbar}"
        )
    weights = ratio ** np.arange(dim) / (1.0 + nbar)
    return FockDensityMatrix(np.diag(weights))


def apply_ladder(rho: FockDensityMatrix, which: str) -> FockDensityMatrix:
    """b rho b^dag ("annihilate") or b^dag rho b ("create"), unnormalized."""
    d = rho.dim
    out = np.zeros_like(rho.data)
    if which == "annihilate":
        n = np.arange(1.0, d)
        fac = np.sqrt(np.outer(n, n))
        out[:-1, :-1] = fac * rho.data[1:, 1:]
    elif which == "create":
        top = float(np.real(rho.data[-1, -1]))
        if top > 1e-10 * max(abs(rho.trace), 1e-300):
            raise TruncationError(
                f"create would push occupied top level (population {top:.3g}) out of the basis"
            )
        n = np.arange(1.0, d)
        fac = np.sqrt(np.outer(n, n))
        out[1:, 1:] = fac * rho.data[:-1, :-1]
    else:
        raise ValueError(f"which must be 'annihilate' or 'create', got {which!r}")
    return FockDensityMatrix(out)


@lru_cache(maxsize=32)
def _squeeze_matrix(r: float, dim: int) -> np.ndarray:
    a = annihilation(dim)
    gen = 0.5 * r * (a @ a - a.T @ a.T)
    return expm(gen)


def apply_squeeze(rho: FockDensityMatrix, r: float) -> FockDensityMatrix:
    """Conjugation by S(r) = exp[(r/2)(b^2 - b^dag^2)]; X-variance shrinks for r > 0."""
    if r == 0.0:
        return rho
    s = _squeeze_matrix(float(r), rho.dim)
    return _check_tail(FockDensityMatrix(s @ rho.data @ s.conj().T), "apply_squeeze")


@lru_cache(maxsize=32)
def _position_eigensystem(dim: int) -> Tuple[np.ndarray, np.ndarray]:
    lam, vec = np.linalg.eigh(position(dim))
    return lam, vec


def _measurement_matrix(chi: float, p_l: float, dim: int) -> np.ndarray:
    lam, vec = _position_eigensystem(dim)
    weights = math.pi ** (-0.25) * np.exp(-0.5 * (p_l - chi * lam) ** 2)
    return (vec * weights) @ vec.conj().T


def apply_measurement(rho: FockDensityMatrix, chi: float, p_l: float) -> FockDensityMatrix:
    """Conjugation by the outcome-p_l measurement kernel; trace = outcome density."""
    if chi < 0.0:
        raise ValueError(f"chi must be non-negative, got {chi}")
    m = _measurement_matrix(chi, p_l, rho.dim)
    return _check_tail(FockDensityMatrix(m @ rho.data @ m.conj().T), "apply_measurement")


def apply_measurement_window(
    rho: FockDensityMatrix, chi: float, w: float, order: int = 64
) -> FockDensityMatrix:
    """Mixture over outcomes in (-w, w) via Gauss-Legendre quadrature.

    The integrand is analytic in the outcome, so 64 nodes are far more than
    enough for full double precision at any window used here.
    """
    if not w > 0.0:
        raise ValueError(f"window half-width must be positive, got {w}")
    nodes, weights = leggauss(order)
    out = np.zeros_like(rho.data)
    for t, wt in zip(nodes, weights):
        m = _measurement_matrix(chi, w * t, rho.dim)
        out += (wt * w) * (m @ rho.data @ m.conj().T)
    return _check_tail(FockDensityMatrix(out), "apply_measurement_window")


def _default_dim(nbar: float, xi: float) -> int:
    # The post-squeeze number tail decays with ratio (2V-1)/(2V+1),
    # V = (1/2 + nbar) e^(2 xi); size the basis for ~1e-9 tail headroom.
    var_p = (0.5 + nbar) * math.exp(2.0 * abs(xi))
    ratio = (2.0 * var_p - 1.0) / (2.0 * var_p + 1.0)
    needed = 48 if ratio <= 0.0 else 24.0 / -math.log(ratio) + 16
    dim = 64
    while dim < needed and dim < 512:
        dim *= 2
    return dim


def compose_case(spec: CaseSpec, dim: int = 0) -> FockDensityMatrix:
    """Full unnormalized output state of a case, amplitude included.

    The truncation auto-escalates (64 -> ... -> 512) until the tail gate
    passes, matching the squeeze-leakage growth with e^(2 xi).
    """
    from .ops_algebra import effective_params  # local to avoid import noise

    if spec.case.uses_measurement:
        xi = effective_params(spec.chi, spec.nbar).xi
    else:
        xi = spec.squeeze_r
    dims = [dim] if dim else [d for d in (64, 128, 256, 512) if d >= _default_dim(spec.nbar, xi)]
    last_err = None
    for d in dims:
        try:
            return _compose_case_at_dim(spec, d)
        except TruncationError as err:
            last_err = err
    raise last_err


def _compose_case_at_dim(spec: CaseSpec, dim: int) -> FockDensityMatrix:
    rho = thermal_dm(spec.nbar, dim)
    ladder = "create" if spec.case.adds_quantum else "annihilate"

    def gaussian_op(r: FockDensityMatrix) -> FockDensityMatrix:
        if not spec.case.uses_measurement:
            return apply_squeeze(r, spec.squeeze_r)
        outcome = spec.outcome if spec.outcome is not None else FixedOutcome(0.0)
        if isinstance(outcome, Window):
            return apply_measurement_window(r, spec.chi, outcome.w)
        return apply_measurement(r, spec.chi, outcome.p_l)

    if spec.case.ladder_first:
        rho = gaussian_op(apply_ladder(rho, ladder))
    else:
        rho = apply_ladder(gaussian_op(rho), ladder)
    return FockDensityMatrix(spec.amplitude_f * rho.data)


# ---------------------------------------------------------------------------
# Quasi-probability readout
# ---------------------------------------------------------------------------

def coherent_vector(beta: complex, dim: int) -> np.ndarray:
    """Truncated coherent-state amplitudes e^(-|b|^2/2) b^n / sqrt(n!)."""
    out = np.empty(dim, dtype=complex)
    out[0] = math.exp(-0.5 * abs(beta) ** 2)
    for n in range(1, dim):
        out[n] = out[n - 1] * beta / math.sqrt(n)
    return out


def _coherent_adequacy(rho: FockDensityMatrix, amp: float) -> float:
    """Cauchy-Schwarz bound on the truncation error of coherent overlaps.

    |<c| rho |c_tail>| <= (sum_tail sqrt(rho_nn) |c_n|)^2 with the tail taken
    over the top levels; small means the basis can hold amplitude ``amp``.
    """
    d = rho.dim
    start = d - max(1, int(d * _TAIL_FRACTION))
    pops = np.clip(rho.populations(), 0.0, None)
    if amp == 0.0:
        return 0.0
    log_c = -0.5 * amp * amp + np.arange(start, d) * math.log(amp) \
        - 0.5 * np.array([math.lgamma(n + 1) for n in range(start, d)])
    coh = np.exp(np.clip(log_c, -700.0, 50.0))
    bound = float(np.sum(np.sqrt(pops[start:]) * coh)) ** 2
    return bound / max(abs(rho.trace), 1e-300)


def _require_amplitude(rho: FockDensityMatrix, amp: float, context: str) -> None:
    bound = _coherent_adequacy(rho, amp)
    if bound > 1e-10:
        raise TruncationError(
            f"{context}: amplitude {amp:.3g} too large for dim = {rho.dim} "
            f"(truncation bound {bound:.3g})"
        )


def q_grid(rho: FockDensityMatrix, xs, ys) -> np.ndarray:
    """Husimi values <beta| rho |beta> / pi on the grid (rows x, columns y)."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    amp = float(np.hypot(np.max(np.abs(xs)), np.max(np.abs(ys))))
    _require_amplitude(rho, amp, "q_grid")
    return _q_grid_unchecked(rho, xs, ys)


def _q_grid_unchecked(rho: FockDensityMatrix, xs, ys) -> np.ndarray:
    beta = (xs[:, None] + 1j * ys[None, :]).ravel()
    d = rho.dim
    c = np.empty((beta.size, d), dtype=complex)
    c[:, 0] = np.exp(-0.5 * np.abs(beta) ** 2)
    for n in range(1, d):
        c[:, n] = c[:, n - 1] * beta / math.sqrt(n)
    vals = np.einsum("kd,de,ke->k", c.conj(), rho.data, c, optimize=True)
    return np.real(vals).reshape(xs.size, ys.size) / math.pi


def q_at(rho: FockDensityMatrix, x: float, y: float) -> float:
    return float(q_grid(rho, [x], [y])[0, 0])


def coherent_element(rho: FockDensityMatrix, beta1: complex, beta2: complex) -> complex:
    """<beta1| rho |beta2> from the truncated coherent expansions."""
    _require_amplitude(rho, max(abs(beta1), abs(beta2)), "coherent_element")
    c1 = coherent_vector(beta1, rho.dim)
    c2 = coherent_vector(beta2, rho.dim)
    return complex(c1.conj() @ rho.data @ c2)


def wigner_grid(rho: FockDensityMatrix, xs, ys) -> np.ndarray:
    """Wigner values on the grid via the scaled-Laguerre kernel.

    W(beta) = (2/pi) sum_{m,n} rho_{nm} <m| D(beta) Pi D(-beta) |n>; the kernel
    elements are evaluated with a recurrence on K = e^(-B/2) (2|beta|)^a
    sqrt(m!/(m+a)!) L_m^a(B), B = 4 |beta|^2, whose values stay O(1) at any
    amplitude, so the sum is stable wherever e^(-B/2) is representable.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    beta = (xs[:, None] + 1j * ys[None, :]).ravel()
    absb = np.abs(beta)
    _require_amplitude(rho, float(np.max(absb)), "wigner_grid")
    b_sq = 4.0 * absb * absb
    # Points beyond the representable damping are exactly zero in double precision.
    active = b_sq < 1400.0
    bs = b_sq[active]
    phase = np.ones_like(beta[active])
    nz = absb[active] > 0.0
    phase[nz] = np.conj(beta[active][nz]) / absb[active][nz]
    d = rho.dim
    acc = np.zeros(bs.shape, dtype=complex)
    log2b = np.where(bs > 0.0, 0.5 * np.log(np.where(bs > 0.0, bs, 1.0)), 0.0)
    phase_pow = np.ones_like(phase)
    for alpha in range(d):
        if alpha > 0:
            phase_pow = phase_pow * phase
        diag = np.ascontiguousarray(np.diagonal(rho.data, offset=-alpha))  # rho[m+alpha, m]
        if not np.any(diag):
            continue
        # K_0 = e^(-B/2) (2|beta|)^alpha / sqrt(alpha!)
        start = -0.5 * bs + alpha * log2b - 0.5 * math.lgamma(alpha + 1)
        k_prev = np.zeros_like(bs)
        k = np.exp(start)
        if alpha > 0:
            k[bs == 0.0] = 0.0
        weight = 2.0 if alpha > 0 else 1.0
        partial = np.zeros(bs.shape, dtype=complex)
        for m in range(d - alpha):
            coeff = weight * (-1.0 if m % 2 else 1.0) * diag[m]
            if coeff != 0.0:
                partial += coeff * k
            # advance K_m -> K_{m+1}
            c1 = (2.0 * m + 1.0 + alpha - bs) / math.sqrt((m + 1.0) * (m + 1.0 + alpha))
            c2 = math.sqrt(m * (m + alpha) / ((m + 1.0) * (m + 1.0 + alpha))) if m else 0.0
            k, k_prev = c1 * k - c2 * k_prev, k
        acc += phase_pow * partial
    out = np.zeros(beta.shape)
    out[active] = np.real(acc)
    return (2.0 / math.pi) * out.reshape(xs.size, ys.size)


def wigner_at(rho: FockDensityMatrix, x: float, y: float) -> float:
    return float(wigner_grid(rho, [x], [y])[0, 0])


def displaced_parity_wigner(rho: FockDensityMatrix, x: float, y: float) -> float:
    """Direct-definition Wigner value (2/pi) Tr[rho D(beta) Pi D(-beta)].

    Slow (matrix exponential per point); used to pin the kernel conventions.
    """
    d = rho.dim
    a = annihilation(d)
    beta = x + 1j * y
    disp = expm(beta * a.conj().T - np.conj(beta) * a)
    parity = np.diag((-1.0) ** np.arange(d))
    return float(np.real(np.trace(rho.data @ disp @ parity @ disp.conj().T))) * 2.0 / math.pi
