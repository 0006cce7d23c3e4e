"""Resolution of the eight conditional operations into a Gaussian normal form.

The library analyses bosonic states prepared by combining a deterministic
squeeze or a pulsed X-quadrature measurement with heralded single-quantum
addition or subtraction on an initial thermal state.  Conventions used
throughout:

* ladder operators b, b^dag with [b, b^dag] = 1,
* quadratures X = (b + b^dag)/sqrt(2), P = (b - b^dag)/(i sqrt(2)),
* squeeze S(r) = exp[(r/2)(b^2 - b^dag^2)], which squeezes X for r > 0,
* displacement D(d) = exp(d b^dag - d* b),
* measurement operator M(chi, P_L) = pi^(-1/4) exp[-(P_L - chi X)^2 / 2]
  with continuous outcome P_L and strength chi.

Every one of the eight orderings acting on a thermal state of occupation nbar
can be rewritten as a scalar times

    D(zeta_xi P_L) S(xi) (nu b + mu b^dag + lam P_L)

acting by conjugation on an effective thermal state of occupation mbar.  This
module computes the effective parameters (xi, zeta, mbar, sigma_L^2) and the
case constants (nu, mu, lam); the quasiprob module turns the normal form into
closed-form quasi-probability functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

__all__ = [
    "OpCase",
    "FixedOutcome",
    "Window",
    "CaseSpec",
    "EffectiveParams",
    "CaseConstants",
    "NormalFormState",
    "effective_params",
    "chi_from_xi",
    "case_constants",
    "normal_form",
]

_SQRT2 = math.sqrt(2.0)


class OpCase(str, Enum):
    """The eight operation orderings, named in order of application.

    ``SUB``/``ADD`` are heralded single-quantum subtraction (b) and addition
    (b^dag); ``SQUEEZE`` is the deterministic squeeze S(r); ``MEASURE`` is the
    X-quadrature measurement M(chi, P_L).  As operator products (rightmost
    acts first) the cases read::

        SUB_THEN_SQUEEZE  = S b        ADD_THEN_SQUEEZE  = S b^dag
        SQUEEZE_THEN_SUB  = b S        SQUEEZE_THEN_ADD  = b^dag S
        SUB_THEN_MEASURE  = M b        ADD_THEN_MEASURE  = M b^dag
        MEASURE_THEN_SUB  = b M        MEASURE_THEN_ADD  = b^dag M
    """

    SUB_THEN_SQUEEZE = "sub-then-squeeze"
    ADD_THEN_SQUEEZE = "add-then-squeeze"
    SQUEEZE_THEN_SUB = "squeeze-then-sub"
    SQUEEZE_THEN_ADD = "squeeze-then-add"
    SUB_THEN_MEASURE = "sub-then-measure"
    ADD_THEN_MEASURE = "add-then-measure"
    MEASURE_THEN_SUB = "measure-then-sub"
    MEASURE_THEN_ADD = "measure-then-add"

    @property
    def uses_measurement(self) -> bool:
        return self in (
            OpCase.SUB_THEN_MEASURE,
            OpCase.ADD_THEN_MEASURE,
            OpCase.MEASURE_THEN_SUB,
            OpCase.MEASURE_THEN_ADD,
        )

    @property
    def adds_quantum(self) -> bool:
        """True for the b^dag (addition) variants."""
        return self in (
            OpCase.ADD_THEN_SQUEEZE,
            OpCase.SQUEEZE_THEN_ADD,
            OpCase.ADD_THEN_MEASURE,
            OpCase.MEASURE_THEN_ADD,
        )

    @property
    def ladder_first(self) -> bool:
        """True when the addition/subtraction happens before the Gaussian op."""
        return self in (
            OpCase.SUB_THEN_SQUEEZE,
            OpCase.ADD_THEN_SQUEEZE,
            OpCase.SUB_THEN_MEASURE,
            OpCase.ADD_THEN_MEASURE,
        )


@dataclass(frozen=True)
class FixedOutcome:
    """Condition on a single measurement outcome P_L (a density, not a probability)."""

    p_l: float


@dataclass(frozen=True)
class Window:
    """Accept any outcome in the symmetric window (-w, w)."""

    w: float

    def __post_init__(self):
        if not self.w > 0.0:
            raise ValueError(f"window half-width must be positive, got {self.w}")


Outcome = Union[FixedOutcome, Window]


@dataclass(frozen=True)
class CaseSpec:
    """Which operation ordering to apply, and with what parameters.

    Exactly one of ``squeeze_r`` / ``chi`` must be given, matching the case
    family.  ``amplitude_f`` is the squared amplitude of the heralded
    addition/subtraction; it multiplies every heralding probability and every
    unnormalised quasi-probability function.  ``outcome`` selects between a
    fixed measurement outcome and a symmetric acceptance window, and is only
    meaningful for measurement cases.
    """

    case: OpCase
    nbar: float
    squeeze_r: Optional[float] = None
    chi: Optional[float] = None
    amplitude_f: float = 1e-2
    outcome: Optional[Outcome] = None

    def __post_init__(self):
        if self.nbar < 0.0:
            raise ValueError(f"nbar must be non-negative, got {self.nbar}")
        if not self.amplitude_f > 0.0:
            raise ValueError(f"amplitude_f must be positive, got {self.amplitude_f}")
        if self.case.uses_measurement:
            if self.chi is None or self.squeeze_r is not None:
                raise ValueError(f"case {self.case.value} requires chi (and no squeeze_r)")
            if self.chi < 0.0:
                raise ValueError(f"chi must be non-negative, got {self.chi}")
        else:
            if self.squeeze_r is None or self.chi is not None:
                raise ValueError(f"case {self.case.value} requires squeeze_r (and no chi)")
            if self.outcome is not None:
                raise ValueError("squeeze cases have no measurement outcome")


@dataclass(frozen=True)
class EffectiveParams:
    """Gaussian normal-form parameters of the measurement acting on a thermal state."""

    sigma_l_sq: float  # variance of the outcome distribution
    xi: float          # effective squeeze
    zeta: float        # displacement gain before reordering with the squeeze
    zeta_xi: float     # displacement (Re beta) per unit outcome, = zeta e^(-xi)
    mbar: float        # effective thermal occupation


@dataclass(frozen=True)
class CaseConstants:
    """Coefficients of the linear ladder factor nu*b + mu*b^dag + lam*P_L."""

    nu: float
    mu: float
    lam: float


@dataclass(frozen=True)
class NormalFormState:
    """A fully resolved case: everything the quasi-probability evaluators need.

    Squeeze cases carry (xi=r, zeta_xi=0, mbar=nbar) and no sigma_l_sq;
    measurement cases carry the effective parameters.  At P_L = 0 the two
    families have the same structure, which motivates comparing them through
    the identification xi = r.
    """

    case: OpCase
    xi: float
    zeta_xi: float
    mbar: float
    constants: CaseConstants
    amplitude_f: float
    sigma_l_sq: Optional[float] = None
    outcome: Optional[Outcome] = None
    chi: Optional[float] = None
    nbar: Optional[float] = None

    @property
    def uses_measurement(self) -> bool:
        return self.sigma_l_sq is not None


def effective_params(chi: float, nbar: float) -> EffectiveParams:
    """Decompose the measurement on a thermal state into squeeze/displace/thermal form.

    With a = 1 + 2 nbar:

        2 sigma_L^2 = 1 + chi^2 a
        xi   = log[(chi^2 + a)(chi^2 + 1/a)] / 4
        zeta = chi e^xi / (sqrt(2) (chi^2 + 1/a))
        mbar = (sqrt[(chi^2 + a) / (chi^2 + 1/a)] - 1) / 2

    The 1/sqrt(2) in zeta converts the post-measurement X-quadrature mean
    a chi P_L / (1 + a chi^2) into Re(beta) units; it is pinned by the
    Fock-basis cross-check of the full operator product.
    """
    if chi < 0.0:
        raise ValueError(f"chi must be non-negative, got {chi}")
    if nbar < 0.0:
        raise ValueError(f"nbar must be non-negative, got {nbar}")
    a = 1.0 + 2.0 * nbar
    plus = chi * chi + a
    minus = chi * chi + 1.0 / a
    sigma_l_sq = 0.5 * (1.0 + chi * chi * a)
    xi = 0.25 * math.log(plus * minus)
    zeta = chi * math.exp(xi) / (_SQRT2 * minus)
    mbar = 0.5 * (math.sqrt(plus / minus) - 1.0)
    return EffectiveParams(
        sigma_l_sq=sigma_l_sq,
        xi=xi,
        zeta=zeta,
        zeta_xi=zeta * math.exp(-xi),
        mbar=mbar,
    )


def chi_from_xi(xi_target: float, nbar: float) -> float:
    """Invert xi(chi, nbar): the measurement strength with a given effective squeeze.

    e^(4 xi) = (chi^2 + a)(chi^2 + 1/a) is a quadratic in chi^2; the
    non-negative root is closed-form and branch-unambiguous.
    """
    if xi_target < 0.0:
        raise ValueError(f"xi_target must be non-negative, got {xi_target}")
    if nbar < 0.0:
        raise ValueError(f"nbar must be non-negative, got {nbar}")
    if xi_target == 0.0:
        return 0.0
    a = 1.0 + 2.0 * nbar
    s = a + 1.0 / a
    # u^2 + s u + (1 - e^(4 xi)) = 0 with u = chi^2 >= 0
    disc = s * s - 4.0 * (1.0 - math.exp(4.0 * xi_target))
    u = 0.5 * (-s + math.sqrt(disc))
    return math.sqrt(max(u, 0.0))


def case_constants(spec: CaseSpec, eff: Optional[EffectiveParams] = None) -> CaseConstants:
    """The (nu, mu, lam) coefficients for a case.

    Measurement cases need the effective parameters; squeeze cases must not
    pass any.  lam is the coefficient of the outcome P_L picked up when the
    ladder operator is commuted through the measurement's Gaussian factors.
    """
    case = spec.case
    if case.uses_measurement:
        if eff is None:
            raise ValueError(f"case {case.value} requires effective parameters")
        xi = eff.xi
        chi = spec.chi
        zeta_xi = eff.zeta_xi
        ch, sh, em = math.cosh(xi), math.sinh(xi), math.exp(-xi)
        half_chi_sq = 0.5 * chi * chi
        if case is OpCase.SUB_THEN_MEASURE:
            return CaseConstants(
                nu=ch + half_chi_sq * em,
                mu=-sh + half_chi_sq * em,
                lam=-chi / _SQRT2 + (1.0 + chi * chi) * zeta_xi,
            )
        if case is OpCase.ADD_THEN_MEASURE:
            return CaseConstants(
                nu=-sh - half_chi_sq * em,
                mu=ch - half_chi_sq * em,
                lam=chi / _SQRT2 + (1.0 - chi * chi) * zeta_xi,
            )
        if case is OpCase.MEASURE_THEN_SUB:
            return CaseConstants(nu=ch, mu=-sh, lam=zeta_xi)
        if case is OpCase.MEASURE_THEN_ADD:
            return CaseConstants(nu=-sh, mu=ch, lam=zeta_xi)
    else:
        if eff is not None:
            raise ValueError(f"case {case.value} takes no effective parameters")
        r = spec.squeeze_r
        if case is OpCase.SUB_THEN_SQUEEZE:
            return CaseConstants(nu=1.0, mu=0.0, lam=0.0)
        if case is OpCase.ADD_THEN_SQUEEZE:
            return CaseConstants(nu=0.0, mu=1.0, lam=0.0)
        if case is OpCase.SQUEEZE_THEN_SUB:
            return CaseConstants(nu=math.cosh(r), mu=-math.sinh(r), lam=0.0)
        if case is OpCase.SQUEEZE_THEN_ADD:
            return CaseConstants(nu=-math.sinh(r), mu=math.cosh(r), lam=0.0)
    raise ValueError(f"unknown case tag {case!r}")


def normal_form(spec: CaseSpec) -> NormalFormState:
    """Resolve a CaseSpec into the normal form used by all downstream modules."""
    if spec.case.uses_measurement:
        eff = effective_params(spec.chi, spec.nbar)
        constants = case_constants(spec, eff)
        return NormalFormState(
            case=spec.case,
            xi=eff.xi,
            zeta_xi=eff.zeta_xi,
            mbar=eff.mbar,
            constants=constants,
            amplitude_f=spec.amplitude_f,
            sigma_l_sq=eff.sigma_l_sq,
            outcome=spec.outcome,
            chi=spec.chi,
            nbar=spec.nbar,
        )
    constants = case_constants(spec)
    return NormalFormState(
        case=spec.case,
        xi=spec.squeeze_r,
        zeta_xi=0.0,
        mbar=spec.nbar,
        constants=constants,
        amplitude_f=spec.amplitude_f,
        sigma_l_sq=None,
        outcome=None,
        chi=None,
        nbar=spec.nbar,
    )
