"""Conditional non-classical state preparation in thermal bosonic modes.

Closed-form quasi-probability evaluation for the eight orderings of
{squeeze | quadrature measurement} with {single-quantum addition |
subtraction}, heralding statistics, three non-classicality metrics, and an
independent truncated Fock-space verification path.
"""

from .ops_algebra import (
    CaseConstants,
    CaseSpec,
    EffectiveParams,
    FixedOutcome,
    NormalFormState,
    OpCase,
    Window,
    case_constants,
    chi_from_xi,
    effective_params,
    normal_form,
)
from .quasiprob import (
    GaussianDerivativeExpansion,
    NonRepresentableError,
    PhaseSpaceGrid,
    ThermalState,
    apply_thermal_heating,
    eval_R,
    eval_R_windowed,
    gaussian_derivative,
    pnm_coefficients,
    rnml_coefficients,
    sample_grid,
)
from .heralding import (
    HeraldReport,
    herald_prob_squeeze,
    herald_prob_window,
    herald_report,
    solve_window,
    thermal_decoherence_budget,
)
from .metrics import (
    SINGLE_QUANTA_NEGATIVITY,
    CatFidelityResult,
    MetricsReport,
    cat_fidelity,
    nonclassical_depth,
    squeezed_fock_fidelity,
    wigner_negativity,
)

__version__ = "0.1.0"
