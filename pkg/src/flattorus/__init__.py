"""Spectral geometry of flat tori: Laplace spectra, conformal area of
torus immersions in spheres, and upper bounds for lambda_1 * area."""

from .bounds import (
    BoundReport,
    corollary_bound,
    esir_bound,
    global_sup_scan,
    bound_sweep,
    strictness_witness,
    theorem_class_bound,
)
from .conformal import (
    ConformalPoint,
    Immersion,
    OmegaPoint,
    area_closed_form,
    area_functional,
    area_reduced,
    energy_functional,
    energy_ratio_residual,
    hersch_center,
    mobius_apply,
    phi,
    psi_ab,
    psi_b,
    reduce_gamma,
)
from .exceptions import ConvergenceError, EnumerationOverflow
from .optim import (
    I_gradient,
    I_value,
    SupResult,
    case1_verify,
    case2_verify,
    sup_area_s3,
    sup_area_s5,
)
from .report import VerificationReport
from .specfun import QuadratureSpec, elliptic_e, quad2d_periodic
from .torus import (
    ConformalFactor,
    LatticeMode,
    SpectrumEntry,
    TorusParams,
    conformal_lambda1,
    eigenfunction_eval,
    eigenvalue,
    spectrum,
)

__version__ = "0.1.0"
