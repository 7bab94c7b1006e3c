"""Disturbance-rejecting rapid stabilisation of the heat equation on boxes.

Modal (spectral Galerkin) toolkit: Dirichlet eigenpairs, the actuated-region
Gram matrix and its weak spectral constant, gain design, the regularised
sign feedback, closed-loop simulation and Lyapunov decay certification.
"""

__version__ = "0.1.0"

from .controller import (
    ControllerParams,
    design,
    linear_feedback,
    monotone_gap,
    mu_inner,
    sign_feedback,
    unweighted_state,
    weighted_state,
)
from .diagnostics import DecayReport, certificate_check, fit_decay, lyapunov
from .disturbance import DisturbanceSpec, eval_disturbance
from .gram import GramMatrix, SpectralConstant, gram_matrix, sine_overlap, spectral_constant
from .simulator import SimConfig, Trajectory, build_plant, reconstruct_field, run, step
from .spectral import DomainSpec, Mode, ModeSet, enumerate_modes, eval_eigenfunction, select_N
