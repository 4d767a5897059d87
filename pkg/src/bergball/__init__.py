"""Generalized Bergman spaces on the complex unit ball: coherent states,
Berezin transforms and the spectral symbol of the transform."""
from .ball_geometry import BallPoint, bergman_distance, mobius_involution, radial_rule, sphere_rule
from .berezin import Observable, berezin_apply, berezin_apply_m0, kernel_mass
from .eigenspace import (BasisIndex, SpaceParams, cs_overlap_abs2, eigenvalue, gram_matrix,
                         kernel_closed, kernel_truncated, phi_eval)
from .errors import *  # noqa: F401,F403
from .exact_sphere import HarmonicBasis, build_harmonic_basis, harmonic_dimension
from .orthopoly import JacobiParams, WilsonParams, jacobi_eval, wilson_eval
from .spectral import (AUDIT_SCALE, constant_audit, spherical_function, symbol_3f2, symbol_peetre,
                       symbol_quad, symbol_wilson)

__version__ = "0.1.0"
