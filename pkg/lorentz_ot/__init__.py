"""
Lorentzian optimal transport on finite causal spaces, and numerical certificates
of timelike curvature-dimension conditions.
"""

from .causal_space import FiniteCausalSpace, WeightedMeasure, validate_axioms
from .coefficients import hawking_threshold, s_c_coeff, sigma, tau_coeff
from .domains import LorentzOTError, NEG_INF, POS_INF
from .geodesics import displacement_interpolation, tcd_certify, tmcp_certify
from .sampling import discretize
from .transport import solve_lp

__all__ = [
    "FiniteCausalSpace",
    "LorentzOTError",
    "NEG_INF",
    "POS_INF",
    "WeightedMeasure",
    "discretize",
    "displacement_interpolation",
    "hawking_threshold",
    "s_c_coeff",
    "sigma",
    "solve_lp",
    "tau_coeff",
    "tcd_certify",
    "tmcp_certify",
    "validate_axioms",
]
