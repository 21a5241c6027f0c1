from .grid import Grid, random_band_limited
from .cartan import CartanData, cartan_data, cartan_invariant_residuals
from .models import (ATFT, FIELD_MODELS, NLS, FieldState, LandauLifshitz, Liouville, ModelParams,
                     SineGordon, get_model)
from .checks import random_state, zero_curvature_residual
from .monodromy import OVERFLOW_LIMIT, monodromy_numeric, transfer_numeric
from .evolve import SCHEMES, FieldInstability, FieldTrajectory, evolve, kink_antikink
from .wz import A2Densities, WZExpansion, a2_densities, sg_ratio, wz_check
from .gauge import atft_gauge

__all__ = [
    "Grid", "random_band_limited", "CartanData", "cartan_data", "cartan_invariant_residuals",
    "ATFT", "FIELD_MODELS", "NLS", "FieldState", "LandauLifshitz", "Liouville", "ModelParams",
    "SineGordon", "get_model", "random_state", "zero_curvature_residual", "OVERFLOW_LIMIT",
    "monodromy_numeric", "transfer_numeric", "SCHEMES", "FieldInstability", "FieldTrajectory",
    "evolve", "kink_antikink", "A2Densities", "WZExpansion", "a2_densities", "sg_ratio", "wz_check",
    "atft_gauge",
]
