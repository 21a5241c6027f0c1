from .models import DST, TodaLinear, TodaQuadratic, make_model, MODEL_KINDS
from .monodromy import (ChargeReport, TransferFunction, calibrate, closed_form_charges, extract_charges,
                        generic_A, monodromy, monodromy_obs, partial_monodromy, transfer)
from .checks import (charge_involution_residual, eom_rhs, generator, involution_residual, linear_A,
                     linear_bracket_residual, monodromy_sklyanin_residual, sklyanin_residual,
                     zero_curvature_residual)
from .integrate import IntegrationError, Trajectory, integrate

__all__ = [
    "DST", "TodaLinear", "TodaQuadratic", "make_model", "MODEL_KINDS",
    "ChargeReport", "TransferFunction", "calibrate", "closed_form_charges", "extract_charges",
    "generic_A", "monodromy", "monodromy_obs", "partial_monodromy", "transfer",
    "charge_involution_residual", "eom_rhs", "generator", "involution_residual", "linear_A",
    "linear_bracket_residual", "monodromy_sklyanin_residual", "sklyanin_residual",
    "zero_curvature_residual", "IntegrationError", "Trajectory", "integrate",
]
