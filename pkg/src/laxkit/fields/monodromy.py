"""Numerical monodromy T(L, -L, lam) of T' = U T by a fourth-order Magnus step per grid cell."""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .models import FieldState, ModelParams, get_model

__all__ = ["monodromy_numeric", "transfer_numeric", "OVERFLOW_LIMIT"]

OVERFLOW_LIMIT = 500.0
_C = np.sqrt(3.0) / 6.0


def _growth_bound(model, st, params, lam) -> float:
    u = model.U(st, params, lam)
    # log-norm bound on |T|; the spectral norm of each cell is at most its Frobenius norm
    return float(np.sum(np.linalg.norm(u, axis=(1, 2)))) * st.grid.h


def monodromy_numeric(model, st: FieldState, params: ModelParams, lam) -> np.ndarray:
    """Ordered product over cells [x_j, x_j + h] from -L to L.

    U at the two Gauss points of each cell comes from the band-limited
    interpolant of the fields, so the step is fourth order in h.
    """
    if isinstance(model, str):
        model = get_model(model)
    lam = complex(lam)
    if abs(lam.real) * 2 * st.grid.half_length > OVERFLOW_LIMIT or _growth_bound(model, st, params, lam) > OVERFLOW_LIMIT:
        raise OverflowError("monodromy would overflow; reduce |Re lam| or the domain")
    h = st.grid.h
    a1 = model.U(st.shifted(0.5 - _C), params, lam)
    a2 = model.U(st.shifted(0.5 + _C), params, lam)
    omega = 0.5 * h * (a1 + a2) + (np.sqrt(3.0) * h**2 / 12.0) * (a2 @ a1 - a1 @ a2)
    steps = expm(omega)
    t = np.eye(model.dim, dtype=complex)
    for e in steps:
        t = e @ t
    return t


def transfer_numeric(model, st, params, lam) -> complex:
    return complex(np.trace(monodromy_numeric(model, st, params, lam)))
