"""Continuum zero-curvature residual and random test states."""

from __future__ import annotations

import numpy as np

from .grid import Grid, random_band_limited
from .models import FieldState, ModelParams, get_model

__all__ = ["zero_curvature_residual", "random_state", "u_dot"]


def u_dot(model, st: FieldState, params: ModelParams, lam, rates) -> np.ndarray:
    return np.einsum("cmij,cm->mij", model.dU(st, params, lam), rates)


def zero_curvature_residual(model, variant, st: FieldState, params: ModelParams, lam, mode="literal") -> float:
    """max over the grid of |U_dot - V' + [U, V]| with U_dot from the flow paired with ``variant``."""
    if isinstance(model, str):
        model = get_model(model)
    u = model.U(st, params, lam)
    v = model.V(variant, st, params, lam)
    rates = model.flow(variant, st, params, mode)
    res = u_dot(model, st, params, lam, rates) - st.grid.deriv(v) + (u @ v - v @ u)
    return float(np.max(np.abs(res)))


def random_state(kind: str, grid: Grid, rng, amplitude=0.3, kmax=4) -> FieldState:
    """Band-limited random state suitable for algebraic checks of ``kind``."""
    model = get_model(kind)
    rb = lambda **kw: random_band_limited(grid, rng, kmax=kmax, amplitude=amplitude, **kw)  # noqa: E731
    if kind == "nls":
        return model.state(grid, rb(complex_=True), rb(complex_=True))
    if kind == "liouville":
        return model.state(grid, rb(complex_=True), rb(complex_=True))
    if kind == "ll":
        raw = np.array([rb(), rb(), rb(mean=2.0)])
        return model.state(grid, *model.normalize(raw))
    return model.state(grid, *[rb() for _ in model.components])
