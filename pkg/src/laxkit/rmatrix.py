"""Classical r-matrices and the classical Yang-Baxter residual."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .tensor import permutation_operator, unit_matrix

__all__ = [
    "PoleError",
    "SpectralOperator",
    "yangian_r",
    "trig_An_r",
    "sine_gordon_r",
    "toda_r",
    "toda_r_multiplicative",
    "constant_r",
    "cybe_residual",
    "twist_to_toda",
]

POLE_GUARD = 1e-8


class PoleError(ValueError):
    """Raised when an r-matrix is evaluated within POLE_GUARD of a pole."""


@dataclass(frozen=True)
class SpectralOperator:
    site_dim: int
    kind: str
    evaluator: Callable[[complex], np.ndarray]
    pole_distance: Callable[[complex], float]

    def __call__(self, lam) -> np.ndarray:
        lam = complex(lam)
        if self.pole_distance(lam) < POLE_GUARD:
            raise PoleError(f"{self.kind} r-matrix evaluated at pole lam={lam}")
        return self.evaluator(lam)


def _sinh_distance(lam: complex) -> float:
    return abs(np.sinh(lam))


def yangian_r(n: int) -> SpectralOperator:
    p = permutation_operator(n)
    return SpectralOperator(n, "yangian", lambda lam: p / lam, abs)


def _exchange(d: int, i: int, j: int) -> np.ndarray:
    return np.kron(unit_matrix(d, i, j), unit_matrix(d, j, i))


def trig_An_r(n: int) -> SpectralOperator:
    """Trigonometric A_n r-matrix in the additive parameter, site_dim = n + 1."""
    if n < 1:
        raise ValueError("trig_An_r needs n >= 1")
    d = n + 1
    diag = sum(_exchange(d, i, i) for i in range(1, d + 1))
    pairs = [(i, j, np.sign(i - j) - (i - j) * 2.0 / d) for i in range(1, d + 1)
             for j in range(1, d + 1) if i != j]
    blocks = {(i, j): _exchange(d, i, j) for i, j, _ in pairs}

    def ev(lam):
        s = np.sinh(lam)
        out = (np.cosh(lam) / s) * diag
        for i, j, w in pairs:
            out = out + (np.exp(w * lam) / s) * blocks[(i, j)]
        return out

    return SpectralOperator(d, "trig-An", ev, _sinh_distance)


def sine_gordon_r() -> SpectralOperator:
    """The 4x4 block form used for the sine-Gordon model."""
    sz = np.diag([1.0, -1.0]).astype(complex)
    sp_ = np.array([[0, 1], [0, 0]], dtype=complex)  # sigma^+
    sm_ = np.array([[0, 0], [1, 0]], dtype=complex)  # sigma^-
    one = np.eye(2, dtype=complex)

    def ev(lam):
        c = np.cosh(lam)
        top = np.hstack([(sz + one) / 2 * c, sm_])
        bot = np.hstack([sp_, (one - sz) / 2 * c])
        return np.vstack([top, bot]) / np.sinh(lam)

    return SpectralOperator(2, "sine-gordon", ev, _sinh_distance)


def toda_r_multiplicative(n_sites: int, u1: complex, u2: complex) -> np.ndarray:
    """r for the linear Toda chain in the multiplicative parameters u_i = exp(2 lam_i).

    The diagonal coefficient carries a factor 1/2 relative to the printed form;
    without it the linear bracket fails (see the decisions ledger).
    """
    d = n_sites
    den = u1 - u2
    out = np.zeros((d * d, d * d), dtype=complex)
    for j in range(1, d + 1):
        out += 0.5 * (u1 + u2) / den * _exchange(d, j, j)
        for k in range(1, d + 1):
            if k > j:
                out += u1 / den * _exchange(d, j, k)
            elif k < j:
                out += u2 / den * _exchange(d, j, k)
    return out


def toda_r(n_sites: int) -> SpectralOperator:
    """Additive-parameter form: r(lam) with u1/u2 = exp(2 lam)."""
    if n_sites < 2:
        raise ValueError("Toda chain needs at least two sites")
    return SpectralOperator(
        n_sites, "toda", lambda lam: toda_r_multiplicative(n_sites, np.exp(2 * lam), 1.0), _sinh_distance
    )


def twist_to_toda(lam) -> np.ndarray:
    """For n = 1: toda_r(2)(lam) = 1/2 (D (x) 1) trig_An_r(1)(lam) (D (x) 1)^-1, D = diag(e^(lam/2), e^(-lam/2)).

    Returns the 4x4 right-hand side so callers can measure the relation.
    """
    lam = complex(lam)
    dm = np.kron(np.diag([np.exp(lam / 2), np.exp(-lam / 2)]), np.eye(2))
    return 0.5 * dm @ trig_An_r(1)(lam) @ np.linalg.inv(dm)


def constant_r(m: np.ndarray, kind: str = "constant") -> SpectralOperator:
    """A spectral-parameter independent operator (negative-control fixture)."""
    m = np.asarray(m, dtype=complex)
    d = int(round(np.sqrt(m.shape[0])))
    return SpectralOperator(d, kind, lambda lam: m, lambda lam: np.inf)


def _legs(r: np.ndarray, d: int):
    """Embed a (d^2 x d^2) operator into legs 12, 13, 23 of (C^d)^(x)3."""
    eye = np.eye(d, dtype=complex)
    r12 = np.kron(r, eye)
    # r13: act on legs 1 and 3; conjugate r12 by the swap of legs 2 and 3
    p23 = np.kron(eye, permutation_operator(d))
    r13 = p23 @ r12 @ p23
    r23 = np.kron(eye, r)
    return r12, r13, r23


def cybe_residual(r: SpectralOperator, lam1, lam2) -> float:
    """max-norm of [r12(l1-l2), r13(l1)+r23(l2)] + [r13(l1), r23(l2)]."""
    d = r.site_dim
    a12, _, _ = _legs(r(lam1 - lam2), d)
    _, b13, _ = _legs(r(lam1), d)
    _, _, c23 = _legs(r(lam2), d)
    s = b13 + c23
    res = a12 @ s - s @ a12 + b13 @ c23 - c23 @ b13
    return float(np.max(np.abs(res)))
