"""Root data and Cartan-Weyl generators of affine A_n^(1), n = 1, 2, in the defining representation."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from ..tensor import unit_matrix

__all__ = ["CartanData", "cartan_data", "cartan_invariant_residuals"]


@dataclass(frozen=True)
class CartanData:
    rank: int
    cartan_matrix: np.ndarray  # (n+1, n+1) affine
    roots: np.ndarray  # (n+1, n); last row is the affine root
    weights: np.ndarray  # (n, n)
    H: np.ndarray  # (n, n+1, n+1)
    E_pos: np.ndarray  # (n+1, n+1, n+1): E_{alpha_i}
    E_neg: np.ndarray  # (n+1, n+1, n+1): E_{-alpha_i}

    @property
    def dim(self) -> int:
        return self.rank + 1

    @property
    def E_plus(self) -> np.ndarray:
        return self.E_pos.sum(axis=0)

    @property
    def E_minus(self) -> np.ndarray:
        return self.E_neg.sum(axis=0)

    def dot_H(self, vec) -> np.ndarray:
        """v . H for a single n-vector."""
        return np.tensordot(np.asarray(vec), self.H, axes=(0, 0))

    def h_diag(self) -> np.ndarray:
        """(n, n+1) diagonals of the Cartan generators."""
        return np.array([np.diag(h).real for h in self.H])

    def chevalley(self):
        """(h_i, e_i, f_i) for i = 1..n+1 with h_i = 2 alpha_i . H / alpha_i^2."""
        hs = [2 * self.dot_H(a) / np.dot(a, a) for a in self.roots]
        return hs, list(self.E_pos), list(self.E_neg)


def _affine_cartan(n: int) -> np.ndarray:
    d = n + 1
    a = 2 * np.eye(d)
    for i in range(d):
        a[i, (i + 1) % d] -= 1
        a[(i + 1) % d, i] -= 1
    return a


def _simple_roots(n: int) -> np.ndarray:
    roots = np.zeros((n, n))
    for i in range(1, n + 1):
        if i > 1:
            roots[i - 1, i - 2] = -np.sqrt((i - 1) / (2 * i))
        roots[i - 1, i - 1] = np.sqrt((i + 1) / (2 * i))
    return roots


def cartan_data(n: int) -> CartanData:
    if n not in (1, 2):
        raise ValueError(f"unsupported rank {n}; only A_1^(1) and A_2^(1)")
    d = n + 1
    simple = _simple_roots(n)
    roots = np.vstack([simple, -simple.sum(axis=0)])
    weights = np.linalg.solve(simple, 0.5 * np.eye(n)).T  # alpha_j . mu_k = delta_jk / 2
    e = lambda i, j: unit_matrix(d, i, j)  # noqa: E731
    H = np.array([sum(weights[j, i] * (e(j + 1, j + 1) - e(j + 2, j + 2)) for j in range(n)) for i in range(n)])
    E_pos = np.array([e(i, i + 1) for i in range(1, d)] + [-e(d, 1)])
    E_neg = np.array([e(i + 1, i) for i in range(1, d)] + [-e(1, d)])
    return CartanData(n, _affine_cartan(n), roots, weights, H, E_pos, E_neg)


def _comm(a, b):
    return a @ b - b @ a


def cartan_invariant_residuals(cd: CartanData) -> dict:
    """Largest violation of each defining property; all should be ~1e-16."""
    n, d = cd.rank, cd.dim
    out = {}
    out["root_norm"] = float(np.max(np.abs(np.sum(cd.roots**2, axis=1) - 1.0)))
    out["weight_duality"] = float(np.max(np.abs(cd.roots[:n] @ cd.weights.T - 0.5 * np.eye(n))))
    out["root_sum"] = float(np.max(np.abs(cd.roots.sum(axis=0))))
    cw = 0.0
    for i, a in enumerate(cd.roots):
        for k in range(n):
            cw = max(cw, np.max(np.abs(_comm(cd.H[k], cd.E_pos[i]) - a[k] * cd.E_pos[i])))
            cw = max(cw, np.max(np.abs(_comm(cd.H[k], cd.E_neg[i]) + a[k] * cd.E_neg[i])))
        cw = max(cw, np.max(np.abs(_comm(cd.E_pos[i], cd.E_neg[i]) - 2 / np.dot(a, a) * cd.dot_H(a))))
    out["cartan_weyl"] = float(cw)
    hs, es, fs = cd.chevalley()
    ch = max(float(np.max(np.abs(_comm(hs[i], hs[j])))) for i in range(d) for j in range(d))
    for i in range(d):
        for j in range(d):
            aij = cd.cartan_matrix[i, j]
            ch = max(ch, np.max(np.abs(_comm(hs[i], es[j]) - aij * es[j])))
            ch = max(ch, np.max(np.abs(_comm(hs[i], fs[j]) + aij * fs[j])))
            ch = max(ch, np.max(np.abs(_comm(es[i], fs[j]) - (hs[i] if i == j else 0))))
    out["chevalley"] = float(ch)
    serre = 0.0
    mp = np.linalg.matrix_power
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            p = int(round(1 - cd.cartan_matrix[i, j]))
            for chi in (es, fs):
                s = sum((-1) ** k * comb(p, k) * mp(chi[i], p - k) @ chi[j] @ mp(chi[i], k) for k in range(p + 1))
                serre = max(serre, float(np.max(np.abs(s))))
    out["serre"] = serre
    return out
