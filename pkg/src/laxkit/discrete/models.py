"""Lattice models: DST, Toda chain (quadratic and linear descriptions).

Phase-space orientation per model (first slot is ``u`` of the bracket):

* dst            (x, X)   with {x_i, X_j} = delta_ij
* toda-quadratic (q, p)   with {q_i, p_j} = delta_ij
* toda-linear    (q, p)   same phase space as toda-quadratic

With these orientations the Sklyanin bracket holds with r = +P/lam and the
flow of I_2 gives q_dot = p.  Site indices are 0-based and periodic.
"""

from __future__ import annotations

import numpy as np

from ..poisson import MatrixObservable, Observable, PhasePoint, SiteObservable
from ..tensor import LaurentMatrix

__all__ = ["DST", "TodaQuadratic", "TodaLinear", "make_model", "MODEL_KINDS"]


class _Lattice:
    kind = ""
    orientation = ("u", "v")
    charge_count = 0

    def __init__(self, n_sites: int):
        if n_sites < 2:
            raise ValueError("need at least two sites")
        self.n = int(n_sites)

    def point(self, u, v) -> PhasePoint:
        p = PhasePoint(u, v, self.orientation)
        if p.n != self.n:
            raise ValueError(f"point has {p.n} pairs, model has {self.n} sites")
        return p

    def vacuum(self) -> PhasePoint:
        z = np.zeros(self.n)
        return self.point(z, z)

    def random_point(self, rng, scale=0.5, complex_=False) -> PhasePoint:
        def draw():
            a = rng.uniform(-scale, scale, self.n)
            if complex_:
                a = a + 1j * rng.uniform(-scale, scale, self.n)
            return a
        return self.point(draw(), draw())

    def _check_site(self, j):
        if not 0 <= j < self.n:
            raise IndexError(f"site {j} out of range 0..{self.n - 1}")

    def charges(self, point: PhasePoint, count=None) -> list[Observable]:
        out = self._charges(point)
        return out if count is None else out[:count]


class DST(_Lattice):
    """L_j = [[lam + N_j, x_j], [-X_j, 1]], N_j = 1 - x_j X_j."""

    kind = "dst"
    orientation = ("x", "X")
    charge_count = 3

    def site_obs(self, point: PhasePoint, j: int, lam) -> MatrixObservable:
        self._check_site(j)
        x, X = point.u[j], point.v[j]
        val = np.array([[lam + 1 - x * X, x], [-X, 1]], dtype=complex)
        du = np.zeros((2, 2, self.n), dtype=complex)
        dv = np.zeros_like(du)
        du[:, :, j] = [[-X, 1], [0, 0]]
        dv[:, :, j] = [[-x, 0], [-1, 0]]
        return MatrixObservable(val, du, dv, self.orientation)

    def site_laurent(self, point: PhasePoint, j: int) -> LaurentMatrix:
        self._check_site(j)
        x, X = point.u[j], point.v[j]
        return LaurentMatrix.from_terms({1: np.diag([1.0, 0.0]), 0: [[1 - x * X, x], [-X, 1]]})

    def _charges(self, point):
        x, X = SiteObservable.coordinates(point)
        nn = 1 - x * X
        i1 = nn.sum()
        i2 = (-(x.roll(1) * X) - 0.5 * nn * nn).sum()
        i3 = (-(x.roll(2) * X) + (nn + nn.roll(1)) * x.roll(1) * X + nn ** 3 * (1.0 / 3.0)).sum()
        return [i1, i2, i3]

    def lax_time_component(self, order: int, j: int, mu, point: PhasePoint) -> np.ndarray:
        """Printed A^(order)_j(mu) with periodic wrap."""
        self._check_site(j)
        n = self.n
        x, X = point.u, point.v
        nn = 1 - x * X
        if order == 1:
            return np.diag([1.0, 0.0]).astype(complex)
        if order == 2:
            return np.array([[mu, x[j]], [-X[j - 1], 0]], dtype=complex)
        if order == 3:
            jp, jm, jmm = (j + 1) % n, (j - 1) % n, (j - 2) % n
            return np.array(
                [
                    [mu**2 + x[j] * X[jm], mu * x[j] - x[j] * nn[j] + x[jp]],
                    [-mu * X[jm] + X[jm] * nn[jm] - X[jmm], -x[j] * X[jm]],
                ],
                dtype=complex,
            )
        raise ValueError(f"no printed time component of order {order} for dst")

    def printed_eom(self, point: PhasePoint):
        """Difference equations of the I_3 flow as printed, term by term."""
        x, X = point.u, point.v
        nn = 1 - x * X
        s = lambda a, k: np.roll(a, -k)  # noqa: E731  a_{j+k}
        xd = s(x, 2) - 2 * s(x, 1) * nn - s(x, 1) * s(nn, 1) + x * nn**2 + x**2 * s(X, -1) + s(x, 1)
        Xd = -s(X, -2) + 2 * s(X, -1) * nn + s(X, -1) * s(nn, -1) - X * nn**2 - X**2 * s(x, 1) - s(X, -1)
        return xd, Xd


class TodaQuadratic(_Lattice):
    """L_j = [[lam - p_j, e^{q_j}], [-e^{-q_j}, 0]]."""

    kind = "toda-quadratic"
    orientation = ("q", "p")
    charge_count = 2
    separable = True

    def site_obs(self, point: PhasePoint, j: int, lam) -> MatrixObservable:
        self._check_site(j)
        q, p = point.u[j], point.v[j]
        e, ei = np.exp(q), np.exp(-q)
        val = np.array([[lam - p, e], [-ei, 0]], dtype=complex)
        du = np.zeros((2, 2, self.n), dtype=complex)
        dv = np.zeros_like(du)
        du[:, :, j] = [[0, e], [ei, 0]]
        dv[:, :, j] = [[-1, 0], [0, 0]]
        return MatrixObservable(val, du, dv, self.orientation)

    def site_laurent(self, point: PhasePoint, j: int) -> LaurentMatrix:
        self._check_site(j)
        q, p = point.u[j], point.v[j]
        return LaurentMatrix.from_terms({1: np.diag([1.0, 0.0]), 0: [[-p, np.exp(q)], [-np.exp(-q), 0]]})

    def _charges(self, point):
        q, p = SiteObservable.coordinates(point)
        i1 = p.sum()
        i2 = (-0.5 * p * p - (q.roll(1) - q).exp()).sum()
        return [i1, i2]

    def lax_time_component(self, order: int, j: int, mu, point: PhasePoint) -> np.ndarray:
        """Time component for I_2.  Lower-left entry is -e^{-q_{j-1}}: the printed
        exponent sign is corrected (see the decisions ledger)."""
        self._check_site(j)
        q = point.u
        if order == 1:
            return np.diag([1.0, 0.0]).astype(complex)
        if order == 2:
            return np.array([[mu, np.exp(q[j])], [-np.exp(-q[j - 1]), 0]], dtype=complex)
        raise ValueError(f"no time component of order {order} for toda-quadratic")


class TodaLinear(_Lattice):
    """N x N Lax matrix with multiplicative parameter u = exp(2 lam)."""

    kind = "toda-linear"
    orientation = ("q", "p")
    charge_count = 2
    separable = True

    def _pieces(self, point):
        # (row, col, power of u, coefficient, dq) with dq the q-gradient of the coefficient's log
        n = self.n
        q = point.u
        out = []
        for j in range(n - 1):
            b = np.exp((q[j + 1] - q[j]) / 2)
            g = np.zeros(n)
            g[j + 1], g[j] = 0.5, -0.5
            out.append((j, j + 1, 0, b, g))
            out.append((j + 1, j, 0, b, g))
        c = np.exp((q[0] - q[n - 1]) / 2)
        g = np.zeros(n)
        g[0], g[n - 1] = 0.5, -0.5
        out.append((0, n - 1, 1, c, g))
        out.append((n - 1, 0, -1, c, g))
        return out

    def lax_obs(self, point: PhasePoint, lam) -> MatrixObservable:
        n = self.n
        u = np.exp(2 * complex(lam))
        val = np.diag(point.v).astype(complex)
        du = np.zeros((n, n, n), dtype=complex)
        dv = np.zeros_like(du)
        for j in range(n):
            dv[j, j, j] = 1.0
        for r, c, pw, coef, g in self._pieces(point):
            w = coef * u**pw
            val[r, c] += w
            du[r, c, :] += w * g
        return MatrixObservable(val, du, dv, self.orientation)

    def lax_laurent(self, point: PhasePoint) -> LaurentMatrix:
        """L as a Laurent matrix in u (not lam)."""
        n = self.n
        terms = {-1: np.zeros((n, n), dtype=complex), 0: np.diag(point.v).astype(complex),
                 1: np.zeros((n, n), dtype=complex)}
        for r, c, pw, coef, _ in self._pieces(point):
            terms[pw][r, c] += coef
        return LaurentMatrix.from_terms(terms)

    def _charges(self, point):
        return TodaQuadratic(self.n)._charges(point)

    def powertrace_charges(self, point: PhasePoint, count=2) -> list[complex]:
        """I_1 = [u^0] tr L, I_2 = -1/2 [u^0] tr L^2."""
        if count > 2:
            raise ValueError("toda-linear extraction is limited to I_1, I_2")
        lm = self.lax_laurent(point)
        vals = [lm.trace().coeff(0), -0.5 * (lm @ lm).trace().coeff(0)]
        return vals[:count]


MODEL_KINDS = {"dst": DST, "toda-quadratic": TodaQuadratic, "toda-linear": TodaLinear}


def make_model(kind: str, n_sites: int):
    try:
        return MODEL_KINDS[kind](n_sites)
    except KeyError:
        raise ValueError(f"unknown lattice model {kind!r}") from None
