"""Canonical Poisson brackets on finite phase spaces with analytic gradients.

Convention: {f, g} = sum_i (df/du_i dg/dv_i - df/dv_i dg/du_i), so {u_i, v_j} = delta_ij.
Coordinates may be complex and are treated as independent (no conjugation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import sympy as sp

__all__ = [
    "PhasePoint",
    "Observable",
    "SiteObservable",
    "MatrixObservable",
    "bracket",
    "matrix_bracket",
    "flow_rhs",
    "jacobi_residual",
    "symbolic_bracket",
    "check_gradients",
]


@dataclass(frozen=True)
class PhasePoint:
    u: np.ndarray
    v: np.ndarray
    orientation: tuple = ("u", "v")

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex).reshape(-1)
        v = np.asarray(self.v, dtype=complex).reshape(-1)
        if u.shape != v.shape:
            raise ValueError("u and v must have equal length")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "orientation", tuple(self.orientation))

    @property
    def n(self) -> int:
        return self.u.size

    def shifted(self, du, dv) -> "PhasePoint":
        return PhasePoint(self.u + du, self.v + dv, self.orientation)


@dataclass(frozen=True)
class Observable:
    """Value plus analytic gradients at one phase-space point."""

    value: complex
    du: np.ndarray
    dv: np.ndarray
    orientation: tuple = ("u", "v")

    def _check(self, other):
        if self.orientation != other.orientation or self.du.shape != other.du.shape:
            raise ValueError("observables live on different phase spaces")

    def __add__(self, other):
        if not isinstance(other, Observable):
            return Observable(self.value + other, self.du, self.dv, self.orientation)
        self._check(other)
        return Observable(self.value + other.value, self.du + other.du, self.dv + other.dv, self.orientation)

    __radd__ = __add__

    def __neg__(self):
        return Observable(-self.value, -self.du, -self.dv, self.orientation)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Observable):
            return Observable(self.value * other, self.du * other, self.dv * other, self.orientation)
        self._check(other)
        return Observable(
            self.value * other.value,
            self.du * other.value + self.value * other.du,
            self.dv * other.value + self.value * other.dv,
            self.orientation,
        )

    __rmul__ = __mul__

    def exp(self) -> "Observable":
        e = np.exp(self.value)
        return Observable(e, e * self.du, e * self.dv, self.orientation)

    @classmethod
    def coordinate(cls, point: PhasePoint, which: str, i: int) -> "Observable":
        du = np.zeros(point.n, dtype=complex)
        dv = np.zeros(point.n, dtype=complex)
        if which == "u":
            du[i] = 1.0
            val = point.u[i]
        elif which == "v":
            dv[i] = 1.0
            val = point.v[i]
        else:
            raise ValueError("which must be 'u' or 'v'")
        return cls(complex(val), du, dv, point.orientation)


@dataclass(frozen=True)
class SiteObservable:
    """One observable per lattice site: value (N,), gradients (N, n).

    Built from coordinates and combined site-wise; ``roll(k)`` gives the
    periodic neighbour at offset k (site i reads site i + k).
    """

    value: np.ndarray
    du: np.ndarray
    dv: np.ndarray
    orientation: tuple = ("u", "v")

    @classmethod
    def coordinates(cls, point: PhasePoint):
        eye = np.eye(point.n, dtype=complex)
        z = np.zeros_like(eye)
        return (cls(point.u.copy(), eye, z, point.orientation),
                cls(point.v.copy(), z.copy(), eye.copy(), point.orientation))

    def _lift(self, other):
        if isinstance(other, SiteObservable):
            return other
        c = np.broadcast_to(np.asarray(other, dtype=complex), self.value.shape)
        z = np.zeros_like(self.du)
        return SiteObservable(c.copy(), z, z.copy(), self.orientation)

    def __add__(self, other):
        o = self._lift(other)
        return SiteObservable(self.value + o.value, self.du + o.du, self.dv + o.dv, self.orientation)

    __radd__ = __add__

    def __neg__(self):
        return SiteObservable(-self.value, -self.du, -self.dv, self.orientation)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        a, b = self.value[:, None], o.value[:, None]
        return SiteObservable(self.value * o.value, self.du * b + a * o.du, self.dv * b + a * o.dv, self.orientation)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def exp(self):
        e = np.exp(self.value)
        return SiteObservable(e, self.du * e[:, None], self.dv * e[:, None], self.orientation)

    def roll(self, k: int):
        return SiteObservable(np.roll(self.value, -k), np.roll(self.du, -k, axis=0),
                              np.roll(self.dv, -k, axis=0), self.orientation)

    def site(self, i: int) -> Observable:
        return Observable(complex(self.value[i]), self.du[i], self.dv[i], self.orientation)

    def sum(self) -> Observable:
        return Observable(complex(self.value.sum()), self.du.sum(axis=0), self.dv.sum(axis=0), self.orientation)


@dataclass(frozen=True)
class MatrixObservable:
    """d x d matrix of observables: value (d, d), gradients (d, d, n)."""

    value: np.ndarray
    du: np.ndarray
    dv: np.ndarray
    orientation: tuple = ("u", "v")

    @property
    def dim(self) -> int:
        return self.value.shape[0]

    def __matmul__(self, other: "MatrixObservable") -> "MatrixObservable":
        a, b = self, other
        return MatrixObservable(
            a.value @ b.value,
            np.einsum("ijs,jk->iks", a.du, b.value) + np.einsum("ij,jks->iks", a.value, b.du),
            np.einsum("ijs,jk->iks", a.dv, b.value) + np.einsum("ij,jks->iks", a.value, b.dv),
            a.orientation,
        )

    def trace(self) -> Observable:
        return Observable(
            complex(np.trace(self.value)),
            np.einsum("iis->s", self.du),
            np.einsum("iis->s", self.dv),
            self.orientation,
        )

    def entry(self, i, j) -> Observable:
        return Observable(complex(self.value[i, j]), self.du[i, j], self.dv[i, j], self.orientation)

    @classmethod
    def constant(cls, m, n, orientation=("u", "v")):
        m = np.asarray(m, dtype=complex)
        z = np.zeros(m.shape + (n,), dtype=complex)
        return cls(m, z, z.copy(), orientation)


def bracket(f: Observable, g: Observable) -> complex:
    f._check(g)
    return complex(np.dot(f.du, g.dv) - np.dot(f.dv, g.du))


def matrix_bracket(m1: MatrixObservable, m2: MatrixObservable) -> np.ndarray:
    """Entry ((i,k),(j,l)) = {M1_ij, M2_kl} at row i*d+k, column j*d+l."""
    if m1.orientation != m2.orientation or m1.du.shape[-1] != m2.du.shape[-1]:
        raise ValueError("matrix observables live on different phase spaces")
    if m1.dim != m2.dim:
        raise ValueError("dimension mismatch")
    d = m1.dim
    t = np.einsum("ijs,kls->ikjl", m1.du, m2.dv) - np.einsum("ijs,kls->ikjl", m1.dv, m2.du)
    return t.reshape(d * d, d * d)


def flow_rhs(h: Observable):
    """Hamiltonian vector field: du/dt = {H, u} = -dH/dv, dv/dt = {H, v} = dH/du."""
    return -h.dv, h.du


def check_gradients(fn, point: PhasePoint, step=1e-6) -> float:
    """Largest relative mismatch between analytic and central-difference gradients.

    ``fn(point) -> Observable``.
    """
    obs = fn(point)
    worst = 0.0
    scale = max(1.0, abs(obs.value))
    for which, grad in (("u", obs.du), ("v", obs.dv)):
        for i in range(point.n):
            e = np.zeros(point.n, dtype=complex)
            e[i] = step
            if which == "u":
                hi, lo = point.shifted(e, 0), point.shifted(-e, 0)
            else:
                hi, lo = point.shifted(0, e), point.shifted(0, -e)
            fd = (fn(hi).value - fn(lo).value) / (2 * step)
            worst = max(worst, abs(fd - grad[i]) / max(scale, abs(grad[i])))
    return worst


# Nested brackets need second derivatives; for the Jacobi identity we work on
# sympy expressions in symbols u0..u{n-1}, v0..v{n-1} and only evaluate at the end.

def _syms(n):
    return sp.symbols(f"u0:{n}"), sp.symbols(f"v0:{n}")


def symbolic_bracket(f, g, n: int):
    us, vs = _syms(n)
    return sum(sp.diff(f, us[i]) * sp.diff(g, vs[i]) - sp.diff(f, vs[i]) * sp.diff(g, us[i]) for i in range(n))


def jacobi_residual(f, g, h, point: PhasePoint) -> float:
    """|{f,{g,h}} + {g,{h,f}} + {h,{f,g}}| at ``point``.

    f, g, h are sympy expressions (or strings) in u0.., v0.. .
    """
    n = point.n
    us, vs = _syms(n)
    f, g, h = (sp.sympify(e, locals={**{str(s): s for s in us + vs}}) for e in (f, g, h))
    allowed = set(us) | set(vs)
    for e in (f, g, h):
        if not e.free_symbols <= allowed:
            raise ValueError(f"observable has symbols outside the phase space: {e.free_symbols - allowed}")
    br = lambda a, b: symbolic_bracket(a, b, n)  # noqa: E731
    total = br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g))
    subs = {**{us[i]: complex(point.u[i]) for i in range(n)}, **{vs[i]: complex(point.v[i]) for i in range(n)}}
    return abs(complex(sp.N(total.subs(subs))))
