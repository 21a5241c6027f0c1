"""Continuum models on a periodic grid: U/V Lax operators, analytic dU, flows and charges.

Every U here depends pointwise on the fields (no derivatives), so U_dot is
the chain rule sum over components of dU/dc * c_dot.  Matrix fields have
shape (M, d, d); component stacks have shape (ncomp, M).

Flow modes:
  literal    the flow implied by zero curvature with the printed pair,
             treating every component as an independent (complex) field
  canonical  the physical evolution used by evolve(); differs from literal
             only for nls (i psi_t = -psi_xx + 2|psi|^2 psi) and ll (no i)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..rmatrix import PoleError
from .cartan import cartan_data
from .grid import Grid

__all__ = ["ModelParams", "FieldState", "FIELD_MODELS", "get_model", "conj_diag",
           "NLS", "SineGordon", "Liouville", "LandauLifshitz", "ATFT"]

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
D11 = np.diag([1.0, 0.0]).astype(complex)


@dataclass(frozen=True)
class ModelParams:
    m: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.m) and self.m > 0):
            raise ValueError("mass scale m must be positive and finite")
        if not (np.isfinite(self.beta) and self.beta != 0):
            raise ValueError("coupling beta must be nonzero and finite")


@dataclass(frozen=True)
class FieldState:
    kind: str
    grid: Grid
    data: np.ndarray  # (ncomp, M)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        d = np.asarray(self.data)
        if d.ndim != 2 or d.shape[1] != self.grid.m:
            raise ValueError("state data must be (ncomp, M)")
        if not np.all(np.isfinite(d)):
            raise ValueError("state has non-finite values")
        object.__setattr__(self, "data", d)

    def __getitem__(self, i):
        return self.data[i]

    def replace(self, data) -> "FieldState":
        return FieldState(self.kind, self.grid, data, self.meta)

    def shifted(self, frac: float) -> "FieldState":
        return self.replace(self.grid.shift(self.data.T, frac).T)


def conj_diag(mat, phases) -> np.ndarray:
    """exp(diag(p)) M exp(-diag(p)) per grid point: entry (r, c) times e^{p_r - p_c}.

    ``phases`` is (M, d); returns (M, d, d).
    """
    p = np.asarray(phases)
    return np.asarray(mat)[None, :, :] * np.exp(p[:, :, None] - p[:, None, :])


def _blank(m, d):
    return np.zeros((m, d, d), dtype=complex)


class _FieldModel:
    kind = ""
    components: tuple = ()
    dim = 2
    variants: tuple = ()
    charge_names: tuple = ()
    pole_at_zero = False

    def state(self, grid: Grid, *comps, **meta) -> FieldState:
        if len(comps) != len(self.components):
            raise ValueError(f"{self.kind} takes components {self.components}")
        data = np.array([np.broadcast_to(c, (grid.m,)) for c in comps])
        st = FieldState(self.kind, grid, data, meta)
        self.validate(st)
        return st

    def validate(self, st: FieldState):
        if st.kind != self.kind:
            raise ValueError(f"state of {st.kind} passed to {self.kind}")

    def _lam(self, lam):
        lam = complex(lam)
        if self.pole_at_zero and abs(lam) < 1e-8:
            raise PoleError(f"{self.kind} Lax operator has a pole at lam = 0")
        return lam

    def U(self, st, params, lam):
        raise NotImplementedError

    def dU(self, st, params, lam):
        raise NotImplementedError

    def V(self, variant, st, params, lam):
        raise NotImplementedError

    def flow(self, variant, st, params, mode="literal"):
        raise NotImplementedError

    hamiltonian_variant = "H"

    def eom_rhs(self, st, params, mode="canonical"):
        return self.flow(self.hamiltonian_variant, st, params, mode)

    def charges(self, st, params) -> dict:
        return {}

    def _check_variant(self, variant):
        if variant not in self.variants:
            raise ValueError(f"{self.kind} has no V variant {variant!r}; choose from {self.variants}")


class NLS(_FieldModel):
    """U = [[lam/2, psibar], [psi, -lam/2]]."""

    kind = "nls"
    components = ("psi", "psibar")
    variants = ("V1", "V2", "V3")
    hamiltonian_variant = "V3"
    charge_names = ("N", "P", "H")

    def U(self, st, params, lam):
        lam = self._lam(lam)
        out = _blank(st.grid.m, 2)
        out[:, 0, 0], out[:, 1, 1] = lam / 2, -lam / 2
        out[:, 0, 1], out[:, 1, 0] = st[1], st[0]
        return out

    def dU(self, st, params, lam):
        out = np.zeros((2, st.grid.m, 2, 2), dtype=complex)
        out[0, :, 1, 0] = 1.0
        out[1, :, 0, 1] = 1.0
        return out

    def V(self, variant, st, params, lam):
        self._check_variant(variant)
        mu = self._lam(lam)
        psi, pb = st[0], st[1]
        out = _blank(st.grid.m, 2)
        if variant == "V1":
            out[:] = D11
        elif variant == "V2":
            out[:, 0, 0], out[:, 0, 1], out[:, 1, 0] = mu, pb, psi
        else:
            g = st.grid
            out[:, 0, 0] = mu**2 - psi * pb
            out[:, 0, 1] = mu * pb + g.deriv(pb)
            out[:, 1, 0] = mu * psi - g.deriv(psi)
            out[:, 1, 1] = psi * pb
        return out

    def flow(self, variant, st, params, mode="literal"):
        self._check_variant(variant)
        g = st.grid
        psi, pb = st[0], st[1]
        if mode == "canonical":
            if variant != "V3":
                raise ValueError("canonical nls evolution is defined for the Hamiltonian only")
            pt = 1j * g.deriv(psi, 2) - 2j * np.abs(psi) ** 2 * psi
            return np.array([pt, np.conj(pt)])
        if variant == "V1":
            return np.array([-psi, pb])
        if variant == "V2":
            return np.array([g.deriv(psi), g.deriv(pb)])
        return np.array([-g.deriv(psi, 2) + 2 * psi**2 * pb, g.deriv(pb, 2) - 2 * psi * pb**2])

    def charges(self, st, params):
        g = st.grid
        psi, pb = st[0], st[1]
        dp, dpb = g.deriv(psi), g.deriv(pb)
        return {
            "N": g.integrate(psi * pb),
            "P": 0.5 * g.integrate(dpb * psi - pb * dp),
            "H": -g.integrate(psi**2 * pb**2 + dp * dpb),
        }

    def canonical_state(self, grid, psi) -> FieldState:
        return self.state(grid, psi, np.conj(psi))


class SineGordon(_FieldModel):
    """U = (beta/4i) pi sz + (m u/4i) Om sy Om^-1 - (m/(4i u)) Om^-1 sy Om, u = e^lam, Om = e^{i beta phi sz/4}."""

    kind = "sg"
    components = ("phi", "pi")
    variants = ("H", "P")
    charge_names = ("H", "P")

    @staticmethod
    def _phase(st, params, sign=1.0):
        ph = 1j * params.beta * st[0] / 4
        return sign * np.stack([ph, -ph], axis=1)

    def _pieces(self, st, params, lam):
        u = np.exp(self._lam(lam))
        up = conj_diag(SY, self._phase(st, params))
        dn = conj_diag(SY, self._phase(st, params, -1.0))
        return u, up, dn

    def U(self, st, params, lam):
        m, b = params.m, params.beta
        u, up, dn = self._pieces(st, params, lam)
        return (b / 4j) * st[1][:, None, None] * SZ + (m * u / 4j) * up - (m / (4j * u)) * dn

    def dU(self, st, params, lam):
        m, b = params.m, params.beta
        u, up, dn = self._pieces(st, params, lam)
        w = 1j * b / 4 * np.array([[0, 2], [-2, 0]])  # d(p_r - p_c)/dphi for the up conjugation
        out = np.zeros((2, st.grid.m, 2, 2), dtype=complex)
        out[0] = (m * u / 4j) * up * w - (m / (4j * u)) * dn * (-w)
        out[1] = (b / 4j) * SZ
        return out

    def V(self, variant, st, params, lam):
        self._check_variant(variant)
        if variant == "P":
            return self.U(st, params, lam)
        m, b = params.m, params.beta
        u, up, dn = self._pieces(st, params, lam)
        return (b / 4j) * st.grid.deriv(st[0])[:, None, None] * SZ + (m * u / 4j) * up + (m / (4j * u)) * dn

    def flow(self, variant, st, params, mode="literal"):
        self._check_variant(variant)
        g = st.grid
        if variant == "P":
            return np.array([g.deriv(st[0]), g.deriv(st[1])])
        m, b = params.m, params.beta
        return np.array([st[1], g.deriv(st[0], 2) - (m**2 / b) * np.sin(b * st[0])])

    def force(self, phi, grid, params):
        """-dV/dphi part of pi_dot, with the spectral Laplacian."""
        m, b = params.m, params.beta
        return grid.deriv(phi, 2) - (m**2 / b) * np.sin(b * phi)

    def charges(self, st, params):
        g = st.grid
        m, b = params.m, params.beta
        phi, pi_ = st[0], st[1]
        dphi = g.deriv(phi)
        return {
            "H": g.integrate(0.5 * (pi_**2 + dphi**2) - (m**2 / b**2) * np.cos(b * phi)),
            "P": g.integrate(dphi * pi_),
        }


class Liouville(_FieldModel):
    """U = 1/2 [[-i pi, -2 e^{-lam - i phi}], [4 sinh(lam - i phi), i pi]]."""

    kind = "liouville"
    components = ("phi", "pi")
    variants = ("printed",)
    hamiltonian_variant = "printed"

    def U(self, st, params, lam):
        lam = self._lam(lam)
        phi, pi_ = st[0], st[1]
        out = _blank(st.grid.m, 2)
        out[:, 0, 0], out[:, 1, 1] = -0.5j * pi_, 0.5j * pi_
        out[:, 0, 1] = -np.exp(-lam - 1j * phi)
        out[:, 1, 0] = 2 * np.sinh(lam - 1j * phi)
        return out

    def dU(self, st, params, lam):
        lam = self._lam(lam)
        phi = st[0]
        out = np.zeros((2, st.grid.m, 2, 2), dtype=complex)
        out[0, :, 0, 1] = 1j * np.exp(-lam - 1j * phi)
        out[0, :, 1, 0] = -2j * np.cosh(lam - 1j * phi)
        out[1, :, 0, 0], out[1, :, 1, 1] = -0.5j, 0.5j
        return out

    def V(self, variant, st, params, lam):
        self._check_variant(variant)
        lam = self._lam(lam)
        phi = st[0]
        dphi = st.grid.deriv(phi)
        out = _blank(st.grid.m, 2)
        out[:, 0, 0], out[:, 1, 1] = -0.5j * dphi, 0.5j * dphi
        out[:, 0, 1] = np.exp(-lam - 1j * phi)
        out[:, 1, 0] = 2 * np.cosh(lam - 1j * phi)
        return out

    def flow(self, variant, st, params, mode="literal"):
        self._check_variant(variant)
        g = st.grid
        return np.array([st[1], g.deriv(st[0], 2) + 4j * np.exp(-2j * st[0])])


class LandauLifshitz(_FieldModel):
    """U = S.sigma / (2 lam); V = S.sigma/(2 lam^2) - (S.sigma)' (S.sigma) / (2 lam)."""

    kind = "ll"
    components = ("S1", "S2", "S3")
    variants = ("H",)
    charge_names = ("P", "H")
    pole_at_zero = True
    PAULI = np.array([SX, SY, SZ])

    def validate(self, st):
        super().validate(st)
        s = np.asarray(st.data)
        norm = np.sqrt(np.sum(np.abs(s) ** 2, axis=0))
        if np.max(np.abs(norm - 1.0)) > 1e-10:
            raise ValueError("ll state must satisfy |S| = 1 to 1e-10")

    def _ssig(self, s):
        return np.einsum("am,aij->mij", s, self.PAULI)

    def U(self, st, params, lam):
        lam = self._lam(lam)
        return self._ssig(st.data) / (2 * lam)

    def dU(self, st, params, lam):
        lam = self._lam(lam)
        return np.broadcast_to(self.PAULI[:, None] / (2 * lam), (3, st.grid.m, 2, 2)).copy()

    def V(self, variant, st, params, lam):
        self._check_variant(variant)
        lam = self._lam(lam)
        s = self._ssig(st.data)
        ds = self._ssig(st.grid.deriv(st.data.T).T)
        return s / (2 * lam**2) - ds @ s / (2 * lam)

    def flow(self, variant, st, params, mode="literal"):
        self._check_variant(variant)
        s = st.data
        cross = np.cross(s.T, st.grid.deriv(s.T, 2)).T
        return 1j * cross if mode == "literal" else cross

    def charges(self, st, params):
        g = st.grid
        s1, s2, s3 = st.data
        if np.min(np.real(s3)) <= -1 + 1e-6:
            raise ValueError("ll momentum density is singular: S3 reaches -1")
        ds = g.deriv(st.data.T).T
        return {
            "P": g.integrate((s1 * ds[1] - s2 * ds[0]) / (1 + s3)),
            "H": -0.25 * g.integrate(np.sum(ds**2, axis=0)),
        }

    @staticmethod
    def normalize(s):
        return s / np.sqrt(np.sum(np.abs(s) ** 2, axis=0))


class ATFT(_FieldModel):
    """A_n^(1) affine Toda, n in {1, 2}: components phi_1..phi_n, pi_1..pi_n.

    U = (beta/2) Pi.H + (m/4) (u Om E+ Om^-1 + u^-1 Om^-1 E- Om), Om = e^{(beta/2) Phi.H},
    u = e^{2 lam/(n+1)}.  Variant "H" is the time component
    (beta/2) Phi'.H - (m/4) (u Om E+ Om^-1 - u^-1 Om^-1 E- Om); "printed" keeps
    the printed signs, which do not satisfy zero curvature (kept as a control).
    """

    variants = ("printed", "H")
    charge_names = ("H", "P")

    def __init__(self, rank: int = 2):
        self.cd = cartan_data(rank)
        self.rank = rank
        self.dim = rank + 1
        self.kind = f"atft-a{rank}"
        self.components = tuple(f"phi{i + 1}" for i in range(rank)) + tuple(f"pi{i + 1}" for i in range(rank))

    def fields(self, st):
        n = self.rank
        return st.data[:n], st.data[n:]

    def _pieces(self, st, params, lam):
        lam = self._lam(lam)
        u = np.exp(2 * lam / (self.rank + 1))
        phi, _ = self.fields(st)
        hd = self.cd.h_diag()  # (n, d)
        ph = (params.beta / 2) * np.einsum("im,ir->mr", phi, hd)
        up = conj_diag(self.cd.E_plus, ph)
        dn = conj_diag(self.cd.E_minus, -ph)
        return u, up, dn

    def _cartan(self, vec):
        return np.einsum("im,iab->mab", vec, self.cd.H)

    def U(self, st, params, lam):
        u, up, dn = self._pieces(st, params, lam)
        _, pi_ = self.fields(st)
        return (params.beta / 2) * self._cartan(pi_) + (params.m / 4) * (u * up + dn / u)

    def dU(self, st, params, lam):
        n, b, m = self.rank, params.beta, params.m
        u, up, dn = self._pieces(st, params, lam)
        hd = self.cd.h_diag()
        out = np.zeros((2 * n, st.grid.m, self.dim, self.dim), dtype=complex)
        for i in range(n):
            w = (b / 2) * (hd[i][:, None] - hd[i][None, :])
            out[i] = (m / 4) * (u * up * w - dn * w / u)
            out[n + i] = (b / 2) * self.cd.H[i]
        return out

    def V(self, variant, st, params, lam):
        self._check_variant(variant)
        u, up, dn = self._pieces(st, params, lam)
        phi, _ = self.fields(st)
        kin = (params.beta / 2) * self._cartan(st.grid.deriv(phi.T).T)
        sign = 1.0 if variant == "printed" else -1.0
        return kin + sign * (params.m / 4) * (u * up - dn / u)

    def gammas(self, st, params):
        phi, _ = self.fields(st)
        return np.exp(params.beta * self.cd.roots @ phi)  # (n+1, M)

    def force(self, phi, grid, params):
        """pi_dot for the flow of H_1 / 2 (phi_dot = pi)."""
        m, b = params.m, params.beta
        gam = np.exp(b * self.cd.roots @ phi)
        return grid.deriv(phi.T, 2).T - (m**2 / (2 * b)) * (self.cd.roots.T @ gam)

    def flow(self, variant, st, params, mode="literal"):
        # the printed variant admits no consistent flow; it is paired with the
        # Hamiltonian flow so its zero-curvature mismatch can be measured
        self._check_variant(variant)
        phi, pi_ = self.fields(st)
        return np.vstack([pi_, self.force(phi, st.grid, params)])

    def charges(self, st, params):
        g = st.grid
        m, b = params.m, params.beta
        phi, pi_ = self.fields(st)
        dphi, dpi = g.deriv(phi.T).T, g.deriv(pi_.T).T
        gam = self.gammas(st, params)
        return {
            "H": g.integrate(np.sum(pi_**2 + dphi**2, axis=0) + (m**2 / b**2) * gam.sum(axis=0)),
            "P": g.integrate(np.sum(pi_ * dphi - dpi * phi, axis=0)),
        }


FIELD_MODELS = {
    "nls": NLS,
    "sg": SineGordon,
    "liouville": Liouville,
    "ll": LandauLifshitz,
    "atft-a2": lambda: ATFT(2),
    "atft-a1": lambda: ATFT(1),
}


def get_model(kind: str) -> _FieldModel:
    try:
        return FIELD_MODELS[kind]()
    except KeyError:
        raise ValueError(f"unknown field model {kind!r}") from None
