"""W/Z expansion checks: printed W's against the order-by-order recursion, and Z densities.

With U = U^D + U^O split by powers of the expansion variable s (lam for
nls, u for the Toda field theories),

    W' + W U^D - U^D W + W (U^O W)^D - U^O - (U^O W)^O = 0,
    Z' = U^D + (U^O W)^D,

and W = sum_k W^(k) s^-k.  Everything below works with dictionaries
{power: (M, d, d) field}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cartan import cartan_data
from .models import SX, SY, SZ, FieldState, ModelParams, conj_diag
from .grid import Grid

__all__ = ["WZExpansion", "A2Densities", "recursion_residuals", "z_density", "nls_expansion",
           "sg_expansion", "a2_expansion", "a2_densities", "wz_check", "sg_ratio", "A2_RATIO"]

_W = np.exp(1j * np.pi / 3)


def _diag_part(a):
    return np.einsum("mii->mi", a)[:, :, None] * np.eye(a.shape[-1])[None]


def _off_part(a):
    return a - _diag_part(a)


@dataclass(frozen=True)
class WZExpansion:
    model: str
    grid: Grid
    D: dict
    O: dict
    W: dict
    hatted: bool = False

    @property
    def order(self) -> int:
        return max(self.W)

    def check_structure(self) -> float:
        """Largest diagonal entry of any W (should vanish)."""
        return max(float(np.max(np.abs(np.einsum("mii->mi", w)))) for w in self.W.values())


def recursion_residuals(exp: WZExpansion, powers) -> dict:
    """Off-diagonal recursion residual at each power of s."""
    g = exp.grid
    W, D, O = exp.W, exp.D, exp.O
    out = {}
    for p in powers:
        r = 0
        for k, wk in W.items():
            if -k == p:
                r = r + g.deriv(wk)
            for s, dm in D.items():
                if s - k == p:
                    r = r + wk @ dm - dm @ wk
        for s, om in O.items():
            if s == p:
                r = r - om
            for c, wc in W.items():
                ow = om @ wc
                if s - c == p:
                    r = r - _off_part(ow)
                for a, wa in W.items():
                    if -a + s - c == p:
                        r = r + wa @ _diag_part(ow)
        out[p] = float(np.max(np.abs(r))) if not np.isscalar(r) else 0.0
    return out


def z_density(exp: WZExpansion, k: int) -> np.ndarray:
    """Diagonal of dZ^(k)/dx, shape (M, d)."""
    p = -k
    out = np.zeros((exp.grid.m, next(iter(exp.W.values())).shape[-1]), dtype=complex)
    if p in exp.D:
        out += np.einsum("mii->mi", exp.D[p])
    for s, om in exp.O.items():
        c = s - p
        if c in exp.W:
            out += np.einsum("mii->mi", om @ exp.W[c])
    return out


def _mat(m, entries):
    out = np.zeros((m, 2, 2), dtype=complex)
    for (i, j), v in entries.items():
        out[:, i, j] = v
    return out


# ---------------------------------------------------------------- nls

def nls_expansion(st: FieldState) -> WZExpansion:
    """Printed W^(1..3) in the literal convention (|psi|^2 read as psi psibar)."""
    g = st.grid
    psi, pb = st[0], st[1]
    d1, d2 = g.deriv, lambda f: g.deriv(f, 2)
    n = psi * pb
    W = {
        1: _mat(g.m, {(0, 1): -pb, (1, 0): psi}),
        2: _mat(g.m, {(0, 1): -d1(pb), (1, 0): -d1(psi)}),
        3: _mat(g.m, {(0, 1): -d2(pb) + n * pb, (1, 0): d2(psi) - n * psi}),
    }
    D = {1: np.broadcast_to(SZ / 2, (g.m, 2, 2))}
    O = {0: _mat(g.m, {(0, 1): pb, (1, 0): psi})}
    return WZExpansion("nls", g, D, O, W)


def nls_printed_z(st: FieldState) -> dict:
    g = st.grid
    psi, pb = st[0], st[1]
    n = psi * pb
    return {
        1: np.stack([n, -n], axis=1),
        2: np.stack([-g.deriv(psi) * pb, -psi * g.deriv(pb)], axis=1),
        3: np.stack([g.deriv(psi, 2) * pb - n**2, -(g.deriv(pb, 2) * psi - n**2)], axis=1),
    }


# ---------------------------------------------------------------- sine-Gordon

def sg_ratio(params: ModelParams) -> complex:
    """Frozen proportionality: I(1) + I(-1) = r H and I(1) - I(-1) = r P."""
    return -1j * params.beta**2 / (2 * params.m)


def sg_expansion(st: FieldState, params: ModelParams, sign: float = 1.0) -> WZExpansion:
    """Gauge-transformed sine-Gordon operator and the printed W^(0..2).

    ``sign = -1`` evaluates at (-phi, pi), which gives the I(-1) expansion.
    """
    g = st.grid
    m, b = params.m, params.beta
    phi, pi_ = sign * st[0], st[1]
    f = pi_ + g.deriv(phi)
    df = g.deriv(f)
    ph = -1j * b * phi / 2
    D = {0: (b / 4j) * f[:, None, None] * SZ}
    O = {1: np.broadcast_to((m / 4j) * SY, (g.m, 2, 2)),
         -1: -(m / 4j) * conj_diag(SY, np.stack([ph, -ph], axis=1))}
    W = {
        0: np.broadcast_to(1j * SX, (g.m, 2, 2)),
        1: (-1j * b / m) * f[:, None, None] * SX,
        2: (2j * b * df / m**2)[:, None, None] * SY - 1j * np.sin(b * phi)[:, None, None] * SY
        - (b**2 * f**2 / (2j * m**2))[:, None, None] * SX,
    }
    return WZExpansion("sg", g, D, O, W, hatted=sign < 0)


def sg_printed_z11(st, params, sign=1.0):
    m, b = params.m, params.beta
    exp = sg_expansion(st, params, sign)
    return (m / 4) * (-exp.W[2][:, 1, 0] + 1j * np.exp(-1j * b * sign * st[0]))


def sg_charges_from_z(st, params):
    g = st.grid
    ip = g.integrate(z_density(sg_expansion(st, params, 1.0), 1)[:, 0])
    im = g.integrate(z_density(sg_expansion(st, params, -1.0), 1)[:, 0])
    return ip, im


def sg_printed_I(st, params, sign=1.0):
    g = st.grid
    m, b = params.m, params.beta
    phi = sign * st[0]
    f = st[1] + g.deriv(phi)
    return -(m / 4j) * g.integrate(-(b**2 / (2 * m**2)) * f**2 + np.cos(b * phi))


# ---------------------------------------------------------------- A_2 ATFT

A2_RATIO = 2.0  # (I(1) + I(-1)) / H_1 and (I(-1) - I(1)) / P_1


@dataclass(frozen=True)
class A2Densities:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    ah: np.ndarray
    bh: np.ndarray
    ch: np.ndarray
    gamma: np.ndarray  # (3, M)
    zeta: float


def a2_densities(st: FieldState, params: ModelParams) -> A2Densities:
    """Explicit a, b, c (theta = Pi - Phi'), hatted versions (Pi + Phi') and gamma_i."""
    g = st.grid
    b = params.beta
    phi, pi_ = st.data[:2], st.data[2:]
    dphi = g.deriv(phi.T).T
    cd = cartan_data(2)

    def abc(th):
        return (b / 2 * (th[0] / 2 + th[1] / (2 * np.sqrt(3))),
                b / 2 * (-th[0] / 2 + th[1] / (2 * np.sqrt(3))),
                -b / 2 * th[1] / np.sqrt(3))

    a, bb, c = abc(pi_ - dphi)
    ah, bh, ch = abc(pi_ + dphi)
    gam = np.exp(b * cd.roots @ phi)
    return A2Densities(a, bb, c, ah, bh, ch, gam, 4 / params.m)


def _e3(m, entries):
    out = np.zeros((m, 3, 3), dtype=complex)
    for (i, j), v in entries.items():
        out[:, i - 1, j - 1] = v
    return out


def a2_expansion(st: FieldState, params: ModelParams, hatted: bool = False) -> WZExpansion:
    g = st.grid
    m = params.m
    dn = a2_densities(st, params)
    z = dn.zeta
    g1, g2, g3 = dn.gamma
    w, wi = _W, np.conj(_W)
    d = g.deriv
    W0 = np.broadcast_to(np.array([[0, w, 1], [w, 0, -1], [w**2, wi, 0]], dtype=complex), (g.m, 3, 3))
    if not hatted:
        a, b, c = dn.a, dn.b, dn.c
        D = {0: _e3(g.m, {(1, 1): a, (2, 2): b, (3, 3): c})}
        O = {1: np.broadcast_to((m / 4) * (_e3(1, {(1, 2): 1, (2, 3): 1, (3, 1): -1})[0]), (g.m, 3, 3)),
             -1: (m / 4) * _e3(g.m, {(2, 1): g1, (3, 2): g2, (1, 3): -g3})}
        W1 = z * _e3(g.m, {(1, 2): w**2 * a, (1, 3): c, (2, 1): -a, (2, 3): b, (3, 1): w * c, (3, 2): -b})
        ap, bp, cp = d(a), d(b), d(c)
        W2 = _e3(g.m, {
            (1, 2): (-2 * g3 + g1 + g2) / 3 + z**2 / 3 * (2 * ap + bp) + z**2 / 3 * (-2 * a**2 - b * c),
            (2, 1): wi / 3 * (-2 * g3 + g1 + g2) + z**2 * wi / 3 * (ap - cp) + z**2 * wi / 3 * (c**2 - a * b),
            (1, 3): (-2 * g2 + g1 + g3) / 3 + z**2 / 3 * (-bp + cp) + z**2 / 3 * (b**2 - a * c),
            (3, 1): (2 * g2 - g1 - g3) / 3 + z**2 / 3 * (-ap - 2 * cp) + z**2 / 3 * (2 * c**2 + a * b),
            (2, 3): -(2 * g1 - g2 - g3) / 3 + z**2 / 3 * (2 * bp + cp) + z**2 / 3 * (-2 * b**2 - a * c),
            (3, 2): -w / 3 * (2 * g1 - g2 - g3) + z**2 * w / 3 * (-ap + bp) + z**2 * w / 3 * (a**2 - b * c),
        })
    else:
        a, b, c = dn.ah, dn.bh, dn.ch
        D = {0: _e3(g.m, {(1, 1): a, (2, 2): b, (3, 3): c})}
        O = {1: np.broadcast_to((m / 4) * (_e3(1, {(2, 1): 1, (3, 2): 1, (1, 3): -1})[0]), (g.m, 3, 3)),
             -1: (m / 4) * _e3(g.m, {(1, 2): g1, (2, 3): g2, (3, 1): -g3})}
        W1 = z * _e3(g.m, {(1, 2): -b, (1, 3): -a, (2, 1): -wi * b, (2, 3): -c, (3, 1): a, (3, 2): -w * c})
        ap, bp, cp = d(a), d(b), d(c)
        W2 = _e3(g.m, {
            (1, 2): wi / 3 * (-2 * g2 + g1 + g3) + z**2 * wi / 3 * (bp - cp) + z**2 * wi / 3 * (c**2 - a * b),
            (2, 1): (-2 * g2 + g1 + g3) / 3 + z**2 / 3 * (2 * bp + ap) + z**2 / 3 * (-2 * b**2 - a * c),
            (1, 3): -(-2 * g1 + g3 + g2) / 3 - z**2 / 3 * (2 * ap + cp) + z**2 / 3 * (2 * a**2 + b * c),
            (3, 1): w / 3 * (2 * g1 - g2 - g3) + z**2 * w / 3 * (bp - ap) + z**2 * w / 3 * (-b**2 + a * c),
            (2, 3): -(-2 * g3 + g2 + g1) / 3 + z**2 / 3 * (ap - cp) + z**2 / 3 * (-a**2 + b * c),
            (3, 2): (-2 * g3 + g1 + g2) / 3 + z**2 / 3 * (bp + 2 * cp) + z**2 / 3 * (-2 * c**2 - a * b),
        })
    return WZExpansion("atft-a2", g, D, O, {0: W0, 1: W1, 2: W2}, hatted)


def a2_printed_z1(st, params, hatted=False) -> np.ndarray:
    """Printed dZ^(1)/dx diagonals (M, 3)."""
    g = st.grid
    m = params.m
    dn = a2_densities(st, params)
    z, w, wi = dn.zeta, _W, np.conj(_W)
    sg = dn.gamma.sum(axis=0) * m / 4
    d = g.deriv
    if not hatted:
        a, b, c = dn.a, dn.b, dn.c
        q = a**2 + b**2 + c**2
        cols = [wi / 3 * sg + z * wi / 3 * d(a - c) + z * wi / 6 * q,
                w / 3 * sg + z * w / 3 * d(b - a) + z * w / 6 * q,
                -sg / 3 - z / 3 * d(c - b) - z / 6 * q]
    else:
        a, b, c = dn.ah, dn.bh, dn.ch
        q = a**2 + b**2 + c**2
        cols = [w / 3 * sg - z * w / 3 * d(b - a) + z * w / 6 * q,
                wi / 3 * sg + z * wi / 3 * d(b - c) + z * wi / 6 * q,
                -sg / 3 + z / 3 * d(a - c) - z / 6 * q]
    return np.stack(cols, axis=1)


def a2_charges_from_z(st, params):
    """I(1), I(-1) = -(12 m / beta^2) int dZ_33^(1) (plain and hatted)."""
    g = st.grid
    k = -12 * params.m / params.beta**2
    ip = k * g.integrate(z_density(a2_expansion(st, params, False), 1)[:, 2])
    im = k * g.integrate(z_density(a2_expansion(st, params, True), 1)[:, 2])
    return ip, im


# ---------------------------------------------------------------- driver

_ORDERS = {"nls": 3, "sg": 2, "atft-a2": 2}


def wz_check(model: str, st: FieldState, params: ModelParams, order: int) -> dict:
    """Residual report: recursion residuals per power, Z-density mismatches, charge identities."""
    if model not in _ORDERS:
        raise ValueError(f"wz_check supports {sorted(_ORDERS)}")
    if not 1 <= order <= _ORDERS[model]:
        raise ValueError(f"unsupported order {order} for {model}; max {_ORDERS[model]}")
    g = st.grid
    rep = {"model": model, "order": order}
    if model == "nls":
        from .models import NLS
        exp = nls_expansion(st)
        # the W^(k) enter the recursion up to power 1 - k
        rep["recursion"] = recursion_residuals(exp, [1 - k for k in range(1, order + 1)])
        pz = nls_printed_z(st)
        rep["z_density"] = {k: float(np.max(np.abs(z_density(exp, k) - pz[k]))) for k in range(1, order + 1)}
        ch = NLS().charges(st, params)
        names = {1: "N", 2: "P", 3: "H"}
        rep["charges"] = {names[k]: abs(g.integrate(z_density(exp, k)[:, 0]) - ch[names[k]])
                          for k in range(1, order + 1)}
        rep["structure"] = exp.check_structure()
        return rep
    if model == "sg":
        from .models import SineGordon
        exps = (sg_expansion(st, params, 1.0), sg_expansion(st, params, -1.0))
        rep["recursion"] = {}
        for tag, e in zip(("plain", "hat"), exps):
            for p, v in recursion_residuals(e, [1 - k for k in range(0, order + 1)]).items():
                rep["recursion"][(tag, p)] = v
        rep["structure"] = max(e.check_structure() for e in exps)
        if order >= 2:
            rep["z_density"] = {s: float(np.max(np.abs(z_density(sg_expansion(st, params, s), 1)[:, 0]
                                                       - sg_printed_z11(st, params, s)))) for s in (1.0, -1.0)}
            ip, im = sg_charges_from_z(st, params)
            ch = SineGordon().charges(st, params)
            r = sg_ratio(params)
            rep["I"] = (ip, im)
            rep["printed_I"] = {s: abs(g.integrate(z_density(sg_expansion(st, params, s), 1)[:, 0])
                                       - sg_printed_I(st, params, s)) for s in (1.0, -1.0)}
            rep["ratio_H"] = (ip + im) / ch["H"]
            rep["ratio_P"] = (ip - im) / ch["P"] if abs(ch["P"]) > 1e-14 else None
            rep["charges"] = {"H": abs(ip + im - r * ch["H"]), "P": abs(ip - im - r * ch["P"])}
        return rep
    from .models import ATFT
    exps = (a2_expansion(st, params, False), a2_expansion(st, params, True))
    rep["recursion"] = {}
    for tag, e in zip(("plain", "hat"), exps):
        for p, v in recursion_residuals(e, [1 - k for k in range(0, order + 1)]).items():
            rep["recursion"][(tag, p)] = v
    rep["structure"] = max(e.check_structure() for e in exps)
    if order >= 2:
        rep["z_density"] = {tag: float(np.max(np.abs(z_density(e, 1) - a2_printed_z1(st, params, e.hatted))))
                            for tag, e in zip(("plain", "hat"), exps)}
        ip, im = a2_charges_from_z(st, params)
        ch = ATFT(2).charges(st, params)
        rep["I"] = (ip, im)
        rep["charges"] = {"H": abs(0.5 * (ip + im) - ch["H"]), "P": abs(0.5 * (im - ip) - ch["P"])}
        rep["ratio_H"] = (ip + im) / ch["H"]
    return rep
