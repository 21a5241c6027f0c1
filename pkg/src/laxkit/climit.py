"""Discrete-to-continuum harness for the DST chain.

With spacing delta the DST Lax matrix becomes
    L_j(lam) = [[1 + delta lam - delta^2 x_j X_j, delta x_j], [-delta X_j, 1]],
i.e. the unscaled chain at lam -> delta lam, x -> delta x, X -> delta X, with
x_j = x(s_j), X_j = X(s_j) on sites s_j = -L + j delta, j = 0..N-1.

Scaled charges  I_k^c = -(I_k - I_k[vacuum]) / delta^k  converge to
    k=1  int x X
    k=2  (1/2) int (x' X - x X')
    k=3  int (x'' X + x^2 X^2)
and the error is O(delta).  The k=3 target comes from a Taylor expansion of the
closed-form I_3 (see tests/test_climit.py for the symbolic oracle).

The continuum U used for L = 1 + delta U + O(delta^2) carries the additive
constant lam/2: U = [[lam, x], [-X, 0]], which differs from the symmetric form
[[lam/2, x], [-X, -lam/2]] by (lam/2) * 1.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .discrete.models import DST
from .fields.grid import Grid
from .fields.models import ModelParams, get_model
from .fields.monodromy import monodromy_numeric

__all__ = [
    "Profile", "LimitSchedule", "Discretized", "ChargeLimitReport", "LaxLimitReport",
    "discretize", "charge_limit", "lax_limit_check", "richardson_order", "continuum_target",
    "nls_identification", "subtracted_charges", "DEFAULT_DELTAS", "SCALE_SIGNS",
]

DEFAULT_DELTAS = (0.1, 0.05, 0.025, 0.0125)
SCALE_SIGNS = {1: -1.0, 2: -1.0, 3: -1.0}
EXACT_RTOL = 1e-12


@dataclass(frozen=True)
class Profile:
    """Smooth periodic profile pair x(.), X(.) given as expressions in ``x``."""

    x: str = "0"
    X: str = "0"

    def __post_init__(self):
        for s in (self.x, self.X):
            e = ex.parse(s)
            extra = ex.free_vars(e) - {"x"}
            if extra:
                raise ValueError(f"profile {s!r} uses {sorted(extra)}; only x is allowed")

    def sample(self, s):
        s = np.asarray(s, dtype=float)
        return ex.evaluate(self.x, {"x": s}), ex.evaluate(self.X, {"x": s})


@dataclass(frozen=True)
class LimitSchedule:
    deltas: tuple = DEFAULT_DELTAS
    half_length: float = 1.0
    profile: Profile = field(default_factory=Profile)

    def __post_init__(self):
        d = tuple(float(v) for v in self.deltas)
        object.__setattr__(self, "deltas", d)
        if not d or any(v <= 0 for v in d):
            raise ValueError("deltas must be positive")
        if any(b >= a for a, b in zip(d, d[1:])):
            raise ValueError("deltas must be strictly decreasing")
        for v in d:
            sites_for(v, self.half_length)

    def sites(self):
        return [sites_for(v, self.half_length) for v in self.deltas]


def sites_for(delta, half_length) -> int:
    n = 2 * half_length / delta
    if abs(n - round(n)) > 1e-9 * max(1.0, n):
        raise ValueError(f"N = 2L/delta = {n} is not an integer")
    return int(round(n))


@dataclass(frozen=True)
class Discretized:
    delta: float
    half_length: float
    s: np.ndarray
    x: np.ndarray
    X: np.ndarray
    model: DST
    point: object  # PhasePoint of the unscaled chain carrying delta*x, delta*X

    @property
    def n(self):
        return self.model.n

    def lax(self, j, lam) -> np.ndarray:
        d = self.delta
        return np.array([[1 + d * lam - d * d * self.x[j] * self.X[j], d * self.x[j]],
                         [-d * self.X[j], 1]], dtype=complex)

    def continuum_U(self, j, lam) -> np.ndarray:
        return np.array([[lam, self.x[j]], [-self.X[j], 0]], dtype=complex)

    def monodromy(self, lam) -> np.ndarray:
        t = np.eye(2, dtype=complex)
        for j in range(self.n):
            t = self.lax(j, lam) @ t
        return t


def discretize(profile: Profile, delta: float, half_length: float = 1.0) -> Discretized:
    n = sites_for(delta, half_length)
    s = -half_length + delta * np.arange(n)
    x, X = profile.sample(s)
    model = DST(n)
    return Discretized(delta, half_length, s, x, X, model, model.point(delta * x, delta * X))


def _fine(profile, schedule, factor=4):
    m = 4 * sites_for(schedule.deltas[-1], schedule.half_length) * factor // 4
    g = Grid(max(m, 16), schedule.half_length)
    x, X = profile.sample(g.x)
    return g, x, X


def continuum_target(schedule: LimitSchedule, k: int) -> complex:
    """Trapezoid value of the k-th continuum charge on a grid 4x finer than the smallest delta."""
    g, x, X = _fine(schedule.profile, schedule)
    if k == 1:
        dens = x * X
    elif k == 2:
        dens = 0.5 * (g.deriv(x) * X - x * g.deriv(X))
    elif k == 3:
        dens = g.deriv(x, 2) * X + x**2 * X**2
    else:
        raise ValueError("charge index must be 1, 2 or 3")
    return complex(g.integrate(dens))


def richardson_order(deltas, errors, scale=1.0):
    """Least-squares slope of log|err| against log delta; inf when every error is at roundoff."""
    deltas, errors = np.asarray(deltas, float), np.abs(np.asarray(errors))
    if deltas.size < 3:
        raise ValueError("Richardson fit needs at least three delta values")
    if np.all(errors <= EXACT_RTOL * max(scale, 1.0)):
        return float("inf"), "exact"
    if np.any(errors == 0):
        raise ValueError("Richardson fit ill-conditioned: some but not all errors vanish")
    p = np.polyfit(np.log(deltas), np.log(errors), 1)[0]
    return float(p), "fit"


@dataclass(frozen=True)
class ChargeLimitReport:
    k: int
    deltas: tuple
    sites: tuple
    values: tuple
    target: complex
    errors: tuple
    order: float
    fit: str
    pairwise: tuple

    def rows(self):
        return [(d, n, v, abs(e)) for d, n, v, e in zip(self.deltas, self.sites, self.values, self.errors)]


def subtracted_charges(dz: Discretized) -> tuple:
    """I_k - I_k[vacuum] for k = 1..3, written in n_j = delta^2 x_j X_j so the O(N) constants cancel exactly.

    Same closed forms as DST.charges (x_{j+1} X_j and x_{j+2} X_j couplings).
    """
    d2 = dz.delta**2
    x, X = dz.x, dz.X
    n = d2 * x * X
    x1, x2 = np.roll(x, -1), np.roll(x, -2)
    c1 = d2 * x1 * X
    i1 = -np.sum(n)
    i2 = -np.sum(c1) + np.sum(n) - 0.5 * np.sum(n * n)
    nn, nn1 = 1 - n, 1 - np.roll(n, -1)
    i3 = -np.sum(d2 * x2 * X) + np.sum((nn + nn1) * c1) + np.sum(-n + n * n - n**3 / 3)
    return complex(i1), complex(i2), complex(i3)


def _scaled_charge(profile, delta, L, k, combination):
    dz = discretize(profile, delta, L)
    cf = subtracted_charges(dz)
    return complex(sum(w * cf[i - 1] for i, w in combination.items())) / delta**k


def _pmap(fn, items, jobs):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def charge_limit(schedule: LimitSchedule, k: int, combination=None, jobs: int = 1) -> ChargeLimitReport:
    """Scaled discrete charge versus its continuum target for every delta.

    ``combination`` maps discrete charge index to weight; it defaults to
    {k: SCALE_SIGNS[k]}.  Vacuum values are subtracted before scaling by delta^-k.
    """
    if k not in SCALE_SIGNS:
        raise ValueError("charge index must be 1, 2 or 3")
    combination = dict(combination or {k: SCALE_SIGNS[k]})
    if len(schedule.deltas) < 3:
        raise ValueError("Richardson fit needs at least three delta values")
    L = schedule.half_length
    vals = _pmap(lambda d: _scaled_charge(schedule.profile, d, L, k, combination), schedule.deltas, jobs)
    target = continuum_target(schedule, k)
    errs = tuple(v - target for v in vals)
    order, fit = richardson_order(schedule.deltas, errs, abs(target))
    pair = tuple(float(np.log(abs(errs[i]) / abs(errs[i + 1])) / np.log(schedule.deltas[i] / schedule.deltas[i + 1]))
                 if abs(errs[i + 1]) > 0 and abs(errs[i]) > 0 else float("inf")
                 for i in range(len(errs) - 1))
    return ChargeLimitReport(k, schedule.deltas, tuple(schedule.sites()), tuple(vals), target, errs,
                             order, fit, pair)


@dataclass(frozen=True)
class LaxLimitReport:
    lam: complex
    deltas: tuple
    local: tuple  # max_j |L_j - 1 - delta U_j| / delta^2
    monodromy_error: tuple  # |T_discrete - T_continuum| (max entry)
    monodromy_ratios: tuple
    a_limit: tuple  # max_j |A_j(delta lam)/delta - V(s_j)|
    vacuum: dict


def _continuum_monodromy(schedule, lam):
    """Path-ordered exponential of U = [[lam, x], [-X, 0]] via the NLS operator plus lam/2."""
    g, x, X = _fine(schedule.profile, schedule)
    nls = get_model("nls")
    st = nls.state(g, -X, x)  # x = psibar, X = -psi
    t = monodromy_numeric(nls, st, ModelParams(), lam)
    return t * np.exp(lam * schedule.half_length)


def _a_limit(dz, lam):
    worst = 0.0
    for j in range(dz.n):
        a = dz.model.lax_time_component(2, j, dz.delta * lam, dz.point) / dz.delta
        v = dz.continuum_U(j, lam)
        v[1, 1] = 0.0
        v[0, 0] = lam
        worst = max(worst, float(np.max(np.abs(a - v))))
    return worst


def lax_limit_check(schedule: LimitSchedule, lam, jobs: int = 1) -> LaxLimitReport:
    lam = complex(lam)
    L = schedule.half_length
    cont = _continuum_monodromy(schedule, lam)

    def one(d):
        dz = discretize(schedule.profile, d, L)
        loc = max(float(np.max(np.abs(dz.lax(j, lam) - np.eye(2) - d * dz.continuum_U(j, lam)))) for j in range(dz.n))
        return loc / d**2, float(np.max(np.abs(dz.monodromy(lam) - cont))), _a_limit(dz, lam)

    res = _pmap(one, schedule.deltas, jobs)
    local, mono, alim = (tuple(r[i] for r in res) for i in range(3))
    ratios = tuple(mono[i] / mono[i + 1] if mono[i + 1] > 0 else float("inf") for i in range(len(mono) - 1))
    # vacuum: both monodromies are diagonal with closed forms (1 + delta lam)^N and e^{2 lam L}
    vac = {}
    for d in schedule.deltas:
        dz = discretize(Profile(), d, L)
        td = dz.monodromy(lam)
        exact = np.diag([(1 + d * lam) ** dz.n, 1.0])
        vac[d] = float(np.max(np.abs(td - exact)) / max(1.0, abs(exact[0, 0])))
    vs = LimitSchedule(schedule.deltas, L, Profile())
    tc = _continuum_monodromy(vs, lam)
    exact_c = np.diag([np.exp(2 * lam * L), 1.0])
    vac["continuum"] = float(np.max(np.abs(tc - exact_c)) / max(1.0, abs(exact_c[0, 0])))
    return LaxLimitReport(lam, schedule.deltas, local, mono, ratios, alim, vac)


def nls_identification(schedule: LimitSchedule) -> dict:
    """Ratio of each continuum target to the NLS charge under x = psibar, X = -psi."""
    g, x, X = _fine(schedule.profile, schedule)
    nls = get_model("nls")
    ch = nls.charges(nls.state(g, -X, x), ModelParams())
    out = {}
    for k, name in ((1, "N"), (2, "P"), (3, "H")):
        t = continuum_target(schedule, k)
        out[name] = t / ch[name] if abs(ch[name]) > 1e-14 else None
    return out
