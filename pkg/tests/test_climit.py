import numpy as np
import pytest
import sympy as sp
from sympy.calculus.euler import euler_equations

from laxkit.climit import (DEFAULT_DELTAS, LimitSchedule, Profile, charge_limit, continuum_target, discretize,
                           lax_limit_check, nls_identification, richardson_order, sites_for, subtracted_charges)
from laxkit.discrete import closed_form_charges

BUMP = Profile("0.5 + 0.3*cos(pi*x) + 0.2*i*sin(pi*x)", "0.6 - 0.25*sin(pi*x) + 0.1*cos(pi*x)")


# ---------------------------------------------------------------- symbolic oracle

s, d = sp.symbols("s delta", positive=True)
xf, Xf = sp.Function("x"), sp.Function("X")


def _closed_form_densities():
    """Per-site DST densities minus their vacuum values, after x -> delta x, X -> delta X.

    Neighbours x_{j+k} become x(s + k delta).
    """
    x = lambda k=0: d * xf(s + k * d)  # noqa: E731
    X = d * Xf(s)
    nn = lambda k=0: 1 - x(k) * d * Xf(s + k * d)  # noqa: E731
    i1 = nn() - 1
    i2 = -x(1) * X - sp.Rational(1, 2) * nn() ** 2 + sp.Rational(1, 2)
    i3 = -x(2) * X + (nn() + nn(1)) * x(1) * X + nn() ** 3 / 3 - sp.Rational(1, 3)
    return {1: i1, 2: i2, 3: i3}


def _euler(expr):
    """Variational derivatives in x and X; zero iff expr is a total derivative."""
    y1, y2 = sp.Function("y1")(s), sp.Function("y2")(s)
    e = expr.subs({xf(s): y1, Xf(s): y2}).doit()
    return [sp.simplify(eq.lhs) for eq in euler_equations(e, [y1, y2], s)]


@pytest.fixture(scope="module")
def taylor():
    out = {}
    for k, dens in _closed_form_densities().items():
        ser = sp.expand(sp.series(dens, d, 0, k + 2).removeO())
        out[k] = [sp.expand(ser.coeff(d, p).doit()) for p in range(k + 2)]
    return out


TARGETS = {
    1: xf(s) * Xf(s),
    2: sp.Rational(1, 2) * (xf(s).diff(s) * Xf(s) - xf(s) * Xf(s).diff(s)),
    3: xf(s).diff(s, 2) * Xf(s) + xf(s) ** 2 * Xf(s) ** 2,
}


@pytest.mark.parametrize("k", [1, 2, 3])
def test_taylor_oracle_targets(taylor, k):
    coeffs = taylor[k]
    # sum_j density ~ (1/delta) int density ds, and the scaled charge is -(.)/delta^k,
    # so the continuum density is minus the delta^(k+1) coefficient, up to total derivatives
    for p in range(k + 1):
        assert all(e == 0 for e in _euler(coeffs[p])), f"delta^{p} term is not a total derivative"
    assert all(e == 0 for e in _euler(-coeffs[k + 1] - TARGETS[k]))


def test_taylor_oracle_rejects_wrong_target(taylor):
    wrong = xf(s).diff(s, 2) * Xf(s) - xf(s) ** 2 * Xf(s) ** 2
    assert any(e != 0 for e in _euler(-taylor[3][4] - wrong))


# ---------------------------------------------------------------- discretization

def test_discretize_constant_and_sizes():
    dz = discretize(Profile("0.3", "0.2 - 0.1*i"), 0.1)
    assert dz.n == 20 and np.allclose(dz.x, 0.3) and np.allclose(dz.X, 0.2 - 0.1j)
    assert discretize(BUMP, 0.05).n == 2 * discretize(BUMP, 0.1).n
    with pytest.raises(ValueError):
        sites_for(0.3, 1.0)
    with pytest.raises(ValueError):
        LimitSchedule((0.05, 0.1))
    with pytest.raises(ValueError):
        Profile("x + j")


def test_subtracted_matches_closed_form():
    dz = discretize(BUMP, 0.1)
    full = closed_form_charges(dz.model, dz.point, 3).charges
    vac = closed_form_charges(dz.model, dz.model.vacuum(), 3).charges
    sub = subtracted_charges(dz)
    assert np.allclose(np.array(full) - vac, sub, atol=1e-13)


def test_local_expansion():
    lam = 0.7 + 0.3j
    ratios = []
    for delta in (0.1, 0.05, 0.025):
        dz = discretize(BUMP, delta)
        err = max(np.max(np.abs(dz.lax(j, lam) - np.eye(2) - delta * dz.continuum_U(j, lam))) for j in range(dz.n))
        ratios.append(err / delta**2)
    assert max(ratios) <= 1.0 and max(ratios) / min(ratios) <= 1.01


# ---------------------------------------------------------------- charge limits

def test_constant_profile_k1_exact():
    prof = Profile("0.4 + 0.1*i", "0.3")
    rep = charge_limit(LimitSchedule(DEFAULT_DELTAS, 1.0, prof), 1)
    assert max(abs(e) for e in rep.errors) <= 1e-12
    assert rep.fit == "exact"


def test_zero_profile():
    rep = charge_limit(LimitSchedule(DEFAULT_DELTAS, 1.0, Profile()), 1)
    assert rep.target == 0 and all(v == 0 for v in rep.values)


def test_bump_k1_is_exact():
    # for a band-limited profile the Riemann sum of x X is the continuum integral
    rep = charge_limit(LimitSchedule(DEFAULT_DELTAS, 1.0, BUMP), 1)
    assert rep.fit == "exact" and max(abs(e) for e in rep.errors) <= 1e-12


@pytest.mark.parametrize("k", [2, 3])
def test_bump_orders(k):
    rep = charge_limit(LimitSchedule(DEFAULT_DELTAS, 1.0, BUMP), k)
    assert rep.fit == "fit"
    assert rep.order >= 0.95
    assert all(abs(b) < abs(a) for a, b in zip(rep.errors, rep.errors[1:]))


def test_k2_leading_error_is_half_delta_k3():
    # measured: I2 error ~ (delta/2) * (k=3 target); confirms the first-order behaviour
    sch = LimitSchedule(DEFAULT_DELTAS, 1.0, BUMP)
    rep = charge_limit(sch, 2)
    t3 = continuum_target(sch, 3)
    lead = np.array(rep.errors) / (np.array(sch.deltas) / 2 * t3)
    assert abs(lead[-1] - 1) <= 0.05 * abs(lead[0] - 1) + 0.05


def test_parallel_matches_serial():
    sch = LimitSchedule(DEFAULT_DELTAS, 1.0, BUMP)
    assert charge_limit(sch, 2, jobs=3).values == charge_limit(sch, 2, jobs=1).values


def test_richardson():
    ds = np.array([0.1, 0.05, 0.025])
    p, kind = richardson_order(ds, 3 * ds**2)
    assert kind == "fit" and abs(p - 2) < 1e-12
    assert richardson_order(ds, [1e-16, 0, 1e-15]) == (float("inf"), "exact")
    with pytest.raises(ValueError):
        richardson_order(ds[:2], [1, 2])
    with pytest.raises(ValueError):
        richardson_order(ds, [1e-3, 0.0, 1e-5])


def test_nls_identification():
    ratios = nls_identification(LimitSchedule(DEFAULT_DELTAS, 1.0, BUMP))
    for name in ("N", "P", "H"):
        assert abs(ratios[name] + 1) <= 1e-10


# ---------------------------------------------------------------- Lax limit

def test_lax_limit_bump():
    rep = lax_limit_check(LimitSchedule(DEFAULT_DELTAS, 1.0, BUMP), 0.7 + 0.3j)
    assert max(rep.local) <= 1.0
    assert all(1.7 <= r <= 2.6 for r in rep.monodromy_ratios)
    # the time component lags one site (X_{j-1}), so it converges at first order
    assert all(1.9 <= a / b <= 2.1 for a, b in zip(rep.a_limit, rep.a_limit[1:]))


def test_lax_limit_vacuum():
    rep = lax_limit_check(LimitSchedule(DEFAULT_DELTAS, 1.0, Profile()), 0.7 + 0.3j)
    assert max(rep.a_limit) == 0
    assert max(rep.vacuum.values()) <= 1e-10
