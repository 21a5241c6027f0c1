import numpy as np
import pytest

from laxkit.fields import (FieldInstability, Grid, ModelParams, cartan_data, cartan_invariant_residuals,
                           evolve, get_model, kink_antikink, monodromy_numeric, random_band_limited,
                           random_state, transfer_numeric, zero_curvature_residual)
from laxkit.rmatrix import PoleError

P = ModelParams(1.0, 1.0)


def flat(grid, value=0.0):
    return np.full(grid.m, value)


# ---------------------------------------------------------------- grid

def test_grid_basics():
    g = Grid(64, 3.0)
    assert g.h == pytest.approx(6.0 / 64)
    assert g.x[0] == -3.0 and g.x[-1] == pytest.approx(3.0 - g.h)
    f = np.sin(np.pi * g.x / 3)
    assert np.allclose(g.deriv(f), np.pi / 3 * np.cos(np.pi * g.x / 3), atol=1e-12)
    assert np.allclose(g.deriv(f, 2), -(np.pi / 3) ** 2 * f, atol=1e-12)
    assert abs(g.integrate(f**2) - 3.0) < 1e-12
    assert np.allclose(g.shift(f, 0.5), np.sin(np.pi * (g.x + g.h / 2) / 3), atol=1e-12)
    with pytest.raises(ValueError):
        Grid(8, 1.0)
    with pytest.raises(ValueError):
        Grid(32, 0.0)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(0.0, 1.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, 0.0)


# ---------------------------------------------------------------- Cartan data

@pytest.mark.parametrize("n", [1, 2])
def test_cartan_invariants(n):
    res = cartan_invariant_residuals(cartan_data(n))
    assert set(res) == {"root_norm", "weight_duality", "root_sum", "cartan_weyl", "chevalley", "serre"}
    assert max(res.values()) <= 1e-12


def test_cartan_a2_printed_data():
    cd = cartan_data(2)
    assert np.allclose(cd.roots[0], [1, 0]) and np.allclose(cd.roots[1], [-0.5, np.sqrt(3) / 2])
    assert np.allclose(cd.H[0], 0.5 * np.diag([1, -1, 0]))
    comm = cd.H[0] @ cd.E_pos[0] - cd.E_pos[0] @ cd.H[0]
    assert np.allclose(comm, cd.roots[0][0] * cd.E_pos[0])
    assert np.allclose(cd.cartan_matrix, [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])


def test_cartan_a1():
    cd = cartan_data(1)
    assert np.allclose(cd.roots[0] + cd.roots[1], 0)
    assert np.allclose(cd.cartan_matrix, [[2, -2], [-2, 2]])
    with pytest.raises(ValueError):
        cartan_data(3)


# ---------------------------------------------------------------- U, V and charges

def test_U_vacuum_examples():
    g = Grid(32, 4.0)
    nls = get_model("nls")
    st = nls.state(g, flat(g), flat(g))
    assert np.allclose(nls.U(st, P, 0.6), np.diag([0.3, -0.3]))
    sg = get_model("sg")
    assert np.allclose(sg.U(sg.state(g, flat(g), flat(g)), P, 0.0), 0)
    a2 = get_model("atft-a2")
    vac = a2.state(g, *[flat(g)] * 4)
    lam = 0.45
    u = np.exp(2 * lam / 3)
    cd = a2.cd
    assert np.allclose(a2.U(vac, ModelParams(2.0, 0.5), lam), 0.5 * (u * cd.E_plus + cd.E_minus / u))


def test_V_examples(rng):
    g = Grid(64, np.pi)
    nls = get_model("nls")
    vac = nls.state(g, flat(g), flat(g))
    st = random_state("nls", g, rng)
    assert np.allclose(nls.V("V1", st, P, 0.3), np.diag([1, 0]))
    assert np.allclose(nls.V("V3", vac, P, 0.3), np.diag([0.09, 0]))
    sg = get_model("sg")
    s = random_state("sg", g, rng)
    assert np.max(np.abs(sg.V("P", s, P, 0.4 + 0.1j) - sg.U(s, P, 0.4 + 0.1j))) == 0
    with pytest.raises(ValueError):
        sg.V("V9", s, P, 0.1)


def test_ll_pole():
    g = Grid(32, 2.0)
    ll = get_model("ll")
    st = ll.state(g, flat(g), flat(g), flat(g, 1.0))
    with pytest.raises(PoleError):
        ll.U(st, P, 0.0)


def test_charges_examples():
    g = Grid(64, 5.0)
    nls = get_model("nls")
    c = 0.3 + 0.4j
    q = nls.charges(nls.canonical_state(g, np.full(g.m, c)), P)
    assert np.allclose([q["N"], q["P"], q["H"]], [10 * abs(c) ** 2, 0, -10 * abs(c) ** 4], atol=1e-13)
    params = ModelParams(1.3, 0.7)
    sg = get_model("sg")
    assert np.isclose(sg.charges(sg.state(g, flat(g), flat(g)), params)["H"], -10 * 1.3**2 / 0.7**2)
    a2 = get_model("atft-a2")
    h = a2.charges(a2.state(g, *[flat(g)] * 4), params)["H"]
    assert np.isclose(h, 10 * 3 * 1.3**2 / 0.7**2)


def test_ll_charges_need_s3_above_minus_one():
    g = Grid(32, 2.0)
    ll = get_model("ll")
    with pytest.raises(ValueError):
        ll.charges(ll.state(g, flat(g), flat(g), flat(g, -1.0)), P)
    with pytest.raises(ValueError):
        ll.state(g, flat(g), flat(g), flat(g, 0.5))


def test_sg_f_identity(rng):
    g = Grid(128, 4.0)
    s = random_state("sg", g, rng)
    f, fh = s[1] + g.deriv(s[0]), s[1] - g.deriv(s[0])
    assert np.max(np.abs(f**2 + fh**2 - 2 * (s[1] ** 2 + g.deriv(s[0]) ** 2))) <= 1e-12


# ---------------------------------------------------------------- equations of motion

def test_nls_constant_mode():
    g = Grid(32, 3.0)
    nls = get_model("nls")
    c = 0.3 + 0.4j
    rates = nls.eom_rhs(nls.canonical_state(g, np.full(g.m, c)), P)
    assert np.allclose(rates[0], -2j * abs(c) ** 2 * c)


def test_sg_vacuum_rhs():
    g = Grid(32, 3.0)
    sg = get_model("sg")
    assert np.allclose(sg.eom_rhs(sg.state(g, flat(g), flat(g)), P), 0)


def discrete_gradient(energy, data, comp, idx, step=1e-6):
    e = np.zeros_like(data)
    e[comp, idx] = step
    return (energy(data + e) - energy(data - e)) / (2 * step)


def test_sg_flow_is_variational(rng):
    g = Grid(64, np.pi)
    sg = get_model("sg")
    params = ModelParams(1.2, 0.8)
    s = random_state("sg", g, rng)
    energy = lambda d: sg.charges(s.replace(d), params)["H"].real  # noqa: E731
    rates = sg.eom_rhs(s, params)
    for idx in (0, 17, 40):
        dh_dphi = discrete_gradient(energy, s.data, 0, idx) / g.h
        dh_dpi = discrete_gradient(energy, s.data, 1, idx) / g.h
        assert abs(rates[1][idx] + dh_dphi) <= 1e-6 and abs(rates[0][idx] - dh_dpi) <= 1e-6


def test_atft_flow_is_half_H1(rng):
    g = Grid(64, np.pi)
    a2 = get_model("atft-a2")
    params = ModelParams(0.9, 0.6)
    s = random_state("atft-a2", g, rng)
    energy = lambda d: 0.5 * a2.charges(s.replace(d), params)["H"].real  # noqa: E731
    rates = a2.eom_rhs(s, params)
    for comp in (0, 1):
        for idx in (3, 31):
            dh = discrete_gradient(energy, s.data, comp, idx) / g.h
            assert abs(rates[2 + comp][idx] + dh) <= 1e-6
            assert abs(rates[comp][idx] - discrete_gradient(energy, s.data, 2 + comp, idx) / g.h) <= 1e-6


def test_atft_force_hand_formula(rng):
    g = Grid(64, np.pi)
    a2 = get_model("atft-a2")
    params = ModelParams(0.9, 0.6)
    s = random_state("atft-a2", g, rng)
    phi = s.data[:2]
    cd = a2.cd
    want = np.array([g.deriv(phi[i], 2) - params.m**2 / (2 * params.beta) * sum(
        cd.roots[k][i] * np.exp(params.beta * cd.roots[k] @ phi) for k in range(3)) for i in range(2)])
    assert np.allclose(a2.eom_rhs(s, params)[2:], want, atol=1e-12)


def test_liouville_implied_eom(rng):
    g = Grid(64, np.pi)
    lv = get_model("liouville")
    s = random_state("liouville", g, rng)
    rates = lv.eom_rhs(s, P)
    # phi_tt - phi'' - 4 i e^{-2 i phi} = 0 with phi_t = pi
    assert np.allclose(rates[1] - g.deriv(s[0], 2) - 4j * np.exp(-2j * s[0]), 0, atol=1e-12)
    assert np.array_equal(rates[0], s[1])


# ---------------------------------------------------------------- zero curvature

CASES = [("nls", "V1"), ("nls", "V2"), ("nls", "V3"), ("sg", "H"), ("sg", "P"),
         ("liouville", "printed"), ("ll", "H"), ("atft-a2", "H"), ("atft-a1", "H")]


@pytest.mark.parametrize("kind,variant", CASES)
def test_zero_curvature(kind, variant, rng):
    g = Grid(256, np.pi)
    st = random_state(kind, g, rng)
    for lam in (0.7, -0.4 + 0.3j):
        assert zero_curvature_residual(kind, variant, st, P, lam) <= 1e-6


def test_zero_curvature_printed_atft_sign():
    # with the printed sign of the m/4 term the pair is not flat
    g = Grid(128, np.pi)
    st = random_state("atft-a2", g, np.random.default_rng(5))
    assert zero_curvature_residual("atft-a2", "printed", st, P, 0.7) > 1e-2


def test_zero_curvature_spectral_rate():
    # a field with a broad spectrum shows the spectral convergence before the floor
    rng = np.random.default_rng(3)
    res = []
    for m in (32, 64):
        g = Grid(m, np.pi)
        psi = 0.3 / (1.2 - np.cos(g.x)) + 0.1j * np.sin(g.x)
        nls = get_model("nls")
        res.append(zero_curvature_residual(nls, "V3", nls.state(g, psi, np.conj(psi)), P, 0.5))
    assert res[1] <= res[0] / 10


def test_nls_literal_and_canonical_differ(rng):
    g = Grid(64, np.pi)
    nls = get_model("nls")
    st = random_state("nls", g, rng)
    lit = nls.flow("V3", st, P, "literal")
    can = nls.flow("V3", st, P, "canonical")
    assert np.max(np.abs(lit - can)) > 1e-3


# ---------------------------------------------------------------- monodromy

def test_monodromy_vacuum():
    g = Grid(64, 2.5)
    nls = get_model("nls")
    st = nls.state(g, flat(g), flat(g))
    lam = 0.6 + 0.2j
    t = monodromy_numeric(nls, st, P, lam)
    assert np.allclose(t, np.diag([np.exp(lam * 2.5), np.exp(-lam * 2.5)]), atol=1e-12)
    assert abs(transfer_numeric(nls, st, P, lam) - 2 * np.cosh(lam * 2.5)) <= 1e-12
    sg = get_model("sg")
    assert np.allclose(monodromy_numeric(sg, sg.state(g, flat(g), flat(g)), P, 0.0), np.eye(2), atol=1e-14)


def test_monodromy_determinant(rng):
    # every U here is traceless, so det T = 1
    g = Grid(128, np.pi)
    for kind in ("nls", "sg", "atft-a2"):
        st = random_state(kind, g, rng)
        t = monodromy_numeric(kind, st, P, 0.3 + 0.2j)
        assert abs(np.linalg.det(t) - 1) <= 1e-10


def test_monodromy_fourth_order():
    nls = get_model("nls")

    def mono(m):
        g = Grid(m, 4.0)
        psi = 0.5 * np.exp(np.cos(np.pi * g.x / 4)) + 0j
        return monodromy_numeric(nls, nls.state(g, psi, 0.7 * psi), P, 0.4)

    ref = mono(1024)
    errs = [np.max(np.abs(mono(m) - ref)) for m in (32, 64, 128)]
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(np.abs(orders - 4) <= 0.2)


def test_monodromy_overflow():
    g = Grid(64, 300.0)
    nls = get_model("nls")
    with pytest.raises(OverflowError):
        monodromy_numeric(nls, nls.state(g, flat(g), flat(g)), P, 1.0)


# ---------------------------------------------------------------- evolution

def test_nls_split_step_conservation():
    g = Grid(256, 10.0)
    nls = get_model("nls")
    psi = 0.5 * np.exp(-g.x**2 / 4) * np.exp(0.5j * g.x)
    tr = evolve(nls, nls.canonical_state(g, psi), P, 1e-3, 1000, scheme="split-step", order=4, sample_every=100)
    assert tr.drift["N"] <= 1e-8 and tr.drift["H"] <= 1e-6
    assert tr.times[-1] == pytest.approx(1.0)


def test_nls_constant_keeps_modulus():
    g = Grid(32, 3.0)
    nls = get_model("nls")
    c = 0.6
    tr = evolve(nls, nls.canonical_state(g, np.full(g.m, c + 0j)), P, 0.01, 100, scheme="split-step")
    assert np.max(np.abs(np.abs(tr.final[0]) - c)) <= 1e-10
    assert np.allclose(tr.final[0], c * np.exp(-2j * c**2 * 1.0), atol=1e-10)


def test_ll_stationary():
    g = Grid(32, 3.0)
    ll = get_model("ll")
    st = ll.state(g, flat(g), flat(g), flat(g, 1.0))
    tr = evolve(ll, st, P, 1e-3, 20, scheme="rk4")
    assert np.array_equal(tr.final.data, st.data)


def test_sg_kink_run():
    g = Grid(256, 20.0)
    st = kink_antikink(g, P, separation=16, velocity=0.4)
    probes = (0.3, 0.7j, -0.4 + 0.2j)
    tr = evolve("sg", st, P, 0.4 * g.h, int(round(5 / (0.4 * g.h))), scheme="leapfrog",
                sample_every=25, probes=probes)
    assert tr.times[-1] == pytest.approx(5.0)
    assert tr.drift["H"] <= 1e-6
    assert max(tr.drift[("trT", lam)] for lam in probes) <= 1e-4


def test_leapfrog_second_order():
    g = Grid(128, 10.0)
    st = kink_antikink(g, P, separation=8, velocity=0.5)
    d = [evolve("sg", st, P, dt, int(round(2 / dt)), scheme="leapfrog", sample_every=5).drift["H"]
         for dt in (0.04, 0.02)]
    assert 1.7 <= np.log2(d[0] / d[1]) <= 2.3


def test_evolve_errors():
    g = Grid(32, 3.0)
    nls = get_model("nls")
    st = nls.canonical_state(g, np.full(g.m, 0.3 + 0j))
    with pytest.raises(ValueError):
        evolve(nls, st, P, 0.01, 0)
    with pytest.raises(ValueError):
        evolve(nls, st, P, 0.01, 5, scheme="leapfrog")
    with pytest.raises(ValueError):
        evolve(nls, st, P, 1.0, 5, scheme="rk4")
    sg = get_model("sg")
    blow = sg.state(g, flat(g), flat(g, 50.0))
    with pytest.raises(FieldInstability):
        evolve(sg, blow, ModelParams(30.0, 1.0), 0.5, 50, scheme="leapfrog")


def test_random_band_limited_is_band_limited(rng):
    g = Grid(64, 2.0)
    f = random_band_limited(g, rng, kmax=3)
    spec = np.abs(np.fft.fft(f))
    assert np.all(spec[4:61] < 1e-10)
