"""Acceptance suite: thirteen numbered criteria, one PASS/FAIL line each.

    python -m laxkit.acceptance [--only 1,7] [--configs DIR]

Every criterion is seeded, so a line is reproducible run to run.  Tolerances
are pinned in the module constants below, next to the check that uses them.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from .cli.rng import SplitMix64

SEED = 20240501


@dataclass
class Result:
    number: int
    title: str
    passed: bool
    detail: str
    elapsed: float = 0.0
    metrics: dict = field(default_factory=dict)

    def line(self) -> str:
        return (f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d} {self.title}: "
                f"{self.detail} ({self.elapsed:.2f} s)")


def _e(v) -> str:
    return f"{v:.2e}"


# ------------------------------------------------------------------ 1: CYBE

CYBE_TOL = 1e-11
CYBE_SAMPLES = 100
CYBE_RUNTIME = 5.0


def c01_cybe(**_):
    from .rmatrix import PoleError, cybe_residual, sine_gordon_r, trig_An_r, yangian_r
    families = {"yangian n=2": yangian_r(2), "yangian n=3": yangian_r(3), "trig n=1": trig_An_r(1),
                "trig n=2": trig_An_r(2), "sine-gordon": sine_gordon_r()}
    rng = SplitMix64(SEED)
    worst = {}
    for name, r in families.items():
        w, done = 0.0, 0
        while done < CYBE_SAMPLES:
            l1, l2 = rng.complex(2.0), rng.complex(2.0)
            try:
                norm = max(float(np.max(np.abs(r(z)))) for z in (l1 - l2, l1, l2))
                w = max(w, cybe_residual(r, l1, l2) / norm**2)
            except PoleError:
                continue
            done += 1
        worst[name] = w
    top = max(worst.values())
    return top <= CYBE_TOL, f"max residual/|r|^2 {_e(top)} <= {_e(CYBE_TOL)} over 5 families x {CYBE_SAMPLES}", \
        {"worst": worst, "runtime_limit": CYBE_RUNTIME}


# ------------------------------------------------------------------ 2: Sklyanin and linear bracket

SKLYANIN_TOL = 1e-10


def _scale(lam, mu):
    return max(1.0, abs(lam), abs(mu)) ** 2


def c02_sklyanin(**_):
    from .discrete import linear_bracket_residual, make_model, monodromy_sklyanin_residual, sklyanin_residual
    rng = SplitMix64(SEED + 2)
    local = mono = lin = 0.0
    for kind in ("dst", "toda-quadratic"):
        for n in (2, 3, 4):
            m = make_model(kind, n)
            for _ in range(20):
                pt = m.random_point(rng.numpy(), 0.6, complex_=(kind == "dst"))
                for _ in range(10):
                    lam, mu = rng.complex(2.0), rng.complex(2.0)
                    s = _scale(lam, mu)
                    local = max(local, sklyanin_residual(m, pt, lam, mu) / s)
                # the ordered product carries N factors of the local scale
                lam, mu = rng.complex(2.0), rng.complex(2.0)
                mono = max(mono, monodromy_sklyanin_residual(m, pt, lam, mu) / _scale(lam, mu) ** n)
    for n in (2, 3):
        m = make_model("toda-linear", n)
        for _ in range(20):
            pt = m.random_point(rng.numpy(), 0.6)
            for _ in range(10):
                lam, mu = rng.complex(2.0), rng.complex(2.0)
                lin = max(lin, linear_bracket_residual(m, pt, lam, mu) / _scale(lam, mu))
    ok = max(local, mono, lin) <= SKLYANIN_TOL
    return ok, f"local {_e(local)}, monodromy {_e(mono)}, linear {_e(lin)} <= {_e(SKLYANIN_TOL)} (scaled)", {}


# ------------------------------------------------------------------ 3: involution

INVOLUTION_TOL = 1e-10


def c03_involution(**_):
    from .discrete import charge_involution_residual, involution_residual, make_model
    rng = SplitMix64(SEED + 3)
    t_res = p_res = q_res = 0.0
    for kind, n in (("dst", 3), ("dst", 5), ("toda-quadratic", 4), ("toda-quadratic", 6)):
        m = make_model(kind, n)
        for _ in range(10):
            pt = m.random_point(rng.numpy(), 0.5, complex_=(kind == "dst"))
            lam, mu = rng.complex(2.0), rng.complex(2.0)
            t_res = max(t_res, involution_residual(m, pt, lam, mu) / _scale(lam, mu) ** n)
            c = m.charge_count
            for i in range(1, c + 1):
                for j in range(i + 1, c + 1):
                    q_res = max(q_res, charge_involution_residual(m, pt, i, j))
    lin = make_model("toda-linear", 4)
    for _ in range(10):
        pt = lin.random_point(rng.numpy(), 0.5)
        lam, mu = rng.complex(2.0), rng.complex(2.0)
        for a, b in ((1, 2), (2, 2), (2, 3), (3, 4)):
            p_res = max(p_res, involution_residual(lin, pt, lam, mu, n=a, m=b) / _scale(lam, mu) ** max(a, b))
    ok = max(t_res, p_res, q_res) <= INVOLUTION_TOL
    return ok, f"{{t,t}} {_e(t_res)}, {{tr L^n, tr L^m}} {_e(p_res)}, {{I_i,I_j}} {_e(q_res)}", {}


# ------------------------------------------------------------------ 4: extracted charges

EXTRACT_TOL = 1e-10
POWERTRACE_TOL = 1e-12


def c04_charges(**_):
    from .discrete import closed_form_charges, extract_charges, make_model
    rng = SplitMix64(SEED + 4)
    worst = 0.0
    for kind, n in (("dst", 3), ("dst", 4), ("dst", 6), ("toda-quadratic", 4), ("toda-quadratic", 8)):
        m = make_model(kind, n)
        c = m.charge_count
        for _ in range(50):
            pt = m.random_point(rng.numpy(), 0.6, complex_=(kind == "dst"))
            a = np.array(extract_charges(m, pt, c).charges)
            b = np.array(closed_form_charges(m, pt, c).charges)
            worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))))
    lin, quad = make_model("toda-linear", 5), make_model("toda-quadratic", 5)
    pw = 0.0
    for _ in range(50):
        pt = lin.random_point(rng.numpy(), 0.7)
        pw = max(pw, float(np.max(np.abs(np.array(lin.powertrace_charges(pt))
                                          - closed_form_charges(quad, pt, 2).charges))))
    ok = worst <= EXTRACT_TOL and pw <= POWERTRACE_TOL
    return ok, f"series vs closed form {_e(worst)} <= {_e(EXTRACT_TOL)}; linear vs quadratic {_e(pw)}", {}


# ------------------------------------------------------------------ 5: discrete zero curvature

ZC_TOL = 1e-11
GENERIC_A_TOL = 1e-8
NEG_CONTROL_ORDERS = 6


def c05_zero_curvature(**_):
    from .discrete import generic_A, make_model, zero_curvature_residual
    rng = SplitMix64(SEED + 5)
    pos = 0.0
    for kind, n, idx in [("dst", 4, 1), ("dst", 4, 2), ("dst", 4, 3), ("dst", 6, 3), ("toda-quadratic", 5, 2)]:
        m = make_model(kind, n)
        for _ in range(10):
            pt = m.random_point(rng.numpy(), 0.6, complex_=(kind == "dst"))
            mu = rng.complex(1.0)
            pos = max(pos, zero_curvature_residual(m, pt, idx, mu) / _scale(mu, 0))
    dst = make_model("dst", 4)
    fit = 0.0
    for _ in range(5):
        pt = dst.random_point(rng.numpy(), 0.5, complex_=True)
        for site in range(1, 5):
            a = generic_A(dst, site, 0.5, pt, 3)
            for k in (1, 2, 3):
                fit = max(fit, float(np.max(np.abs(a[k - 1] - dst.lax_time_component(k, site - 1, 0.5, pt)))))
    neg = min(zero_curvature_residual(dst, dst.random_point(rng.numpy(), 0.6), 2, 0.7, a_index=1)
              for _ in range(5))
    gap = neg / max(ZC_TOL, pos)
    ok = pos <= ZC_TOL and fit <= GENERIC_A_TOL and gap >= 10**NEG_CONTROL_ORDERS
    return ok, (f"residual {_e(pos)} <= {_e(ZC_TOL)}; generic_A fit {_e(fit)}; "
                f"mismatched pair {_e(neg)} ({np.log10(gap):.1f} orders above)"), {}


# ------------------------------------------------------------------ 6: printed DST I_3 flow

EOM_TOL = 1e-12


def c06_dst_flow(**_):
    from .discrete import eom_rhs, make_model
    rng = SplitMix64(SEED + 6)
    worst = 0.0
    for n in range(3, 9):
        dst = make_model("dst", n)
        for _ in range(50):
            pt = dst.random_point(rng.numpy(), 0.7, complex_=True)
            du, dv = eom_rhs(dst, pt, 3)
            xd, Xd = dst.printed_eom(pt)
            worst = max(worst, float(np.max(np.abs(du - xd))), float(np.max(np.abs(dv - Xd))))
    return worst <= EOM_TOL, f"max entrywise difference {_e(worst)} <= {_e(EOM_TOL)}, N = 3..8", {}


# ------------------------------------------------------------------ 7: Toda leapfrog

TODA_I1_TOL, TODA_I2_TOL = 1e-12, 1e-6
TODA_ORDER, TODA_ORDER_TOL = 2.0, 0.3
TODA_RUNTIME = 10.0


def c07_toda(**_):
    from .discrete import integrate, make_model
    toda = make_model("toda-quadratic", 8)
    nr = SplitMix64(SEED + 7).numpy()
    pt = toda.point(nr.uniform(-0.1, 0.1, 8), nr.uniform(-0.5, 0.5, 8))
    fine = integrate(toda, 2, pt, 1e-3, 10_000, "leapfrog", sample_every=10)
    coarse = integrate(toda, 2, pt, 2e-3, 5_000, "leapfrog", sample_every=5)
    order = float(np.log2(coarse.drift[1] / fine.drift[1]))
    d1, d2 = fine.drift
    ok = d1 <= TODA_I1_TOL and d2 <= TODA_I2_TOL and abs(order - TODA_ORDER) <= TODA_ORDER_TOL
    return ok, f"I1 drift {_e(d1)}, I2 drift {_e(d2)}, order {order:.2f}", {"runtime_limit": TODA_RUNTIME}


# ------------------------------------------------------------------ 8: continuum zero curvature

FIELD_ZC_TOL = 1e-6
FIELD_ZC_GAIN = 10.0
FIELD_ZC_FLOOR = 1e-10
FIELD_CASES = [("nls", "V2"), ("nls", "V3"), ("sg", "H"), ("liouville", "printed"), ("ll", "H"),
               ("atft-a2", "H")]


def c08_field_zc(**_):
    from .fields import Grid, ModelParams, random_state, zero_curvature_residual
    p = ModelParams(1.0, 1.0)
    lams = (0.7, -0.4 + 0.3j)
    ok, parts = True, []
    for kind, variant in FIELD_CASES:
        res = {}
        for m in (256, 512):
            st = random_state(kind, Grid(m, np.pi), np.random.default_rng(SEED + 8))
            res[m] = max(zero_curvature_residual(kind, variant, st, p, lam) for lam in lams)
        # band-limited fields are resolved exactly at M = 256; past that the residual is roundoff
        good = res[256] <= FIELD_ZC_TOL and (res[512] <= res[256] / FIELD_ZC_GAIN or res[512] <= FIELD_ZC_FLOOR)
        ok &= good
        parts.append(f"{kind}/{variant} {_e(res[256])}->{_e(res[512])}")
    st = random_state("atft-a2", Grid(256, np.pi), np.random.default_rng(SEED + 8))
    literal = zero_curvature_residual("atft-a2", "printed", st, p, 0.7)
    return ok, "; ".join(parts) + f"; atft-a2 with the literal m/4 sign {_e(literal)}", {"literal": literal}


# ------------------------------------------------------------------ 9: field evolution

NLS_N_TOL, NLS_H_TOL = 1e-8, 1e-6
SG_H_TOL, SG_T_TOL = 1e-6, 1e-4


def c09_evolution(**_):
    from .fields import Grid, ModelParams, evolve, get_model, kink_antikink
    p = ModelParams(1.0, 1.0)
    g = Grid(256, 10.0)
    nls = get_model("nls")
    psi = 0.5 * np.exp(-g.x**2 / 4) * np.exp(0.5j * g.x)
    tn = evolve(nls, nls.canonical_state(g, psi), p, 1e-3, 1000, scheme="split-step", order=4, sample_every=100)
    g = Grid(256, 20.0)
    probes = (0.3, 0.7j, -0.4 + 0.2j)
    dt = 0.4 * g.h
    ts = evolve("sg", kink_antikink(g, p, separation=16, velocity=0.4), p, dt, int(round(5 / dt)),
                scheme="leapfrog", sample_every=25, probes=probes)
    trt = max(ts.drift[("trT", lam)] for lam in probes)
    ok = (tn.drift["N"] <= NLS_N_TOL and tn.drift["H"] <= NLS_H_TOL and ts.drift["H"] <= SG_H_TOL
          and trt <= SG_T_TOL and abs(tn.times[-1] - 1) < 1e-12 and abs(ts.times[-1] - 5) < 1e-9)
    return ok, (f"NLS N {_e(tn.drift['N'])}, H {_e(tn.drift['H'])} over [0,1]; "
                f"SG H {_e(ts.drift['H'])}, tr T {_e(trt)} over [0,5]"), {}


# ------------------------------------------------------------------ 10: W/Z

WZ_TOL = 1e-6


def c10_wz(**_):
    from .fields import Grid, ModelParams, get_model, random_state, sg_ratio, wz_check
    from .fields.wz import A2_RATIO
    g = Grid(128, 2 * np.pi)
    nr = np.random.default_rng(SEED + 10)
    rec = 0.0
    for _ in range(3):
        rep = wz_check("nls", random_state("nls", g, nr), ModelParams(), 3)
        rec = max(rec, max(rep["recursion"].values()))
    params = ModelParams(0.7, 1.3)
    want = sg_ratio(params)
    spread = 0.0
    for _ in range(20):
        rep = wz_check("sg", random_state("sg", g, nr), params, 2)
        rec = max(rec, max(rep["recursion"].values()))
        spread = max(spread, abs(rep["ratio_H"] - want), abs(rep["ratio_P"] - want))
    spread /= abs(want)
    a2, pa = 0.0, ModelParams(0.9, 0.7)
    for _ in range(5):
        st = random_state("atft-a2", g, nr)
        rep = wz_check("atft-a2", st, pa, 2)
        ch = get_model("atft-a2").charges(st, pa)
        a2 = max(a2, rep["charges"]["H"] / abs(ch["H"]), rep["charges"]["P"] / max(1.0, abs(ch["P"])),
                 abs(rep["ratio_H"] - A2_RATIO))
        rec = max(rec, max(rep["recursion"].values()))
    ok = max(rec, spread, a2) <= WZ_TOL
    return ok, (f"recursion {_e(rec)}; SG ratio {want.imag:.6g}i spread {_e(spread)} over 20 states; "
                f"A2 densities vs H1, P1 {_e(a2)}"), {}


# ------------------------------------------------------------------ 11: continuum limit

CLIMIT_ORDER = 1.0
CLIMIT_ORDER_TOL = 0.05
CLIMIT_LOCAL_MAX = 1.0
CLIMIT_RUNTIME = 30.0
CLIMIT_PROFILE = ("0.5 + 0.3*cos(pi*x) + 0.2*i*sin(pi*x)", "0.6 - 0.25*sin(pi*x) + 0.1*cos(pi*x)")


def c11_climit(**_):
    from .climit import DEFAULT_DELTAS, LimitSchedule, Profile, charge_limit, lax_limit_check
    sched = LimitSchedule(DEFAULT_DELTAS, 1.0, Profile(*CLIMIT_PROFILE))
    orders, ok = {}, True
    for k in (1, 2):
        rep = charge_limit(sched, k)
        orders[k] = rep.order
        ok &= rep.fit == "exact" or rep.order >= CLIMIT_ORDER - CLIMIT_ORDER_TOL
    lax = lax_limit_check(sched, 0.7 + 0.3j)
    vac = lax_limit_check(LimitSchedule(DEFAULT_DELTAS, 1.0, Profile()), 0.7 + 0.3j)
    local = max(lax.local)
    ok &= local <= CLIMIT_LOCAL_MAX and max(vac.a_limit) == 0
    shown = ", ".join(f"I{k} {'exact' if np.isinf(o) else f'{o:.3f}'}" for k, o in orders.items())
    return ok, (f"orders {shown} (min {CLIMIT_ORDER} - {CLIMIT_ORDER_TOL}); max |L-I-dU|/d^2 {local:.4f}; "
                f"vacuum A-limit {max(vac.a_limit):g}"), {"runtime_limit": CLIMIT_RUNTIME}


# ------------------------------------------------------------------ 12: Cartan data

CARTAN_TOL = 1e-12


def c12_cartan(**_):
    from .fields import cartan_data, cartan_invariant_residuals
    worst = max(max(cartan_invariant_residuals(cartan_data(n)).values()) for n in (1, 2))
    return worst <= CARTAN_TOL, f"max invariant residual {_e(worst)} <= {_e(CARTAN_TOL)}, n = 1, 2", {}


# ------------------------------------------------------------------ 13: CLI determinism

CLI_CONFIGS = {
    "cybe_yangian.cfg": "[model]\nr = yangian\nn = 2\n[run]\nseed = 20240501\n[verify]\nsamples = 100\n"
                        "tolerance = 1e-12\n",
    "cybe_negative.cfg": "[model]\nr = permutation-only\nn = 2\n[run]\nseed = 7\n[verify]\nsamples = 10\n"
                         "tolerance = 1e-12\n",
    "bad_config.cfg": "[model]\nkind = dst\nsites = four\n[run]\nseed = 1\n",
    "toda_simulate.cfg": "[model]\nkind = toda-quadratic\nsites = 8\n[init]\nq = \"0.3*sin(2*pi*j/8)\"\n"
                         "p = \"0.2*cos(2*pi*j/8) + 0.1\"\n[run]\ndt = 1e-3\nsteps = 2000\nsample_every = 100\n"
                         "scheme = leapfrog\ngenerator = 2\nprobes = \"0.5, 1+0.5*i\"\nmax_drift = 1e-6\n",
}
CLI_RUNS = [(["verify", "cybe"], "cybe_yangian.cfg"), (["simulate"], "toda_simulate.cfg"),
            (["verify", "sklyanin"], "sklyanin_dst.cfg"), (["climit"], "climit.cfg")]


def c13_cli(configs=None, **_):
    from .cli import main
    with tempfile.TemporaryDirectory() as tmp:
        src = configs
        if src is None:
            src = tmp
            for name, text in CLI_CONFIGS.items():
                with open(os.path.join(tmp, name), "w", encoding="utf-8") as fh:
                    fh.write(text)

        def go(args, name, out=None):
            argv = args + ["--config", os.path.join(src, name)] + (["--out", out] if out else [])
            with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
                return main(argv)

        same, codes = [], []
        for i, (args, name) in enumerate(CLI_RUNS):
            if not os.path.exists(os.path.join(src, name)):
                continue
            outs = [os.path.join(tmp, f"run{i}_{k}.out") for k in (0, 1)]
            codes.append(go(args, name, outs[0]))
            codes.append(go(args, name, outs[1]))
            with open(outs[0], "rb") as a, open(outs[1], "rb") as b:
                same.append(a.read() == b.read())
        fail_code = go(["verify", "cybe"], "cybe_negative.cfg", os.path.join(tmp, "neg.out"))
        cfg_code = go(["charges"], "bad_config.cfg", os.path.join(tmp, "bad.out"))
    ok = all(same) and all(c == 0 for c in codes) and fail_code == 1 and cfg_code == 2 and len(same) >= 2
    return ok, (f"{sum(same)}/{len(same)} commands byte-identical on rerun; failing tolerance -> exit {fail_code}; "
                f"config error -> exit {cfg_code}"), {}


# ------------------------------------------------------------------ driver

CRITERIA = {
    1: ("CYBE", c01_cybe),
    2: ("Sklyanin and linear brackets", c02_sklyanin),
    3: ("charge involution", c03_involution),
    4: ("series-extracted charges", c04_charges),
    5: ("discrete zero curvature", c05_zero_curvature),
    6: ("DST I3 flow", c06_dst_flow),
    7: ("Toda leapfrog drift", c07_toda),
    8: ("continuum zero curvature", c08_field_zc),
    9: ("field evolution", c09_evolution),
    10: ("W/Z expansion", c10_wz),
    11: ("continuum limit", c11_climit),
    12: ("Cartan data", c12_cartan),
    13: ("CLI determinism", c13_cli),
}


def run_criterion(number: int, **kw) -> Result:
    title, fn = CRITERIA[number]
    t0 = time.perf_counter()
    ok, detail, metrics = fn(**kw)
    elapsed = time.perf_counter() - t0
    limit = metrics.get("runtime_limit")
    if limit is not None:
        detail += f"; runtime limit {limit:g} s"
        ok = ok and elapsed < limit
    return Result(number, title, bool(ok), detail, elapsed, metrics)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="python -m laxkit.acceptance", description=__doc__.splitlines()[0])
    ap.add_argument("--only", help="comma separated criterion numbers")
    ap.add_argument("--configs", help="directory with the CLI fixture configs (default: built-in copies)")
    args = ap.parse_args(argv)
    numbers = [int(s) for s in args.only.split(",")] if args.only else sorted(CRITERIA)
    failed = 0
    for n in numbers:
        r = run_criterion(n, configs=args.configs)
        print(r.line(), flush=True)
        failed += not r.passed
    print(f"{len(numbers) - failed}/{len(numbers)} criteria pass")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
