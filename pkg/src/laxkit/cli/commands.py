"""The five CLI commands.  Each returns (table, failed) where table feeds output.render."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .. import expr as ex
from ..discrete import (MODEL_KINDS, closed_form_charges, extract_charges, integrate, involution_residual,
                        linear_bracket_residual, make_model, monodromy_obs, sklyanin_residual,
                        zero_curvature_residual as zc_discrete)
from ..fields import (FIELD_MODELS, Grid, ModelParams, cartan_data, cartan_invariant_residuals, evolve,
                      get_model, kink_antikink, random_state, transfer_numeric, wz_check,
                      zero_curvature_residual as zc_field)
from ..climit import LimitSchedule, Profile, charge_limit, lax_limit_check
from ..poisson import PhasePoint, jacobi_residual
from ..rmatrix import PoleError, constant_r, cybe_residual, sine_gordon_r, trig_An_r, yangian_r
from ..tensor import permutation_operator
from .config import ConfigError, RunConfig
from .rng import SplitMix64

CHECKS = ("cybe", "sklyanin", "linear-bracket", "involution", "zero-curvature-discrete",
          "zero-curvature-continuum", "wz", "jacobi", "cartan")
DEFAULT_VARIANT = {"nls": "V3", "sg": "H", "liouville": "printed", "ll": "H", "atft-a1": "H", "atft-a2": "H"}


def _pmap(fn, items, jobs):
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


# ------------------------------------------------------------------ model setup

def discrete_model(cfg: RunConfig):
    kind = cfg.get("model", "kind", required=True)
    if kind not in MODEL_KINDS:
        raise ConfigError(f"[model] kind = {kind!r} is not a lattice model ({', '.join(MODEL_KINDS)})")
    return make_model(kind, cfg.int("model", "sites", required=True, minimum=2))


def field_setup(cfg: RunConfig):
    kind = cfg.get("model", "kind", required=True)
    if kind not in FIELD_MODELS:
        raise ConfigError(f"[model] kind = {kind!r} is not a field model ({', '.join(FIELD_MODELS)})")
    grid = Grid(cfg.int("model", "grid", 256, minimum=16), cfg.float("model", "half_length", 8.0, positive=True))
    try:
        params = ModelParams(cfg.float("model", "m", 1.0), cfg.float("model", "beta", 1.0))
    except ValueError as err:
        raise ConfigError(f"[model] {err}") from None
    return get_model(kind), grid, params


def is_field(cfg):
    return cfg.get("model", "kind") in FIELD_MODELS


def _init_expr(cfg, key, var):
    raw = cfg.get("init", key)
    if raw is None:
        return None
    try:
        e = ex.parse(raw)
    except ex.ParseError as err:
        raise ConfigError(f"[init] {key}: {err}") from None
    extra = ex.free_vars(e) - {var}
    if extra:
        raise ConfigError(f"[init] {key} may only use {var}, found {sorted(extra)}")
    return e


def discrete_init(cfg, model) -> PhasePoint:
    j = np.arange(model.n, dtype=float)
    vals = []
    for name in model.orientation:
        e = _init_expr(cfg, name, "j")
        if e is None:
            raise ConfigError(f"[init] {name} is required for {model.kind}")
        vals.append(np.broadcast_to(ex.evaluate(e, {"j": j}), j.shape))
    u, v = vals
    if np.max(np.abs(u.imag)) == 0 and np.max(np.abs(v.imag)) == 0:
        u, v = u.real, v.real
    return model.point(u, v)


def field_init(cfg, model, grid, params):
    if cfg.get("init", "profile") == "kink-antikink":
        if model.kind != "sg":
            raise ConfigError("[init] profile = kink-antikink needs kind = sg")
        return kink_antikink(grid, params, cfg.float("init", "separation"), cfg.float("init", "velocity", 0.0))
    comps = []
    for name in model.components:
        e = _init_expr(cfg, name, "x")
        if e is None:
            if model.kind == "nls" and name == "psibar":
                comps.append(np.conj(comps[0]))
                continue
            raise ConfigError(f"[init] {name} is required for {model.kind}")
        comps.append(np.broadcast_to(ex.evaluate(e, {"x": grid.x}), grid.x.shape))
    comps = np.array(comps)
    if model.kind not in ("nls", "liouville"):
        comps = comps.real
    if model.kind == "ll":
        comps = model.normalize(comps)
    st = model.state(grid, *comps)
    try:
        model.validate(st)
    except ValueError as err:
        raise ConfigError(f"[init] {err}") from None
    return st


# ------------------------------------------------------------------ verify

def _r_operator(cfg):
    which = cfg.get("model", "r", "yangian")
    n = cfg.int("model", "n", 2, minimum=1)
    if which == "yangian":
        return yangian_r(n)
    if which == "trig":
        return trig_An_r(n)
    if which == "sine-gordon":
        return sine_gordon_r()
    if which == "permutation-only":
        return constant_r(permutation_operator(n), "permutation-only")
    raise ConfigError(f"[model] r = {which!r}; use yangian, trig, sine-gordon or permutation-only")


def _cybe_sample(r, rng, lam_scale):
    while True:
        l1, l2 = rng.complex(lam_scale), rng.complex(lam_scale)
        try:
            mats = [r(l1 - l2), r(l1), r(l2)]
            res = cybe_residual(r, l1, l2)
        except PoleError:
            continue
        norm = max(float(np.max(np.abs(m))) for m in mats)
        return res / norm**2


def _sample_fn(check, cfg):
    """Build fn(rng) -> residual for one sample."""
    lam_scale = cfg.float("verify", "lam_scale", 2.0, positive=True)
    scale = cfg.float("verify", "scale", 0.5, positive=True)
    if check == "cybe":
        r = _r_operator(cfg)
        return lambda rng: _cybe_sample(r, rng, lam_scale)
    if check == "cartan":
        try:
            cd = cartan_data(cfg.int("model", "n", 2, minimum=1))
        except ValueError as err:
            raise ConfigError(f"[model] {err}") from None
        return lambda rng: max(cartan_invariant_residuals(cd).values())
    if check == "jacobi":
        n = cfg.int("model", "sites", 2, minimum=1)
        f = cfg.get("verify", "f", "u0**2*v0 + sin(u0)*v0")
        g = cfg.get("verify", "g", "exp(v0)*u0 + u0**3")
        h = cfg.get("verify", "h", "u0*v0**2")

        def jac(rng):
            nr = rng.numpy()
            return jacobi_residual(f, g, h, PhasePoint(nr.uniform(-scale, scale, n), nr.uniform(-scale, scale, n)))
        return jac
    if check in ("sklyanin", "linear-bracket", "involution", "zero-curvature-discrete"):
        model = discrete_model(cfg)
        want_linear = check == "linear-bracket"
        if want_linear != (model.kind == "toda-linear") and check in ("sklyanin", "linear-bracket"):
            raise ConfigError(f"{check} needs {'toda-linear' if want_linear else 'a quadratic model (dst, toda-quadratic)'}")
        index = cfg.int("verify", "index", 2, minimum=1)

        def disc(rng):
            pt = model.random_point(rng.numpy(), scale)
            lam, mu = rng.complex(lam_scale), rng.complex(lam_scale)
            if check == "sklyanin":
                return sklyanin_residual(model, pt, lam, mu)
            if check == "linear-bracket":
                return linear_bracket_residual(model, pt, lam, mu)
            if check == "involution":
                return involution_residual(model, pt, lam, mu)
            return zc_discrete(model, pt, index, mu)
        return disc
    # field checks
    model, grid, params = field_setup(cfg)
    amp = cfg.float("verify", "amplitude", 0.3, positive=True)
    if check == "zero-curvature-continuum":
        variant = cfg.get("verify", "variant", DEFAULT_VARIANT[model.kind])
        if variant not in model.variants:
            raise ConfigError(f"[verify] variant must be one of {model.variants} for {model.kind}")

        def zc(rng):
            st = random_state(model.kind, grid, rng.numpy(), amplitude=amp)
            lam = rng.complex(0.5) + 1.0
            return zc_field(model, variant, st, params, lam)
        return zc
    if check == "wz":
        if model.kind not in ("nls", "sg", "atft-a2"):
            raise ConfigError("wz needs kind = nls, sg or atft-a2")
        order = cfg.int("verify", "order", 3 if model.kind == "nls" else 2, minimum=1)

        def wz(rng):
            st = random_state(model.kind, grid, rng.numpy(), amplitude=amp)
            try:
                rep = wz_check(model.kind, st, params, order)
            except ValueError as err:
                raise ConfigError(f"[verify] {err}") from None
            vals = list(rep["recursion"].values()) + list(rep.get("z_density", {}).values())
            return max(vals)
        return wz
    raise ConfigError(f"unknown check {check!r}")


def cmd_verify(cfg: RunConfig, check: str, seed, jobs):
    if check not in CHECKS:
        raise ConfigError(f"unknown check {check!r}; choose from {', '.join(CHECKS)}")
    samples = cfg.int("verify", "samples", 20, minimum=1)
    tol = cfg.float("verify", "tolerance", 1e-10, positive=True)
    if seed is None:
        raise ConfigError("[run] seed (or --seed) is required: verify draws random samples")
    fn = _sample_fn(check, cfg)
    root = SplitMix64(seed)
    streams = [root.split() for _ in range(samples)]  # fixed before any parallel work
    res = _pmap(fn, streams, jobs)
    worst = max(res)
    rows = [[i, float(r), r <= tol] for i, r in enumerate(res)]
    summary = {"check": check, "samples": samples, "tolerance": tol, "max": float(worst), "pass": bool(worst <= tol)}
    return {"command": "verify", "columns": ["sample", "residual", "within_tolerance"], "rows": rows,
            "summary": summary}, worst > tol


# ------------------------------------------------------------------ charges

def cmd_charges(cfg, seed, jobs):
    if is_field(cfg):
        model, grid, params = field_setup(cfg)
        st = field_init(cfg, model, grid, params)
        ch = model.charges(st, params)
        rows = [[name, complex(v).real, complex(v).imag] for name, v in ch.items()]
        return {"command": "charges", "columns": ["charge", "value_re", "value_im"], "rows": rows,
                "summary": {"model": model.kind}}, False
    model = discrete_model(cfg)
    count = cfg.int("verify", "count", model.charge_count, minimum=1)
    tol = cfg.float("verify", "tolerance", 1e-10, positive=True)
    if cfg.sections.get("init"):
        points = [discrete_init(cfg, model)]
    else:
        if seed is None:
            raise ConfigError("[run] seed (or --seed) is required when [init] is absent")
        root = SplitMix64(seed)
        scale = cfg.float("verify", "scale", 0.5, positive=True)
        points = [model.random_point(root.split().numpy(), scale)
                  for _ in range(cfg.int("verify", "samples", 10, minimum=1))]
    rows, worst = [], 0.0
    try:
        series = _pmap(lambda p: extract_charges(model, p, count), points, jobs)
    except ValueError as err:
        raise ConfigError(str(err)) from None
    for i, (pt, sr) in enumerate(zip(points, series)):
        cf = closed_form_charges(model, pt, count)
        for k in range(count):
            a, b = complex(cf.charges[k]), complex(sr.charges[k])
            rel = abs(a - b) / max(1.0, abs(a))
            worst = max(worst, rel)
            rows.append([i, k + 1, a.real, a.imag, b.real, b.imag, sr.signs[k], complex(sr.offsets[k]).real, rel])
    cols = ["sample", "k", "closed_re", "closed_im", "series_re", "series_im", "sign", "offset", "rel_error"]
    return {"command": "charges", "columns": cols, "rows": rows,
            "summary": {"model": model.kind, "sites": model.n, "max_rel_error": worst, "tolerance": tol}}, worst > tol


# ------------------------------------------------------------------ simulate

def cmd_simulate(cfg, seed, jobs):
    dt = cfg.float("run", "dt", required=True, positive=True)
    steps = cfg.int("run", "steps", required=True, minimum=1)
    every = cfg.int("run", "sample_every", 1, minimum=1)
    max_drift = cfg.float("run", "max_drift", None, positive=True)
    probes = cfg.complex_list("run", "probes")
    if is_field(cfg):
        model, grid, params = field_setup(cfg)
        st = field_init(cfg, model, grid, params)
        scheme = cfg.get("run", "scheme", "leapfrog" if model.kind in ("sg", "atft-a1", "atft-a2")
                         else "split-step" if model.kind == "nls" else "rk4")
        try:
            traj = evolve(model, st, params, dt, steps, scheme, cfg.int("run", "order", 2),
                          every, probes)
        except ValueError as err:
            raise ConfigError(str(err)) from None
        names = list(traj.charges)
        cols = ["time"] + [f"{n}_{p}" for n in names for p in ("re", "im")]
        cols += [f"trT{i}_{p}" for i in range(len(probes)) for p in ("re", "im")]
        rows = []
        for s, t in enumerate(traj.times):
            row = [float(t)]
            for n in names:
                row += [traj.charges[n][s].real, traj.charges[n][s].imag]
            for lam in probes:
                row += [traj.transfer[lam][s].real, traj.transfer[lam][s].imag]
            rows.append(row)
        drift = {(k if isinstance(k, str) else f"trT{probes.index(k[1])}"): v for k, v in traj.drift.items()}
        summary = {"model": model.kind, "scheme": scheme, "probes": list(probes), "drift": drift}
    else:
        model = discrete_model(cfg)
        pt = discrete_init(cfg, model)
        scheme = cfg.get("run", "scheme", "leapfrog" if getattr(model, "separable", False) else "rk4")
        gen = cfg.int("run", "generator", 2, minimum=1)
        try:
            traj = integrate(model, gen, pt, dt, steps, scheme, every)
        except ValueError as err:
            raise ConfigError(str(err)) from None
        k = traj.charges.shape[1]
        cols = ["time"] + [f"I{i + 1}_{p}" for i in range(k) for p in ("re", "im")]
        cols += [f"trT{i}_{p}" for i in range(len(probes)) for p in ("re", "im")]
        rows = []
        for s, t in enumerate(traj.times):
            row = [float(t)]
            for i in range(k):
                row += [traj.charges[s, i].real, traj.charges[s, i].imag]
            if probes:
                p = model.point(traj.u[s], traj.v[s])
                for lam in probes:
                    tv = complex(monodromy_obs(model, p, lam).trace().value)
                    row += [tv.real, tv.imag]
            rows.append(row)
        drift = {f"I{i + 1}": float(d) for i, d in enumerate(traj.drift)}
        summary = {"model": model.kind, "scheme": scheme, "generator": gen, "drift": drift}
    failed = max_drift is not None and max(drift.values()) > max_drift
    summary["max_drift"] = max_drift
    return {"command": "simulate", "columns": cols, "rows": rows, "summary": summary}, failed


# ------------------------------------------------------------------ monodromy

def cmd_monodromy(cfg, seed, jobs):
    lams = cfg.complex_list("monodromy", "lam")
    if not lams:
        lo = cfg.float("monodromy", "lam_min", -1.0)
        hi = cfg.float("monodromy", "lam_max", 1.0)
        count = cfg.int("monodromy", "count", 11, minimum=1)
        im = cfg.float("monodromy", "imag", 0.0)
        lams = tuple(complex(v, im) for v in (np.linspace(lo, hi, count) if count > 1 else [lo]))
    if is_field(cfg):
        model, grid, params = field_setup(cfg)
        st = field_init(cfg, model, grid, params)

        def tr(lam):
            try:
                return transfer_numeric(model, st, params, lam)
            except OverflowError as err:
                raise ConfigError(f"lam = {lam}: {err}") from None
    else:
        model = discrete_model(cfg)
        pt = discrete_init(cfg, model)

        def tr(lam):
            return complex(monodromy_obs(model, pt, lam).trace().value)
    vals = _pmap(tr, lams, jobs)
    rows = [[lam.real, lam.imag, v.real, v.imag] for lam, v in zip(lams, vals)]
    return {"command": "monodromy", "columns": ["lam_re", "lam_im", "trT_re", "trT_im"], "rows": rows,
            "summary": {"model": model.kind, "points": len(lams)}}, False


# ------------------------------------------------------------------ climit

def cmd_climit(cfg, seed, jobs):
    try:
        prof = Profile(cfg.get("climit", "x", "0"), cfg.get("climit", "X", "0"))
        sched = LimitSchedule(cfg.float_list("climit", "deltas", (0.1, 0.05, 0.025, 0.0125)),
                              cfg.float("climit", "half_length", 1.0, positive=True), prof)
    except (ValueError, ex.ParseError) as err:
        raise ConfigError(f"[climit] {err}") from None
    ks = [int(v) for v in cfg.float_list("climit", "charges", (1, 2, 3))]
    min_order = cfg.float("climit", "min_order", 0.95)
    lam = cfg.complex("climit", "lam", 0.5 + 0.0j)
    rows, orders, failed = [], {}, False
    for k in ks:
        try:
            rep = charge_limit(sched, k, jobs=jobs)
        except ValueError as err:
            raise ConfigError(f"[climit] {err}") from None
        orders[f"I{k}"] = rep.order
        for d, n, v, e in zip(rep.deltas, rep.sites, rep.values, rep.errors):
            rows.append([f"I{k}", d, n, v.real, v.imag, abs(e)])
        if k in (1, 2) and rep.order < min_order:
            failed = True
    lax = lax_limit_check(sched, lam, jobs=jobs)
    for d, loc, mono, al in zip(lax.deltas, lax.local, lax.monodromy_error, lax.a_limit):
        rows.append(["local", d, round(2 * sched.half_length / d), loc, 0.0, loc])
        rows.append(["monodromy", d, round(2 * sched.half_length / d), mono, 0.0, mono])
        rows.append(["A-limit", d, round(2 * sched.half_length / d), al, 0.0, al])
    summary = {"orders": orders, "min_order": min_order, "monodromy_ratios": list(lax.monodromy_ratios),
               "lam": lam}
    return {"command": "climit", "columns": ["quantity", "delta", "sites", "value_re", "value_im", "error"],
            "rows": rows, "summary": summary}, failed
