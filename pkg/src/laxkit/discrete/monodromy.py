"""Monodromy, transfer function, series-extracted charges and the generic time component."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..poisson import MatrixObservable, PhasePoint
from ..tensor import LaurentMatrix, LaurentPoly, LaurentSeries, log_series

__all__ = [
    "TransferFunction",
    "ChargeReport",
    "monodromy",
    "monodromy_obs",
    "partial_monodromy",
    "transfer",
    "closed_form_charges",
    "calibrate",
    "extract_charges",
    "generic_A",
    "DEFAULT_KMAX",
]

DEFAULT_KMAX = 6


@dataclass(frozen=True)
class TransferFunction:
    poly: LaurentPoly
    log_coeffs: LaurentSeries

    def raw(self, k: int) -> complex:
        """Coefficient of lam^-k in ln t."""
        return self.log_coeffs.coeff(-k)


@dataclass(frozen=True)
class ChargeReport:
    charges: tuple
    source: str
    signs: tuple = ()
    offsets: tuple = ()
    raw: tuple = ()
    notes: dict = field(default_factory=dict)


def _require_quadratic(model):
    if not hasattr(model, "site_laurent"):
        raise ValueError(f"{model.kind} has no site-local Lax matrices")


def partial_monodromy(model, point: PhasePoint, hi: int, lo: int) -> LaurentMatrix:
    """T(hi, lo) = L_hi ... L_lo with 1-based inclusive site labels; identity when hi < lo."""
    _require_quadratic(model)
    out = LaurentMatrix.identity(2)
    for j in range(lo, hi + 1):
        out = model.site_laurent(point, j - 1) @ out
    return out


def monodromy(model, point: PhasePoint) -> LaurentMatrix:
    """T = L_N L_{N-1} ... L_1."""
    return partial_monodromy(model, point, model.n, 1)


def monodromy_obs(model, point: PhasePoint, lam) -> MatrixObservable:
    _require_quadratic(model)
    out = model.site_obs(point, 0, lam)
    for j in range(1, model.n):
        out = model.site_obs(point, j, lam) @ out
    return out


def transfer(model, point: PhasePoint, kmax: int = DEFAULT_KMAX) -> TransferFunction:
    poly = monodromy(model, point).trace()
    return TransferFunction(poly, log_series(poly, kmax + 1))


def closed_form_charges(model, point: PhasePoint, count: int = 3) -> ChargeReport:
    if count > model.charge_count:
        raise ValueError(f"{model.kind} has closed forms for {model.charge_count} charges")
    vals = tuple(o.value for o in model.charges(point, count))
    return ChargeReport(vals, "closed-form")


_CAL_CACHE: dict = {}


def calibrate(model, count: int, probe: PhasePoint | None = None):
    """Fit (sign, offset) per charge so that I_k = s_k * c_k + o_k.

    The offset is anchored at the vacuum, the sign at one asymmetric probe point.
    Results for the default probe are cached per (kind, N, count).
    """
    key = (model.kind, model.n, count)
    if probe is None and key in _CAL_CACHE:
        return _CAL_CACHE[key]
    if count > model.charge_count:
        raise ValueError(f"calibration table missing for {model.kind} beyond I_{model.charge_count}")
    if model.kind == "dst" and count > model.n:
        # with N < k the wrapped closed form x_{i+k-1} folds onto x_i; no signed shift exists
        raise ValueError(f"calibration table missing for dst I_{count} with N = {model.n}")
    vac = model.vacuum()
    default_probe = probe is None
    if default_probe:
        rng = np.random.default_rng(12345)
        probe = model.random_point(rng, 0.4)
    tv, tp = transfer(model, vac), transfer(model, probe)
    iv = [o.value for o in model.charges(vac, count)]
    ip = [o.value for o in model.charges(probe, count)]
    signs, offsets = [], []
    for k in range(1, count + 1):
        ratio = (ip[k - 1] - iv[k - 1]) / (tp.raw(k) - tv.raw(k))
        s = 1 if ratio.real > 0 else -1
        if abs(ratio - s) > 1e-8:
            raise ValueError(f"I_{k} of {model.kind} is not a signed shift of the log coefficient")
        signs.append(s)
        off = iv[k - 1] - s * tv.raw(k)
        offsets.append(float(np.real_if_close(off).real) if abs(np.imag(off)) < 1e-14 else off)
    out = tuple(signs), tuple(offsets)
    if default_probe:
        _CAL_CACHE[key] = out
    return out


def extract_charges(model, point: PhasePoint, count: int, calibration=None) -> ChargeReport:
    signs, offsets = calibration if calibration is not None else calibrate(model, count)
    if len(signs) < count:
        raise ValueError("calibration table shorter than the requested charge count")
    tf = transfer(model, point, max(count, DEFAULT_KMAX))
    raw = tuple(tf.raw(k) for k in range(1, count + 1))
    vals = tuple(signs[k] * raw[k] + offsets[k] for k in range(count))
    return ChargeReport(vals, "series-extracted", tuple(signs[:count]), tuple(offsets[:count]), raw)


def _cauchy_radius(p: LaurentPoly) -> float:
    c = p.coeffs[::-1]
    return 1.0 + float(np.max(np.abs(c[1:] / c[0]))) if c.size > 1 else 1.0


def generic_A(model, site: int, mu, point: PhasePoint, order: int, lam_samples=None):
    """Fit A_n(lam, mu) = t^-1(lam)/(lam - mu) T(n-1,1) T(N,n) in powers of 1/lam.

    ``site`` is 1-based.  Returns an array (order, 2, 2) holding A^(1)..A^(order).
    Default samples lie on a circle outside every zero of t and outside mu,
    where the square Vandermonde system is a discrete Fourier transform.
    """
    if not 1 <= site <= model.n:
        raise IndexError("site out of range")
    t_poly = monodromy(model, point).trace()
    left = partial_monodromy(model, point, site - 1, 1)
    right = partial_monodromy(model, point, model.n, site)
    if lam_samples is None:
        radius = 2.0 * max(_cauchy_radius(t_poly), abs(mu) + 1.0)
        m = max(64, 2 * order + 8)
        lam_samples = radius * np.exp(2j * np.pi * np.arange(m) / m)
    lam_samples = np.asarray(lam_samples, dtype=complex)
    if lam_samples.size < order + 2:
        raise ValueError("need at least order + 2 samples")
    vals = []
    for lam in lam_samples:
        if abs(lam - mu) < 1e-10:
            raise ValueError("sample coincides with mu")
        t = t_poly.eval(lam)
        if abs(t) < 1e-12:
            raise ValueError("sample hits a zero of the transfer function")
        vals.append(left.eval(lam) @ right.eval(lam) / (t * (lam - mu)))
    vals = np.array(vals)
    k = lam_samples.size
    powers = np.arange(1, k + 1)
    scale = float(np.mean(np.abs(lam_samples)))
    # columns in the scaled variable scale/lam keep the system well conditioned
    vander = (scale / lam_samples)[:, None] ** powers[None, :]
    if np.linalg.cond(vander) > 1e12:
        raise ValueError("Vandermonde system is singular; spread the samples")
    coef, *_ = np.linalg.lstsq(vander, vals.reshape(k, -1), rcond=None)
    coef = coef * (scale ** powers)[:, None]
    return coef[:order].reshape(order, 2, 2)
