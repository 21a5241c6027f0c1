"""Dense matrix helpers and Laurent arithmetic in the spectral parameter.

Kronecker convention: for d x d matrices ``A`` and ``B`` the product
``A (x) B`` has entry ``A[i, j] * B[k, l]`` at row ``i*d + k`` and column
``j*d + l`` (numpy's ``kron``).  Every tensor-leg formula in the package
relies on this layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "unit_matrix",
    "tensor_product",
    "permutation_operator",
    "LaurentPoly",
    "LaurentMatrix",
    "LaurentSeries",
    "log_series",
    "exp_series",
]

_ZERO_TOL = 0.0  # exact zeros only; callers trim numerically if they want


def unit_matrix(dim: int, i: int, j: int) -> np.ndarray:
    """Return e_ij of size dim (1-based indices)."""
    if dim < 1 or not (1 <= i <= dim and 1 <= j <= dim):
        raise IndexError(f"e_({i},{j}) out of range for dim {dim}")
    out = np.zeros((dim, dim), dtype=complex)
    out[i - 1, j - 1] = 1.0
    return out


def tensor_product(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("tensor_product expects square matrices")
    return np.kron(a, b)


def permutation_operator(n: int) -> np.ndarray:
    """P(a (x) b) = b (x) a on C^n (x) C^n."""
    if n < 2:
        raise ValueError("permutation operator needs n >= 2")
    p = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for k in range(n):
            p[k * n + i, i * n + k] = 1.0
    return p


def _trim(min_power: int, coeffs: np.ndarray) -> tuple[int, np.ndarray]:
    # coeffs along axis 0; a slab is zero when every entry vanishes
    flat = np.abs(coeffs.reshape(coeffs.shape[0], -1)).max(axis=1) if coeffs.size else np.zeros(0)
    nz = np.nonzero(flat > _ZERO_TOL)[0]
    if nz.size == 0:
        return 0, coeffs[:0]
    lo, hi = nz[0], nz[-1]
    return min_power + int(lo), coeffs[lo : hi + 1]


class LaurentPoly:
    """Finite Laurent polynomial sum_k c_k lam^(min_power + k)."""

    __slots__ = ("min_power", "coeffs")

    def __init__(self, min_power: int, coeffs):
        c = np.array(coeffs, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite Laurent coefficient")
        mp, c = _trim(int(min_power), c)
        c.setflags(write=False)
        self.min_power = mp
        self.coeffs = c

    @classmethod
    def constant(cls, c) -> "LaurentPoly":
        return cls(0, [c])

    @classmethod
    def monomial(cls, power: int, c=1.0) -> "LaurentPoly":
        return cls(power, [c])

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    @property
    def max_power(self) -> int:
        if self.is_zero:
            raise ValueError("zero polynomial has no degree")
        return self.min_power + self.coeffs.size - 1

    def coeff(self, power: int) -> complex:
        k = power - self.min_power
        if 0 <= k < self.coeffs.size:
            return complex(self.coeffs[k])
        return 0j

    def __add__(self, other):
        other = _as_poly(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo = min(self.min_power, other.min_power)
        hi = max(self.max_power, other.max_power)
        out = np.zeros(hi - lo + 1, dtype=complex)
        out[self.min_power - lo : self.max_power - lo + 1] += self.coeffs
        out[other.min_power - lo : other.max_power - lo + 1] += other.coeffs
        return LaurentPoly(lo, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.min_power, -self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero or other.is_zero:
            return LaurentPoly(0, [])
        return LaurentPoly(self.min_power + other.min_power, np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __call__(self, lam):
        return self.eval(lam)

    def eval(self, lam):
        lam = np.asarray(lam, dtype=complex)
        if self.is_zero:
            return np.zeros_like(lam)
        if self.min_power < 0 and np.any(lam == 0):
            raise ZeroDivisionError("negative powers at lam = 0")
        # Horner in lam over the shifted polynomial, then the power prefactor
        acc = np.zeros_like(lam)
        for c in self.coeffs[::-1]:
            acc = acc * lam + c
        return acc * lam ** self.min_power

    def allclose(self, other, atol=1e-12) -> bool:
        d = self - _as_poly(other)
        return d.is_zero or float(np.max(np.abs(d.coeffs))) <= atol

    def __repr__(self):
        if self.is_zero:
            return "LaurentPoly(0)"
        terms = [f"({c:.6g})*lam^{self.min_power + k}" for k, c in enumerate(self.coeffs) if c != 0]
        return "LaurentPoly(" + " + ".join(terms) + ")"


def _as_poly(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if np.isscalar(x):
        return LaurentPoly.constant(x)
    raise TypeError(f"cannot treat {type(x).__name__} as LaurentPoly")


class LaurentMatrix:
    """Square matrix of Laurent polynomials, stored as a (K, d, d) coefficient stack."""

    __slots__ = ("min_power", "coeffs", "dim")

    def __init__(self, min_power: int, coeffs):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise ValueError("LaurentMatrix coefficients must be (K, d, d)")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite Laurent coefficient")
        self.dim = c.shape[1]
        mp, c = _trim(int(min_power), c)
        c.setflags(write=False)
        self.min_power = mp
        self.coeffs = c

    @classmethod
    def from_terms(cls, terms: dict) -> "LaurentMatrix":
        """Build from {power: matrix}."""
        if not terms:
            raise ValueError("empty term dictionary")
        lo, hi = min(terms), max(terms)
        d = np.asarray(next(iter(terms.values()))).shape[0]
        c = np.zeros((hi - lo + 1, d, d), dtype=complex)
        for p, m in terms.items():
            c[p - lo] += np.asarray(m, dtype=complex)
        return cls(lo, c)

    @classmethod
    def constant(cls, m) -> "LaurentMatrix":
        m = np.asarray(m, dtype=complex)
        return cls(0, m[None])

    @classmethod
    def identity(cls, d: int) -> "LaurentMatrix":
        return cls.constant(np.eye(d))

    @property
    def is_zero(self) -> bool:
        return self.coeffs.shape[0] == 0

    @property
    def max_power(self) -> int:
        return self.min_power + self.coeffs.shape[0] - 1

    def term(self, power: int) -> np.ndarray:
        k = power - self.min_power
        if 0 <= k < self.coeffs.shape[0]:
            return self.coeffs[k].copy()
        return np.zeros((self.dim, self.dim), dtype=complex)

    def entry(self, i: int, j: int) -> LaurentPoly:
        """Entry (i, j), 0-based."""
        if self.is_zero:
            return LaurentPoly(0, [])
        return LaurentPoly(self.min_power, self.coeffs[:, i, j])

    def trace(self) -> LaurentPoly:
        if self.is_zero:
            return LaurentPoly(0, [])
        return LaurentPoly(self.min_power, np.trace(self.coeffs, axis1=1, axis2=2))

    def __add__(self, other):
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo = min(self.min_power, other.min_power)
        hi = max(self.max_power, other.max_power)
        out = np.zeros((hi - lo + 1, self.dim, self.dim), dtype=complex)
        out[self.min_power - lo : self.max_power - lo + 1] += self.coeffs
        out[other.min_power - lo : other.max_power - lo + 1] += other.coeffs
        return LaurentMatrix(lo, out)

    def __neg__(self):
        return LaurentMatrix(self.min_power, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        if self.is_zero or other.is_zero:
            return LaurentMatrix(0, np.zeros((0, self.dim, self.dim)))
        ka, kb = self.coeffs.shape[0], other.coeffs.shape[0]
        out = np.zeros((ka + kb - 1, self.dim, self.dim), dtype=complex)
        for a in range(ka):
            out[a : a + kb] += np.einsum("ij,kjl->kil", self.coeffs[a], other.coeffs)
        return LaurentMatrix(self.min_power + other.min_power, out)

    def scale(self, c) -> "LaurentMatrix":
        return LaurentMatrix(self.min_power, self.coeffs * c)

    def __call__(self, lam):
        return self.eval(lam)

    def eval(self, lam) -> np.ndarray:
        lam = complex(lam)
        if self.is_zero:
            return np.zeros((self.dim, self.dim), dtype=complex)
        if self.min_power < 0 and lam == 0:
            raise ZeroDivisionError("negative powers at lam = 0")
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for c in self.coeffs[::-1]:
            acc = acc * lam + c
        return acc * lam ** self.min_power


@dataclass(frozen=True)
class LaurentSeries:
    """Truncated series sum_{k < order} coeffs[k] * lam^(leading_power - k)."""

    leading_power: int
    coeffs: tuple
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("truncation order must be >= 1")
        if len(self.coeffs) != self.order:
            raise ValueError("coefficient count must equal the truncation order")

    def coeff(self, power: int) -> complex:
        k = self.leading_power - power
        if k < 0:
            return 0j
        if k >= self.order:
            raise IndexError(f"lam^{power} lies beyond the truncation")
        return self.coeffs[k]

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)


def _series_log(g: np.ndarray) -> np.ndarray:
    """log of 1 + g_1 w + g_2 w^2 + ...; g[0] must be 1."""
    n = g.size
    f = np.zeros(n, dtype=complex)
    for k in range(1, n):
        acc = k * g[k]
        for j in range(1, k):
            acc -= j * f[j] * g[k - j]
        f[k] = acc / k
    return f


def _series_exp(a: np.ndarray) -> np.ndarray:
    """exp of a_1 w + a_2 w^2 + ...; a[0] is ignored (taken as 0)."""
    n = a.size
    e = np.zeros(n, dtype=complex)
    e[0] = 1.0
    for k in range(1, n):
        e[k] = sum(j * a[j] * e[k - j] for j in range(1, k + 1)) / k
    return e


def log_series(p: LaurentPoly, order: int) -> LaurentSeries:
    """Expand ln(p(lam) / (c_N lam^N)) in powers of 1/lam.

    The result has leading power 0 and ``order`` coefficients: index k is the
    coefficient of lam^(-k) (index 0 is always zero).
    """
    if order < 1:
        raise ValueError("truncation order must be >= 1")
    if p.is_zero:
        raise ValueError("log of the zero polynomial")
    top = p.coeffs[-1]
    if abs(top) == 0.0:
        raise ValueError("ambiguous dominant term")
    g = np.zeros(order, dtype=complex)
    desc = p.coeffs[::-1] / top
    m = min(order, desc.size)
    g[:m] = desc[:m]
    return LaurentSeries(0, tuple(_series_log(g)), order)


def exp_series(s: LaurentSeries) -> LaurentSeries:
    """Inverse of log_series: exp of a series with zero constant term."""
    if s.leading_power != 0 or s.coeffs[0] != 0:
        raise ValueError("exp_series expects a series in 1/lam with zero constant term")
    return LaurentSeries(0, tuple(_series_exp(s.as_array())), s.order)
