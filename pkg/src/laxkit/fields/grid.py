"""Periodic grid on [-L, L) with Fourier differentiation and trapezoid quadrature."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Grid", "random_band_limited"]


@dataclass(frozen=True)
class Grid:
    m: int
    half_length: float

    def __post_init__(self):
        if self.m < 16:
            raise ValueError("need at least 16 grid points")
        if not self.half_length > 0:
            raise ValueError("half_length must be positive")

    @property
    def h(self) -> float:
        return 2.0 * self.half_length / self.m

    @property
    def x(self) -> np.ndarray:
        return -self.half_length + self.h * np.arange(self.m)

    @property
    def wavenumbers(self) -> np.ndarray:
        k = 2 * np.pi * np.fft.fftfreq(self.m, d=self.h)
        if self.m % 2 == 0:
            k[self.m // 2] = 0.0  # drop the Nyquist mode so D stays skew
        return k

    def deriv(self, f, order: int = 1) -> np.ndarray:
        """Spectral derivative along axis 0 (extra axes are carried along)."""
        f = np.asarray(f)
        ik = (1j * self.wavenumbers) ** order
        shape = (self.m,) + (1,) * (f.ndim - 1)
        out = np.fft.ifft(ik.reshape(shape) * np.fft.fft(f, axis=0), axis=0)
        return out.real if np.isrealobj(f) else out

    def shift(self, f, frac: float) -> np.ndarray:
        """Band-limited interpolant evaluated at x + frac * h."""
        f = np.asarray(f)
        k = 2 * np.pi * np.fft.fftfreq(self.m, d=self.h)
        ph = np.exp(1j * k * frac * self.h)
        if self.m % 2 == 0:
            ph[self.m // 2] = np.cos(k[self.m // 2] * frac * self.h)  # real-symmetric Nyquist
        shape = (self.m,) + (1,) * (f.ndim - 1)
        out = np.fft.ifft(ph.reshape(shape) * np.fft.fft(f, axis=0), axis=0)
        return out.real if np.isrealobj(f) else out

    def integrate(self, f):
        """Trapezoid rule on the periodic grid (spectrally accurate)."""
        return self.h * np.sum(f, axis=0)

    def refine(self, factor: int = 2) -> "Grid":
        return Grid(self.m * factor, self.half_length)


def random_band_limited(grid: Grid, rng, kmax: int = 4, amplitude: float = 0.5, complex_=False,
                        mean: float = 0.0) -> np.ndarray:
    """Sum of the lowest ``kmax`` periodic modes with random coefficients."""
    x = grid.x
    base = np.pi / grid.half_length
    out = np.full(grid.m, mean, dtype=complex if complex_ else float)
    for n in range(1, kmax + 1):
        a, b = rng.normal(size=2) * amplitude / n
        term = a * np.cos(n * base * x) + b * np.sin(n * base * x)
        if complex_:
            c, d = rng.normal(size=2) * amplitude / n
            term = term + 1j * (c * np.cos(n * base * x) + d * np.sin(n * base * x))
        out = out + term
    return out
