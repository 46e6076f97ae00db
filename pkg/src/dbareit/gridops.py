"""Shared grid utilities: FFT convolution on uniform grids and quadrature weights.

The D-bar pipeline repeatedly convolves compactly supported grid fields with
singular kernels (1/(pi z), 1/(pi zbar), 1/(pi k), Cauchy-type variants).  All
of these are aperiodic convolutions evaluated exactly by circular embedding on
a grid of twice the side length, so no wrap-around contaminates the result.
"""

from __future__ import annotations

import numpy as np
from scipy import fft as sfft


class GridConvolver:
    """Aperiodic convolution  (K * f)(x_i) = h^2 sum_j K(x_i - x_j) f(x_j).

    The kernel is sampled on the lattice of pairwise grid offsets and embedded
    in a (2n x 2n) circular grid; fields of size (n x n) are zero padded.  The
    kernel FFT is cached, so repeated applications inside iterative solvers
    cost two FFTs each.

    Parameters
    ----------
    kernel : callable
        Maps an array of complex offsets to kernel values.  The value at the
        zero offset is replaced by ``origin_value`` (odd singular kernels have
        vanishing cell average).
    n : int
        Field side length.
    step : float
        Grid spacing h.
    """

    def __init__(self, kernel, n: int, step: float, origin_value: complex = 0.0):
        m = 2 * n
        offs = np.arange(m)
        offs = np.where(offs < n, offs, offs - m)
        wx, wy = np.meshgrid(offs * step, offs * step)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.asarray(kernel(wx + 1j * wy), dtype=complex)
        vals[0, 0] = origin_value
        self.n = n
        self.m = m
        self.step = step
        self._kernel_hat = sfft.fft2(vals)

    def __call__(self, f: np.ndarray) -> np.ndarray:
        fp = np.zeros((self.m, self.m), dtype=complex)
        fp[: self.n, : self.n] = f
        out = sfft.ifft2(self._kernel_hat * sfft.fft2(fp))
        return out[: self.n, : self.n] * self.step**2


def cauchy_convolver(n: int, step: float) -> GridConvolver:
    """Convolver with 1/(pi z), the inverse of d/dzbar."""
    return GridConvolver(lambda w: 1.0 / (np.pi * w), n, step)


def conj_cauchy_convolver(n: int, step: float) -> GridConvolver:
    """Convolver with 1/(pi zbar), the inverse of d/dz."""
    return GridConvolver(lambda w: 1.0 / (np.pi * np.conj(w)), n, step)


def simpson_weights(n: int, step: float) -> np.ndarray:
    """Composite Simpson weights for n equispaced samples of an open interval.

    For even n the last interval is handled by the trapezoidal rule, keeping
    the weights deterministic and the rule exact for cubics elsewhere.
    """
    if n < 2:
        raise ValueError("need at least two samples")
    w = np.zeros(n)
    if n == 2:
        return np.full(2, step / 2)
    m = n if n % 2 == 1 else n - 1
    w[0:m] = 2.0
    w[1:m:2] = 4.0
    w[0] = 1.0
    w[m - 1] = 1.0
    w[0:m] *= step / 3.0
    if n % 2 == 0:
        w[-2] += step / 2.0
        w[-1] += step / 2.0
    return w


def periodic_simpson_weights(n: int, step: float) -> np.ndarray:
    """Simpson weights on a closed (periodic) curve sampled at n points, n even."""
    if n % 2 != 0:
        raise ValueError("periodic Simpson rule needs an even sample count")
    w = np.where(np.arange(n) % 2 == 0, 2.0, 4.0)
    return w * step / 3.0


def disc_average_weights(kgrid_mask: np.ndarray, step: float) -> np.ndarray:
    """Product-Simpson weights restricted to a masked disc, for k-plane averages."""
    n = kgrid_mask.shape[0]
    w1 = simpson_weights(n, step)
    w2 = np.outer(w1, w1)
    return np.where(kgrid_mask, w2, 0.0)


def bilinear_at_origin(field: np.ndarray) -> complex:
    """Value at the exact center of a half-offset grid: mean of the 4 middle cells."""
    c = field.shape[0] // 2
    return 0.25 * (field[c - 1, c - 1] + field[c - 1, c] + field[c, c - 1] + field[c, c])
