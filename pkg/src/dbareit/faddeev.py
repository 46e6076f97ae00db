"""Faddeev Green's function for the Laplacian.

G_k(z) = e^{ikz} g_k(z) with g_k the inverse Fourier transform of
1 / (xi (conj(xi) + 2k)), normalized so that Laplacian(G_k) = -delta.  Two
identities reduce evaluation to a single special function:

* scaling: g_k(z) = g_1(kz), hence G_k(z) = e^{ikz} g_1(kz);
* closed form: G_k(z) = (1/2 pi) Re E_1(-i k z), with E_1 the principal
  branch exponential integral.

The closed form follows from the exact relation
d/dzbar g_1 = -(1/4 pi) e^{-i(z + zbar)} / zbar, whose exponential-integral
antiderivative pairs with its holomorphic mirror so that the branch cuts
cancel; decay at infinity fixes the remaining constant.  It matches direct
quadrature of the defining integral to machine precision (see the tests).
"""

from __future__ import annotations

import numpy as np
from scipy.special import exp1

EULER_GAMMA = 0.5772156649015329


def faddeev_g(z, k):
    """G_k(z), vectorized over z.  Real valued; log singularity at z = 0."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValueError("G_k has a logarithmic singularity at z = 0")
    if k == 0:
        raise ValueError("k = 0 is excluded (the defining integral degenerates)")
    out = np.real(exp1(-1j * k * z)) / (2.0 * np.pi)
    return out if out.ndim else float(out)


def faddeev_g_smooth_origin(k) -> float:
    """Limit of G_k(z) + log|z| / (2 pi) as z -> 0.

    Used to correct quadrature weights where a boundary kernel hits its own
    node: near zero G_k(z) = -(log|kz| + euler_gamma)/(2 pi) + O(z log z).
    """
    return -(EULER_GAMMA + np.log(abs(k))) / (2.0 * np.pi)


def faddeev_mu(z, k):
    """g_k(z) = e^{-ikz} G_k(z), the Faddeev fundamental solution itself."""
    return np.exp(-1j * np.asarray(k) * np.asarray(z, dtype=complex)) * faddeev_g(z, k)
