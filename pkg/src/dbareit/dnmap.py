"""Discrete Neumann-to-Dirichlet and Dirichlet-to-Neumann maps.

The measured frames are condensed into the (L-1) x (L-1) matrix

    R(m, n) = (gamma0 / |e|) sum_l t^m_l v^n_l,

where t^j = T^j / ||T^j||_2 are the normalized current patterns and
v^j = V^j / ||T^j||_2 the correspondingly scaled, zero-mean voltages.  With
the default effective electrode area |e| = gamma0 * L / perimeter (model
frame) this is the Riemann-sum Galerkin matrix of the ND operator in the
L2-orthonormal trigonometric basis, which is the scale the boundary integral
equations require: for the homogeneous unit disc R approaches
diag(rho / (|n| gamma0)).  Pass an explicit electrode area (length x height)
to reproduce hardware-convention scalings instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forward import AdmittivityField, CurrentFrame, VoltageFrame, simulate_frames
from .geometry import MODEL_PERIMETER, Domain, ElectrodeLayout
from .mesh import TriMesh


class DNMapError(RuntimeError):
    pass


@dataclass(frozen=True)
class DNMap:
    """Matrix form of the ND or DN map in the normalized trig-pattern basis."""

    matrix: np.ndarray
    form: str  # 'nd' | 'dn'
    gamma0: float
    electrode_area: float

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def default_electrode_area(count: int, gamma0: float = 1.0) -> float:
    """Effective |e| making R the model-frame ND matrix: gamma0 * L / (2 pi)."""
    return gamma0 * count / MODEL_PERIMETER


def build_nd(currents: list[CurrentFrame], voltages: list[VoltageFrame],
             electrode_area: float | None = None, gamma0: float = 1.0) -> DNMap:
    """Assemble the ND matrix from measured frames.

    currents must be linearly independent; voltages are re-centered to zero
    mean before scaling.
    """
    T = np.stack([f.values for f in currents], axis=1)  # (L, L-1)
    V = np.stack([f.values for f in voltages], axis=1)
    if T.shape != V.shape:
        raise DNMapError("current/voltage frame shapes differ")
    if np.linalg.matrix_rank(T) < T.shape[1]:
        raise DNMapError("current patterns are rank deficient")
    norms = np.linalg.norm(T, axis=0)
    t = T / norms
    v = (V - V.mean(axis=0, keepdims=True)) / norms
    if electrode_area is None:
        electrode_area = default_electrode_area(T.shape[0], gamma0)
    R = (gamma0 / electrode_area) * (t.T @ v)
    return DNMap(matrix=R, form="nd", gamma0=gamma0, electrode_area=electrode_area)


def invert_to_dn(ndmap: DNMap) -> DNMap:
    """DN = ND^{-1} on the zero-mean pattern space."""
    if ndmap.form != "nd":
        raise DNMapError("expected an ND map")
    cond = np.linalg.cond(ndmap.matrix)
    if not np.isfinite(cond) or cond > 1e14:
        raise DNMapError("ND matrix is numerically singular")
    inv = np.linalg.inv(ndmap.matrix)
    return DNMap(matrix=inv, form="dn", gamma0=ndmap.gamma0,
                 electrode_area=ndmap.electrode_area)


def reference_dn(mesh: TriMesh, layout: ElectrodeLayout, gamma0: float = 1.0,
                 currents: list[CurrentFrame] | None = None,
                 electrode_area: float | None = None) -> DNMap:
    """DN map of the constant admittivity gamma0 on the same mesh and layout.

    Computed numerically rather than analytically so that differencing against
    the measured map cancels the shared discretization error.  The pattern
    amplitude cancels in the normalization, so the default unit-amplitude trig
    patterns give the same map as the measurement patterns.
    """
    from .forward import trig_patterns

    if currents is None:
        currents = trig_patterns(layout.count, 1.0)
    field = AdmittivityField(
        values=np.full(len(mesh.triangles), complex(gamma0)),
        representation="triangles")
    volts = simulate_frames(mesh, layout, field, currents)
    nd = build_nd(currents, volts, electrode_area=electrode_area, gamma0=gamma0)
    return invert_to_dn(nd)
