"""Complete-electrode-model forward solver and measurement simulation.

Piecewise-linear finite elements for  div(gamma grad u) = 0  with electrode
shunting and contact impedances:

    u + z_l gamma du/dnu = U_l   on electrode l
    int_{e_l} gamma du/dnu ds = J_l
    gamma du/dnu = 0             on the gaps
    sum J_l = 0,  sum U_l = 0.

The weak form couples the nodal potential with the L electrode voltages; the
grounding condition is enforced with one Lagrange multiplier.  The system
matrix is complex symmetric (not Hermitian), which is what gives reciprocity
of the measured voltage matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import Domain, ElectrodeLayout, ZGrid
from .mesh import TriMesh


class ForwardError(RuntimeError):
    pass


@dataclass(frozen=True)
class AdmittivityField:
    """Complex admittivity gamma = sigma + i*omega*eps on a mesh or a z-grid.

    representation is 'triangles' (values per mesh triangle) or 'zgrid'
    (values per grid cell).  sigma must stay positive and the imaginary part
    nonnegative.
    """

    values: np.ndarray
    representation: str
    grid: ZGrid | None = None

    def __post_init__(self):
        if self.representation not in ("triangles", "zgrid"):
            raise ValueError("representation must be 'triangles' or 'zgrid'")

    def validate(self, sigma_max: float = 1e6) -> None:
        sig = self.values.real
        if np.any(sig <= 0) or np.any(sig >= sigma_max):
            raise ForwardError("conductivity must satisfy 0 < sigma < bound")
        if np.any(self.values.imag < 0):
            raise ForwardError("omega*epsilon must be nonnegative")


@dataclass(frozen=True)
class CurrentFrame:
    index: int
    values: np.ndarray  # complex current per electrode (mA)


@dataclass(frozen=True)
class VoltageFrame:
    index: int
    values: np.ndarray  # complex voltage per electrode, zero mean


def trig_patterns(count: int, amplitude: float) -> list[CurrentFrame]:
    """The L-1 trigonometric current patterns.

    Pattern j applies C*cos(j*theta_l) for j = 1..L/2 and C*sin((L/2-j)*theta_l)
    for j = L/2+1..L-1, with theta_l = 2*pi*l/L the electrode center angles.
    """
    if count % 2 != 0:
        raise ValueError("electrode count must be even")
    if amplitude <= 0:
        raise ValueError("amplitude must be positive")
    theta = 2 * np.pi * (np.arange(count) + 1) / count
    frames = []
    for j in range(1, count):
        if j <= count // 2:
            vals = amplitude * np.cos(j * theta)
        else:
            vals = amplitude * np.sin((count // 2 - j) * theta)
        vals = vals - vals.mean()  # exact Kirchhoff despite rounding
        frames.append(CurrentFrame(index=j, values=vals.astype(complex)))
    return frames


class CEMSolver:
    """Factorized complete-electrode-model system for one mesh and admittivity.

    Builds the (n + L + 1) complex symmetric sparse system once; each current
    pattern is then a single triangular solve, so the L-1 patterns share the
    factorization.
    """

    def __init__(self, mesh: TriMesh, layout: ElectrodeLayout,
                 admittivity: AdmittivityField):
        if admittivity.representation != "triangles":
            raise ForwardError("CEM solver needs per-triangle admittivity")
        admittivity.validate()
        gamma = admittivity.values
        if len(gamma) != len(mesh.triangles):
            raise ForwardError("admittivity length does not match triangle count")
        self.mesh = mesh
        self.layout = layout
        n = mesh.vertex_count
        L = layout.count

        rows, cols, vals = [], [], []

        pts = mesh.vertices
        tris = mesh.triangles
        x = pts[tris, 0]
        y = pts[tris, 1]
        b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
        c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
        area = 0.5 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
        coef = gamma / (4.0 * area)
        for i in range(3):
            for j in range(3):
                rows.append(tris[:, i])
                cols.append(tris[:, j])
                vals.append(coef * (b[:, i] * b[:, j] + c[:, i] * c[:, j]))

        # electrode boundary terms
        zc = layout.contact_impedance
        elec_len = np.zeros(L)
        for (a, bb), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
            if tag < 0:
                continue
            le = float(np.hypot(*(pts[bb] - pts[a])))
            elec_len[tag] += le
            inv_z = 1.0 / zc[tag]
            # edge mass matrix le/6 [[2,1],[1,2]] on potential dofs
            for (i, j, m) in ((a, a, 2.0), (bb, bb, 2.0), (a, bb, 1.0), (bb, a, 1.0)):
                rows.append(np.array([i]))
                cols.append(np.array([j]))
                vals.append(np.array([inv_z * le * m / 6.0]))
            # coupling to the electrode voltage dof
            for i in (a, bb):
                rows.append(np.array([i]))
                cols.append(np.array([n + tag]))
                vals.append(np.array([-inv_z * le / 2.0]))
                rows.append(np.array([n + tag]))
                cols.append(np.array([i]))
                vals.append(np.array([-inv_z * le / 2.0]))
            rows.append(np.array([n + tag]))
            cols.append(np.array([n + tag]))
            vals.append(np.array([inv_z * le]))

        # grounding: lagrange multiplier ties sum U_l = 0
        for l in range(L):
            rows.append(np.array([n + l]))
            cols.append(np.array([n + L]))
            vals.append(np.array([1.0]))
            rows.append(np.array([n + L]))
            cols.append(np.array([n + l]))
            vals.append(np.array([1.0]))

        rows = np.concatenate([np.asarray(r).ravel() for r in rows])
        cols = np.concatenate([np.asarray(ca).ravel() for ca in cols])
        vals = np.concatenate([np.asarray(v, dtype=complex).ravel() for v in vals])
        A = sp.csc_matrix((vals, (rows, cols)), shape=(n + L + 1, n + L + 1))
        self._lu = spla.splu(A)
        self._n = n
        self._L = L
        self.electrode_lengths = elec_len

    def solve(self, frame: CurrentFrame, return_potential: bool = False):
        J = np.asarray(frame.values, dtype=complex)
        if len(J) != self._L:
            raise ForwardError("current frame length mismatch")
        if np.max(np.abs(J)) == 0:
            raise ForwardError("zero current frame: singular excitation")
        if abs(J.sum()) > 1e-10 * np.max(np.abs(J)):
            raise ForwardError("currents must sum to zero")
        rhs = np.zeros(self._n + self._L + 1, dtype=complex)
        rhs[self._n:self._n + self._L] = J
        sol = self._lu.solve(rhs)
        U = sol[self._n:self._n + self._L]
        U = U - U.mean()
        volts = VoltageFrame(index=frame.index, values=U)
        if return_potential:
            return volts, sol[: self._n]
        return volts


def solve_cem(mesh: TriMesh, layout: ElectrodeLayout, admittivity: AdmittivityField,
              frame: CurrentFrame, return_potential: bool = False):
    """One-shot CEM solve; build a CEMSolver directly when running many frames."""
    return CEMSolver(mesh, layout, admittivity).solve(frame, return_potential)


def simulate_frames(mesh: TriMesh, layout: ElectrodeLayout,
                    admittivity: AdmittivityField,
                    frames: list[CurrentFrame]) -> list[VoltageFrame]:
    solver = CEMSolver(mesh, layout, admittivity)
    return [solver.solve(f) for f in frames]


def add_noise(frames: list[VoltageFrame], eta: float, seed: int) -> list[VoltageFrame]:
    """Relative Gaussian noise, one fresh N(0,1) vector per pattern.

    Re and Im parts of frame j are shifted by eta * max|Re V^j| * N^j and
    eta * max|Im V^j| * N^j with the same noise vector N^j, reproducing the
    simulated-measurement convention.  The generator is counter based and
    keyed by (seed, pattern index), so results do not depend on call order.
    """
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if eta == 0:
        return [VoltageFrame(f.index, f.values.copy()) for f in frames]
    noisy = []
    for f in frames:
        rng = np.random.Generator(np.random.Philox(key=np.array(
            [int(seed) % 2**64, f.index], dtype=np.uint64)))
        nvec = rng.standard_normal(len(f.values))
        re = f.values.real + eta * np.max(np.abs(f.values.real)) * nvec
        im = f.values.imag + eta * np.max(np.abs(f.values.imag)) * nvec
        noisy.append(VoltageFrame(f.index, re + 1j * im))
    return noisy
